//! The two model families on L²(0,1):
//!
//! * `HardyImaginary`: `A± = ±iγ/x² − d²/dx²`,
//! * `HardyReal`: `C± = ±i d²/dx² + γ/x²`, i.e. `C± = ∓iA±`.
//!
//! Both are governed by the exponents `ω± = (1 ± √(1+4iγ))/2`, the roots
//! of `ω(ω−1) = iγ`.

mod bvp;

pub use bvp::{BvpProblem, GridFunction};

use std::fmt;

use num_complex::Complex64;

use crate::error::{BkvgError, Result};
use crate::monomial::{FormKind, MonomialSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    HardyImaginary,
    HardyReal,
}

impl Family {
    /// Single-letter name used on the command line.
    pub fn letter(self) -> &'static str {
        match self {
            Family::HardyImaginary => "A",
            Family::HardyReal => "C",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::HardyImaginary => "hardy_imaginary",
            Family::HardyReal => "hardy_real",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    OneDimKernel,
    TwoDimKernel,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::OneDimKernel => "one_dim_kernel",
            Regime::TwoDimKernel => "two_dim_kernel",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyInstance {
    pub family: Family,
    pub gamma: f64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub regime: Regime,
}

/// Bases of `ker A₋*` and `ker A₊*` (the same spaces serve the `C` family).
#[derive(Clone, Debug, PartialEq)]
pub struct KernelBasis {
    pub minus_kernel: Vec<MonomialSum>,
    pub plus_kernel: Vec<MonomialSum>,
}

/// `χ` spans the Friedrichs-domain direction that completes a maximal
/// extension in the two-dimensional regime; `companion = A₊,F χ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiVector {
    pub chi: MonomialSum,
    pub companion: MonomialSum,
}

/// Builds a family instance; `γ ≥ √3` gives a one-dimensional kernel.
pub fn instantiate(family: Family, gamma: f64) -> Result<FamilyInstance> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(BkvgError::InvalidGamma(gamma));
    }
    let root = Complex64::new(1.0, 4.0 * gamma).sqrt();
    let omega_plus = (1.0 + root) / 2.0;
    let omega_minus = (1.0 - root) / 2.0;
    let regime = if gamma < 3f64.sqrt() {
        Regime::TwoDimKernel
    } else {
        Regime::OneDimKernel
    };
    Ok(FamilyInstance {
        family,
        gamma,
        omega_plus,
        omega_minus,
        regime,
    })
}

impl FamilyInstance {
    pub fn kernel_basis(&self) -> KernelBasis {
        let mut minus_kernel = vec![MonomialSum::power(self.omega_plus)];
        let mut plus_kernel = vec![MonomialSum::power(self.omega_plus.conj())];
        if self.regime == Regime::TwoDimKernel {
            minus_kernel.push(MonomialSum::power(self.omega_minus));
            plus_kernel.push(MonomialSum::power(self.omega_minus.conj()));
        }
        KernelBasis {
            minus_kernel,
            plus_kernel,
        }
    }

    /// Exponents `ω̄ₛ` spanning `ker A₊*`.
    pub fn plus_kernel_exponents(&self) -> Vec<Complex64> {
        let mut e = vec![self.omega_plus.conj()];
        if self.regime == Regime::TwoDimKernel {
            e.push(self.omega_minus.conj());
        }
        e
    }

    /// Real-part form: Kreĭn form of `−d²` or the Hardy multiplication form.
    pub fn real_part_form(&self) -> FormKind {
        match self.family {
            Family::HardyImaginary => FormKind::KreinLaplacian,
            Family::HardyReal => FormKind::HardyMultiplication(self.gamma),
        }
    }

    /// `(p, s)` with `A_sign* f = p·x⁻²f + s·f″`.
    pub fn maximal_coefficients(&self, sign: Sign) -> (Complex64, Complex64) {
        let g = self.gamma;
        let i = Complex64::i();
        match (self.family, sign) {
            (Family::HardyImaginary, Sign::Minus) => (i * g, Complex64::new(-1.0, 0.0)),
            (Family::HardyImaginary, Sign::Plus) => (-i * g, Complex64::new(-1.0, 0.0)),
            (Family::HardyReal, Sign::Minus) => (Complex64::new(g, 0.0), i),
            (Family::HardyReal, Sign::Plus) => (Complex64::new(g, 0.0), -i),
        }
    }

    /// Formal action of the maximal operator `A₋*` (sign −) or `A₊*` (sign +).
    pub fn apply_formal_maximal(&self, sign: Sign, f: &MonomialSum) -> MonomialSum {
        let (p, s) = self.maximal_coefficients(sign);
        &f.shift(-2.0).scale(p) + &f.differentiate().differentiate().scale(s)
    }

    /// Coefficient `λ` with `A₋*(x^{a+2}) = λ·x^a + …`; equals
    /// `iγ − (a+2)(a+1)` for `A` and `γ + i(a+2)(a+1)` for `C`.
    pub fn lift_coefficient(&self, a: Complex64) -> Complex64 {
        self.apply_formal_maximal(Sign::Minus, &MonomialSum::power(a + 2.0))
            .coefficient_of(a)
    }

    /// Coordinates of `k` in the plus-kernel basis.
    pub fn plus_kernel_coordinates(&self, k: &MonomialSum) -> Result<Vec<Complex64>> {
        let exps = self.plus_kernel_exponents();
        let coords: Vec<Complex64> = exps.iter().map(|e| k.coefficient_of(*e)).collect();
        let rebuilt = MonomialSum::from_terms(coords.iter().copied().zip(exps.iter().copied()));
        if (k - &rebuilt).is_zero() {
            Ok(coords)
        } else {
            Err(BkvgError::NotInKernel)
        }
    }

    /// `A₊,F⁻¹ k` for `k ∈ ker A₊*`. `A₊,F` is the restriction of `A₋*`
    /// to the Friedrichs domain, so each basis vector `x^{ω̄ₛ}` lifts to
    /// `(x^{ω̄ₛ+2} − x^{ω₊})/λ(ω̄ₛ)`: the correction `x^{ω₊}` lies in
    /// `ker A₋*` and cancels the boundary value at 1.
    pub fn friedrichs_inverse_kernel(&self, k: &MonomialSum) -> Result<MonomialSum> {
        let coords = self.plus_kernel_coordinates(k)?;
        let mut terms = Vec::new();
        for (c, e) in coords.iter().zip(self.plus_kernel_exponents()) {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let w = c / self.lift_coefficient(e);
            terms.push((w, e + 2.0));
            terms.push((-w, self.omega_plus));
        }
        Ok(MonomialSum::from_terms(terms))
    }

    /// `χ` and `A₊,F χ`, two-dimensional regime only.
    pub fn chi_vector(&self) -> Result<ChiVector> {
        if self.regime != Regime::TwoDimKernel {
            return Err(BkvgError::WrongRegime);
        }
        let (wp, wm) = (self.omega_plus, self.omega_minus);
        let lift = |e: Complex64| {
            &MonomialSum::power(e + 2.0) - &MonomialSum::power(wp)
        };
        let chi = match self.family {
            Family::HardyImaginary => {
                &lift(wp.conj()).scale(2.0 + wm.conj() - wp)
                    + &lift(wm.conj()).scale(wp - wp.conj() - 2.0)
            }
            Family::HardyReal => {
                // Bracket-null combination of x^{ω̄₊}, x^{ω̄₋} lifted to
                // the Friedrichs domain.
                let f = MonomialSum::power(wp);
                let bp = crate::bracket::raw_bracket(self, &f, &MonomialSum::power(wp.conj()))?;
                let bm = crate::bracket::raw_bracket(self, &f, &MonomialSum::power(wm.conj()))?;
                let k = &MonomialSum::power(wp.conj()).scale(bm)
                    - &MonomialSum::power(wm.conj()).scale(bp);
                self.friedrichs_inverse_kernel(&k)?
            }
        };
        let companion = self.apply_formal_maximal(Sign::Minus, &chi);
        Ok(ChiVector { chi, companion })
    }

    /// Core, Friedrichs-lift and kernel components of the domain of `A₋*`.
    pub fn domain_decomposition(&self) -> Result<(Vec<MonomialSum>, Vec<MonomialSum>, Vec<MonomialSum>)> {
        let basis = self.kernel_basis();
        let lifts = basis
            .plus_kernel
            .iter()
            .map(|k| self.friedrichs_inverse_kernel(k))
            .collect::<Result<Vec<_>>>()?;
        let core = (0..3)
            .map(|k| MonomialSum::polynomial(&[0.0, 0.0, 0.0, 1.0, -2.0, 1.0]).shift(k as f64))
            .collect();
        Ok((core, lifts, basis.minus_kernel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

    #[test]
    fn exponents_solve_the_quadratic() {
        for g in GAMMAS {
            let inst = instantiate(Family::HardyImaginary, g).unwrap();
            for w in [inst.omega_plus, inst.omega_minus] {
                assert!((w * (w - 1.0) - Complex64::new(0.0, g)).norm() <= 1e-13);
            }
            assert!((inst.omega_plus + inst.omega_minus - 1.0).norm() <= 1e-13);
            assert!((inst.omega_plus * inst.omega_minus + Complex64::new(0.0, g)).norm() <= 1e-13);
            assert!(inst.omega_plus.re >= 1.0 && inst.omega_minus.re < 0.5);
        }
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        assert!((inst.omega_plus - Complex64::new(1.5643224222656023, 0.9395649091666413)).norm() < 1e-12);
    }

    #[test]
    fn regimes() {
        let r = |g| instantiate(Family::HardyImaginary, g).unwrap().regime;
        assert_eq!(r(2.0), Regime::OneDimKernel);
        assert_eq!(r(1.0), Regime::TwoDimKernel);
        assert_eq!(r(3f64.sqrt()), Regime::OneDimKernel);
        for g in [0.1, 1.0, 1.7, 1.75, 3.0] {
            let inst = instantiate(Family::HardyReal, g).unwrap();
            assert_eq!(inst.regime == Regime::OneDimKernel, inst.omega_minus.re <= -0.5);
        }
        assert!(matches!(instantiate(Family::HardyReal, 0.0), Err(BkvgError::InvalidGamma(_))));
        assert!(instantiate(Family::HardyReal, f64::NAN).is_err());
    }

    #[test]
    fn kernels_are_annihilated_exactly() {
        for family in [Family::HardyImaginary, Family::HardyReal] {
            for g in GAMMAS {
                let inst = instantiate(family, g).unwrap();
                let basis = inst.kernel_basis();
                let dim = if g < 3f64.sqrt() { 2 } else { 1 };
                assert_eq!(basis.minus_kernel.len(), dim);
                for k in &basis.minus_kernel {
                    assert!(inst.apply_formal_maximal(Sign::Minus, k).is_zero());
                    assert!(k.is_square_integrable());
                }
                for k in &basis.plus_kernel {
                    assert!(inst.apply_formal_maximal(Sign::Plus, k).is_zero());
                }
                let wb = inst.omega_plus.conj();
                assert!(!inst.apply_formal_maximal(Sign::Minus, &MonomialSum::power(wb)).is_zero());
            }
        }
    }

    #[test]
    fn plus_operator_on_shifted_kernel_exponent() {
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        let wb = inst.omega_plus.conj();
        let got = inst.apply_formal_maximal(Sign::Plus, &MonomialSum::power(wb + 2.0));
        let expected = Complex64::new(0.0, -2.0) - (wb + 2.0) * (wb + 1.0);
        assert_eq!(got.len(), 1);
        assert!((got.coefficient_of(wb) - expected).norm() < 1e-13);
    }

    #[test]
    fn friedrichs_inverse_lifts_kernel() {
        for family in [Family::HardyImaginary, Family::HardyReal] {
            for g in GAMMAS {
                let inst = instantiate(family, g).unwrap();
                for k in inst.kernel_basis().plus_kernel {
                    let u = inst.friedrichs_inverse_kernel(&k).unwrap();
                    let back = inst.apply_formal_maximal(Sign::Minus, &u);
                    assert!((&back - &k).is_zero(), "{back} vs {k}");
                    assert!(u.has_zero_traces());
                    assert!(u.is_h1());
                    assert!(inst.real_part_form().check_domain(&u, "u").is_ok());
                }
                assert!(inst.friedrichs_inverse_kernel(&MonomialSum::zero()).unwrap().is_zero());
                assert_eq!(
                    inst.friedrichs_inverse_kernel(&MonomialSum::x()),
                    Err(BkvgError::NotInKernel)
                );
            }
        }
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        let wb = inst.omega_plus.conj();
        let u = inst.friedrichs_inverse_kernel(&MonomialSum::power(wb)).unwrap();
        let c = 1.0 / (Complex64::new(0.0, 2.0) - (wb + 2.0) * (wb + 1.0));
        assert!((u.coefficient_of(wb + 2.0) - c).norm() < 1e-15);
        let inst = instantiate(Family::HardyReal, 2.0).unwrap();
        let u = inst.friedrichs_inverse_kernel(&MonomialSum::power(wb)).unwrap();
        let c = 1.0 / (2.0 + Complex64::i() * (wb + 2.0) * (wb + 1.0));
        assert!((u.coefficient_of(wb + 2.0) - c).norm() < 1e-15);
    }

    #[test]
    fn chi_vector_regimes() {
        let inst = instantiate(Family::HardyImaginary, 1.0).unwrap();
        let chi = inst.chi_vector().unwrap();
        assert!(chi.chi.has_zero_traces());
        assert!(inst.plus_kernel_coordinates(&chi.companion).is_ok());
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        assert_eq!(inst.chi_vector(), Err(BkvgError::WrongRegime));
    }
}
