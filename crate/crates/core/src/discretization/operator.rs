use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Mesh, MeshSpec};
use crate::error::{BkvgError, Result};
use crate::family::{Family, FamilyInstance, Sign};
use crate::tridiag::HermitianTridiagonal;

/// Angular band around `±π/2` reported as touching the imaginary axis.
pub const ANGLE_TOL: f64 = 0.02;

/// Complex tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteOperator {
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl DiscreteOperator {
    pub fn new(lower: Vec<Complex64>, diag: Vec<Complex64>, upper: Vec<Complex64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(BkvgError::InvalidMesh(format!(
                "inconsistent band lengths {}/{}/{}",
                lower.len(),
                n,
                upper.len()
            )));
        }
        Ok(Self { lower, diag, upper })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `(e^{iθ}M + (e^{iθ}M)*)/2` with its off-diagonal reduced to moduli.
    pub fn rotated_hermitian_part(&self, theta: f64) -> HermitianTridiagonal {
        let r = Complex64::from_polar(1.0, theta);
        let diag = self.diag.iter().map(|d| (r * d).re).collect();
        let off = self
            .upper
            .iter()
            .zip(&self.lower)
            .map(|(u, l)| (0.5 * (r * u + (r * l).conj())).norm())
            .collect();
        HermitianTridiagonal::new(diag, off)
    }

    pub fn hermitian_part(&self) -> HermitianTridiagonal {
        self.rotated_hermitian_part(0.0)
    }

    /// `max Re(e^{iθ}⟨ψ, Mψ⟩)` over unit vectors.
    pub fn support_value(&self, theta: f64) -> Result<f64> {
        self.rotated_hermitian_part(theta).largest_eigenvalue()
    }
}

/// Stiffness `K` of the P1 Dirichlet Laplacian and the lumped mass on the
/// interior nodes, symmetrized as `M^{-1/2} K M^{-1/2}`: returns its diagonal
/// and off-diagonal.
fn scaled_laplacian(mesh: &Mesh) -> (Vec<f64>, Vec<f64>) {
    let x = mesh.nodes();
    let n = x.len() - 2;
    let mass: Vec<f64> = (1..=n).map(|i| 0.5 * (x[i + 1] - x[i - 1])).collect();
    let diag = (1..=n)
        .map(|i| (1.0 / (x[i] - x[i - 1]) + 1.0 / (x[i + 1] - x[i])) / mass[i - 1])
        .collect();
    let off = (1..n)
        .map(|i| -1.0 / (x[i + 1] - x[i]) / (mass[i - 1] * mass[i]).sqrt())
        .collect();
    (diag, off)
}

/// Finite-difference matrix of the model operator `A_±` (resp. `C_±`) on the
/// interior nodes with zero Dirichlet data. Its Hermitian part discretizes the
/// real part `V` and the rest the `±iS` part.
pub fn discretize(inst: &FamilyInstance, sign: Sign, mesh: &MeshSpec) -> Result<DiscreteOperator> {
    let mesh = mesh.build()?;
    let (kd, ko) = scaled_laplacian(&mesh);
    let s = sign.as_f64();
    let i = Complex64::i();
    let (ck, cw) = match inst.family {
        Family::HardyImaginary => (Complex64::new(1.0, 0.0), i * (s * inst.gamma)),
        Family::HardyReal => (-i * s, Complex64::new(inst.gamma, 0.0)),
    };
    let diag = mesh
        .interior()
        .iter()
        .zip(&kd)
        .map(|(&x, &k)| ck * k + cw / (x * x))
        .collect();
    let off: Vec<Complex64> = ko.iter().map(|&k| ck * k).collect();
    DiscreteOperator::new(off.clone(), diag, off)
}

/// Smallest eigenvalue of the discrete Dirichlet Laplacian (≈ π²).
pub fn dirichlet_ground_constant(mesh: &MeshSpec) -> Result<f64> {
    let (diag, off) = scaled_laplacian(&mesh.build()?);
    HermitianTridiagonal::new(diag, off.iter().map(|o| o.abs()).collect()).smallest_eigenvalue()
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumericalRangeReport {
    /// `(θ, h(θ))` with `h(θ) = max Re(e^{iθ}z)` over the numerical range.
    pub support_samples: Vec<(f64, f64)>,
    pub arg_inf: f64,
    pub arg_sup: f64,
    pub extremal: bool,
    pub angle_tol: f64,
    /// Discrete support-function test `h(θ−Δ) + h(θ+Δ) ≥ 2cos(Δ)·h(θ)`.
    pub convex: bool,
}

/// Largest `φ ∈ [lo, hi]` with `pred(φ)` for a predicate that holds on an
/// initial segment.
fn bisect_last_true(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> f64 {
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sweeps the support function of the numerical range over `theta_steps`
/// equispaced angles in `[−π, π)` and recovers the argument bounds by
/// bisection on semidefiniteness of rotated Hermitian parts.
pub fn numerical_range_sweep(op: &DiscreteOperator, theta_steps: usize) -> Result<NumericalRangeReport> {
    if theta_steps < 8 {
        return Err(BkvgError::DomainViolation(format!("theta_steps {theta_steps} < 8")));
    }
    let thetas: Vec<f64> = (0..theta_steps)
        .map(|k| -PI + 2.0 * PI * k as f64 / theta_steps as f64)
        .collect();
    let values = thetas
        .par_iter()
        .map(|&t| op.support_value(t))
        .collect::<Result<Vec<f64>>>()?;
    let support_samples: Vec<(f64, f64)> = thetas.into_iter().zip(values).collect();

    // arg z ≤ φ on the range iff Re(e^{−i(π/2+φ)}z) ≤ 0 there; arg z ≥ φ iff
    // Re(e^{i(π/2−φ)}z) ≤ 0.
    let below = |phi: f64| op.rotated_hermitian_part(-FRAC_PI_2 - phi).is_negative_semidefinite();
    let above = |phi: f64| op.rotated_hermitian_part(FRAC_PI_2 - phi).is_negative_semidefinite();
    let (arg_sup, arg_inf) = rayon::join(
        || {
            if below(-FRAC_PI_2) {
                -FRAC_PI_2
            } else {
                -bisect_last_true(-FRAC_PI_2, FRAC_PI_2, |p| below(-p))
            }
        },
        || {
            if above(FRAC_PI_2) {
                FRAC_PI_2
            } else {
                bisect_last_true(-FRAC_PI_2, FRAC_PI_2, above)
            }
        },
    );
    let extremal = arg_sup >= FRAC_PI_2 - ANGLE_TOL || arg_inf <= -FRAC_PI_2 + ANGLE_TOL;

    let n = support_samples.len();
    let cos_step = (2.0 * PI / n as f64).cos();
    let scale = support_samples.iter().fold(0.0f64, |m, (_, h)| m.max(h.abs()));
    let convex = (0..n).all(|k| {
        let h = |j: usize| support_samples[j % n].1;
        h(k + n - 1) + h(k + 1) - 2.0 * cos_step * h(k) >= -1e-9 * scale
    });
    Ok(NumericalRangeReport {
        support_samples,
        arg_inf,
        arg_sup,
        extremal,
        angle_tol: ANGLE_TOL,
        convex,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::instantiate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_matrix_range() {
        let op = DiscreteOperator::new(vec![], vec![c(2.0, 1.0)], vec![]).unwrap();
        let r = numerical_range_sweep(&op, 16).unwrap();
        let expected = (0.5f64).atan();
        assert!((r.arg_sup - expected).abs() < 1e-12);
        assert!((r.arg_inf - expected).abs() < 1e-12);
        assert!(!r.extremal && r.convex);
        for (t, h) in &r.support_samples {
            assert!((h - (c(t.cos(), t.sin()) * c(2.0, 1.0)).re).abs() < 1e-12);
        }
        assert!(numerical_range_sweep(&op, 7).is_err());
    }

    #[test]
    fn ground_constant_is_pi_squared() {
        let a = dirichlet_ground_constant(&MeshSpec::default()).unwrap();
        assert!(((a - PI * PI) / (PI * PI)).abs() < 1e-3, "{a}");
    }

    #[test]
    fn hermitian_parts() {
        let mesh = MeshSpec::new(200, 0.85).unwrap();
        let a = instantiate(Family::HardyImaginary, 2.0).unwrap();
        let plus = discretize(&a, Sign::Plus, &mesh).unwrap().hermitian_part();
        let minus = discretize(&a, Sign::Minus, &mesh).unwrap().hermitian_part();
        assert_eq!(plus, minus);
        let (kd, ko) = scaled_laplacian(&mesh.build().unwrap());
        assert_eq!(plus.diag, kd);
        assert_eq!(plus.off_abs, ko.iter().map(|o| o.abs()).collect::<Vec<_>>());
        let cc = instantiate(Family::HardyReal, 2.0).unwrap();
        let h = discretize(&cc, Sign::Plus, &mesh).unwrap().hermitian_part();
        assert!(h.off_abs.iter().all(|o| *o == 0.0));
        let m = mesh.build().unwrap();
        for (d, x) in h.diag.iter().zip(m.interior()) {
            assert!((d - 2.0 / (x * x)).abs() <= 1e-15 * d.abs());
        }
        assert_eq!(h, discretize(&cc, Sign::Minus, &mesh).unwrap().hermitian_part());
    }

    #[test]
    fn sector_classification() {
        let mesh = MeshSpec::new(512, 0.85).unwrap();
        let a = discretize(&instantiate(Family::HardyImaginary, 2.0).unwrap(), Sign::Plus, &mesh).unwrap();
        let r = numerical_range_sweep(&a, 64).unwrap();
        assert!(!r.extremal && r.convex, "{} {}", r.arg_inf, r.arg_sup);
        assert!(r.arg_sup <= (8.0f64).atan() + 1e-9 && r.arg_inf >= -1e-9);
        let cc = discretize(&instantiate(Family::HardyReal, 2.0).unwrap(), Sign::Plus, &mesh).unwrap();
        let r = numerical_range_sweep(&cc, 64).unwrap();
        assert!(r.extremal && r.convex);
        assert!(r.arg_inf >= -FRAC_PI_2 - ANGLE_TOL && r.arg_sup <= FRAC_PI_2 + ANGLE_TOL);
    }
}
