//! Finite sums of complex-exponent monomials on (0,1).
//!
//! A [`MonomialSum`] is `Σ cₖ x^{aₖ}` with complex `cₖ` and `aₖ`. Calculus,
//! products and the L² pairing are exact: `⟨x^a, x^b⟩ = 1/(ā + b + 1)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{BkvgError, Result};

/// Exponents closer than this (in both components) are merged.
pub const EXPONENT_MERGE_TOL: f64 = 1e-12;

/// A merged coefficient is dropped when it is this small relative to the
/// magnitudes that were summed into it.
pub const CANCELLATION_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exponent: Complex64,
}

impl Term {
    pub fn is_constant(&self) -> bool {
        self.exponent == ZERO
    }
}

/// `Σ cₖ x^{aₖ}` in canonical form: distinct exponents sorted by real then
/// imaginary part, no zero coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MonomialSum {
    terms: Vec<Term>,
}

/// Boundary values `(f(0⁺), f(1))`; `at_zero` is `None` when `f` diverges at 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryTrace {
    pub at_zero: Option<Complex64>,
    pub at_one: Complex64,
}

impl BoundaryTrace {
    pub fn is_zero(&self) -> bool {
        self.at_zero == Some(ZERO) && self.at_one == ZERO
    }

    /// Both traces defined and at most `tol` in modulus.
    pub fn vanishes_within(&self, tol: f64) -> bool {
        self.at_zero.is_some_and(|z| z.norm() <= tol) && self.at_one.norm() <= tol
    }
}

fn cmp_exponent(a: Complex64, b: Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn close_exponents(a: Complex64, b: Complex64) -> bool {
    (a.re - b.re).abs() <= EXPONENT_MERGE_TOL && (a.im - b.im).abs() <= EXPONENT_MERGE_TOL
}

fn canonicalize(raw: impl IntoIterator<Item = Term>) -> Vec<Term> {
    // (representative exponent, weight of representative, sum, sum of |c|)
    let mut groups: Vec<(Complex64, f64, Complex64, f64)> = Vec::new();
    for t in raw {
        if t.coeff == ZERO {
            continue;
        }
        let mut exponent = t.exponent;
        if close_exponents(exponent, ZERO) {
            exponent = ZERO;
        }
        let mag = t.coeff.norm();
        match groups.iter_mut().find(|g| close_exponents(g.0, exponent)) {
            Some(g) => {
                if exponent == ZERO || (g.0 != ZERO && mag > g.1) {
                    g.0 = exponent;
                    g.1 = mag;
                }
                g.2 += t.coeff;
                g.3 += mag;
            }
            None => groups.push((exponent, mag, t.coeff, mag)),
        }
    }
    let mut terms: Vec<Term> = groups
        .into_iter()
        .filter(|g| g.2 != ZERO && g.2.norm() > CANCELLATION_TOL * g.3)
        .map(|g| Term {
            coeff: g.2,
            exponent: g.0,
        })
        .collect();
    terms.sort_by(|a, b| cmp_exponent(a.exponent, b.exponent));
    terms
}

impl MonomialSum {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: impl Into<Complex64>) -> Self {
        Self::monomial(c, ZERO)
    }

    pub fn monomial(coeff: impl Into<Complex64>, exponent: impl Into<Complex64>) -> Self {
        Self::from_terms([(coeff.into(), exponent.into())])
    }

    /// `x^a` with unit coefficient.
    pub fn power(exponent: impl Into<Complex64>) -> Self {
        Self::monomial(ONE, exponent)
    }

    pub fn x() -> Self {
        Self::power(1.0)
    }

    /// Real polynomial `Σ coeffs[k] x^k`.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| (Complex64::new(c, 0.0), Complex64::new(k as f64, 0.0))),
        )
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Complex64, Complex64)>) -> Self {
        Self {
            terms: canonicalize(
                terms
                    .into_iter()
                    .map(|(coeff, exponent)| Term { coeff, exponent }),
            ),
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for the canonical zero function.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `x^a`, zero if absent.
    pub fn coefficient_of(&self, exponent: Complex64) -> Complex64 {
        self.terms
            .iter()
            .find(|t| close_exponents(t.exponent, exponent))
            .map_or(ZERO, |t| t.coeff)
    }

    pub fn differentiate(&self) -> Self {
        Self {
            terms: canonicalize(self.terms.iter().map(|t| Term {
                coeff: t.coeff * t.exponent,
                exponent: t.exponent - ONE,
            })),
        }
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: impl Into<Complex64>) -> Self {
        let k = k.into();
        Self {
            terms: canonicalize(self.terms.iter().map(|t| Term {
                coeff: t.coeff,
                exponent: t.exponent + k,
            })),
        }
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        Self {
            terms: canonicalize(self.terms.iter().map(|t| Term {
                coeff: t.coeff * c,
                exponent: t.exponent,
            })),
        }
    }

    /// Pointwise complex conjugate `Σ c̄ₖ x^{āₖ}`.
    pub fn conj(&self) -> Self {
        Self {
            terms: canonicalize(self.terms.iter().map(|t| Term {
                coeff: t.coeff.conj(),
                exponent: t.exponent.conj(),
            })),
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        Self {
            terms: canonicalize(self.terms.iter().flat_map(|a| {
                other.terms.iter().map(move |b| Term {
                    coeff: a.coeff * b.coeff,
                    exponent: a.exponent + b.exponent,
                })
            })),
        }
    }

    /// Value at `x ∈ (0, 1]`.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let ln_x = x.ln();
        self.terms
            .iter()
            .map(|t| {
                if t.exponent == ZERO {
                    t.coeff
                } else {
                    t.coeff * (t.exponent * ln_x).exp()
                }
            })
            .sum()
    }

    pub fn boundary_trace(&self) -> BoundaryTrace {
        let finite_at_zero = self
            .terms
            .iter()
            .all(|t| t.is_constant() || t.exponent.re > 0.0);
        let at_zero = finite_at_zero.then(|| {
            self.terms
                .iter()
                .filter(|t| t.is_constant())
                .map(|t| t.coeff)
                .sum()
        });
        BoundaryTrace {
            at_zero,
            at_one: self.terms.iter().map(|t| t.coeff).sum(),
        }
    }

    /// `Σ|cₖ|`, the scale for relative zero tests.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Both boundary traces vanish up to cancellation error.
    pub fn has_zero_traces(&self) -> bool {
        self.boundary_trace()
            .vanishes_within(CANCELLATION_TOL * self.coefficient_mass())
    }

    /// Smallest real part among the exponents.
    pub fn min_real_exponent(&self) -> Option<f64> {
        self.terms.iter().map(|t| t.exponent.re).reduce(f64::min)
    }

    pub fn is_square_integrable(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.re > -0.5)
    }

    pub fn is_h1(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.is_constant() || t.exponent.re > 0.5)
    }

    /// `x⁻¹f ∈ L²`, the form domain of the Hardy multiplication operator.
    pub fn is_hardy_domain(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.re > 0.5)
    }

    fn cmp_canonical(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = cmp_exponent(a.exponent, b.exponent)
                .then(a.coeff.re.total_cmp(&b.coeff.re))
                .then(a.coeff.im.total_cmp(&b.coeff.im));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

/// `⟨f, g⟩ = ∫₀¹ conj(f) g dx`, antilinear in `f`.
///
/// The pair sum is always accumulated in the same order, so
/// `l2_inner(f, g) == conj(l2_inner(g, f))` holds bit for bit.
pub fn l2_inner(f: &MonomialSum, g: &MonomialSum) -> Result<Complex64> {
    if f.cmp_canonical(g) == Ordering::Greater {
        return l2_inner(g, f).map(|z| z.conj());
    }
    let mut acc = ZERO;
    for a in &f.terms {
        for b in &g.terms {
            let s = a.exponent.conj() + b.exponent;
            if s.re <= -1.0 {
                return Err(BkvgError::NonIntegrable(s.re));
            }
            acc += a.coeff.conj() * b.coeff / (s + ONE);
        }
    }
    Ok(acc)
}

pub fn l2_norm_sqr(f: &MonomialSum) -> Result<f64> {
    l2_inner(f, f).map(|z| z.re)
}

/// Quadratic forms evaluated on monomial sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormKind {
    L2,
    H1Semi,
    /// `⟨f′,g′⟩ − conj(f(1)−f(0))(g(1)−g(0))`, the Kreĭn–von Neumann form of `−d²`.
    KreinLaplacian,
    /// `⟨f′,g′⟩` on functions vanishing at both ends.
    FriedrichsLaplacian,
    /// `γ⟨x⁻¹f, x⁻¹g⟩`.
    HardyMultiplication(f64),
}

impl FormKind {
    pub fn name(&self) -> &'static str {
        match self {
            FormKind::L2 => "L2",
            FormKind::H1Semi => "H1Semi",
            FormKind::KreinLaplacian => "KreinLaplacian",
            FormKind::FriedrichsLaplacian => "FriedrichsLaplacian",
            FormKind::HardyMultiplication(_) => "HardyMultiplication",
        }
    }

    /// Checks membership of `f` in the form domain; `label` names the argument.
    pub fn check_domain(&self, f: &MonomialSum, label: &str) -> Result<()> {
        let fail = |test: &str| {
            Err(BkvgError::DomainViolation(format!(
                "{label} fails {test} (exponents {})",
                exponent_list(f)
            )))
        };
        match self {
            FormKind::L2 => {
                if !f.is_square_integrable() {
                    return fail("L2 membership: Re(a) > -1/2");
                }
            }
            FormKind::H1Semi | FormKind::KreinLaplacian => {
                if !f.is_h1() {
                    return fail("H1 membership: Re(a) > 1/2 or constant");
                }
            }
            FormKind::FriedrichsLaplacian => {
                if !f.is_h1() {
                    return fail("H1 membership: Re(a) > 1/2 or constant");
                }
                if !f.has_zero_traces() {
                    return fail("zero boundary traces");
                }
            }
            FormKind::HardyMultiplication(_) => {
                if !f.is_hardy_domain() {
                    return fail("Hardy form domain: Re(a) > 1/2");
                }
            }
        }
        Ok(())
    }
}

fn exponent_list(f: &MonomialSum) -> String {
    let parts: Vec<String> = f
        .terms
        .iter()
        .map(|t| format!("{}{:+}i", t.exponent.re, t.exponent.im))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn trace_jump(f: &MonomialSum) -> Complex64 {
    let tr = f.boundary_trace();
    tr.at_one - tr.at_zero.unwrap_or(ZERO)
}

/// Sesquilinear form value `s(f, g)`, antilinear in `f`.
pub fn form_value(kind: FormKind, f: &MonomialSum, g: &MonomialSum) -> Result<Complex64> {
    kind.check_domain(f, "f")?;
    kind.check_domain(g, "g")?;
    match kind {
        FormKind::L2 => l2_inner(f, g),
        FormKind::H1Semi | FormKind::FriedrichsLaplacian => {
            l2_inner(&f.differentiate(), &g.differentiate())
        }
        FormKind::KreinLaplacian => {
            let grad = l2_inner(&f.differentiate(), &g.differentiate())?;
            Ok(grad - trace_jump(f).conj() * trace_jump(g))
        }
        FormKind::HardyMultiplication(gamma) => {
            Ok(l2_inner(&f.shift(-1.0), &g.shift(-1.0))? * gamma)
        }
    }
}

impl fmt::Display for MonomialSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(
                f,
                "({}{:+}i)·x^({}{:+}i)",
                t.coeff.re, t.coeff.im, t.exponent.re, t.exponent.im
            )?;
        }
        Ok(())
    }
}

impl Add for &MonomialSum {
    type Output = MonomialSum;
    fn add(self, rhs: &MonomialSum) -> MonomialSum {
        MonomialSum {
            terms: canonicalize(self.terms.iter().chain(&rhs.terms).copied()),
        }
    }
}

impl Add for MonomialSum {
    type Output = MonomialSum;
    fn add(self, rhs: MonomialSum) -> MonomialSum {
        &self + &rhs
    }
}

impl Neg for &MonomialSum {
    type Output = MonomialSum;
    fn neg(self) -> MonomialSum {
        MonomialSum {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: -t.coeff,
                    exponent: t.exponent,
                })
                .collect(),
        }
    }
}

impl Neg for MonomialSum {
    type Output = MonomialSum;
    fn neg(self) -> MonomialSum {
        -&self
    }
}

impl Sub for &MonomialSum {
    type Output = MonomialSum;
    fn sub(self, rhs: &MonomialSum) -> MonomialSum {
        self + &(-rhs)
    }
}

impl Sub for MonomialSum {
    type Output = MonomialSum;
    fn sub(self, rhs: MonomialSum) -> MonomialSum {
        &self - &rhs
    }
}

impl Mul<Complex64> for &MonomialSum {
    type Output = MonomialSum;
    fn mul(self, c: Complex64) -> MonomialSum {
        self.scale(c)
    }
}

impl Mul<Complex64> for MonomialSum {
    type Output = MonomialSum;
    fn mul(self, c: Complex64) -> MonomialSum {
        self.scale(c)
    }
}

impl Mul<f64> for &MonomialSum {
    type Output = MonomialSum;
    fn mul(self, c: f64) -> MonomialSum {
        self.scale(c)
    }
}

impl Mul<f64> for MonomialSum {
    type Output = MonomialSum;
    fn mul(self, c: f64) -> MonomialSum {
        self.scale(c)
    }
}

impl Mul for &MonomialSum {
    type Output = MonomialSum;
    fn mul(self, rhs: &MonomialSum) -> MonomialSum {
        self.product(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn omega_plus(gamma: f64) -> Complex64 {
        (ONE + (ONE + c(0.0, 4.0 * gamma)).sqrt()) / 2.0
    }

    #[test]
    fn differentiate_power_rule() {
        let w = c(1.5, 0.9);
        let d = MonomialSum::power(w).differentiate();
        assert_eq!(d.len(), 1);
        assert_eq!(d.terms()[0].coeff, w);
        assert_eq!(d.terms()[0].exponent, w - ONE);
        assert!(MonomialSum::constant(1.0).differentiate().is_zero());
        let p = MonomialSum::polynomial(&[0.0, -1.0, 3.0]).differentiate();
        assert_eq!(p, MonomialSum::polynomial(&[-1.0, 6.0]));
    }

    #[test]
    fn canonical_merge_and_cancel() {
        let a = c(1.25, 0.5);
        let s = MonomialSum::from_terms([(ONE, a), (ONE, a + c(1e-13, -1e-13)), (c(2.0, 0.0), ZERO)]);
        assert_eq!(s.len(), 2);
        assert_eq!(s.terms()[0].exponent, ZERO);
        assert_eq!(s.coefficient_of(a), c(2.0, 0.0));
        let z = &s - &s;
        assert!(z.is_zero());
        let nearly = MonomialSum::from_terms([(c(0.1, 0.0), a), (c(0.2, 0.0), a), (c(-0.3, 0.0), a)]);
        assert!(nearly.is_zero());
    }

    #[test]
    fn l2_inner_examples() {
        let x = MonomialSum::x();
        let x2 = MonomialSum::power(2.0);
        assert!((l2_inner(&x, &x2).unwrap() - c(0.25, 0.0)).norm() < 1e-16);
        let one = MonomialSum::constant(1.0);
        assert_eq!(l2_inner(&one, &one).unwrap(), ONE);
        let w = omega_plus(2.0);
        let f = MonomialSum::power(w);
        let v = l2_inner(&f, &f).unwrap();
        assert!((v.re - 1.0 / (2.0 * w.re + 1.0)).abs() < 1e-15);
        assert!(v.im.abs() < 1e-16);
    }

    #[test]
    fn l2_inner_rejects_non_integrable() {
        let f = MonomialSum::power(-0.6);
        assert!(matches!(l2_inner(&f, &f), Err(BkvgError::NonIntegrable(_))));
    }

    #[test]
    fn krein_form_examples() {
        let x = MonomialSum::x();
        assert_eq!(form_value(FormKind::KreinLaplacian, &x, &x).unwrap(), ZERO);
        let x2 = MonomialSum::power(2.0);
        let v = form_value(FormKind::KreinLaplacian, &x2, &x2).unwrap();
        assert!((v - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let w = omega_plus(2.0);
        let f = MonomialSum::power(w);
        let tau = (w - ONE).norm_sqr() / (2.0 * w.re - 1.0);
        let v = form_value(FormKind::KreinLaplacian, &f, &f).unwrap();
        assert!((v.re - tau).abs() < 1e-14 && v.im.abs() < 1e-15);
    }

    #[test]
    fn form_domain_violations_name_the_test() {
        let x2mx = MonomialSum::polynomial(&[0.0, -1.0, 1.0]);
        let x = MonomialSum::x();
        assert!(form_value(FormKind::FriedrichsLaplacian, &x2mx, &x2mx).is_ok());
        match form_value(FormKind::FriedrichsLaplacian, &x, &x2mx) {
            Err(BkvgError::DomainViolation(msg)) => assert!(msg.contains("boundary")),
            other => panic!("unexpected {other:?}"),
        }
        let half = MonomialSum::power(0.5);
        match form_value(FormKind::KreinLaplacian, &half, &half) {
            Err(BkvgError::DomainViolation(msg)) => assert!(msg.contains("H1")),
            other => panic!("unexpected {other:?}"),
        }
        let v = form_value(FormKind::HardyMultiplication(2.0), &x, &x).unwrap();
        assert_eq!(v, c(2.0, 0.0));
        assert!(form_value(FormKind::HardyMultiplication(2.0), &MonomialSum::constant(1.0), &x).is_err());
    }

    #[test]
    fn boundary_traces() {
        let w = omega_plus(1.0);
        assert!((MonomialSum::power(w).evaluate(1.0) - ONE).norm() < 1e-15);
        let t = MonomialSum::polynomial(&[0.0, -1.0, 1.0]).boundary_trace();
        assert_eq!(t.at_zero, Some(ZERO));
        assert_eq!(t.at_one, ZERO);
        let t = MonomialSum::power(ONE - w).boundary_trace();
        assert_eq!(t.at_zero, None);
        assert!((t.at_one - ONE).norm() < 1e-15);
    }

    #[test]
    fn membership_is_strict() {
        assert!(!MonomialSum::power(-0.5).is_square_integrable());
        assert!(MonomialSum::power(-0.4999).is_square_integrable());
        assert!(!MonomialSum::power(c(0.5, 1.0)).is_h1());
        assert!(MonomialSum::constant(3.0).is_h1());
        assert!(!MonomialSum::constant(3.0).is_hardy_domain());
    }

    fn arb_sum(min_re: f64) -> impl Strategy<Value = MonomialSum> {
        prop::collection::vec(
            (-1.0..1.0f64, -1.0..1.0f64, min_re..2.5f64, -2.0..2.0f64),
            1..4,
        )
        .prop_map(|v| MonomialSum::from_terms(v.into_iter().map(|(a, b, r, i)| (c(a, b), c(r, i)))))
    }

    fn arb_h1_sum() -> impl Strategy<Value = MonomialSum> {
        (arb_sum(0.51), -1.0..1.0f64, any::<bool>()).prop_map(|(s, k, with_const)| {
            if with_const {
                &s + &MonomialSum::constant(k)
            } else {
                s
            }
        })
    }

    proptest! {
        #[test]
        fn conjugate_symmetry_is_exact(f in arb_sum(-0.45), g in arb_sum(-0.45)) {
            let a = l2_inner(&f, &g).unwrap();
            let b = l2_inner(&g, &f).unwrap();
            prop_assert_eq!(a, b.conj());
        }

        #[test]
        fn krein_form_non_negative(f in arb_h1_sum()) {
            let v = form_value(FormKind::KreinLaplacian, &f, &f).unwrap();
            let scale = l2_norm_sqr(&f.differentiate()).unwrap();
            prop_assert!(v.im.abs() <= 1e-12 * (1.0 + scale));
            prop_assert!(v.re >= -1e-12 * (1.0 + scale));
        }

        #[test]
        fn krein_equals_friedrichs_on_zero_traces(f in arb_sum(0.51)) {
            let w = &f - &MonomialSum::x().scale(f.boundary_trace().at_one);
            let k = form_value(FormKind::KreinLaplacian, &w, &w).unwrap();
            let d = form_value(FormKind::FriedrichsLaplacian, &w, &w).unwrap();
            prop_assert!((k - d).norm() <= 1e-12 * (1.0 + d.norm()));
        }

        #[test]
        fn krein_annihilates_affine(a in -5.0..5.0f64, b in -5.0..5.0f64, ai in -5.0..5.0f64) {
            let eta = MonomialSum::from_terms([(c(a, ai), ZERO), (c(b, 0.0), ONE)]);
            let v = form_value(FormKind::KreinLaplacian, &eta, &eta).unwrap();
            prop_assert!(v.norm() <= 1e-13 * (1.0 + a.abs() + ai.abs() + b.abs()).powi(2));
        }

        #[test]
        fn product_matches_pointwise(f in arb_sum(-0.4), g in arb_sum(-0.4), x in 0.01..1.0f64) {
            let p = f.product(&g).evaluate(x);
            let q = f.evaluate(x) * g.evaluate(x);
            prop_assert!((p - q).norm() <= 1e-10 * (1.0 + q.norm()));
        }
    }
}
