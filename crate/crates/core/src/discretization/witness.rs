use num_complex::Complex64;

use crate::error::{BkvgError, Result};
use crate::extensions::{projection_p, ExtensionSpec};
use crate::family::{Family, FamilyInstance, Sign};
use crate::monomial::MonomialSum;
use crate::quadrature::{GaussRule, QuadratureConfig};

/// Number of cutoff refinements in a witness sequence.
pub const WITNESS_TERMS: usize = 8;

/// Smallest margin for which the non-closability witness is built.
pub const NONCLOSABILITY_MIN_MARGIN: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WitnessPoint {
    /// Cutoff sharpness.
    pub n: usize,
    pub norm: f64,
    /// `Re⟨ψ_n, A₋*ψ_n⟩`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSequence {
    pub points: Vec<WitnessPoint>,
    /// `q(v)`, the limit of the values.
    pub limit: f64,
}

impl WitnessSequence {
    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.norm).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }
}

/// `m_n(x) = (1 − (1−x)^n)(1 − x^n)` with its first two derivatives.
fn cutoff(n: usize, x: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let (y, z) = (1.0 - x, x);
    let (yn2, zn2) = (y.powi(n as i32 - 2), z.powi(n as i32 - 2));
    let (yn1, zn1) = (yn2 * y, zn2 * z);
    let a = 1.0 - yn1 * y;
    let a1 = nf * yn1;
    let a2 = -nf * (nf - 1.0) * yn2;
    let b = 1.0 - zn1 * z;
    let b1 = -nf * zn1;
    let b2 = -nf * (nf - 1.0) * zn2;
    (a * b, a1 * b + a * b1, a2 * b + 2.0 * a1 * b1 + a * b2)
}

/// `ψ_n = v − (1 − P)v·m_n`: the core element `−(1−P)v·m_n` approximates
/// `−(1−P)v` in the real-part form norm, so `Re⟨ψ_n, A₋*ψ_n⟩ → q(v)`.
fn boundary_sequence(inst: &FamilyInstance, v: &MonomialSum, n0: usize) -> Result<Vec<WitnessPoint>> {
    let h = v - &projection_p(inst, v)?;
    let v2 = v.differentiate().differentiate();
    let (h1, h2) = (h.differentiate(), h.differentiate().differentiate());
    let (p, s) = inst.maximal_coefficients(Sign::Minus);
    let hint = 2.0 * inst.omega_plus.re - 2.0;
    let config = QuadratureConfig::default().with_tolerances(1e-11, 1e-9);
    let mut points = Vec::with_capacity(WITNESS_TERMS);
    for k in 0..WITNESS_TERMS {
        let n = n0 << k;
        let psi = |x: f64| -> (Complex64, Complex64) {
            let (m, m1, m2) = cutoff(n, x);
            let hv = h.evaluate(x);
            let val = v.evaluate(x) - hv * m;
            let d2 = v2.evaluate(x) - (h2.evaluate(x) * m + h1.evaluate(x) * (2.0 * m1) + hv * m2);
            (val, p * val / (x * x) + s * d2)
        };
        let value = config
            .integrate(
                |x| {
                    let (f, af) = psi(x);
                    f.conj() * af
                },
                hint,
            )?
            .value
            .re;
        let norm = config
            .integrate(|x| Complex64::new(psi(x).0.norm_sqr(), 0.0), 2.0 * inst.omega_plus.re)?
            .value
            .re
            .sqrt();
        points.push(WitnessPoint { n, norm, value });
    }
    Ok(points)
}

fn first_cutoff(mollification: f64) -> Result<usize> {
    if !(mollification > 0.0 && mollification <= 1.0) {
        return Err(BkvgError::DomainViolation(format!(
            "mollification {mollification} outside (0, 1]"
        )));
    }
    Ok(((1.0 / mollification).ceil() as usize).max(2))
}

/// For a non-accretive rank-one extension: elements `ψ_n` of its domain
/// with `Re⟨ψ_n, A₋*ψ_n⟩ → q(v) < 0`.
pub fn negative_margin_witness(spec: &ExtensionSpec, mollification: f64) -> Result<WitnessSequence> {
    let margin = spec.margin();
    if !(margin < 0.0) {
        return Err(BkvgError::NotApplicable(format!("margin {margin:e} is not negative")));
    }
    let v = spec.domain_vector()?.expect("rank-one map");
    let points = boundary_sequence(spec.instance(), &v, first_cutoff(mollification)?)?;
    Ok(WitnessSequence {
        points,
        limit: spec.context.q_form(&v)?,
    })
}

/// For family `C` with `Re(dμ) > ν`: `g_n = v·(1 − m_n)` tends to 0 in norm
/// while the real-part form stays near `q(v) > 0`.
pub fn nonclosability_witness(spec: &ExtensionSpec, mollification: f64) -> Result<WitnessSequence> {
    if spec.instance().family != Family::HardyReal {
        return Err(BkvgError::NotApplicable("family A forms are always closable".into()));
    }
    let margin = spec.margin();
    if !(margin >= NONCLOSABILITY_MIN_MARGIN) || margin.is_infinite() {
        return Err(BkvgError::NotApplicable(format!(
            "margin {margin:e} below {NONCLOSABILITY_MIN_MARGIN}"
        )));
    }
    let v = spec.domain_vector()?.expect("rank-one map");
    let points = boundary_sequence(spec.instance(), &v, first_cutoff(mollification)?)?;
    Ok(WitnessSequence {
        points,
        limit: spec.context.q_form(&v)?,
    })
}

/// `Re⟨f_n, e^{−iε}C₊f_n⟩` for the normalized modulated bumps
/// `f_n = b(x)·e^{inπ(4x−3)}`, `b = (1 − (4x−3)²)⁴` on `[1/2, 1]`, `n = 1..=n_terms`.
pub fn kato_sector_witness(inst: &FamilyInstance, epsilon: f64, n_terms: usize) -> Result<Vec<f64>> {
    if inst.family != Family::HardyReal {
        return Err(BkvgError::WrongFamily(inst.family.name()));
    }
    if !(0.0..std::f64::consts::PI).contains(&epsilon) {
        return Err(BkvgError::DomainViolation(format!("epsilon {epsilon} outside [0, π)")));
    }
    let rule = GaussRule::new(32);
    let panels = 16;
    let composite = |f: &dyn Fn(f64) -> f64| -> f64 {
        (0..panels)
            .map(|k| {
                let a = 0.5 + 0.5 * k as f64 / panels as f64;
                let b = a + 0.5 / panels as f64;
                rule.apply(&|x| Complex64::new(f(x), 0.0), a, b).re
            })
            .sum()
    };
    let bump = |x: f64| -> (f64, f64) {
        let u = 4.0 * x - 3.0;
        let w = 1.0 - u * u;
        (w.powi(4), -32.0 * u * w.powi(3))
    };
    let norm_sqr = composite(&|x| bump(x).0.powi(2));
    let gamma = inst.gamma;
    let (sin, cos) = epsilon.sin_cos();
    Ok((1..=n_terms)
        .map(|n| {
            let k = n as f64 * std::f64::consts::PI * 4.0;
            let f = |x: f64| {
                let (b, _) = bump(x);
                Complex64::from_polar(b, n as f64 * std::f64::consts::PI * (4.0 * x - 3.0))
            };
            let df = |x: f64| {
                let (b, db) = bump(x);
                Complex64::new(db, k * b) * Complex64::from_polar(1.0, n as f64 * std::f64::consts::PI * (4.0 * x - 3.0))
            };
            let hardy = composite(&|x| gamma * f(x).norm_sqr() / (x * x));
            let grad = composite(&|x| df(x).norm_sqr());
            (cos * hardy - sin * grad) / norm_sqr
        })
        .collect())
}
