//! Proper maximally accretive extensions `A_D` of the model families,
//! parametrized by an auxiliary map `D: x^{ω₊} ↦ d·x^{ω̄₊}`.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::Rng;

use crate::bracket::{raw_bracket, BracketContext, Certified, CertStatus};
use crate::discretization::{dirichlet_ground_constant, MeshSpec};
use crate::error::{BkvgError, Result};
use crate::family::{BvpProblem, Family, FamilyInstance, Regime, Sign};
use crate::monomial::{form_value, l2_norm_sqr, MonomialSum};
use crate::quadrature::integrate;

/// Band on `|margin|` treated as the closability equality for family `C`.
pub const CLOSABILITY_TOL: f64 = 1e-9;

/// Margins in `[−ACCRETIVITY_TOL, 0)` count as the boundary `margin = 0`,
/// so that a boundary `d` written out in decimal is still recognized.
pub const ACCRETIVITY_TOL: f64 = 1e-9;

/// Relative tolerance for the Dirichlet ground constant against `π²`.
pub const GROUND_CONSTANT_TOL: f64 = 1e-3;

/// Auxiliary map in normal form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AuxiliaryMap {
    /// `D(D) = {0}`: the Friedrichs extension.
    Friedrichs,
    /// `D x^{ω₊} = d·x^{ω̄₊}`.
    RankOne { d: Complex64 },
}

impl AuxiliaryMap {
    pub fn domain_dim(&self) -> usize {
        match self {
            AuxiliaryMap::Friedrichs => 0,
            AuxiliaryMap::RankOne { .. } => 1,
        }
    }

    pub fn d(&self) -> Option<Complex64> {
        match self {
            AuxiliaryMap::Friedrichs => None,
            AuxiliaryMap::RankOne { d } => Some(*d),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSpec {
    pub context: BracketContext,
    pub map: AuxiliaryMap,
}

impl ExtensionSpec {
    pub fn friedrichs(context: BracketContext) -> Self {
        Self {
            context,
            map: AuxiliaryMap::Friedrichs,
        }
    }

    pub fn rank_one(context: BracketContext, d: Complex64) -> Self {
        Self {
            context,
            map: AuxiliaryMap::RankOne { d },
        }
    }

    /// Parameter `d` with `Re(d·σ) − τ = margin` (resp. `μ`, `ν`) and
    /// `Im(d·σ) = phase_part`.
    pub fn with_margin(context: BracketContext, margin: f64, phase_part: f64) -> Self {
        let target = Complex64::new(context.self_energy.value + margin, phase_part);
        let d = target / context.coupling.value;
        Self::rank_one(context, d)
    }

    /// Reduces `D x^{ω₊} = a·x^{ω̄₊} + b·x^{ω̄₋}` to normal form: the part of
    /// the image along the bracket-orthogonal companion already lies in the
    /// domain, so only `[x^{ω₊}, D x^{ω₊}]` matters.
    pub fn from_images(context: BracketContext, a: Complex64, b: Complex64) -> Result<Self> {
        if b == Complex64::new(0.0, 0.0) {
            return Ok(Self::rank_one(context, a));
        }
        let inst = &context.instance;
        if inst.regime != Regime::TwoDimKernel {
            return Err(BkvgError::NotApplicable(
                "x^{ω̄₋} is not square-integrable in the one-dimensional kernel regime".into(),
            ));
        }
        let kp = MonomialSum::power(inst.omega_plus);
        let b_minus = raw_bracket(inst, &kp, &MonomialSum::power(inst.omega_minus.conj()))?;
        let d = a + b * b_minus / context.coupling.value;
        Ok(Self::rank_one(context, d))
    }

    pub fn instance(&self) -> &FamilyInstance {
        &self.context.instance
    }

    pub fn domain_dim(&self) -> usize {
        self.map.domain_dim()
    }

    /// `Re(d·σ) − τ` (resp. `μ`, `ν`); `+∞` for the Friedrichs extension.
    pub fn margin(&self) -> f64 {
        match self.map {
            AuxiliaryMap::Friedrichs => f64::INFINITY,
            AuxiliaryMap::RankOne { d } => {
                (d * self.context.coupling.value).re - self.context.self_energy.value
            }
        }
    }

    /// `A₊,F⁻¹(d·x^{ω̄₊}) + x^{ω₊}`.
    pub fn domain_vector(&self) -> Result<Option<MonomialSum>> {
        match self.map {
            AuxiliaryMap::Friedrichs => Ok(None),
            AuxiliaryMap::RankOne { d } => self.context.extension_vector(d).map(Some),
        }
    }

    /// Friedrichs lifts of the kernel vectors in `𝔑`: the whole kernel for
    /// the Friedrichs extension, the companion `χ` (two-dimensional regime)
    /// or nothing for a rank-one map.
    pub fn friedrichs_directions(&self) -> Result<Vec<MonomialSum>> {
        let inst = self.instance();
        match self.map {
            AuxiliaryMap::Friedrichs => inst
                .kernel_basis()
                .plus_kernel
                .iter()
                .map(|k| inst.friedrichs_inverse_kernel(k))
                .collect(),
            AuxiliaryMap::RankOne { .. } => match inst.regime {
                Regime::TwoDimKernel => Ok(vec![inst.chi_vector()?.chi]),
                Regime::OneDimKernel => Ok(Vec::new()),
            },
        }
    }

    pub(crate) fn require_certified(&self) -> Result<()> {
        if self.context.flagged {
            return Err(BkvgError::UncertifiedConstants(self.context.notes.join("; ")));
        }
        Ok(())
    }

    pub(crate) fn require_accretive(&self) -> Result<()> {
        let m = self.margin();
        if m < -ACCRETIVITY_TOL {
            return Err(BkvgError::NotAccretive(m));
        }
        Ok(())
    }

    pub(crate) fn require_closable(&self) -> Result<()> {
        self.require_accretive()?;
        let (closable, _) = is_closable(self)?;
        if !closable {
            return Err(BkvgError::NotClosable(self.margin()));
        }
        Ok(())
    }
}

/// Dense Hermitian matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    pub order: usize,
    pub entries: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn empty() -> Self {
        Self {
            order: 0,
            entries: Vec::new(),
        }
    }

    pub fn scalar(b: f64) -> Self {
        Self {
            order: 1,
            entries: vec![Complex64::new(b, 0.0)],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.order + j]
    }

    /// Eigenvalues in ascending order (orders 0, 1 and 2 only occur here).
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.order {
            0 => Vec::new(),
            1 => vec![self.entries[0].re],
            2 => {
                let (a, d) = (self.get(0, 0).re, self.get(1, 1).re);
                let r = (0.25 * (a - d) * (a - d) + self.get(0, 1).norm_sqr()).sqrt();
                vec![0.5 * (a + d) - r, 0.5 * (a + d) + r]
            }
            n => unimplemented!("eigenvalues of order {n}"),
        }
    }
}

/// Lower bound of the real part in terms of `α = π²` and `δ = b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub alpha: Certified<f64>,
    pub delta: f64,
    /// `[αδ/(1+δ), αδ]`, the interval as usually quoted for this example.
    pub stated: (f64, f64),
    /// `[αδ/(α+δ), min(α, δ)]`, which always contains the infimum.
    pub valid: (f64, f64),
}

impl Sandwich {
    pub fn new(alpha: Certified<f64>, delta: f64) -> Self {
        let a = alpha.value;
        if delta == 0.0 {
            return Self {
                alpha,
                delta,
                stated: (0.0, 0.0),
                valid: (0.0, 0.0),
            };
        }
        Self {
            alpha,
            delta,
            stated: (a * delta / (1.0 + delta), a * delta),
            valid: (a * delta / (a + delta), a.min(delta)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AccretivityReport {
    pub sigma_or_mu: Certified<Complex64>,
    pub tau_or_nu: Certified<f64>,
    pub margin: f64,
    pub accretive: bool,
    pub closable: Option<bool>,
    pub closable_reason: Option<String>,
    pub b_matrix: Option<HermitianMatrix>,
    pub lower_bound: Option<Sandwich>,
    pub notes: Vec<String>,
}

/// Accretivity margin plus everything that follows from it.
pub fn is_accretive(spec: &ExtensionSpec) -> Result<AccretivityReport> {
    spec.require_certified()?;
    let margin = spec.margin();
    let accretive = margin >= -ACCRETIVITY_TOL;
    let mut notes = Vec::new();
    let (mut closable, mut closable_reason, mut b, mut lower_bound) = (None, None, None, None);
    if accretive {
        let (c, reason) = is_closable(spec)?;
        closable = Some(c);
        closable_reason = Some(reason);
        if c {
            b = Some(b_matrix(spec)?);
            if spec.instance().family == Family::HardyImaginary && spec.domain_dim() == 1 {
                lower_bound = Some(lower_bound_sandwich(spec)?);
            }
        }
    } else {
        notes.push(format!("margin {margin:e} < 0: the extension is not accretive"));
    }
    if spec.instance().regime == Regime::TwoDimKernel && spec.domain_dim() == 1 {
        notes.push("companion direction χ is included in the domain".into());
    }
    Ok(AccretivityReport {
        sigma_or_mu: spec.context.coupling,
        tau_or_nu: spec.context.self_energy,
        margin,
        accretive,
        closable,
        closable_reason,
        b_matrix: b,
        lower_bound,
        notes,
    })
}

/// Whether the real-part form `re_{D,0}` is closable, with the reason.
pub fn is_closable(spec: &ExtensionSpec) -> Result<(bool, String)> {
    spec.require_accretive()?;
    if spec.domain_dim() == 0 {
        return Ok((true, "Friedrichs extension: the real part is the Friedrichs form".into()));
    }
    match spec.instance().family {
        Family::HardyImaginary => Ok((
            true,
            "D(D) ∩ D(V_F^{1/2}) = {0}: x^{ω₊} has a nonzero trace at 1".into(),
        )),
        Family::HardyReal => {
            let m = spec.margin();
            if m.abs() <= CLOSABILITY_TOL {
                Ok((true, format!("q vanishes on D(D): |margin| ≤ {CLOSABILITY_TOL:e}")))
            } else {
                Ok((false, format!("q(v) = {m:e} ≠ 0 on D(D) ⊂ D(V_F^{{1/2}})")))
            }
        }
    }
}

/// The projection onto `ker V*` along `D(V_F^{1/2})`.
pub fn projection_p(inst: &FamilyInstance, f: &MonomialSum) -> Result<MonomialSum> {
    let kind = inst.real_part_form();
    kind.check_domain(f, "f")?;
    match inst.family {
        Family::HardyReal => Ok(MonomialSum::zero()),
        Family::HardyImaginary => {
            let trace = f.boundary_trace();
            let f0 = trace
                .at_zero
                .ok_or_else(|| BkvgError::DomainViolation("f has no trace at 0".into()))?;
            let f1 = trace.at_one;
            let one = MonomialSum::constant(1.0);
            let x = MonomialSum::x();
            Ok(&(&one - &x).scale(f0) + &x.scale(f1))
        }
    }
}

/// Matrix of `B` on `P·D(D)` in an orthonormal basis.
pub fn b_matrix(spec: &ExtensionSpec) -> Result<HermitianMatrix> {
    spec.require_closable()?;
    let inst = spec.instance();
    let d = match (inst.family, spec.map) {
        (Family::HardyImaginary, AuxiliaryMap::RankOne { d }) => d,
        _ => return Ok(HermitianMatrix::empty()),
    };
    // P x^{ω₊} = x, so P⁻¹(√3·x) = √3·x^{ω₊}.
    let k = MonomialSum::power(inst.omega_plus).scale(Complex64::new(3f64.sqrt(), 0.0));
    let dk = MonomialSum::power(inst.omega_plus.conj()).scale(d * 3f64.sqrt());
    let kd = raw_bracket(inst, &k, &dk)?;
    let b = 0.5 * (kd + kd.conj()) - form_value(spec.context.krein_kind, &k, &k)?;
    Ok(HermitianMatrix::scalar(b.re))
}

/// Domain data of the real part `V_D`.
#[derive(Clone, Debug, PartialEq)]
pub struct VdDescription {
    pub form_domain_vectors: Vec<MonomialSum>,
    pub operator_domain_vectors: Vec<MonomialSum>,
    pub b: HermitianMatrix,
    pub warnings: Vec<String>,
}

/// `V_F⁻¹` of the polynomial `Σ c_k x^k` for family `A`:
/// `−u″ = x^k` with zero Dirichlet data gives `(x − x^{k+2})/((k+1)(k+2))`.
pub fn real_part_inverse_polynomial(coefficients: &[f64]) -> MonomialSum {
    let mut u = MonomialSum::zero();
    for (k, &c) in coefficients.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let scale = c / ((k + 1) * (k + 2)) as f64;
        let term = &MonomialSum::x() - &MonomialSum::power(Complex64::new((k + 2) as f64, 0.0));
        u = &u + &term.scale(Complex64::new(scale, 0.0));
    }
    u
}

/// Sign note for `V_F⁻¹1` and `V_F⁻¹x`, emitted whenever they are used.
pub const REAL_PART_INVERSE_WARNING: &str = "V_F^-1 1 = (x - x^2)/2 and V_F^-1 x = (x - x^3)/6 \
     (solutions of -u'' = g with zero Dirichlet data), not (x^2 - x)/2 and (x^3 - x)/6";

/// Tolerance for the closed-form `V_F⁻¹` polynomials against the oracle.
pub const REAL_PART_INVERSE_TOL: f64 = 1e-8;

/// Form-domain and operator-domain vectors of `V_D` beyond `V_F`.
pub fn v_d_description(spec: &ExtensionSpec) -> Result<VdDescription> {
    let b = b_matrix(spec)?;
    let inst = spec.instance();
    if b.order == 0 {
        return Ok(VdDescription {
            form_domain_vectors: Vec::new(),
            operator_domain_vectors: Vec::new(),
            b,
            warnings: Vec::new(),
        });
    }
    let u1 = real_part_inverse_polynomial(&[0.0, 1.0]);
    let u23 = real_part_inverse_polynomial(&[2.0, -3.0]);
    let mut warnings = vec![REAL_PART_INVERSE_WARNING.to_string()];
    for (u, rhs) in [(&u1, MonomialSum::x()), (&u23, MonomialSum::polynomial(&[2.0, -3.0]))] {
        let oracle = inst.bvp_solve_oracle(BvpProblem::RealPart, &rhs, &MeshSpec::default())?;
        let dev = oracle.max_deviation(u);
        if dev > REAL_PART_INVERSE_TOL {
            warnings.push(format!("V_F^-1 ({rhs}) deviates from the oracle by {dev:e}"));
        }
    }
    let x = MonomialSum::x();
    let bx = b.entries[0];
    Ok(VdDescription {
        form_domain_vectors: vec![x.clone()],
        operator_domain_vectors: vec![&u1.scale(bx) + &x, u23],
        b,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtOrdering {
    GreaterEqual,
    LessEqual,
    Equal,
    Incomparable,
}

impl ExtOrdering {
    pub fn name(self) -> &'static str {
        match self {
            ExtOrdering::GreaterEqual => "greater_equal",
            ExtOrdering::LessEqual => "less_equal",
            ExtOrdering::Equal => "equal",
            ExtOrdering::Incomparable => "incomparable",
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            ExtOrdering::GreaterEqual => ExtOrdering::LessEqual,
            ExtOrdering::LessEqual => ExtOrdering::GreaterEqual,
            other => other,
        }
    }

    /// `≥` holds (strictly or with equality).
    pub fn dominates(self) -> bool {
        matches!(self, ExtOrdering::GreaterEqual | ExtOrdering::Equal)
    }
}

fn projected_dim(spec: &ExtensionSpec) -> usize {
    match spec.instance().family {
        Family::HardyImaginary => spec.domain_dim(),
        Family::HardyReal => 0,
    }
}

/// Form order of the real parts: `V_{D₁} ≥ V_{D₂}` iff
/// `P D(D₁) ⊆ P D(D₂)` and `Re[k̃, D₁k̃] ≥ Re[k̃, D₂k̃]` on `P D(D₁)`.
pub fn compare(s1: &ExtensionSpec, s2: &ExtensionSpec) -> Result<ExtOrdering> {
    if s1.context.instance != s2.context.instance {
        return Err(BkvgError::FamilyMismatch);
    }
    s1.require_closable()?;
    s2.require_closable()?;
    let (p1, p2) = (projected_dim(s1), projected_dim(s2));
    Ok(match (p1, p2) {
        (0, 0) => ExtOrdering::Equal,
        (0, _) => ExtOrdering::GreaterEqual,
        (_, 0) => ExtOrdering::LessEqual,
        _ => {
            let sigma = s1.context.coupling.value;
            let r1 = (s1.map.d().unwrap() * sigma).re;
            let r2 = (s2.map.d().unwrap() * sigma).re;
            let tol = 1e-12 * r1.abs().max(r2.abs()).max(1.0);
            if (r1 - r2).abs() <= tol {
                ExtOrdering::Equal
            } else if r1 > r2 {
                ExtOrdering::GreaterEqual
            } else {
                ExtOrdering::LessEqual
            }
        }
    })
}

/// `α = π²` for the lower bound, certified by the finite-difference
/// Dirichlet ground constant on the default mesh.
pub fn certified_ground_constant() -> Result<Certified<f64>> {
    static CACHE: OnceLock<std::result::Result<f64, BkvgError>> = OnceLock::new();
    let fd = CACHE
        .get_or_init(|| dirichlet_ground_constant(&MeshSpec::default()))
        .clone()?;
    let exact = std::f64::consts::PI.powi(2);
    let status = if ((fd - exact) / exact).abs() <= GROUND_CONSTANT_TOL {
        CertStatus::BothAgree
    } else {
        CertStatus::Oracle
    };
    Ok(Certified {
        value: if status == CertStatus::BothAgree { exact } else { fd },
        status,
        closed_form: exact,
        oracle: Some(fd),
    })
}

/// Bounds on `inf Re⟨ψ, A_Dψ⟩/‖ψ‖²` in terms of `α = π²` and `δ = b`.
pub fn lower_bound_sandwich(spec: &ExtensionSpec) -> Result<Sandwich> {
    if spec.instance().family != Family::HardyImaginary || spec.domain_dim() != 1 {
        return Err(BkvgError::NotApplicable(
            "the sandwich needs a rank-one map on family A".into(),
        ));
    }
    let b = b_matrix(spec)?;
    Ok(Sandwich::new(certified_ground_constant()?, b.entries[0].re))
}

/// `Re⟨ψ, A₋*ψ⟩` by adaptive quadrature.
pub fn real_part_quadrature(inst: &FamilyInstance, psi: &MonomialSum) -> Result<f64> {
    let apsi = inst.apply_formal_maximal(Sign::Minus, psi);
    if psi.is_zero() || apsi.is_zero() {
        return Ok(0.0);
    }
    let hint = psi.min_real_exponent().unwrap() + apsi.min_real_exponent().unwrap();
    Ok(integrate(|x| psi.evaluate(x).conj() * apsi.evaluate(x), hint)?.value.re)
}

/// Random element `f₀ + t·v + Σ s·w` of `D(A_D)` with `f₀` a smooth
/// polynomial vanishing to second order at both ends, `v` the domain vector
/// and `w` the Friedrichs directions of `𝔑`.
pub fn sample_domain_element<R: Rng>(spec: &ExtensionSpec, rng: &mut R) -> Result<MonomialSum> {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let bump = MonomialSum::polynomial(&[0.0, 0.0, 0.0, 1.0, -2.0, 1.0]);
    let cubic = MonomialSum::from_terms((0..4).map(|k| (c(), Complex64::new(k as f64, 0.0))));
    let mut psi = bump.product(&cubic);
    if let Some(v) = spec.domain_vector()? {
        psi = &psi + &v.scale(c() * 2.0);
    }
    for w in spec.friedrichs_directions()? {
        psi = &psi + &w.scale(c() * 2.0);
    }
    Ok(psi)
}

/// `(Re⟨ψ, A₋*ψ⟩, ‖ψ‖² + ‖A₋*ψ‖²)` for an accretivity sample.
pub fn accretivity_sample(inst: &FamilyInstance, psi: &MonomialSum) -> Result<(f64, f64)> {
    let value = real_part_quadrature(inst, psi)?;
    let apsi = inst.apply_formal_maximal(Sign::Minus, psi);
    let scale = l2_norm_sqr(psi)? + l2_norm_sqr(&apsi)?;
    Ok((value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::instantiate;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx(family: Family, gamma: f64) -> BracketContext {
        static CACHE: OnceLock<std::sync::Mutex<Vec<(Family, u64, BracketContext)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap();
        if let Some((_, _, c)) = guard.iter().find(|(f, g, _)| *f == family && *g == gamma.to_bits()) {
            return c.clone();
        }
        let c = BracketContext::new(instantiate(family, gamma).unwrap()).unwrap();
        guard.push((family, gamma.to_bits(), c.clone()));
        c
    }

    #[test]
    fn margins_and_accretivity() {
        let cx = ctx(Family::HardyImaginary, 2.0);
        let tau = cx.self_energy.value;
        let sigma = cx.coupling.value;
        let r = is_accretive(&ExtensionSpec::rank_one(cx.clone(), c(0.0, 0.0))).unwrap();
        assert!((r.margin + tau).abs() < 1e-15 && !r.accretive);
        let d = (tau + 1.0) * sigma.conj() / sigma.norm_sqr();
        let r = is_accretive(&ExtensionSpec::rank_one(cx.clone(), d)).unwrap();
        assert!((r.margin - 1.0).abs() < 1e-12 && r.accretive);
        let r = is_accretive(&ExtensionSpec::friedrichs(cx)).unwrap();
        assert!(r.margin.is_infinite() && r.accretive);
    }

    #[test]
    fn closability_by_family() {
        let a = ctx(Family::HardyImaginary, 2.0);
        for m in [0.0, 0.3, 7.0] {
            assert!(is_closable(&ExtensionSpec::with_margin(a.clone(), m, 0.4)).unwrap().0);
        }
        let cc = ctx(Family::HardyReal, 2.0);
        assert!(is_closable(&ExtensionSpec::with_margin(cc.clone(), 0.0, 1.0)).unwrap().0);
        assert!(!is_closable(&ExtensionSpec::with_margin(cc.clone(), 0.5, 0.0)).unwrap().0);
        assert!(matches!(
            is_closable(&ExtensionSpec::with_margin(cc, -0.5, 0.0)),
            Err(BkvgError::NotAccretive(_))
        ));
    }

    #[test]
    fn projection_examples() {
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        let p = projection_p(&inst, &MonomialSum::power(inst.omega_plus)).unwrap();
        assert_eq!(p, MonomialSum::x());
        assert!(projection_p(&inst, &MonomialSum::polynomial(&[0.0, -1.0, 1.0])).unwrap().is_zero());
        assert_eq!(projection_p(&inst, &MonomialSum::constant(1.0)).unwrap(), MonomialSum::constant(1.0));
        let cinst = instantiate(Family::HardyReal, 2.0).unwrap();
        assert!(projection_p(&cinst, &MonomialSum::power(cinst.omega_plus)).unwrap().is_zero());
    }

    #[test]
    fn b_is_three_times_margin() {
        let cx = ctx(Family::HardyImaginary, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let m = rng.random_range(0.0..10.0);
            let spec = ExtensionSpec::with_margin(cx.clone(), m, rng.random_range(-5.0..5.0));
            let b = b_matrix(&spec).unwrap();
            assert_eq!(b.order, 1);
            assert!((b.entries[0].re - 3.0 * spec.margin()).abs() <= 1e-12 * (1.0 + m));
        }
        assert_eq!(b_matrix(&ExtensionSpec::friedrichs(cx)).unwrap().order, 0);
        let cc = ctx(Family::HardyReal, 2.0);
        assert_eq!(b_matrix(&ExtensionSpec::with_margin(cc.clone(), 0.0, 0.0)).unwrap().order, 0);
        assert!(matches!(
            b_matrix(&ExtensionSpec::with_margin(cc, 0.5, 0.0)),
            Err(BkvgError::NotClosable(_))
        ));
    }

    #[test]
    fn from_images_reduces_to_normal_form() {
        let cx = ctx(Family::HardyImaginary, 1.0);
        let inst = cx.instance.clone();
        let (a, b) = (c(1.5, -0.5), c(0.3, 0.8));
        let spec = ExtensionSpec::from_images(cx.clone(), a, b).unwrap();
        let kp = MonomialSum::power(inst.omega_plus);
        let image = &MonomialSum::monomial(a, inst.omega_plus.conj())
            + &MonomialSum::monomial(b, inst.omega_minus.conj());
        let direct = raw_bracket(&inst, &kp, &image).unwrap();
        let normal = spec.map.d().unwrap() * cx.coupling.value;
        assert!((direct - normal).norm() < 1e-12);
        let one_dim = ctx(Family::HardyImaginary, 2.0);
        assert!(ExtensionSpec::from_images(one_dim, a, b).is_err());
    }

    #[test]
    fn v_d_vectors() {
        let cx = ctx(Family::HardyImaginary, 2.0);
        let m = 0.7;
        let desc = v_d_description(&ExtensionSpec::with_margin(cx, m, 0.0)).unwrap();
        assert_eq!(desc.form_domain_vectors, vec![MonomialSum::x()]);
        let u1 = MonomialSum::polynomial(&[0.0, 1.0 / 6.0, 0.0, -1.0 / 6.0]);
        let expected = &u1.scale(c(3.0 * m, 0.0)) + &MonomialSum::x();
        let diff = &desc.operator_domain_vectors[0] - &expected;
        assert!(diff.coefficient_mass() < 1e-12);
        let u23 = MonomialSum::polynomial(&[0.0, 0.5, -1.0, 0.5]);
        assert!((&desc.operator_domain_vectors[1] - &u23).coefficient_mass() < 1e-12);
        assert_eq!(desc.warnings.len(), 1);
        // (2 − 3x) ⊥ x in L².
        let ip = crate::monomial::l2_inner(&MonomialSum::polynomial(&[2.0, -3.0]), &MonomialSum::x()).unwrap();
        assert!(ip.norm() < 1e-15);
        let cc = ctx(Family::HardyReal, 2.0);
        let desc = v_d_description(&ExtensionSpec::with_margin(cc, 0.0, 0.0)).unwrap();
        assert!(desc.form_domain_vectors.is_empty() && desc.operator_domain_vectors.is_empty());
    }

    #[test]
    fn sandwich_values() {
        let cx = ctx(Family::HardyImaginary, 2.0);
        let s = lower_bound_sandwich(&ExtensionSpec::with_margin(cx.clone(), 0.0, 0.0)).unwrap();
        assert!(s.stated.0.abs() < 1e-12 && s.stated.1.abs() < 1e-12);
        assert_eq!(s.alpha.status, CertStatus::BothAgree);
        let m = 1.0;
        let s = lower_bound_sandwich(&ExtensionSpec::with_margin(cx, m, 0.0)).unwrap();
        let a = PI * PI;
        let d = 3.0 * m;
        assert!((s.stated.0 - a * d / (1.0 + d)).abs() < 1e-9);
        assert!((s.stated.1 - a * d).abs() < 1e-9);
        assert!((s.valid.0 - a * d / (a + d)).abs() < 1e-9 && (s.valid.1 - d).abs() < 1e-9);
        let cc = ctx(Family::HardyReal, 2.0);
        assert!(matches!(
            lower_bound_sandwich(&ExtensionSpec::with_margin(cc, 0.0, 0.0)),
            Err(BkvgError::NotApplicable(_))
        ));
    }

    #[test]
    fn accretive_samples_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (family, gamma) in [(Family::HardyImaginary, 1.0), (Family::HardyImaginary, 2.0), (Family::HardyReal, 1.0)] {
            let cx = ctx(family, gamma);
            for spec in [ExtensionSpec::with_margin(cx.clone(), 0.2, 1.0), ExtensionSpec::friedrichs(cx.clone())] {
                for _ in 0..10 {
                    let psi = sample_domain_element(&spec, &mut rng).unwrap();
                    let (value, scale) = accretivity_sample(spec.instance(), &psi).unwrap();
                    assert!(value >= -1e-8 * scale, "{family} γ={gamma}: {value}");
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn compare_is_a_partial_order(m in proptest::array::uniform3(0.0f64..5.0), s in proptest::array::uniform3(-3.0f64..3.0)) {
            let cx = ctx(Family::HardyImaginary, 2.0);
            let specs: Vec<_> = (0..3).map(|i| ExtensionSpec::with_margin(cx.clone(), m[i], s[i])).collect();
            let fr = ExtensionSpec::friedrichs(cx);
            for a in &specs {
                prop_assert_eq!(compare(a, a).unwrap(), ExtOrdering::Equal);
                prop_assert_eq!(compare(&fr, a).unwrap(), ExtOrdering::GreaterEqual);
                for b in &specs {
                    prop_assert_eq!(compare(a, b).unwrap(), compare(b, a).unwrap().reverse());
                    for c3 in &specs {
                        if compare(a, b).unwrap().dominates() && compare(b, c3).unwrap().dominates() {
                            prop_assert!(compare(a, c3).unwrap().dominates());
                        }
                    }
                }
            }
        }

        #[test]
        fn b_is_affine_in_margin(m1 in 0.0f64..10.0, m2 in 0.0f64..10.0) {
            let cx = ctx(Family::HardyImaginary, 1.0);
            let b = |m| b_matrix(&ExtensionSpec::with_margin(cx.clone(), m, 0.0)).unwrap().entries[0].re;
            prop_assert!(((b(m1) - b(m2)) - 3.0 * (m1 - m2)).abs() < 1e-11);
            prop_assert!(b(m1) >= -1e-10);
        }
    }

    #[test]
    fn compare_rejects_mixed_instances() {
        let s1 = ExtensionSpec::with_margin(ctx(Family::HardyImaginary, 2.0), 1.0, 0.0);
        let s2 = ExtensionSpec::with_margin(ctx(Family::HardyImaginary, 1.0), 1.0, 0.0);
        assert_eq!(compare(&s1, &s2), Err(BkvgError::FamilyMismatch));
    }
}
