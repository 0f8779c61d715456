//! Oracle-based verification suite. Each criterion returns a deterministic
//! outcome; wall-clock time only enters through the `within_budget` flag.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bracket::{BracketContext, CertStatus};
use crate::discretization::{
    discretize, kato_sector_witness, negative_margin_witness, nonclosability_witness, numerical_range_sweep,
    rayleigh_inf_on_extension, MeshSpec,
};
use crate::error::Result;
use crate::extensions::{
    accretivity_sample, b_matrix, compare, lower_bound_sandwich, real_part_inverse_polynomial, sample_domain_element,
    ExtensionSpec, REAL_PART_INVERSE_TOL,
};
use crate::family::{instantiate, BvpProblem, Family, Sign};
use crate::monomial::{l2_inner, FormKind, MonomialSum};
use crate::quadrature::oracle_form;

pub const GAMMAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
pub const FAMILIES: [Family; 2] = [Family::HardyImaginary, Family::HardyReal];
pub const SEED: u64 = 0x6b76_6731;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    /// Reduced sample counts and meshes.
    Quick,
    /// The full acceptance sizes.
    Full,
}

impl VerifyLevel {
    pub fn name(self) -> &'static str {
        match self {
            VerifyLevel::Quick => "quick",
            VerifyLevel::Full => "full",
        }
    }

    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            VerifyLevel::Quick => quick,
            VerifyLevel::Full => full,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub within_budget: bool,
    pub details: Vec<String>,
}

impl CriterionOutcome {
    pub fn ok(&self) -> bool {
        self.passed && self.within_budget
    }
}

struct Check {
    passed: bool,
    details: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            passed: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, cond: bool, detail: String) {
        if !cond {
            self.passed = false;
            self.details.push(format!("FAIL {detail}"));
        }
    }

    fn note(&mut self, detail: String) {
        self.details.push(detail);
    }
}

pub const CRITERIA: [(u8, &str, u64); 9] = [
    (1, "closed-form vs quadrature inner products", 5),
    (2, "kernel certification", 60),
    (3, "two-pipeline bracket constants", 30),
    (4, "Friedrichs-inverse oracle", 60),
    (5, "accretivity boundary", 60),
    (6, "closability boundary", 60),
    (7, "B-matrix and order", 60),
    (8, "lower-bound sandwich", 120),
    (9, "sector classification", 120),
];

/// Runs criterion `id` (1–9).
pub fn run_criterion(id: u8, level: VerifyLevel) -> CriterionOutcome {
    let (_, name, budget) = CRITERIA
        .iter()
        .copied()
        .find(|c| c.0 == id)
        .unwrap_or_else(|| panic!("unknown criterion {id}"));
    let start = Instant::now();
    let result = match id {
        1 => criterion_1(level),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(level),
        6 => criterion_6(),
        7 => criterion_7(level),
        8 => criterion_8(level),
        9 => criterion_9(level),
        _ => unreachable!(),
    };
    let within_budget = start.elapsed() <= Duration::from_secs(budget);
    let check = result.unwrap_or_else(|e| Check {
        passed: false,
        details: vec![format!("FAIL error: {e}")],
    });
    CriterionOutcome {
        id,
        name,
        passed: check.passed,
        within_budget,
        details: check.details,
    }
}

pub fn run_all(level: VerifyLevel) -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|c| run_criterion(c.0, level)).collect()
}

fn random_sum(rng: &mut ChaCha8Rng) -> MonomialSum {
    let terms = rng.random_range(1..=3);
    MonomialSum::from_terms((0..terms).map(|_| {
        (
            Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)),
            Complex64::new(rng.random_range(-0.45..3.0), rng.random_range(-2.0..2.0)),
        )
    }))
}

fn criterion_1(level: VerifyLevel) -> Result<Check> {
    let mut check = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pairs = level.pick(50, 200);
    let mut worst = 0.0f64;
    for k in 0..pairs {
        let (f, g) = (random_sum(&mut rng), random_sum(&mut rng));
        let exact = l2_inner(&f, &g)?;
        let quad = oracle_form(FormKind::L2, &f, &g)?;
        let err = (exact - quad).norm();
        let tol = 1e-10f64.max(1e-8 * exact.norm());
        worst = worst.max(err / tol);
        check.require(err <= tol, format!("pair {k}: |Δ| = {err:.3e} > {tol:.3e}"));
    }
    check.note(format!("{pairs} pairs, worst error/tolerance {worst:.3e}"));
    Ok(check)
}

fn criterion_2() -> Result<Check> {
    let mut check = Check::new();
    for family in FAMILIES {
        for gamma in GAMMAS {
            let inst = instantiate(family, gamma)?;
            let basis = inst.kernel_basis();
            for k in &basis.plus_kernel {
                let r = inst.apply_formal_maximal(Sign::Plus, k);
                check.require(r.is_zero(), format!("{family} γ={gamma}: plus kernel {k} leaves {r}"));
            }
            for k in &basis.minus_kernel {
                let r = inst.apply_formal_maximal(Sign::Minus, k);
                check.require(r.is_zero(), format!("{family} γ={gamma}: minus kernel {k} leaves {r}"));
            }
            check.note(format!(
                "{family} γ={gamma}: {} + {} kernel vectors annihilated",
                basis.minus_kernel.len(),
                basis.plus_kernel.len()
            ));
        }
    }
    Ok(check)
}

fn criterion_3() -> Result<Check> {
    let mut check = Check::new();
    for family in FAMILIES {
        for gamma in GAMMAS {
            let ctx = BracketContext::new(instantiate(family, gamma)?)?;
            let gap = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm());
            let cg = gap(ctx.coupling.closed_form, ctx.coupling.oracle.unwrap());
            let eg = gap(
                Complex64::new(ctx.self_energy.closed_form, 0.0),
                Complex64::new(ctx.self_energy.oracle.unwrap(), 0.0),
            );
            check.require(
                ctx.coupling.status == CertStatus::BothAgree && ctx.self_energy.status == CertStatus::BothAgree,
                format!("{family} γ={gamma}: {}", ctx.notes.join("; ")),
            );
            check.note(format!(
                "{family} γ={gamma}: coupling rel gap {cg:.3e}, self-energy rel gap {eg:.3e}"
            ));
        }
    }
    Ok(check)
}

fn criterion_4() -> Result<Check> {
    let mut check = Check::new();
    let mesh = MeshSpec::default();
    for family in FAMILIES {
        for gamma in GAMMAS {
            let inst = instantiate(family, gamma)?;
            for k in inst.kernel_basis().plus_kernel {
                let exact = inst.friedrichs_inverse_kernel(&k)?;
                let oracle = inst.bvp_solve_oracle(BvpProblem::Friedrichs(Sign::Plus), &k, &mesh)?;
                let dev = oracle.max_deviation(&exact);
                check.require(dev <= 1e-8, format!("{family} γ={gamma} k={k}: deviation {dev:.3e}"));
                check.note(format!("{family} γ={gamma} k={k}: max deviation {dev:.3e}"));
            }
        }
    }
    let inst = instantiate(Family::HardyImaginary, 2.0)?;
    for (coeffs, label) in [(vec![1.0], "1"), (vec![0.0, 1.0], "x")] {
        let exact = real_part_inverse_polynomial(&coeffs);
        let oracle = inst.bvp_solve_oracle(BvpProblem::RealPart, &MonomialSum::polynomial(&coeffs), &mesh)?;
        let dev = oracle.max_deviation(&exact);
        check.require(dev <= REAL_PART_INVERSE_TOL, format!("V_F^-1 {label}: deviation {dev:.3e}"));
        check.note(format!("V_F^-1 {label} = {exact}: max deviation {dev:.3e}"));
    }
    check.note(format!("warning: {}", crate::extensions::REAL_PART_INVERSE_WARNING));
    Ok(check)
}

fn criterion_5(level: VerifyLevel) -> Result<Check> {
    let mut check = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let (specs, samples) = (level.pick(4, 20), level.pick(40, 200));
    for gamma in [1.0, 2.0] {
        let ctx = BracketContext::new(instantiate(Family::HardyImaginary, gamma)?)?;
        let mut worst = f64::INFINITY;
        for _ in 0..specs {
            let spec = ExtensionSpec::with_margin(ctx.clone(), rng.random_range(0.1..5.0), rng.random_range(-5.0..5.0));
            for _ in 0..samples {
                let psi = sample_domain_element(&spec, &mut rng)?;
                let (value, scale) = accretivity_sample(spec.instance(), &psi)?;
                worst = worst.min(value / scale);
                check.require(
                    value >= -1e-8 * scale,
                    format!("γ={gamma} margin {:.4}: Re⟨ψ, A₋*ψ⟩ = {value:.3e}", spec.margin()),
                );
            }
        }
        check.note(format!(
            "γ={gamma}: {} samples with margin ≥ 0.1, min value/scale {worst:.3e}",
            specs * samples
        ));
        let mut worst_negative = f64::NEG_INFINITY;
        for _ in 0..specs {
            let spec =
                ExtensionSpec::with_margin(ctx.clone(), -rng.random_range(0.1..5.0), rng.random_range(-5.0..5.0));
            let w = negative_margin_witness(&spec, 0.125)?;
            let last = w.points.last().unwrap().value;
            worst_negative = worst_negative.max(last);
            check.require(
                last < 0.0,
                format!("γ={gamma} margin {:.4}: witness ends at {last:.3e}", spec.margin()),
            );
        }
        check.note(format!(
            "γ={gamma}: {specs} negative-margin witnesses, largest final value {worst_negative:.3e}"
        ));
    }
    Ok(check)
}

fn criterion_6() -> Result<Check> {
    let mut check = Check::new();
    let ctx = BracketContext::new(instantiate(Family::HardyReal, 2.0)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let spec = ExtensionSpec::with_margin(ctx.clone(), 0.0, rng.random_range(-5.0..5.0));
        let q = ctx.q_form(&spec.domain_vector()?.unwrap())?;
        worst = worst.max(q.abs());
        check.require(q.abs() <= 1e-8, format!("boundary d: |q(v)| = {:.3e}", q.abs()));
    }
    check.note(format!("20 boundary parameters: max |q(v)| = {worst:.3e}"));
    let spec = ExtensionSpec::with_margin(ctx, 0.5, 0.0);
    let w = nonclosability_witness(&spec, 0.125)?;
    let norms = w.norms();
    let shrink = norms[0] / norms.last().unwrap();
    let last = w.points.last().unwrap().value;
    let rel = (last - w.limit).abs() / w.limit.abs();
    check.require(shrink >= 10.0, format!("‖g_n‖ shrinks only {shrink:.3}×"));
    check.require(rel <= 0.05, format!("form value {last:.6e} vs q(v) = {:.6e}", w.limit));
    check.note(format!(
        "margin 0.5: ‖g_n‖ shrinks {shrink:.3}×, final form value {last:.6e}, q(v) = {:.6e} (rel {rel:.3e})",
        w.limit
    ));
    Ok(check)
}

fn criterion_7(level: VerifyLevel) -> Result<Check> {
    let mut check = Check::new();
    let ctx = BracketContext::new(instantiate(Family::HardyImaginary, 2.0)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut worst = 0.0f64;
    for _ in 0..level.pick(10, 50) {
        let spec = ExtensionSpec::with_margin(ctx.clone(), rng.random_range(0.0..10.0), rng.random_range(-5.0..5.0));
        let b = b_matrix(&spec)?.entries[0].re;
        let err = (b - 3.0 * spec.margin()).abs();
        worst = worst.max(err);
        check.require(err <= 1e-12 * (1.0 + spec.margin()), format!("b = {b:.15e} vs 3·margin"));
        check.require(b >= -1e-10, format!("b = {b:.3e} < 0"));
    }
    check.note(format!("b = 3·margin: max |Δ| = {worst:.3e}"));

    let friedrichs = ExtensionSpec::friedrichs(ctx.clone());
    let triples = level.pick(10, 40);
    for _ in 0..triples {
        let specs: Vec<ExtensionSpec> = (0..3)
            .map(|_| {
                // Repeat a margin now and then so that equality is exercised.
                let m = if rng.random_bool(0.3) { 1.0 } else { rng.random_range(0.0..5.0) };
                ExtensionSpec::with_margin(ctx.clone(), m, rng.random_range(-3.0..3.0))
            })
            .collect();
        for a in &specs {
            check.require(compare(a, a)?.name() == "equal", "reflexivity".into());
            check.require(compare(&friedrichs, a)?.dominates(), "Friedrichs dominance".into());
            for b in &specs {
                check.require(compare(a, b)? == compare(b, a)?.reverse(), "antisymmetry".into());
                for c in &specs {
                    if compare(a, b)?.dominates() && compare(b, c)?.dominates() {
                        check.require(compare(a, c)?.dominates(), "transitivity".into());
                    }
                }
            }
        }
    }
    let cctx = BracketContext::new(instantiate(Family::HardyReal, 2.0)?)?;
    let boundary = ExtensionSpec::with_margin(cctx.clone(), 0.0, 1.0);
    check.require(
        compare(&ExtensionSpec::friedrichs(cctx), &boundary)?.dominates(),
        "Friedrichs dominance (family C)".into(),
    );
    check.note(format!("{triples} random triples: order axioms hold"));
    Ok(check)
}

fn criterion_8(level: VerifyLevel) -> Result<Check> {
    let mut check = Check::new();
    let ctx = BracketContext::new(instantiate(Family::HardyImaginary, 2.0)?)?;
    let mesh = MeshSpec::new(level.pick(500, 2000), 0.85)?;
    for margin in [0.0, 0.2, 1.0, 5.0] {
        let spec = ExtensionSpec::with_margin(ctx.clone(), margin, 0.0);
        let s = lower_bound_sandwich(&spec)?;
        if margin == 0.0 {
            let a = s.alpha.oracle.unwrap();
            let rel = (a - s.alpha.closed_form).abs() / s.alpha.closed_form;
            check.require(s.alpha.status == CertStatus::BothAgree, format!("α = {a:.9e}, rel {rel:.3e}"));
            check.note(format!("α: finite differences {a:.9e} vs π² (rel {rel:.3e})"));
        }
        let r = rayleigh_inf_on_extension(&spec, &mesh)?;
        let alpha = s.alpha.value;
        let (lo, hi) = s.stated;
        let inside = if s.delta.abs() < 1e-12 {
            r.abs() <= 0.02 * alpha
        } else {
            r >= lo * 0.98 && r <= hi * 1.02
        };
        let (vlo, vhi) = s.valid;
        let inside_valid = if s.delta.abs() < 1e-12 {
            r.abs() <= 0.02 * alpha
        } else {
            r >= vlo * 0.98 && r <= vhi * 1.02
        };
        check.require(
            inside,
            format!("margin {margin}: inf = {r:.6e} outside [{lo:.6e}, {hi:.6e}] ± 2%"),
        );
        check.note(format!(
            "margin {margin}: δ = {:.6e}, inf = {r:.6e}, [αδ/(1+δ), αδ] = [{lo:.6e}, {hi:.6e}], \
             [αδ/(α+δ), min(α,δ)] = [{vlo:.6e}, {vhi:.6e}] ({})",
            s.delta,
            if inside_valid { "inside" } else { "outside" }
        ));
    }
    Ok(check)
}

fn criterion_9(level: VerifyLevel) -> Result<Check> {
    let mut check = Check::new();
    let theta_steps = 64;
    let (n1, n2) = (level.pick(512, 1024), level.pick(1024, 2048));
    let a = instantiate(Family::HardyImaginary, 2.0)?;
    let r1 = numerical_range_sweep(&discretize(&a, Sign::Plus, &MeshSpec::new(n1, 0.85)?)?, theta_steps)?;
    let r2 = numerical_range_sweep(&discretize(&a, Sign::Plus, &MeshSpec::new(n2, 0.85)?)?, theta_steps)?;
    check.require(!r1.extremal && !r2.extremal, "family A reported extremal".into());
    let (ds, di) = ((r1.arg_sup - r2.arg_sup).abs(), (r1.arg_inf - r2.arg_inf).abs());
    check.require(ds <= 0.01 && di <= 0.01, format!("arg bounds move by {ds:.3e}, {di:.3e}"));
    check.require(r1.convex && r2.convex, "support function not convex".into());
    check.note(format!(
        "A γ=2: n={n1} arg ∈ [{:.6}, {:.6}], n={n2} arg ∈ [{:.6}, {:.6}]",
        r1.arg_inf, r1.arg_sup, r2.arg_inf, r2.arg_sup
    ));
    let c = instantiate(Family::HardyReal, 2.0)?;
    let rc = numerical_range_sweep(&discretize(&c, Sign::Plus, &MeshSpec::new(n2, 0.85)?)?, theta_steps)?;
    check.require(rc.extremal, "family C not reported extremal".into());
    check.note(format!("C γ=2: arg ∈ [{:.6}, {:.6}], extremal", rc.arg_inf, rc.arg_sup));
    let w = kato_sector_witness(&c, 0.3, 8)?;
    let decreasing = w.windows(2).all(|p| p[1] < p[0]);
    let last = *w.last().unwrap();
    check.require(decreasing, "Kato witness not strictly decreasing".into());
    check.require(last <= -1e3, format!("Kato witness ends at {last:.3e}"));
    check.note(format!("Kato witness ε=0.3: final value {last:.6e}"));
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_criteria_without_known_defect_pass() {
        for id in [1, 2, 3, 4, 7] {
            let o = run_criterion(id, VerifyLevel::Quick);
            assert!(o.passed, "criterion {id}: {:?}", o.details);
        }
    }
}
