use std::path::PathBuf;

use bkvg_core::discretization::{discretize, numerical_range_sweep, rayleigh_inf_on_extension};
use bkvg_core::extensions::{is_accretive, v_d_description};
use bkvg_core::verify::run_all;
use bkvg_core::{
    instantiate, BracketContext, CertStatus, ExtensionSpec, Family, FamilyInstance, HermitianMatrix, MeshSpec, Regime,
    Sandwich, Sign, VerifyLevel,
};

use crate::config::{Config, ExtensionArg, GRADING_RATIO};
use crate::error::{CliError, EXIT_CERTIFICATION, EXIT_OK, EXIT_VERIFY_FAILED};
use crate::report::{envelope, format_float, Json};

/// Relative slack when locating the Rayleigh infimum inside a bound.
const SANDWICH_SLACK: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// What a subcommand produced; written out by `main`.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub file: Option<(PathBuf, String)>,
    pub code: u8,
}

impl Outcome {
    fn json(doc: Json, out: Option<PathBuf>, code: u8) -> Self {
        let text = doc.to_pretty();
        match out {
            Some(path) => Self {
                file: Some((path, text)),
                code,
                ..Default::default()
            },
            None => Self {
                stdout: text,
                code,
                ..Default::default()
            },
        }
    }
}

fn mesh_spec(cfg: &Config) -> Result<MeshSpec, CliError> {
    Ok(MeshSpec::new(cfg.mesh, GRADING_RATIO)?)
}

fn constant_names(inst: &FamilyInstance) -> (&'static str, &'static str) {
    match inst.family {
        Family::HardyImaginary => ("sigma", "tau"),
        Family::HardyReal => ("mu", "nu"),
    }
}

fn exponents(sums: &[bkvg_core::MonomialSum]) -> Json {
    Json::Array(
        sums.iter()
            .flat_map(|s| s.terms().iter().map(|t| Json::tagged(Json::complex(t.exponent), CertStatus::ClosedForm)))
            .collect(),
    )
}

fn closed(value: impl Into<Json>) -> Json {
    Json::tagged(value, CertStatus::ClosedForm)
}

fn oracle(value: impl Into<Json>) -> Json {
    Json::tagged(value, CertStatus::Oracle)
}

fn combined_status(ctx: &BracketContext) -> CertStatus {
    if ctx.coupling.status == CertStatus::BothAgree && ctx.self_energy.status == CertStatus::BothAgree {
        CertStatus::BothAgree
    } else {
        CertStatus::Oracle
    }
}

fn reject_csv(format: Format, command: &str) -> Result<(), CliError> {
    if format == Format::Csv {
        return Err(CliError::Input(format!("--csv is not available for {command}")));
    }
    Ok(())
}

pub fn analyze(cfg: &Config, format: Format, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    reject_csv(format, "analyze")?;
    let inst = instantiate(cfg.family, cfg.gamma)?;
    let ctx = BracketContext::with_mesh(inst.clone(), &mesh_spec(cfg)?)?;
    let basis = inst.kernel_basis();
    let (cname, ename) = constant_names(&inst);
    let chi = match inst.regime {
        Regime::TwoDimKernel => {
            let c = inst.chi_vector()?;
            Json::object()
                .field("chi", closed(Json::monomial_sum(&c.chi)))
                .field("companion", closed(Json::monomial_sum(&c.companion)))
                .field("chi_exponents", exponents(std::slice::from_ref(&c.chi)))
                .build()
        }
        Regime::OneDimKernel => Json::Null,
    };
    let payload = Json::object()
        .field("family", inst.family.name())
        .field("gamma", closed(inst.gamma))
        .field("omega_plus", closed(Json::complex(inst.omega_plus)))
        .field("omega_minus", closed(Json::complex(inst.omega_minus)))
        .field("regime", inst.regime.name())
        .field(
            "kernel_exponents",
            Json::object()
                .field("minus", exponents(&basis.minus_kernel))
                .field("plus", exponents(&basis.plus_kernel))
                .build(),
        )
        .field(cname, Json::certified_complex(&ctx.coupling))
        .field(ename, Json::certified_real(&ctx.self_energy))
        .field("certified", !ctx.flagged)
        .field("chi", chi)
        .build();
    let code = if ctx.flagged { EXIT_CERTIFICATION } else { EXIT_OK };
    let doc = envelope("analyze", cfg.echo("analyze"), payload, ctx.notes.clone());
    Ok(Outcome::json(doc, out, code))
}

fn hermitian_json(b: &HermitianMatrix) -> Json {
    Json::object()
        .field("order", b.order)
        .field(
            "entries",
            Json::Array(b.entries.iter().map(|z| closed(Json::complex(*z))).collect()),
        )
        .field("eigenvalues", Json::Array(b.eigenvalues().into_iter().map(closed).collect()))
        .build()
}

fn sandwich_json(s: &Sandwich, inf: f64) -> Json {
    let contains = |(lo, hi): (f64, f64)| inf >= lo * (1.0 - SANDWICH_SLACK) && inf <= hi * (1.0 + SANDWICH_SLACK);
    let pair = |(lo, hi): (f64, f64)| Json::Array(vec![closed(lo), closed(hi)]);
    Json::object()
        .field("alpha", Json::certified_real(&s.alpha))
        .field("delta", closed(s.delta))
        .field("rayleigh_inf", oracle(inf))
        .field("stated_interval", pair(s.stated))
        .field("stated_contains_inf", contains(s.stated))
        .field("valid_interval", pair(s.valid))
        .field("valid_contains_inf", contains(s.valid))
        .build()
}

pub fn check(cfg: &Config, format: Format, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    reject_csv(format, "check")?;
    let inst = instantiate(cfg.family, cfg.gamma)?;
    let mesh = mesh_spec(cfg)?;
    let ctx = BracketContext::with_mesh(inst.clone(), &mesh)?;
    let (cname, ename) = constant_names(&inst);
    let status = combined_status(&ctx);
    let spec = ExtensionSpec::rank_one(ctx.clone(), cfg.d);
    let report = is_accretive(&spec)?;
    let mut warnings = ctx.notes.clone();

    let v_d = match &report.b_matrix {
        Some(b) if b.order > 0 => {
            let desc = v_d_description(&spec)?;
            warnings.extend(desc.warnings.iter().cloned());
            let vectors = |vs: &[bkvg_core::MonomialSum]| {
                Json::Array(vs.iter().map(|v| closed(Json::monomial_sum(v))).collect())
            };
            Json::object()
                .field("form_domain_vectors", vectors(&desc.form_domain_vectors))
                .field("operator_domain_vectors", vectors(&desc.operator_domain_vectors))
                .build()
        }
        _ => Json::Null,
    };
    let lower_bound = match &report.lower_bound {
        Some(s) => {
            let inf = rayleigh_inf_on_extension(&spec, &mesh)?;
            if inf < s.stated.0 * (1.0 - SANDWICH_SLACK) && s.delta > 0.0 {
                warnings.push(format!(
                    "Rayleigh infimum {} lies below alpha*delta/(1+delta) = {}; the bound \
                     [alpha*delta/(alpha+delta), min(alpha, delta)] holds",
                    format_float(inf),
                    format_float(s.stated.0)
                ));
            }
            sandwich_json(s, inf)
        }
        None => Json::Null,
    };
    let domain_vector = spec
        .domain_vector()?
        .map_or(Json::Null, |v| closed(Json::monomial_sum(&v)));

    let payload = Json::object()
        .field("family", inst.family.name())
        .field("gamma", closed(inst.gamma))
        .field("d", closed(Json::complex(cfg.d)))
        .field(cname, Json::certified_complex(&report.sigma_or_mu))
        .field(ename, Json::certified_real(&report.tau_or_nu))
        .field("margin", Json::tagged(report.margin, status))
        .field("accretive", report.accretive)
        .field("closable", report.closable)
        .field("closable_reason", report.closable_reason.clone())
        .field("domain_vector", domain_vector)
        .field("b_matrix", report.b_matrix.as_ref().map_or(Json::Null, hermitian_json))
        .field("v_d", v_d)
        .field("lower_bound", lower_bound)
        .field("notes", report.notes.clone())
        .build();
    let doc = envelope("check", cfg.echo("check"), payload, warnings);
    Ok(Outcome::json(doc, out, EXIT_OK))
}

fn extension(ctx: &BracketContext, arg: ExtensionArg) -> ExtensionSpec {
    match arg {
        ExtensionArg::Friedrichs => ExtensionSpec::friedrichs(ctx.clone()),
        ExtensionArg::RankOne(d) => ExtensionSpec::rank_one(ctx.clone(), d),
    }
}

pub fn compare(cfg: &Config, format: Format, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    reject_csv(format, "compare")?;
    let inst = instantiate(cfg.family, cfg.gamma)?;
    let ctx = BracketContext::new(inst.clone())?;
    let (s1, s2) = (extension(&ctx, cfg.d1), extension(&ctx, cfg.d2));
    let ordering = bkvg_core::extensions::compare(&s1, &s2)?;
    let status = combined_status(&ctx);
    let side = |arg: ExtensionArg, spec: &ExtensionSpec| {
        Json::object()
            .field("extension", arg.to_json())
            .field("margin", Json::tagged(spec.margin(), status))
            .build()
    };
    let payload = Json::object()
        .field("family", inst.family.name())
        .field("gamma", closed(inst.gamma))
        .field("first", side(cfg.d1, &s1))
        .field("second", side(cfg.d2, &s2))
        .field("verdict", ordering.name())
        .field("first_dominates", ordering.dominates())
        .build();
    let doc = envelope("compare", cfg.echo("compare"), payload, ctx.notes.clone());
    Ok(Outcome::json(doc, out, EXIT_OK))
}

pub fn numrange(cfg: &Config, format: Format, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    let inst = instantiate(cfg.family, cfg.gamma)?;
    let op = discretize(&inst, Sign::Plus, &mesh_spec(cfg)?)?;
    let report = numerical_range_sweep(&op, cfg.theta_steps)?;
    let summary = |with_samples: bool| {
        let mut b = Json::object()
            .field("family", inst.family.name())
            .field("gamma", closed(inst.gamma))
            .field("arg_inf", oracle(report.arg_inf))
            .field("arg_sup", oracle(report.arg_sup))
            .field("extremal", report.extremal)
            .field("angle_tol", report.angle_tol)
            .field("convex", report.convex);
        if with_samples {
            b = b.field(
                "support_samples",
                Json::Array(
                    report
                        .support_samples
                        .iter()
                        .map(|&(t, h)| Json::object().field("theta", t).field("support_value", oracle(h)).build())
                        .collect(),
                ),
            );
        }
        envelope("numrange", cfg.echo("numrange"), b.build(), Vec::new())
    };
    Ok(match format {
        Format::Json => Outcome::json(summary(true), out, EXIT_OK),
        Format::Csv => {
            let mut csv = String::from("theta,support_value\n");
            for (t, h) in &report.support_samples {
                csv.push_str(&format!("{},{}\n", format_float(*t), format_float(*h)));
            }
            let summary = summary(false).to_pretty();
            match out {
                Some(path) => Outcome {
                    stdout: summary,
                    file: Some((path, csv)),
                    ..Default::default()
                },
                None => Outcome {
                    stdout: csv,
                    stderr: summary,
                    ..Default::default()
                },
            }
        }
    })
}

pub fn verify(cfg: &Config, format: Format, out: Option<PathBuf>) -> Result<Outcome, CliError> {
    reject_csv(format, "verify")?;
    let level = match cfg.level.as_str() {
        "quick" => VerifyLevel::Quick,
        _ => VerifyLevel::Full,
    };
    let outcomes = run_all(level);
    let passed = outcomes.iter().filter(|o| o.ok()).count();
    let criteria = outcomes
        .iter()
        .map(|o| {
            Json::object()
                .field("id", o.id)
                .field("name", o.name)
                .field("passed", o.passed)
                .field("within_budget", o.within_budget)
                .field("status", if o.ok() { "pass" } else { "fail" })
                .field("details", o.details.clone())
                .build()
        })
        .collect();
    let all = passed == outcomes.len();
    let payload = Json::object()
        .field("level", level.name())
        .field("criteria", Json::Array(criteria))
        .field("passed", passed)
        .field("total", outcomes.len())
        .field("all_passed", all)
        .build();
    let code = if all { EXIT_OK } else { EXIT_VERIFY_FAILED };
    let doc = envelope("verify", cfg.echo("verify"), payload, Vec::new());
    Ok(Outcome::json(doc, out, code))
}
