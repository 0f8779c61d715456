//! The bracket `[f,g] = ⟨f,g⟩ − 2·K(f, A₊,F⁻¹g)`, the boundary form
//! `q(v) = Re⟨v, A₋*v⟩ − K(v,v)` and the constants `σ, τ` (family `A`) and
//! `μ, ν` (family `C`), where `K` is the real-part form of the family.
//!
//! A [`BracketContext`] certifies the closed-form constants against two
//! independent pipelines when it is built: quadrature for `τ`/`ν` and the
//! finite-difference Friedrichs solver for `σ`/`μ`.

use num_complex::Complex64;

use crate::discretization::MeshSpec;
use crate::error::{BkvgError, Result};
use crate::family::{BvpProblem, Family, FamilyInstance, Sign};
use crate::monomial::{form_value, l2_inner, FormKind, MonomialSum};
use crate::quadrature::oracle_form;

/// Relative tolerance for closed form vs oracle agreement.
pub const CERTIFICATION_TOL: f64 = 1e-6;

/// Largest imaginary residue tolerated in a nominally real oracle value.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertStatus {
    ClosedForm,
    Oracle,
    BothAgree,
}

impl CertStatus {
    pub fn name(self) -> &'static str {
        match self {
            CertStatus::ClosedForm => "closed-form",
            CertStatus::Oracle => "oracle",
            CertStatus::BothAgree => "both-agree",
        }
    }
}

/// A value together with how it was established.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified<T> {
    pub value: T,
    pub status: CertStatus,
    pub closed_form: T,
    pub oracle: Option<T>,
}

impl<T: Copy> Certified<T> {
    pub fn closed_form(value: T) -> Self {
        Self {
            value,
            status: CertStatus::ClosedForm,
            closed_form: value,
            oracle: None,
        }
    }
}

fn wrong_family(inst: &FamilyInstance) -> BkvgError {
    BkvgError::WrongFamily(inst.family.name())
}

/// `σ(ω₊)` for family `A`.
pub fn sigma(inst: &FamilyInstance) -> Result<Complex64> {
    if inst.family != Family::HardyImaginary {
        return Err(wrong_family(inst));
    }
    let w = inst.omega_plus;
    let wb = w.conj();
    let i = Complex64::i();
    let lam = i * inst.gamma - (wb + 2.0) * (wb + 1.0);
    let inner = wb * (wb + 2.0) / (2.0 * wb + 1.0) - w.norm_sqr() / (w + wb - 1.0);
    Ok(1.0 / (2.0 * wb + 1.0) - 2.0 / lam * inner)
}

/// `τ(ω₊) = |ω₊ − 1|²/(2 Re ω₊ − 1)` for family `A`.
pub fn tau(inst: &FamilyInstance) -> Result<f64> {
    if inst.family != Family::HardyImaginary {
        return Err(wrong_family(inst));
    }
    let w = inst.omega_plus;
    Ok((w - 1.0).norm_sqr() / (2.0 * w.re - 1.0))
}

/// `μ(ω₊)` for family `C`.
pub fn mu(inst: &FamilyInstance) -> Result<Complex64> {
    if inst.family != Family::HardyReal {
        return Err(wrong_family(inst));
    }
    let w = inst.omega_plus;
    let wb = w.conj();
    let g = inst.gamma;
    let lam = g + Complex64::i() * (wb + 2.0) * (wb + 1.0);
    Ok(1.0 / (2.0 * wb + 1.0) - 2.0 * g / lam * (1.0 / (2.0 * wb + 1.0) - 1.0 / (w + wb - 1.0)))
}

/// `ν(ω₊) = γ/(2 Re ω₊ − 1)` for family `C`.
pub fn nu(inst: &FamilyInstance) -> Result<f64> {
    if inst.family != Family::HardyReal {
        return Err(wrong_family(inst));
    }
    Ok(inst.gamma / (2.0 * inst.omega_plus.re - 1.0))
}

/// Exact bracket from the monomial algebra, without certification.
pub fn raw_bracket(inst: &FamilyInstance, f: &MonomialSum, g: &MonomialSum) -> Result<Complex64> {
    let u = inst.friedrichs_inverse_kernel(g)?;
    let kind = inst.real_part_form();
    kind.check_domain(f, "f")?;
    if u.is_zero() {
        return l2_inner(f, g);
    }
    Ok(l2_inner(f, g)? - 2.0 * form_value(kind, f, &u)?)
}

/// The bracket computed with quadrature for `⟨f,g⟩` and the finite-difference
/// solution of `A₊,F u = g` for the form term (integrated by parts for `A`).
pub fn bracket_via_oracle(
    inst: &FamilyInstance,
    f: &MonomialSum,
    g: &MonomialSum,
    mesh: &MeshSpec,
) -> Result<Complex64> {
    inst.plus_kernel_coordinates(g)?;
    let kind = inst.real_part_form();
    kind.check_domain(f, "f")?;
    let ip = oracle_form(FormKind::L2, f, g)?;
    let u = inst.bvp_solve_oracle(BvpProblem::Friedrichs(Sign::Plus), g, mesh)?;
    let weight: Box<dyn Fn(f64) -> Complex64> = match inst.family {
        Family::HardyImaginary => {
            // K(f,u) = ⟨f′,u′⟩ = −⟨f″,u⟩ since u vanishes at both ends.
            let f2 = f.differentiate().differentiate();
            Box::new(move |x| -f2.evaluate(x).conj())
        }
        Family::HardyReal => {
            let gamma = inst.gamma;
            let f = f.clone();
            Box::new(move |x| f.evaluate(x).conj() * (gamma / (x * x)))
        }
    };
    let integrand: Vec<Complex64> = u
        .nodes
        .iter()
        .zip(&u.values)
        .map(|(&x, v)| if x == 0.0 { Complex64::new(0.0, 0.0) } else { weight(x) * v })
        .collect();
    let mesh = mesh.build()?;
    let form = mesh.integrate_nodal(&integrand);
    Ok(ip - 2.0 * form)
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Family instance with its certified bracket constants.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketContext {
    pub instance: FamilyInstance,
    pub krein_kind: FormKind,
    /// `σ` for `A`, `μ` for `C`: the bracket `[x^{ω₊}, x^{ω̄₊}]`.
    pub coupling: Certified<Complex64>,
    /// `τ` for `A`, `ν` for `C`: the real-part form of `x^{ω₊}`.
    pub self_energy: Certified<f64>,
    /// Set when an oracle disagreed with a closed form.
    pub flagged: bool,
    pub notes: Vec<String>,
}

impl BracketContext {
    /// Certifies on the default finite-difference mesh.
    pub fn new(instance: FamilyInstance) -> Result<Self> {
        Self::with_mesh(instance, &MeshSpec::default())
    }

    pub fn with_mesh(instance: FamilyInstance, mesh: &MeshSpec) -> Result<Self> {
        let krein_kind = instance.real_part_form();
        let (coupling_cf, energy_cf) = match instance.family {
            Family::HardyImaginary => (sigma(&instance)?, tau(&instance)?),
            Family::HardyReal => (mu(&instance)?, nu(&instance)?),
        };
        let kp = MonomialSum::power(instance.omega_plus);
        let kb = MonomialSum::power(instance.omega_plus.conj());
        let coupling_oracle = bracket_via_oracle(&instance, &kp, &kb, mesh)?;
        let energy_oracle = oracle_form(krein_kind, &kp, &kp)?;

        let mut notes = Vec::new();
        let mut flagged = false;
        let (cname, ename) = match instance.family {
            Family::HardyImaginary => ("sigma", "tau"),
            Family::HardyReal => ("mu", "nu"),
        };
        let coupling = if relative_gap(coupling_cf, coupling_oracle) <= CERTIFICATION_TOL {
            Certified {
                value: coupling_cf,
                status: CertStatus::BothAgree,
                closed_form: coupling_cf,
                oracle: Some(coupling_oracle),
            }
        } else {
            flagged = true;
            notes.push(format!(
                "{cname}: closed form {coupling_cf} disagrees with oracle {coupling_oracle}; oracle value used"
            ));
            Certified {
                value: coupling_oracle,
                status: CertStatus::Oracle,
                closed_form: coupling_cf,
                oracle: Some(coupling_oracle),
            }
        };
        if energy_oracle.im.abs() > IMAGINARY_RESIDUE_TOL * energy_oracle.norm().max(1.0) {
            flagged = true;
            notes.push(format!("{ename}: oracle has imaginary residue {:e}", energy_oracle.im));
        }
        let energy_gap = relative_gap(Complex64::new(energy_cf, 0.0), energy_oracle);
        let self_energy = if energy_gap <= CERTIFICATION_TOL {
            Certified {
                value: energy_cf,
                status: CertStatus::BothAgree,
                closed_form: energy_cf,
                oracle: Some(energy_oracle.re),
            }
        } else {
            flagged = true;
            notes.push(format!(
                "{ename}: closed form {energy_cf} disagrees with oracle {}; oracle value used",
                energy_oracle.re
            ));
            Certified {
                value: energy_oracle.re,
                status: CertStatus::Oracle,
                closed_form: energy_cf,
                oracle: Some(energy_oracle.re),
            }
        };
        Ok(Self {
            instance,
            krein_kind,
            coupling,
            self_energy,
            flagged,
            notes,
        })
    }

    /// `[f, g]` for `f` in the real-part form domain and `g ∈ ker A₊*`.
    pub fn bracket(&self, f: &MonomialSum, g: &MonomialSum) -> Result<Complex64> {
        raw_bracket(&self.instance, f, g)
    }

    /// Hermitian part of `⟨v, A₋*w⟩` minus the real-part form.
    pub fn q_sesquilinear(&self, v: &MonomialSum, w: &MonomialSum) -> Result<Complex64> {
        let kind = self.krein_kind;
        kind.check_domain(v, "v")?;
        kind.check_domain(w, "w")?;
        let pair = |a: &MonomialSum, b: &MonomialSum| {
            let ab = self.instance.apply_formal_maximal(Sign::Minus, b);
            l2_inner(a, &ab).map_err(|_| {
                BkvgError::DomainViolation("⟨v, A₋*w⟩ is not integrable".into())
            })
        };
        let herm = (pair(v, w)? + pair(w, v)?.conj()) * 0.5;
        Ok(herm - form_value(kind, v, w)?)
    }

    /// `q(v) = Re⟨v, A₋*v⟩ − K(v, v)`.
    pub fn q_form(&self, v: &MonomialSum) -> Result<f64> {
        if v.is_zero() {
            return Ok(0.0);
        }
        Ok(self.q_sesquilinear(v, v)?.re)
    }

    /// `A₊,F⁻¹(d·x^{ω̄₊}) + x^{ω₊}`, the domain vector of the rank-one
    /// extension with parameter `d`.
    pub fn extension_vector(&self, d: Complex64) -> Result<MonomialSum> {
        let inst = &self.instance;
        let lift = inst.friedrichs_inverse_kernel(&MonomialSum::monomial(d, inst.omega_plus.conj()))?;
        Ok(&lift + &MonomialSum::power(inst.omega_plus))
    }
}
