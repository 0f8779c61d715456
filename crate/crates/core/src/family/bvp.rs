//! Finite-difference oracle for the Friedrichs boundary-value problems.

use num_complex::Complex64;

use super::{Family, FamilyInstance, Sign};
use crate::discretization::{Mesh, MeshSpec};
use crate::error::{BkvgError, Result};
use crate::monomial::MonomialSum;
use crate::tridiag::solve_tridiagonal;

/// Which operator is inverted with zero Dirichlet data.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BvpProblem {
    /// The Friedrichs extension `A_{sign},F` (resp. `C_{sign},F`).
    Friedrichs(Sign),
    /// The real part `V_F`: `−u″` for `A`, multiplication by `γ/x²` for `C`.
    RealPart,
}

/// Nodal solution on a mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Max-norm residual of the discrete linear system, relative to the
    /// size of the matrix-vector terms in each row.
    pub residual: f64,
    /// Richardson estimate of the discretization error.
    pub error_estimate: f64,
}

impl GridFunction {
    /// `max_i |u_i − f(x_i)|`.
    pub fn max_deviation(&self, f: &MonomialSum) -> f64 {
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(&x, u)| {
                let exact = if x == 0.0 { Complex64::new(0.0, 0.0) } else { f.evaluate(x) };
                (u - exact).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `−u″ + q·x⁻²u = rhs` on interior nodes with `u(0) = u(1) = 0`.
fn solve_on(mesh: &Mesh, q: Complex64, rhs: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let x = mesh.nodes();
    let n = x.len() - 2;
    let mut lower = Vec::with_capacity(n.saturating_sub(1));
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..=n {
        let hm = x[i] - x[i - 1];
        let hp = x[i + 1] - x[i];
        let w = 2.0 / (hm + hp);
        diag.push(Complex64::new(w * (1.0 / hm + 1.0 / hp), 0.0) + q / (x[i] * x[i]));
        if i > 1 {
            lower.push(Complex64::new(-w / hm, 0.0));
        }
        if i < n {
            upper.push(Complex64::new(-w / hp, 0.0));
        }
    }
    let u = solve_tridiagonal(&lower, &diag, &upper, rhs)?;
    let mut residual = 0.0f64;
    for i in 0..n {
        let mut r = diag[i] * u[i] - rhs[i];
        if i > 0 {
            r += lower[i - 1] * u[i - 1];
        }
        if i + 1 < n {
            r += upper[i] * u[i + 1];
        }
        let size = diag[i].norm() * u[i].norm()
            + if i > 0 { lower[i - 1].norm() * u[i - 1].norm() } else { 0.0 }
            + if i + 1 < n { upper[i].norm() * u[i + 1].norm() } else { 0.0 }
            + rhs[i].norm();
        if size > 0.0 {
            residual = residual.max(r.norm() / size);
        }
    }
    let mut values = Vec::with_capacity(n + 2);
    values.push(Complex64::new(0.0, 0.0));
    values.extend(u);
    values.push(Complex64::new(0.0, 0.0));
    Ok((values, residual))
}

impl FamilyInstance {
    /// Solves the Friedrichs problem for right-hand side `g` by second-order
    /// differences on the graded mesh, Richardson-extrapolated against the
    /// mesh with every cell halved.
    pub fn bvp_solve_oracle(&self, problem: BvpProblem, g: &MonomialSum, mesh: &MeshSpec) -> Result<GridFunction> {
        if !g.is_square_integrable() {
            return Err(BkvgError::DomainViolation(
                "right-hand side is not square-integrable".into(),
            ));
        }
        let coarse = mesh.build()?;
        // Normalized to −u″ + q·x⁻²u = scale·g.
        let (q, scale) = match (problem, self.family) {
            (BvpProblem::Friedrichs(sign), _) => {
                // A_{±},F acts as the opposite-sign maximal operator.
                let (p, s) = self.maximal_coefficients(sign.flip());
                (p / -s, 1.0 / -s)
            }
            (BvpProblem::RealPart, Family::HardyImaginary) => {
                (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
            }
            (BvpProblem::RealPart, Family::HardyReal) => {
                let nodes = coarse.nodes().to_vec();
                let values = nodes
                    .iter()
                    .map(|&x| if x == 0.0 { Complex64::new(0.0, 0.0) } else { g.evaluate(x) * (x * x / self.gamma) })
                    .collect();
                return Ok(GridFunction {
                    nodes,
                    values,
                    residual: 0.0,
                    error_estimate: 0.0,
                });
            }
        };
        let rhs_on = |m: &Mesh| -> Vec<Complex64> {
            m.interior().iter().map(|&x| g.evaluate(x) * scale).collect()
        };
        let (uc, res_c) = solve_on(&coarse, q, &rhs_on(&coarse))?;
        let fine = coarse.refined();
        let (uf, _) = solve_on(&fine, q, &rhs_on(&fine))?;
        let mut error_estimate = 0.0f64;
        let values: Vec<Complex64> = uc
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = (uf[2 * i] - c) / 3.0;
                error_estimate = error_estimate.max(d.norm());
                uf[2 * i] + d
            })
            .collect();
        Ok(GridFunction {
            nodes: coarse.nodes().to_vec(),
            values,
            residual: res_c,
            error_estimate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::instantiate;

    #[test]
    fn real_part_problems_have_polynomial_solutions() {
        let inst = instantiate(Family::HardyImaginary, 2.0).unwrap();
        let mesh = MeshSpec::default();
        let u = inst
            .bvp_solve_oracle(BvpProblem::RealPart, &MonomialSum::constant(1.0), &mesh)
            .unwrap();
        let exact = MonomialSum::polynomial(&[0.0, 0.5, -0.5]);
        assert!(u.max_deviation(&exact) <= 1e-8);
        let u = inst
            .bvp_solve_oracle(BvpProblem::RealPart, &MonomialSum::x(), &mesh)
            .unwrap();
        let exact = MonomialSum::polynomial(&[0.0, 1.0 / 6.0, 0.0, -1.0 / 6.0]);
        assert!(u.max_deviation(&exact) <= 1e-8);
        assert!(u.residual < 1e-8);
    }

    #[test]
    fn friedrichs_oracle_matches_closed_form() {
        for family in [Family::HardyImaginary, Family::HardyReal] {
            for gamma in [0.5, 2.0] {
                let inst = instantiate(family, gamma).unwrap();
                for k in inst.kernel_basis().plus_kernel {
                    let exact = inst.friedrichs_inverse_kernel(&k).unwrap();
                    let u = inst
                        .bvp_solve_oracle(BvpProblem::Friedrichs(Sign::Plus), &k, &MeshSpec::default())
                        .unwrap();
                    let dev = u.max_deviation(&exact);
                    assert!(dev <= 1e-8, "{family} γ={gamma}: {dev:e}");
                }
            }
        }
    }

    #[test]
    fn minus_problem_inverts_plus_maximal() {
        let inst = instantiate(Family::HardyImaginary, 1.0).unwrap();
        let w = inst.omega_plus;
        // A₋,F acts as A₊*, whose kernel is spanned by x^{ω̄₊}; the
        // mirror-image lift of x^{ω₊} is therefore built from x^{ω₊+2}.
        let lam = inst
            .apply_formal_maximal(Sign::Plus, &MonomialSum::power(w + 2.0))
            .coefficient_of(w);
        let exact = (&MonomialSum::power(w + 2.0) - &MonomialSum::power(w.conj())).scale(1.0 / lam);
        let u = inst
            .bvp_solve_oracle(BvpProblem::Friedrichs(Sign::Minus), &MonomialSum::power(w), &MeshSpec::default())
            .unwrap();
        assert!(u.max_deviation(&exact) <= 1e-8);
    }

    #[test]
    fn rejects_non_square_integrable_data() {
        let inst = instantiate(Family::HardyImaginary, 1.0).unwrap();
        let r = inst.bvp_solve_oracle(BvpProblem::RealPart, &MonomialSum::power(-0.7), &MeshSpec::default());
        assert!(matches!(r, Err(BkvgError::DomainViolation(_))));
    }
}
