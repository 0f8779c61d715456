use num_complex::Complex64;

use super::{Mesh, MeshSpec};
use crate::error::{BkvgError, Result};
use crate::extensions::ExtensionSpec;
use crate::family::Family;
use crate::monomial::{form_value, l2_inner, MonomialSum};
use crate::quadrature::GaussRule;
use crate::tridiag::{ldl_pivots, ldl_solve};

const CELL_NODES: usize = 8;

fn eval(f: &MonomialSum, x: f64) -> Complex64 {
    if x == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        f.evaluate(x)
    }
}

/// Galerkin pencil `(S, M)` on hats ⊕ extension vectors. Hat blocks are real
/// tridiagonal; coupling and extension blocks are dense.
struct Pencil {
    s_diag: Vec<f64>,
    s_off: Vec<f64>,
    m_diag: Vec<f64>,
    m_off: Vec<f64>,
    s_cross: Vec<Vec<Complex64>>,
    m_cross: Vec<Vec<Complex64>>,
    s_ext: Vec<Vec<Complex64>>,
    m_ext: Vec<Vec<Complex64>>,
}

impl Pencil {
    fn assemble(spec: &ExtensionSpec, mesh: &Mesh, ext: &[MonomialSum]) -> Result<Self> {
        let ctx = &spec.context;
        let inst = &ctx.instance;
        let x = mesh.nodes();
        let n = x.len() - 2;
        let rule = GaussRule::new(CELL_NODES);
        let hat = |i: usize, t: f64| -> f64 {
            // Hat centred on node i (1-based interior numbering).
            if t <= x[i] {
                (t - x[i - 1]) / (x[i] - x[i - 1])
            } else {
                (x[i + 1] - t) / (x[i + 1] - x[i])
            }
        };
        let mut m_diag = Vec::with_capacity(n);
        let mut m_off = Vec::with_capacity(n.saturating_sub(1));
        for i in 1..=n {
            m_diag.push((x[i + 1] - x[i - 1]) / 3.0);
            if i < n {
                m_off.push((x[i + 1] - x[i]) / 6.0);
            }
        }
        let (s_diag, s_off) = match inst.family {
            Family::HardyImaginary => {
                let d = (1..=n)
                    .map(|i| 1.0 / (x[i] - x[i - 1]) + 1.0 / (x[i + 1] - x[i]))
                    .collect();
                let o = (1..n).map(|i| -1.0 / (x[i + 1] - x[i])).collect();
                (d, o)
            }
            Family::HardyReal => {
                let g = inst.gamma;
                let cell = |i: usize, j: usize, a: f64, b: f64| -> f64 {
                    rule.apply(&|t| Complex64::new(g * hat(i, t) * hat(j, t) / (t * t), 0.0), a, b).re
                };
                let d = (1..=n)
                    .map(|i| cell(i, i, x[i - 1], x[i]) + cell(i, i, x[i], x[i + 1]))
                    .collect();
                let o = (1..n).map(|i| cell(i, i + 1, x[i], x[i + 1])).collect();
                (d, o)
            }
        };

        let mut s_cross = Vec::with_capacity(ext.len());
        let mut m_cross = Vec::with_capacity(ext.len());
        for e in ext {
            let at: Vec<Complex64> = x.iter().map(|&t| eval(e, t)).collect();
            let mut sc = Vec::with_capacity(n);
            let mut mc = Vec::with_capacity(n);
            for i in 1..=n {
                let (hm, hp) = (x[i] - x[i - 1], x[i + 1] - x[i]);
                let over = |a: f64, b: f64, w: &dyn Fn(f64) -> f64| {
                    rule.apply(&|t| eval(e, t) * (hat(i, t) * w(t)), a, b)
                };
                let one = |_: f64| 1.0;
                mc.push(over(x[i - 1], x[i], &one) + over(x[i], x[i + 1], &one));
                sc.push(match inst.family {
                    Family::HardyImaginary => (at[i] - at[i - 1]) / hm - (at[i + 1] - at[i]) / hp,
                    Family::HardyReal => {
                        let g = inst.gamma;
                        let w = move |t: f64| g / (t * t);
                        over(x[i - 1], x[i], &w) + over(x[i], x[i + 1], &w)
                    }
                });
            }
            s_cross.push(sc);
            m_cross.push(mc);
        }

        let k = ext.len();
        let mut s_ext = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        let mut m_ext = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        for i in 0..k {
            for j in 0..k {
                s_ext[i][j] = form_value(ctx.krein_kind, &ext[i], &ext[j])?
                    + ctx.q_sesquilinear(&ext[i], &ext[j])?;
                m_ext[i][j] = l2_inner(&ext[i], &ext[j])?;
            }
        }
        Ok(Self {
            s_diag,
            s_off,
            m_diag,
            m_off,
            s_cross,
            m_cross,
            s_ext,
            m_ext,
        })
    }

    /// Negative inertia of `S − λM` by the Haynsworth additivity formula.
    fn count_below(&self, lambda: f64) -> usize {
        let d: Vec<f64> = self.s_diag.iter().zip(&self.m_diag).map(|(s, m)| s - lambda * m).collect();
        let o: Vec<f64> = self.s_off.iter().zip(&self.m_off).map(|(s, m)| s - lambda * m).collect();
        let pivots = ldl_pivots(&d, &o);
        let mut count = pivots.iter().filter(|p| **p < 0.0).count();
        let k = self.s_ext.len();
        if k == 0 {
            return count;
        }
        let b: Vec<Vec<Complex64>> = (0..k)
            .map(|j| {
                self.s_cross[j]
                    .iter()
                    .zip(&self.m_cross[j])
                    .map(|(s, m)| s - m * lambda)
                    .collect()
            })
            .collect();
        let tb: Vec<Vec<Complex64>> = b.iter().map(|col| ldl_solve(&pivots, &o, col)).collect();
        let mut schur = vec![vec![Complex64::new(0.0, 0.0); k]; k];
        for i in 0..k {
            for j in 0..k {
                let coupling: Complex64 = b[i].iter().zip(&tb[j]).map(|(a, t)| a.conj() * t).sum();
                schur[i][j] = self.s_ext[i][j] - self.m_ext[i][j] * lambda - coupling;
            }
        }
        count += hermitian_negative_count(&schur);
        count
    }
}

/// Negative inertia of a small Hermitian matrix by complex LDL*.
fn hermitian_negative_count(a: &[Vec<Complex64>]) -> usize {
    let k = a.len();
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut count = 0;
    for p in 0..k {
        let pivot = m[p][p].re;
        if pivot < 0.0 {
            count += 1;
        }
        if pivot == 0.0 {
            continue;
        }
        for i in p + 1..k {
            let l = m[i][p] / pivot;
            for j in p + 1..k {
                let update = l * m[p][j];
                m[i][j] -= update;
            }
        }
    }
    count
}

/// Smallest generalized Rayleigh quotient of `Re⟨ψ, A_Dψ⟩/‖ψ‖²` over
/// P1 hats on the mesh together with the domain vector of the extension and
/// its Friedrichs directions.
pub fn rayleigh_inf_on_extension(spec: &ExtensionSpec, mesh: &MeshSpec) -> Result<f64> {
    spec.require_closable()?;
    let mesh = mesh.build()?;
    let mut ext = Vec::new();
    if let Some(v) = spec.domain_vector()? {
        ext.push(v);
    }
    ext.extend(spec.friedrichs_directions()?);
    let pencil = Pencil::assemble(spec, &mesh, &ext)?;

    let mut lo = -1.0;
    let mut hi = 1.0;
    for _ in 0..200 {
        if pencil.count_below(lo) == 0 {
            break;
        }
        lo *= 2.0;
    }
    for _ in 0..200 {
        if pencil.count_below(hi) > 0 {
            break;
        }
        hi *= 2.0;
    }
    if pencil.count_below(lo) > 0 || pencil.count_below(hi) == 0 {
        return Err(BkvgError::EigenFailure("could not bracket the smallest eigenvalue".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pencil.count_below(mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::BracketContext;
    use crate::family::instantiate;
    use std::f64::consts::PI;

    #[test]
    fn small_hermitian_inertia() {
        let c = |re, im| Complex64::new(re, im);
        let a = vec![vec![c(1.0, 0.0), c(0.0, 2.0)], vec![c(0.0, -2.0), c(1.0, 0.0)]];
        assert_eq!(hermitian_negative_count(&a), 1);
        let a = vec![vec![c(3.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]];
        assert_eq!(hermitian_negative_count(&a), 0);
    }

    #[test]
    fn friedrichs_and_zero_margin() {
        let ctx = BracketContext::new(instantiate(Family::HardyImaginary, 2.0).unwrap()).unwrap();
        let mesh = MeshSpec::new(500, 0.85).unwrap();
        let f = rayleigh_inf_on_extension(&ExtensionSpec::friedrichs(ctx.clone()), &mesh).unwrap();
        assert!(((f - PI * PI) / (PI * PI)).abs() < 1e-3, "{f}");
        let z = rayleigh_inf_on_extension(&ExtensionSpec::with_margin(ctx, 0.0, 0.0), &mesh).unwrap();
        assert!(z.abs() < 0.02 * PI * PI, "{z}");
    }

    #[test]
    fn positive_margin_within_valid_bounds() {
        let ctx = BracketContext::new(instantiate(Family::HardyImaginary, 2.0).unwrap()).unwrap();
        let mesh = MeshSpec::new(500, 0.85).unwrap();
        for m in [0.2, 1.0, 5.0] {
            let spec = ExtensionSpec::with_margin(ctx.clone(), m, 0.0);
            let r = rayleigh_inf_on_extension(&spec, &mesh).unwrap();
            let (a, d) = (PI * PI, 3.0 * m);
            assert!(r >= 0.98 * a * d / (a + d) && r <= 1.02 * a.min(d), "m={m}: {r}");
        }
    }
}
