//! Tridiagonal kernels: complex Thomas solve and Sturm-sequence eigenvalues
//! of Hermitian tridiagonal matrices.

use num_complex::Complex64;

use crate::error::{BkvgError, Result};

/// Solves `T u = rhs` for `T` with sub-diagonal `lower`, diagonal `diag`
/// and super-diagonal `upper` (no pivoting).
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert!(lower.len() + 1 == n.max(1) && upper.len() + 1 == n.max(1) && rhs.len() == n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower[i - 1] * c[i - 1];
        }
        if pivot.norm() == 0.0 || !pivot.is_finite() {
            return Err(BkvgError::SolveFailure(format!("zero pivot at row {i}")));
        }
        if i + 1 < n {
            c[i] = upper[i] / pivot;
        }
        d[i] = if i == 0 {
            rhs[0] / pivot
        } else {
            (rhs[i] - lower[i - 1] * d[i - 1]) / pivot
        };
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    if d.iter().any(|v| !v.is_finite()) {
        return Err(BkvgError::SolveFailure("non-finite solution".into()));
    }
    Ok(d)
}

/// Number of negative pivots in the LDLᵀ factorization of the real
/// symmetric tridiagonal matrix (`diag`, `off`), i.e. its negative inertia.
/// Exactly-zero pivots are perturbed to a tiny negative value.
pub fn negative_inertia(diag: &[f64], off: &[f64]) -> usize {
    let pivots = ldl_pivots(diag, off);
    pivots.iter().filter(|p| **p < 0.0).count()
}

/// Pivots of the LDLᵀ factorization (Sturm recurrence).
pub fn ldl_pivots(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let scale = diag.iter().chain(off).fold(0.0f64, |m, v| m.max(v.abs()));
    let tiny = f64::MIN_POSITIVE.max(scale * f64::EPSILON * f64::EPSILON);
    let mut pivots = Vec::with_capacity(diag.len());
    let mut prev = 1.0;
    for (i, d) in diag.iter().enumerate() {
        let mut p = if i == 0 { *d } else { d - off[i - 1] * off[i - 1] / prev };
        if p == 0.0 {
            p = -tiny;
        }
        pivots.push(p);
        prev = p;
    }
    pivots
}

/// Solves `T x = rhs` given the LDLᵀ pivots of `T`.
pub fn ldl_solve(pivots: &[f64], off: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = pivots.len();
    let mut y = rhs.to_vec();
    for i in 1..n {
        let l = off[i - 1] / pivots[i - 1];
        let prev = y[i - 1];
        y[i] -= prev * l;
    }
    for i in 0..n {
        y[i] /= pivots[i];
    }
    for i in (0..n.saturating_sub(1)).rev() {
        let l = off[i] / pivots[i];
        let next = y[i + 1];
        y[i] -= next * l;
    }
    y
}

/// Hermitian tridiagonal matrix stored as its real diagonal and the moduli
/// of its off-diagonal (the spectrum only depends on these).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianTridiagonal {
    pub diag: Vec<f64>,
    pub off_abs: Vec<f64>,
}

impl HermitianTridiagonal {
    pub fn new(diag: Vec<f64>, off_abs: Vec<f64>) -> Self {
        assert!(off_abs.len() + 1 == diag.len().max(1));
        Self { diag, off_abs }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let shifted: Vec<f64> = self.diag.iter().map(|d| d - lambda).collect();
        negative_inertia(&shifted, &self.off_abs)
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off_abs[i - 1] } else { 0.0 }
                + if i + 1 < n { self.off_abs[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection to machine precision.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(BkvgError::EigenFailure(format!(
                "index {k} out of range for order {}",
                self.len()
            )));
        }
        let (mut lo, mut hi) = self.gershgorin();
        if !lo.is_finite() || !hi.is_finite() {
            return Err(BkvgError::EigenFailure("non-finite matrix entries".into()));
        }
        let pad = f64::EPSILON * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        self.eigenvalue(0)
    }

    pub fn largest_eigenvalue(&self) -> Result<f64> {
        self.eigenvalue(self.len().saturating_sub(1))
    }

    /// True when no eigenvalue is positive.
    pub fn is_negative_semidefinite(&self) -> bool {
        let negated: Vec<f64> = self.diag.iter().map(|d| -d).collect();
        negative_inertia(&negated, &self.off_abs) == 0
    }
}
