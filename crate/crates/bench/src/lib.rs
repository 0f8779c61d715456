//! Shared fixtures for the criterion benches.

use bkvg_core::{instantiate, BracketContext, ExtensionSpec, Family, FamilyInstance, MonomialSum};
use num_complex::Complex64;

pub fn instance(family: Family, gamma: f64) -> FamilyInstance {
    instantiate(family, gamma).expect("valid gamma")
}

/// Two three-term sums with singular, oscillating exponents.
pub fn sample_pair() -> (MonomialSum, MonomialSum) {
    let c = Complex64::new;
    let f = MonomialSum::from_terms([
        (c(1.0, 0.5), c(-0.3, 1.2)),
        (c(-0.7, 0.0), c(1.5, 0.0)),
        (c(0.2, -1.1), c(2.4, -0.8)),
    ]);
    let g = MonomialSum::from_terms([
        (c(0.4, 0.0), c(-0.1, -0.6)),
        (c(1.0, 1.0), c(0.8, 2.0)),
        (c(-1.3, 0.2), c(3.0, 0.0)),
    ]);
    (f, g)
}

/// Rank-one family `A` extension at `γ = 2` with the given margin.
pub fn extension(margin: f64) -> ExtensionSpec {
    let ctx = BracketContext::new(instance(Family::HardyImaginary, 2.0)).expect("certified constants");
    ExtensionSpec::with_margin(ctx, margin, 0.0)
}
