//! Finite-dimensional approximations: graded meshes, discretized model
//! operators with their numerical ranges, Rayleigh quotients on extension
//! domains, and witness sequences.

mod mesh;
mod operator;
mod rayleigh;
mod witness;

pub use mesh::{Mesh, MeshSpec};
pub use operator::{
    dirichlet_ground_constant, discretize, numerical_range_sweep, DiscreteOperator, NumericalRangeReport,
    ANGLE_TOL,
};
pub use rayleigh::rayleigh_inf_on_extension;
pub use witness::{
    kato_sector_witness, negative_margin_witness, nonclosability_witness, WitnessPoint, WitnessSequence,
    NONCLOSABILITY_MIN_MARGIN, WITNESS_TERMS,
};
