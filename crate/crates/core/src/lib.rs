//! Boundary analysis of accretive extensions for the model operators
//! `±iγ/x² − d²/dx²` and `±i·d²/dx² + γ/x²` on `(0, 1)`: exact monomial
//! algebra, quadrature and finite-difference oracles, bracket constants,
//! extension parametrization, numerical ranges and witness sequences.

pub mod bracket;
pub mod discretization;
pub mod error;
pub mod extensions;
pub mod family;
pub mod monomial;
pub mod quadrature;
pub mod tridiag;
pub mod verify;

pub use bracket::{BracketContext, CertStatus, Certified};
pub use discretization::{DiscreteOperator, Mesh, MeshSpec, NumericalRangeReport};
pub use error::{BkvgError, Result};
pub use extensions::{AccretivityReport, AuxiliaryMap, ExtOrdering, ExtensionSpec, HermitianMatrix, Sandwich};
pub use family::{instantiate, Family, FamilyInstance, Regime, Sign};
pub use monomial::{form_value, l2_inner, BoundaryTrace, FormKind, MonomialSum, Term};
pub use quadrature::{integrate, oracle_form, QuadratureConfig, QuadratureResult};
pub use verify::{CriterionOutcome, VerifyLevel};
