//! Complex scalar pre-potential of point charges, the complex Faraday vector
//! derived from it, the spinor-boost generator algebra, and loop phases.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod aharonov;
pub mod algebra;
pub mod error;
pub mod faraday;
pub mod field;
pub mod prepotential;
pub mod spacetime;

pub use aharonov::{ab_phase_report, winding_number, LoopPhaseReport};
pub use algebra::{validate_relations, ComplexMatrix4, RelationReport};
pub use error::{Error, Result};
pub use faraday::{faraday_from_a, faraday_from_s, faraday_uniform, FaradayVector};
pub use field::{hessian, Hessian, ScalarField, StencilOptions};
pub use prepotential::{Charge, ChargeSystem, Path, PrePotentialValue};
pub use spacetime::{FourVector, LorentzMatrix, WorldLine, WorldSample};
