//! Exact incidence, energy and packing computations for SL2(F_p) and the
//! Heisenberg group acting on F_p² and F_p³.

pub mod checks;
pub mod constructions;
pub mod error;
pub mod field;
pub mod fourier;
pub mod groups;
pub mod h1_incidence;
pub mod io;
pub mod packing;
pub mod points;
pub mod report;
pub mod sample;
pub mod sl2_incidence;
pub mod sweep;

pub use error::{Error, Result};
pub use field::{FieldCtx, FpVec2, FpVec3};
pub use groups::{Convention, GroupElem, H1Elem, MatrixSet, Sl2Elem};
pub use points::{PointSet2, PointSet3};
pub use report::{BoundKind, BoundReport, Params, Precondition};
