//! Incidences between point pairs and SL2 matrix sets, the two energies, and
//! weighted point–line incidences.

mod bounds;
mod count;
mod energy;
mod lines;

pub(crate) use bounds::expansion_preconditions;
pub use bounds::{evaluate_bound, BoundInputs, SL2_THEOREMS};
pub use count::{count_incidences, count_incidences_naive};
pub use energy::{
    empirical_epsilon, energy1, energy1_naive, energy2, energy2_naive, quad_skew_exact,
};
pub use lines::{weighted_pl_incidences, weighted_pl_incidences_naive, Line, WeightedSet};
