//! The groups SL2(F_p) and H1(F_p), their actions, and finite sets of elements.

mod cosets;
mod h1;
mod set;
mod sl2;

pub use cosets::{max_coset_intersection, CosetReport, CosetWitness, EXCEPTIONAL_ORDER_BOUND};
pub use h1::{enumerate_h1, Convention, H1Elem};
pub use set::{GroupElem, MatrixSet};
pub(crate) use sl2::complete_basis;
pub use sl2::{
    enumerate_sl2, pair_transporter, sl2_order, transporter_fiber, Sl2Elem, DEFAULT_ENUMERATION_CAP,
};
