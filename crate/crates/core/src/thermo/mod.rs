//! Thermodynamic formalism on finite topological Markov shifts.

mod gibbs;
mod potential;
mod reduce;
mod transfer;

pub use gibbs::{
    equilibrium_measure, local_product_check, pressure, GibbsMeasure, LocalProductReport, ProjectionMeasure, Side,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use potential::{HolderEnvelope, Potential};
pub use reduce::{
    one_sided_roof, recode_return_words, reduce_to_one_sided, return_words, unbordered_word, with_fixed_past,
    OneSidedRoof, ReturnWordRecoding,
};
pub use transfer::{transfer_apply, CylinderFunction};
