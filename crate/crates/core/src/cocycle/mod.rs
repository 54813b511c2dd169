//! Bowen–Marcus cocycles, su-loops, holonomy and the arithmeticity verdict.

mod pair;

pub use pair::{bowen_marcus_p, AnchoredPair};
mod loops;

pub use loops::{lift_su_path, random_leg, random_neighbor, sample_su_loop, su_loop_weight, SuLoop, SuPath};
mod classify;

pub use classify::{
    arithmeticity_classify, classify_flow, fit_lattice, periodic_orbit_sums, ClassificationReport, ClassifyOptions,
    FlowVerdict, HolonomyReport, LatticeVerdict, DEFAULT_LATTICE_TOL,
};
