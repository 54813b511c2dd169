//! Partition distances, d-bar, cube partitions, and K-mixing / VWB reports.

mod sets;

pub use sets::{
    for_each_cell, joint_distribution, partition_distance, same_distribution, set_mass, Column, FlowSet, OrderedPartition,
    Space, MAX_COLUMNS, SAME_DISTRIBUTION_TOL,
};
mod dbar;

pub use dbar::{
    dbar_distributions, dbar_exact_small, dbar_upper_matching, exact_result, min_cost_transport, to_rational_distribution,
    Coupling, DbarMode, DbarResult, Distribution, PointMatching, DEFAULT_DBAR_CAP,
};
mod cubes;
mod reports;

pub use cubes::{build_cube_partition, Cube, CubePartition};
pub use reports::{k_mixing_profile, k_mixing_report, vwb_report, AtomDeviation, KMixingReport, VwbAtom, VwbReport};
