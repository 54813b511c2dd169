//! Topological Markov flows: suspensions of a shift under a roof function.

mod flow;
mod measure;
mod recode;

pub use flow::{bw_distance_upper, flow_map, FlowPoint, Roof};
pub use measure::{abramov_entropy, induce_measure, suspend_measure, FlowMeasure};
pub use recode::{constant_roof_recode, product_coordinates, ConstantRoofRecoding, ProductCoordinates};
