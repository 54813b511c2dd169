//! Canonical partitions into `(n, δ)`-cubes.

use super::sets::{FlowSet, OrderedPartition};
use crate::error::{Error, Result};
use crate::shift::Vertex;
use crate::suspension::FlowMeasure;

/// `{(x, t) : x_{-n}^n = word, τ ≤ t < τ + δ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cube {
    pub word: Vec<Vertex>,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubePartition {
    pub n: usize,
    pub delta: f64,
    pub cubes: Vec<Cube>,
    /// Per word, the height from which the column belongs to the remainder.
    pub remainder: Vec<(Vec<Vertex>, f64)>,
    pub remainder_mass: f64,
}

impl CubePartition {
    pub fn cube_set(&self, c: &Cube) -> FlowSet {
        FlowSet::block(-(self.n as i64), c.word.clone(), c.tau, c.tau + self.delta)
    }

    pub fn remainder_set(&self) -> FlowSet {
        FlowSet::Union(
            self.remainder.iter().map(|(w, from)| FlowSet::block(-(self.n as i64), w.clone(), *from, f64::INFINITY)).collect(),
        )
    }

    /// The cubes in order, then the remainder atom.
    pub fn to_partition(&self) -> OrderedPartition {
        let mut atoms: Vec<FlowSet> = self.cubes.iter().map(|c| self.cube_set(c)).collect();
        atoms.push(self.remainder_set());
        OrderedPartition::new(atoms)
    }
}

/// Tiles each column over a word `a` of length `2n+1` by slabs of height `δ`
/// up to `ρ(a) = inf r` on the cylinder. What is left, including a partial top
/// slab, is the remainder atom, whose mass must not exceed `δ`.
pub fn build_cube_partition(fm: &FlowMeasure, n: usize, delta: f64) -> Result<CubePartition> {
    let inf_roof = fm.roof.inf();
    if !(delta > 0.0 && delta < inf_roof.min(1.0)) {
        return Err(Error::DeltaTooLarge { delta, inf_roof });
    }
    let graph = fm.base.graph();
    let anchor = -(n as i64);
    let slack = 1e-12;
    let mut cubes = Vec::new();
    let mut remainder = Vec::new();
    let mut remainder_mass = 0.0;
    for word in graph.words(2 * n + 1) {
        let rho = fm.roof.inf_on(graph, anchor, &word);
        let slabs = ((rho + slack) / delta).floor() as usize;
        cubes.extend((0..slabs).map(|k| Cube { word: word.clone(), tau: k as f64 * delta }));
        let top = slabs as f64 * delta;
        let mass = fm.block_mass_clipped(anchor, &word, top, f64::INFINITY);
        if mass > slack * 1e-3 {
            remainder.push((word, top));
            remainder_mass += mass;
        }
    }
    if remainder_mass > delta + slack {
        return Err(Error::ResolutionExceeded(format!(
            "remainder mass {remainder_mass} exceeds delta {delta}; increase n"
        )));
    }
    Ok(CubePartition { n, delta, cubes, remainder, remainder_mass })
}
