//! Finite unions of cylinder × interval blocks, flow images, and exact
//! atomization into columns.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::shift::{Cylinder, Graph, Vertex};
use crate::suspension::FlowMeasure;
use crate::thermo::GibbsMeasure;

/// Words over the common window are enumerated explicitly; beyond this many
/// columns the computation is refused.
pub const MAX_COLUMNS: usize = 1 << 20;

/// The measure space: a shift with its Gibbs measure, or a suspension.
/// The shift is handled as the unit-roof suspension, so integer flow times are
/// powers of the shift.
#[derive(Clone, Copy, Debug)]
pub enum Space<'a> {
    Shift(&'a GibbsMeasure),
    Flow(&'a FlowMeasure),
}

impl<'a> Space<'a> {
    pub fn base(&self) -> &'a GibbsMeasure {
        match self {
            Space::Shift(m) => m,
            Space::Flow(fm) => &fm.base,
        }
    }

    pub fn graph(&self) -> &'a Graph {
        self.base().graph()
    }

    fn roof_window(&self) -> (i64, i64) {
        match self {
            Space::Shift(_) => (0, 0),
            Space::Flow(fm) => fm.roof.potential().window(),
        }
    }

    pub fn inf_roof(&self) -> f64 {
        match self {
            Space::Shift(_) => 1.0,
            Space::Flow(fm) => fm.roof.inf(),
        }
    }

    pub fn sup_roof(&self) -> f64 {
        match self {
            Space::Shift(_) => 1.0,
            Space::Flow(fm) => fm.roof.sup(),
        }
    }

    fn normalizer(&self) -> f64 {
        match self {
            Space::Shift(_) => 1.0,
            Space::Flow(fm) => fm.normalizer,
        }
    }

    /// `r(σ^k x)` on a column.
    fn roof_at(&self, col: &Column, k: i64) -> f64 {
        match self {
            Space::Shift(_) => 1.0,
            Space::Flow(fm) => fm.roof.potential().eval_word(col.symbols, col.anchor - k),
        }
    }

    /// `r_j(x)` on a column.
    fn birkhoff_at(&self, col: &Column, j: i64) -> f64 {
        if j >= 0 {
            (0..j).map(|k| self.roof_at(col, k)).sum()
        } else {
            -(j..0).map(|k| self.roof_at(col, k)).sum::<f64>()
        }
    }
}

/// A cylinder's worth of coordinates `x_{anchor}, …`.
#[derive(Clone, Copy, Debug)]
pub struct Column<'s> {
    pub anchor: i64,
    pub symbols: &'s [Vertex],
}

impl Column<'_> {
    fn at(&self, i: i64) -> Vertex {
        self.symbols[(i - self.anchor) as usize]
    }

    fn shifted(&self, j: i64) -> Self {
        Column { anchor: self.anchor - j, symbols: self.symbols }
    }
}

/// A measurable set of the suspension built from blocks.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowSet {
    /// `{(x, t) : x ∈ C, lo ≤ t < min(hi, r(x))}`.
    Block { cylinder: Cylinder, lo: f64, hi: f64 },
    Union(Vec<FlowSet>),
    /// `σ_r^time(set)`.
    Image { set: Box<FlowSet>, time: f64 },
}

impl FlowSet {
    pub fn cylinder(anchor: i64, symbols: Vec<Vertex>) -> Self {
        FlowSet::Block { cylinder: Cylinder::new(anchor, symbols), lo: 0.0, hi: f64::INFINITY }
    }

    pub fn block(anchor: i64, symbols: Vec<Vertex>, lo: f64, hi: f64) -> Self {
        FlowSet::Block { cylinder: Cylinder::new(anchor, symbols), lo, hi }
    }

    pub fn full() -> Self {
        FlowSet::cylinder(0, Vec::new())
    }

    pub fn empty() -> Self {
        FlowSet::Union(Vec::new())
    }

    pub fn image(&self, time: f64) -> Self {
        if time == 0.0 {
            return self.clone();
        }
        FlowSet::Image { set: Box::new(self.clone()), time }
    }

    /// Range of shift indices `j` with `σ_r^{-time}(x, t)` landing in level `j`.
    fn levels(space: &Space, time: f64) -> std::ops::RangeInclusive<i64> {
        let s = -time;
        let (inf, sup) = (space.inf_roof(), space.sup_roof());
        let lo = ((s - sup) / inf).min((s - sup) / sup).floor() as i64 - 1;
        let hi = ((s + sup) / inf).max((s + sup) / sup).ceil() as i64 + 1;
        lo..=hi
    }

    /// Coordinates `[lo, hi]` the set depends on, roof included.
    pub fn window(&self, space: &Space) -> Option<(i64, i64)> {
        let (rl, rh) = space.roof_window();
        match self {
            FlowSet::Block { cylinder, .. } => {
                let (lo, hi) = if cylinder.is_empty() { (0, 0) } else { (cylinder.anchor, cylinder.end() - 1) };
                Some((lo.min(rl), hi.max(rh)))
            }
            FlowSet::Union(sets) => sets.iter().filter_map(|s| s.window(space)).reduce(|a, b| (a.0.min(b.0), a.1.max(b.1))),
            FlowSet::Image { set, time } => {
                let (il, ih) = set.window(space)?;
                let levels = Self::levels(space, *time);
                let (j0, j1) = (*levels.start(), *levels.end());
                Some(((il + j0).min(rl + j0.min(0)), (ih + j1).max(rh + j1.max(0))))
            }
        }
    }

    /// Height intervals of the set inside the column over `x`.
    pub fn intervals(&self, space: &Space, col: &Column) -> Vec<(f64, f64)> {
        match self {
            FlowSet::Block { cylinder, lo, hi } => {
                if cylinder.symbols.iter().enumerate().any(|(i, &v)| col.at(cylinder.anchor + i as i64) != v) {
                    return Vec::new();
                }
                let (a, b) = (lo.max(0.0), hi.min(space.roof_at(col, 0)));
                if a < b { vec![(a, b)] } else { Vec::new() }
            }
            FlowSet::Union(sets) => sets.iter().flat_map(|s| s.intervals(space, col)).collect(),
            FlowSet::Image { set, time } => {
                let r = space.roof_at(col, 0);
                let mut out = Vec::new();
                for j in Self::levels(space, *time) {
                    let shift = space.birkhoff_at(col, j) + time;
                    for (a, b) in set.intervals(space, &col.shifted(j)) {
                        let (a, b) = ((a + shift).max(0.0), (b + shift).min(r));
                        if a < b {
                            out.push((a, b));
                        }
                    }
                }
                out
            }
        }
    }
}

/// Calls `visit(mass, membership)` on every cell of the common refinement of
/// `sets`. Cells are ordered by column word, then height.
pub fn for_each_cell<F: FnMut(f64, &[bool])>(space: &Space, sets: &[&FlowSet], mut visit: F) -> Result<()> {
    let graph = space.graph();
    let (rl, rh) = space.roof_window();
    let (lo, hi) = sets
        .iter()
        .filter_map(|s| s.window(space))
        .fold((rl.min(0), rh.max(0)), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let len = (hi - lo + 1) as usize;
    let count = column_count(graph, len);
    if count > MAX_COLUMNS as f64 {
        return Err(Error::ResolutionExceeded(format!("{count} columns over window [{lo}, {hi}]")));
    }
    let base = space.base();
    let norm = space.normalizer();
    let mut membership = vec![false; sets.len()];
    for word in graph.words(len) {
        let col = Column { anchor: lo, symbols: &word };
        let mass = base.cylinder_mass(&word);
        if mass == 0.0 {
            continue;
        }
        let roof = space.roof_at(&col, 0);
        let per_set: Vec<Vec<(f64, f64)>> = sets.iter().map(|s| s.intervals(space, &col)).collect();
        let mut cuts = vec![0.0, roof];
        for iv in per_set.iter().flatten() {
            cuts.push(iv.0);
            cuts.push(iv.1);
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a || b > roof {
                continue;
            }
            let mid = 0.5 * (a + b);
            for (m, ivs) in membership.iter_mut().zip(&per_set) {
                *m = ivs.iter().any(|&(x, y)| x <= mid && mid < y);
            }
            visit(mass * (b - a) / norm, &membership);
        }
    }
    Ok(())
}

fn column_count(graph: &Graph, len: usize) -> f64 {
    let adj = graph.adjacency_f64();
    let mut v = vec![1.0; graph.num_vertices()];
    for _ in 1..len {
        v = (0..v.len()).map(|i| adj[i].iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
    }
    v.iter().sum()
}

/// Mass of a single set.
pub fn set_mass(space: &Space, set: &FlowSet) -> Result<f64> {
    let mut total = 0.0;
    for_each_cell(space, &[set], |m, inside| {
        if inside[0] {
            total += m;
        }
    })?;
    Ok(total)
}

/// An ordered partition `⟨A_1, …, A_N⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderedPartition {
    pub atoms: Vec<FlowSet>,
}

impl OrderedPartition {
    pub fn new(atoms: Vec<FlowSet>) -> Self {
        OrderedPartition { atoms }
    }

    /// `⟨[x_i = v] : v ∈ V⟩`.
    pub fn coordinate(graph: &Graph, i: i64) -> Self {
        OrderedPartition { atoms: graph.vertices().map(|v| FlowSet::cylinder(i, vec![v])).collect() }
    }

    /// Column heights cut at the given levels: `[0, c_1), [c_1, c_2), …, [c_k, r)`.
    pub fn heights(levels: &[f64]) -> Self {
        let mut cuts = vec![0.0];
        cuts.extend_from_slice(levels);
        cuts.push(f64::INFINITY);
        OrderedPartition { atoms: cuts.windows(2).map(|w| FlowSet::block(0, Vec::new(), w[0], w[1])).collect() }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `σ_r^time α`.
    pub fn image(&self, time: f64) -> Self {
        OrderedPartition { atoms: self.atoms.iter().map(|a| a.image(time)).collect() }
    }

    /// Mass not covered by any atom; overlapping atoms are rejected.
    pub fn defect(&self, space: &Space) -> Result<f64> {
        let refs: Vec<&FlowSet> = self.atoms.iter().collect();
        let (mut missing, mut overlap) = (0.0, 0.0);
        for_each_cell(space, &refs, |m, inside| match inside.iter().filter(|b| **b).count() {
            0 => missing += m,
            1 => {}
            _ => overlap += m,
        })?;
        if overlap > 1e-12 {
            return Err(Error::InvalidPartition(format!("atoms overlap on mass {overlap:e}")));
        }
        Ok(missing)
    }
}

/// `d(α, β) = Σ μ(A_i Δ B_i)`.
pub fn partition_distance(alpha: &OrderedPartition, beta: &OrderedPartition, space: &Space) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::AtomCountMismatch(alpha.len(), beta.len()));
    }
    let n = alpha.len();
    let refs: Vec<&FlowSet> = alpha.atoms.iter().chain(&beta.atoms).collect();
    let mut total = 0.0;
    for_each_cell(space, &refs, |m, inside| {
        let differing = (0..n).filter(|&i| inside[i] != inside[n + i]).count();
        total += m * differing as f64;
    })?;
    Ok(total)
}

/// Label sequence → `μ(A^1_{i_1} ∩ … ∩ A^n_{i_n})`. A cell outside every
/// atom of `α_k` gets label `len(α_k)`.
pub fn joint_distribution(alphas: &[OrderedPartition], space: &Space) -> Result<BTreeMap<Vec<usize>, f64>> {
    let refs: Vec<&FlowSet> = alphas.iter().flat_map(|a| a.atoms.iter()).collect();
    let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for_each_cell(space, &refs, |m, inside| {
        let mut offset = 0;
        let label: Vec<usize> = alphas
            .iter()
            .map(|a| {
                let l = (0..a.len()).find(|&i| inside[offset + i]).unwrap_or(a.len());
                offset += a.len();
                l
            })
            .collect();
        *out.entry(label).or_insert(0.0) += m;
    })?;
    Ok(out)
}

pub const SAME_DISTRIBUTION_TOL: f64 = 1e-12;

/// `{α_i} ∼ {β_i}`: all intersection masses agree within `1e-12`.
pub fn same_distribution(alphas: &[OrderedPartition], betas: &[OrderedPartition], mu: &Space, nu: &Space) -> Result<bool> {
    check_shapes(alphas, betas)?;
    let p = joint_distribution(alphas, mu)?;
    let q = joint_distribution(betas, nu)?;
    let keys: std::collections::BTreeSet<&Vec<usize>> = p.keys().chain(q.keys()).collect();
    let same = keys.into_iter().all(|k| {
        let a = p.get(k).copied().unwrap_or(0.0);
        let b = q.get(k).copied().unwrap_or(0.0);
        (a - b).abs() <= SAME_DISTRIBUTION_TOL
    });
    Ok(same)
}

pub(crate) fn check_shapes(alphas: &[OrderedPartition], betas: &[OrderedPartition]) -> Result<()> {
    if alphas.len() != betas.len() {
        return Err(Error::ShapeMismatch(format!("{} vs {} partitions", alphas.len(), betas.len())));
    }
    for (i, (a, b)) in alphas.iter().zip(betas).enumerate() {
        if a.len() != b.len() {
            return Err(Error::ShapeMismatch(format!("partition {i}: {} vs {} atoms", a.len(), b.len())));
        }
    }
    Ok(())
}
