//! Periodic-orbit evidence, lattice fitting and the flow verdict.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loops::{sample_su_loop, su_loop_weight};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shift::{Graph, Point, Vertex};
use crate::suspension::Roof;
use crate::thermo::GibbsMeasure;

pub const DEFAULT_LATTICE_TOL: f64 = 1e-6;

/// Birkhoff sums `r_n(z)` over every periodic orbit of length `n ≤ max_len`,
/// one entry per orbit (cycles listed by their least rotation).
pub fn periodic_orbit_sums<T: Scalar>(roof: &Roof<T>, graph: &Graph, max_len: usize) -> Vec<(Vec<Vertex>, T)> {
    let mut out = Vec::new();
    for start in graph.vertices() {
        let mut stack = vec![vec![start]];
        while let Some(word) = stack.pop() {
            let last = *word.last().unwrap();
            if graph.has_edge(last, start) && is_least_rotation(&word) {
                let z = Point::periodic(graph, &word).expect("closed admissible word");
                out.push((word.clone(), roof.birkhoff(&z, word.len() as i64)));
            }
            if word.len() < max_len {
                // only vertices ≥ start can occur in a least rotation starting at `start`
                for &v in graph.successors(last).iter().rev().filter(|&&v| v >= start) {
                    let mut w = word.clone();
                    w.push(v);
                    stack.push(w);
                }
            }
        }
    }
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

fn is_least_rotation(word: &[Vertex]) -> bool {
    let n = word.len();
    (1..n).all(|s| {
        let rotated = word[s..].iter().chain(&word[..s]);
        word.iter().cmp(rotated) != std::cmp::Ordering::Greater
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LatticeVerdict {
    Dense,
    Lattice(f64),
}

impl LatticeVerdict {
    pub fn generator(&self) -> Option<f64> {
        match self {
            LatticeVerdict::Lattice(c) => Some(*c),
            LatticeVerdict::Dense => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyReport {
    pub sampled_weights: Vec<f64>,
    pub verdict: LatticeVerdict,
    /// Max distance of the evidence to `cℤ` for the fitted (or best rejected) `c`.
    pub residual: f64,
    pub sums_verdict: LatticeVerdict,
    pub loops_verdict: LatticeVerdict,
    /// The loop channel lies inside the periodic-sum lattice (or both are dense).
    pub consistent: bool,
}

/// Distance of `v / c` to the nearest integer.
fn normalized_residual(values: &[f64], c: f64) -> f64 {
    values.iter().map(|v| (v / c - (v / c).round()).abs()).fold(0.0, f64::max)
}

fn absolute_residual(values: &[f64], c: f64) -> f64 {
    values.iter().map(|v| (v - c * (v / c).round()).abs()).fold(0.0, f64::max)
}

/// First continued-fraction denominator `q` with `|x q - p| < tol`.
fn cf_denominator(x: f64, tol: f64, q_max: u64) -> Option<u64> {
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h2, k2) = (a as i128 * h1 + h0, a as i128 * k1 + k0);
        if k2 as u64 > q_max {
            return None;
        }
        if (x * k2 as f64 - h2 as f64).abs() < tol {
            return Some(k2 as u64);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd_u64(b, a % b) }
}

/// The evidence with near-zero entries dropped, in absolute value.
fn nonzero(values: &[f64], tol: f64) -> Vec<f64> {
    values.iter().map(|v| v.abs()).filter(|v| *v >= tol).collect()
}

/// Largest `c ≥ c_min` with every `v / c` within `tol` of an integer.
///
/// Candidates are `c = v₀/k` for the smallest value `v₀`. The least `k` is
/// built from continued-fraction denominators of the ratios `v/v₀`, then
/// multiples are scanned until `c` drops below `c_min`. Returns the verdict
/// and the residual of the accepted or best rejected candidate.
pub fn fit_lattice(values: &[f64], tol: f64, c_min: f64) -> (LatticeVerdict, f64) {
    let vals = nonzero(values, tol);
    let Some(v0) = vals.iter().cloned().reduce(f64::min) else {
        return (LatticeVerdict::Dense, 0.0);
    };
    let k_max = (v0 / c_min).floor() as u64;
    let mut k = 1u64;
    for v in &vals {
        match cf_denominator(v / v0, tol, k_max) {
            Some(q) => k = k / gcd_u64(k, q) * q,
            None => k = k_max + 1,
        }
        if k > k_max {
            break;
        }
    }
    let mut best = f64::INFINITY;
    let mut j = k;
    while j <= k_max && j >= 1 {
        let c = v0 / j as f64;
        let res = normalized_residual(&vals, c);
        if res < tol {
            return (LatticeVerdict::Lattice(c), absolute_residual(&vals, c));
        }
        best = best.min(absolute_residual(&vals, c));
        j += k;
    }
    if !best.is_finite() {
        best = absolute_residual(&vals, c_min);
    }
    (LatticeVerdict::Dense, best)
}

/// Lattice fit of the periodic-sum and loop-weight channels.
///
/// The verdict comes from the periodic sums; the loop channel must lie in the
/// same lattice (it may generate a sublattice) or the report is flagged
/// inconsistent.
pub fn arithmeticity_classify(sums: &[f64], loop_weights: &[f64], tol: f64) -> Result<HolonomyReport> {
    if sums.is_empty() || loop_weights.is_empty() {
        return Err(Error::EmptyEvidence);
    }
    let c_min = 10.0 * tol;
    let (sums_verdict, residual) = fit_lattice(sums, tol, c_min);
    let (loops_verdict, _) = fit_lattice(loop_weights, tol, c_min);
    let loops_trivial = nonzero(loop_weights, tol).is_empty();
    let consistent = match sums_verdict {
        LatticeVerdict::Lattice(c) => normalized_residual(&nonzero(loop_weights, tol), c) < tol,
        LatticeVerdict::Dense => loops_trivial || loops_verdict == LatticeVerdict::Dense,
    };
    Ok(HolonomyReport {
        sampled_weights: loop_weights.to_vec(),
        verdict: sums_verdict,
        residual,
        sums_verdict,
        loops_verdict,
        consistent,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowVerdict {
    Bernoulli,
    BernoulliTimesRotation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub arithmetic: bool,
    pub c: Option<f64>,
    pub theta: Option<f64>,
    pub period_p: usize,
    pub flow_period: Option<f64>,
    pub verdict: FlowVerdict,
    pub holonomy: HolonomyReport,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassifyOptions {
    pub tol: f64,
    /// Cycle length cap for periodic-orbit evidence.
    pub max_len: usize,
    pub loops: usize,
    pub legs_per_loop: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tol: DEFAULT_LATTICE_TOL, max_len: 8, loops: 64, legs_per_loop: 4, seed: 0 }
    }
}

/// Bernoulli versus Bernoulli × rotation.
///
/// A constant roof `c` over a base of period `p` is arithmetic with flow
/// period `p·c`. Otherwise the holonomy lattice generator `c` (if any) is
/// already the flow period and `p = 1`.
pub fn classify_flow<T: Scalar>(
    measure: &GibbsMeasure,
    roof: &Roof<T>,
    graph: &Graph,
    opts: &ClassifyOptions,
) -> Result<ClassificationReport> {
    if measure.graph().names() != graph.names() {
        return Err(Error::HypothesisFailed("measure lives on a different graph".into()));
    }
    let period = graph.period()?;
    let sums: Vec<f64> = periodic_orbit_sums(roof, graph, opts.max_len).into_iter().map(|(_, s)| s.to_f64_lossy()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut weights = Vec::with_capacity(opts.loops);
    for _ in 0..opts.loops.max(1) {
        let x = Point::random(graph, &mut rng, 6);
        let l = sample_su_loop(graph, &x, opts.legs_per_loop, &mut rng)?;
        weights.push(su_loop_weight(&l, roof, opts.tol)?.value.to_f64_lossy());
    }
    let holonomy = arithmeticity_classify(&sums, &weights, opts.tol)?;
    let (c, p) = match roof.constant_value() {
        Some(c) => (Some(c.to_f64_lossy()), period),
        None => (holonomy.verdict.generator(), 1),
    };
    Ok(ClassificationReport {
        arithmetic: c.is_some(),
        c,
        theta: c.map(|c| 2.0 * PI / c),
        period_p: p,
        flow_period: c.map(|c| p as f64 * c),
        verdict: if c.is_some() { FlowVerdict::BernoulliTimesRotation } else { FlowVerdict::Bernoulli },
        holonomy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::thermo::{equilibrium_measure, Potential};

    fn one_symbol_roof(g: &Graph, vals: &[f64]) -> Roof<f64> {
        Roof::new(Potential::from_fn(g, (0, 0), |w| vals[w[0]]).unwrap()).unwrap()
    }

    /// Exhaustive scan over `c = v₀/k`.
    fn oracle(values: &[f64], tol: f64, c_min: f64) -> Option<f64> {
        let vals = nonzero(values, tol);
        let v0 = vals.iter().cloned().reduce(f64::min)?;
        (1..=(v0 / c_min) as u64).map(|k| v0 / k as f64).find(|&c| normalized_residual(&vals, c) < tol)
    }

    #[test]
    fn orbit_enumeration_counts_necklaces() {
        let g = Graph::full_shift(2).unwrap();
        let r = Roof::new(Potential::<Rational>::from_fn(&g, (0, 0), |w| ratio(2 + w[0] as i64, 1)).unwrap()).unwrap();
        let sums = periodic_orbit_sums(&r, &g, 4);
        // binary necklaces of length 1..4: 2 + 3 + 4 + 6
        assert_eq!(sums.len(), 15);
        assert_eq!(sums[0], (vec![0], ratio(2, 1)));
        assert_eq!(sums[1], (vec![1], ratio(3, 1)));
        assert!(sums.contains(&(vec![0, 1], ratio(5, 1))));
    }

    #[test]
    fn fits_match_oracle() {
        let cases: Vec<Vec<f64>> = vec![
            vec![2.0, 3.0, 5.0],
            vec![1.5, 3.0, 4.5],
            vec![0.6, 0.9, 1.5],
            vec![1.0, 1.6180339887, 2.6180339887],
            vec![4.0, 6.0, 10.0],
            vec![1.0, std::f64::consts::SQRT_2],
        ];
        for vals in cases {
            let (v, _) = fit_lattice(&vals, 1e-6, 1e-5);
            assert_eq!(v.generator().is_some(), oracle(&vals, 1e-6, 1e-5).is_some(), "{vals:?}");
            if let (Some(a), Some(b)) = (v.generator(), oracle(&vals, 1e-6, 1e-5)) {
                assert!((a - b).abs() < 1e-12, "{vals:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn classify_examples() {
        let g = Graph::full_shift(2).unwrap();
        let m = equilibrium_measure(&g, &Potential::zero(&g), 1e-12).unwrap();
        let opts = ClassifyOptions { loops: 16, ..Default::default() };
        let rep = classify_flow(&m, &one_symbol_roof(&g, &[2.0, 3.0]), &g, &opts).unwrap();
        assert_eq!(rep.holonomy.verdict, LatticeVerdict::Lattice(1.0));
        assert!(rep.holonomy.consistent);
        assert_eq!(rep.verdict, FlowVerdict::BernoulliTimesRotation);

        let rep = classify_flow(&m, &Roof::constant(&g, 1.5).unwrap(), &g, &opts).unwrap();
        assert_eq!(rep.flow_period, Some(1.5));
        assert_eq!(rep.holonomy.verdict, LatticeVerdict::Lattice(1.5));

        let gm = Graph::golden_mean();
        let m = equilibrium_measure(&gm, &Potential::zero(&gm), 1e-12).unwrap();
        let rep = classify_flow(&m, &one_symbol_roof(&gm, &[1.0, 1.6180339887]), &gm, &opts).unwrap();
        assert_eq!(rep.verdict, FlowVerdict::Bernoulli);
        assert!(rep.holonomy.consistent);
        assert!(rep.holonomy.residual > 1e-6);
    }

    #[test]
    fn empty_evidence() {
        assert!(matches!(arithmeticity_classify(&[], &[1.0], 1e-6), Err(Error::EmptyEvidence)));
    }
}
