//! d-bar distance: exact transport on small joint distributions and the
//! Ornstein–Weiss matching bound.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero};

use super::sets::{check_shapes, joint_distribution, OrderedPartition, Space};
use crate::error::{Error, Result};
use crate::scalar::Rational;

pub const DEFAULT_DBAR_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DbarMode {
    Exact,
    UpperBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DbarResult {
    pub value: f64,
    pub mode: DbarMode,
    /// The exact rational value when `mode` is `Exact`.
    pub exact: Option<Rational>,
    pub witness: Option<String>,
}

/// A joint distribution of label sequences.
pub type Distribution = BTreeMap<Vec<usize>, Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub value: Rational,
    pub plan: Vec<(Vec<usize>, Vec<usize>, Rational)>,
}

struct Edge {
    to: usize,
    /// `None` for unbounded capacity.
    cap: Option<Rational>,
    cost: i64,
    rev: usize,
}

/// Exact minimum-cost transport by successive shortest paths.
pub fn min_cost_transport(supply: &[Rational], demand: &[Rational], cost: &[Vec<i64>]) -> Result<(Rational, Vec<Vec<Rational>>)> {
    let total: Rational = supply.iter().sum();
    if total != demand.iter().sum::<Rational>() {
        return Err(Error::ShapeMismatch("supply and demand totals differ".into()));
    }
    let (a, b) = (supply.len(), demand.len());
    let (source, sink) = (0, a + b + 1);
    let mut graph: Vec<Vec<Edge>> = (0..a + b + 2).map(|_| Vec::new()).collect();
    let add = |g: &mut Vec<Vec<Edge>>, u: usize, v: usize, cap: Option<Rational>, cost: i64| {
        let (ru, rv) = (g[v].len(), g[u].len());
        g[u].push(Edge { to: v, cap, cost, rev: ru });
        g[v].push(Edge { to: u, cap: Some(Rational::zero()), cost: -cost, rev: rv });
    };
    for (i, s) in supply.iter().enumerate() {
        add(&mut graph, source, 1 + i, Some(s.clone()), 0);
    }
    for (j, d) in demand.iter().enumerate() {
        add(&mut graph, 1 + a + j, sink, Some(d.clone()), 0);
    }
    for i in 0..a {
        for j in 0..b {
            add(&mut graph, 1 + i, 1 + a + j, None, cost[i][j]);
        }
    }
    let open = |e: &Edge| e.cap.as_ref().is_none_or(|c| c.is_positive());
    let mut shipped = Rational::zero();
    while shipped < total {
        // Bellman–Ford over the residual graph
        let n = graph.len();
        let mut dist = vec![i64::MAX; n];
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        dist[source] = 0;
        for _ in 0..n {
            let mut changed = false;
            for u in 0..n {
                if dist[u] == i64::MAX {
                    continue;
                }
                for (k, e) in graph[u].iter().enumerate() {
                    if open(e) && dist[u] + e.cost < dist[e.to] {
                        dist[e.to] = dist[u] + e.cost;
                        prev[e.to] = Some((u, k));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if dist[sink] == i64::MAX {
            return Err(Error::HypothesisFailed("transport is infeasible".into()));
        }
        let mut bottleneck: Option<Rational> = None;
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            if let Some(c) = &graph[u][k].cap {
                bottleneck = Some(match bottleneck {
                    Some(b) if &b < c => b,
                    _ => c.clone(),
                });
            }
            v = u;
        }
        let amount = bottleneck.expect("source and sink edges are finite");
        let mut v = sink;
        while let Some((u, k)) = prev[v] {
            if let Some(c) = graph[u][k].cap.as_mut() {
                *c -= &amount;
            }
            let (to, rev) = (graph[u][k].to, graph[u][k].rev);
            if let Some(c) = graph[to][rev].cap.as_mut() {
                *c += &amount;
            }
            v = u;
        }
        shipped += amount;
    }
    let mut plan = vec![vec![Rational::zero(); b]; a];
    let mut value = Rational::zero();
    for i in 0..a {
        for e in &graph[1 + i] {
            if e.to > a && e.to <= a + b {
                // flow on an uncapacitated edge lives on its reverse edge
                let flow = graph[e.to][e.rev].cap.clone().unwrap_or_default();
                value += &flow * Rational::from_integer(e.cost.into());
                plan[i][e.to - 1 - a] = flow;
            }
        }
    }
    Ok((value, plan))
}

fn hamming(u: &[usize], v: &[usize]) -> i64 {
    u.iter().zip(v).filter(|(a, b)| a != b).count() as i64
}

/// Exact d-bar between two joint distributions of label sequences of length
/// `n`: the optimal coupling cost with per-pair cost `(2/n)·Hamming`, since
/// `d(ᾱ_i, β_i) = 2 ν(ᾱ_i ≠ β_i)`.
pub fn dbar_distributions(p: &Distribution, q: &Distribution, cap: usize) -> Result<Coupling> {
    let support = |d: &Distribution| d.iter().filter(|(_, m)| !m.is_zero()).map(|(k, m)| (k.clone(), m.clone())).collect::<Vec<_>>();
    let (ps, qs) = (support(p), support(q));
    if ps.len() + qs.len() > cap {
        return Err(Error::CapExceeded(format!("joint support {} exceeds {cap}", ps.len() + qs.len())));
    }
    let n = ps.first().or(qs.first()).map_or(0, |(k, _)| k.len());
    if n == 0 || ps.iter().chain(&qs).any(|(k, _)| k.len() != n) {
        return Err(Error::ShapeMismatch("label sequences must share a positive length".into()));
    }
    let cost: Vec<Vec<i64>> = ps.iter().map(|(u, _)| qs.iter().map(|(v, _)| hamming(u, v)).collect()).collect();
    let supply: Vec<Rational> = ps.iter().map(|(_, m)| m.clone()).collect();
    let demand: Vec<Rational> = qs.iter().map(|(_, m)| m.clone()).collect();
    let (raw, plan) = min_cost_transport(&supply, &demand, &cost)?;
    let value = raw * Rational::new(2.into(), (n as i64).into());
    let mut out = Vec::new();
    for (i, row) in plan.into_iter().enumerate() {
        for (j, m) in row.into_iter().enumerate() {
            if !m.is_zero() {
                out.push((ps[i].0.clone(), qs[j].0.clone(), m));
            }
        }
    }
    Ok(Coupling { value, plan: out })
}

/// Float masses as exact rationals scaled to total mass one.
pub fn to_rational_distribution(d: &BTreeMap<Vec<usize>, f64>) -> Distribution {
    let exact: Distribution =
        d.iter().filter(|(_, m)| **m > 0.0).map(|(k, m)| (k.clone(), Rational::from_float(*m).unwrap_or_default())).collect();
    let total: Rational = exact.values().sum();
    if total.is_zero() {
        return exact;
    }
    exact.into_iter().map(|(k, m)| (k, m / &total)).collect()
}

pub fn exact_result(c: &Coupling) -> DbarResult {
    DbarResult {
        value: c.value.to_f64().unwrap_or(f64::NAN),
        mode: DbarMode::Exact,
        exact: Some(c.value.clone()),
        witness: None,
    }
}

/// `d̄({α_i}, {β_i})` for partition sequences on two spaces.
pub fn dbar_exact_small(
    alphas: &[OrderedPartition],
    betas: &[OrderedPartition],
    mu: &Space,
    nu: &Space,
    cap: usize,
) -> Result<DbarResult> {
    check_shapes(alphas, betas)?;
    let p = to_rational_distribution(&joint_distribution(alphas, mu)?);
    let q = to_rational_distribution(&joint_distribution(betas, nu)?);
    Ok(exact_result(&dbar_distributions(&p, &q, cap)?))
}

/// An explicit map `θ` between two finite atomic spaces with labelled points.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMatching {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    /// `α_1(x), …, α_n(x)` for each point `x` of the first space.
    pub alpha: Vec<Vec<usize>>,
    pub beta: Vec<Vec<usize>>,
    /// `θ(x)` as an index into the second space.
    pub theta: Vec<usize>,
}

impl PointMatching {
    fn validate(&self) -> Result<()> {
        let k = self.mu.len();
        if self.nu.len() != k || self.alpha.len() != k || self.beta.len() != k || self.theta.len() != k {
            return Err(Error::ShapeMismatch("matching tables have different sizes".into()));
        }
        let mut seen = vec![false; k];
        for &y in &self.theta {
            if y >= k || std::mem::replace(&mut seen[y], true) {
                return Err(Error::HypothesisFailed("theta is not invertible".into()));
            }
        }
        let n = self.alpha.first().map_or(0, Vec::len);
        if n == 0 || self.alpha.iter().chain(&self.beta).any(|l| l.len() != n) {
            return Err(Error::ShapeMismatch("label sequences must share a positive length".into()));
        }
        Ok(())
    }

    /// `|ν(θx)/μ(x) - 1|`, infinite where `μ(x) = 0 < ν(θx)`.
    fn distortion(&self, x: usize) -> f64 {
        let (m, v) = (self.mu[x], self.nu[self.theta[x]]);
        if m == 0.0 {
            if v == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            (v / m - 1.0).abs()
        }
    }

    /// `(1/n) Σ 1[α_i(x) ≠ β_i(θx)]`.
    fn mismatch(&self, x: usize) -> f64 {
        let (a, b) = (&self.alpha[x], &self.beta[self.theta[x]]);
        hamming(a, b) as f64 / a.len() as f64
    }

    /// Which hypothesis fails at `eps`, if any.
    fn failure(&self, eps: f64) -> Option<String> {
        let slack = 1e-12;
        let bad_map: f64 = (0..self.mu.len()).filter(|&x| self.distortion(x) > eps + slack).map(|x| self.mu[x]).sum();
        if bad_map > eps + slack {
            return Some(format!("not {eps}-measure preserving: distortion exceeds eps on mass {bad_map}"));
        }
        let bad_match: f64 = (0..self.mu.len()).filter(|&x| self.mismatch(x) > eps + slack).map(|x| self.mu[x]).sum();
        if bad_match > eps + slack {
            return Some(format!("mismatch frequency exceeds {eps} on mass {bad_match}"));
        }
        None
    }

    /// The least `ε` for which both hypotheses of the `16ε` bound hold.
    pub fn verified_epsilon(&self) -> Result<f64> {
        self.validate()?;
        let k = self.mu.len();
        let mut candidates = vec![0.0, 1.0];
        candidates.extend((0..k).map(|x| self.distortion(x)).filter(|d| d.is_finite()));
        candidates.extend((0..k).map(|x| self.mismatch(x)));
        for key in [0, 1] {
            let mut order: Vec<usize> = (0..k).collect();
            let score = |x: usize| if key == 0 { self.distortion(x) } else { self.mismatch(x) };
            order.sort_by(|&a, &b| score(b).total_cmp(&score(a)));
            let mut acc = 0.0;
            for x in order {
                acc += self.mu[x];
                candidates.push(acc);
            }
        }
        candidates.sort_by(f64::total_cmp);
        candidates.into_iter().find(|&e| self.failure(e).is_none()).ok_or_else(|| {
            Error::HypothesisFailed("no epsilon in [0, 1] satisfies the matching hypotheses".into())
        })
    }

    /// Label distributions under `μ` and `ν`, exact and normalized.
    pub fn distributions(&self) -> (Distribution, Distribution) {
        let collect = |labels: &[Vec<usize>], mass: &[f64]| {
            let mut d: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
            for (l, m) in labels.iter().zip(mass) {
                *d.entry(l.clone()).or_insert(0.0) += m;
            }
            to_rational_distribution(&d)
        };
        (collect(&self.alpha, &self.mu), collect(&self.beta, &self.nu))
    }
}

/// The Ornstein–Weiss bound `d̄ ≤ 16ε` after verifying that `θ` is
/// `ε`-measure preserving and matches labels up to frequency `ε` off a set
/// of mass `ε`.
pub fn dbar_upper_matching(m: &PointMatching, eps: f64) -> Result<DbarResult> {
    m.validate()?;
    if let Some(reason) = m.failure(eps) {
        return Err(Error::HypothesisFailed(reason));
    }
    Ok(DbarResult {
        value: 16.0 * eps,
        mode: DbarMode::UpperBound,
        exact: None,
        witness: Some(format!("theta on {} points verified at epsilon = {eps}", m.mu.len())),
    })
}
