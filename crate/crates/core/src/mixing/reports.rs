//! Empirical K-mixing and very-weak-Bernoulli reports over finite windows.

use std::collections::BTreeMap;

use super::dbar::{dbar_distributions, to_rational_distribution};
use super::sets::{for_each_cell, FlowSet, OrderedPartition, Space};
use crate::error::Result;
use num_traits::ToPrimitive;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomDeviation {
    /// Atom index of `σ_r^{t0·k} β` for `k = N, …, N′`.
    pub label: Vec<usize>,
    pub mass: f64,
    pub conditional: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMixingReport {
    pub t0: f64,
    pub n: u64,
    pub n_prime: u64,
    pub delta: f64,
    pub mu_b: f64,
    /// Mass of atoms `A` with `|μ(B|A) - μ(B)| < δ`.
    pub fraction_good: f64,
    pub max_deviation: f64,
    pub worst_atom: Option<AtomDeviation>,
    pub atoms: Vec<AtomDeviation>,
    /// Some atom mass violates the inequality.
    pub flagged: bool,
}

/// `|μ(B|A) - μ(B)|` over the atoms `A` of `∨_{k=N}^{N′} σ_r^{t0·k} β`.
pub fn k_mixing_report(
    space: &Space,
    b: &FlowSet,
    beta: &OrderedPartition,
    t0: f64,
    n: u64,
    n_prime: u64,
    delta: f64,
) -> Result<KMixingReport> {
    let images: Vec<OrderedPartition> = (n..=n_prime).map(|k| beta.image(t0 * k as f64)).collect();
    let mut refs: Vec<&FlowSet> = vec![b];
    refs.extend(images.iter().flat_map(|p| p.atoms.iter()));
    let mut atoms: BTreeMap<Vec<usize>, (f64, f64)> = BTreeMap::new();
    let mut mu_b = 0.0;
    for_each_cell(space, &refs, |m, inside| {
        let label = labels(&images, &inside[1..]);
        let e = atoms.entry(label).or_insert((0.0, 0.0));
        e.0 += m;
        if inside[0] {
            e.1 += m;
            mu_b += m;
        }
    })?;
    let atoms: Vec<AtomDeviation> = atoms
        .into_iter()
        .filter(|(_, (m, _))| *m > 0.0)
        .map(|(label, (mass, with_b))| {
            let conditional = with_b / mass;
            AtomDeviation { label, mass, conditional, deviation: (conditional - mu_b).abs() }
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.mass).sum();
    let good: f64 = atoms.iter().filter(|a| a.deviation < delta).map(|a| a.mass).sum();
    let worst = atoms.iter().max_by(|a, b| a.deviation.total_cmp(&b.deviation)).cloned();
    let fraction_good = good / total;
    Ok(KMixingReport {
        t0,
        n,
        n_prime,
        delta,
        mu_b,
        fraction_good,
        max_deviation: worst.as_ref().map_or(0.0, |a| a.deviation),
        worst_atom: worst,
        atoms,
        flagged: fraction_good < 1.0,
    })
}

/// The largest deviation for each window start `N` with `N′ = N + width`.
pub fn k_mixing_profile(
    space: &Space,
    b: &FlowSet,
    beta: &OrderedPartition,
    t0: f64,
    starts: &[u64],
    width: u64,
) -> Result<Vec<(u64, f64)>> {
    starts
        .iter()
        .map(|&n| Ok((n, k_mixing_report(space, b, beta, t0, n, n + width, f64::INFINITY)?.max_deviation)))
        .collect()
}

fn labels(parts: &[OrderedPartition], inside: &[bool]) -> Vec<usize> {
    let mut offset = 0;
    parts
        .iter()
        .map(|p| {
            let l = (0..p.len()).find(|&i| inside[offset + i]).unwrap_or(p.len());
            offset += p.len();
            l
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VwbAtom {
    pub label: Vec<usize>,
    pub mass: f64,
    pub dbar: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VwbReport {
    pub t0: f64,
    pub n: u64,
    pub big_n: u64,
    pub big_n_prime: u64,
    pub atoms: Vec<VwbAtom>,
    /// Least `ε` with `d̄ < ε` off conditioning atoms of total mass `≤ ε`.
    pub epsilon_achieved: f64,
}

/// d-bar between `{T^{-i}γ}_{i=1}^n` and the same process conditioned on each
/// atom of `∨_{k=N}^{N′} T^k γ`, with `T = σ_r^{t0}`.
pub fn vwb_report(
    space: &Space,
    gamma: &OrderedPartition,
    t0: f64,
    n: u64,
    big_n: u64,
    big_n_prime: u64,
    cap: usize,
) -> Result<VwbReport> {
    let process: Vec<OrderedPartition> = (1..=n).map(|i| gamma.image(-t0 * i as f64)).collect();
    let past: Vec<OrderedPartition> = (big_n..=big_n_prime).map(|k| gamma.image(t0 * k as f64)).collect();
    let refs: Vec<&FlowSet> = process.iter().chain(&past).flat_map(|p| p.atoms.iter()).collect();
    let split: usize = process.iter().map(OrderedPartition::len).sum();
    let mut whole: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    let mut conditioned: BTreeMap<Vec<usize>, BTreeMap<Vec<usize>, f64>> = BTreeMap::new();
    for_each_cell(space, &refs, |m, inside| {
        let w = labels(&process, &inside[..split]);
        let a = labels(&past, &inside[split..]);
        *whole.entry(w.clone()).or_insert(0.0) += m;
        *conditioned.entry(a).or_default().entry(w).or_insert(0.0) += m;
    })?;
    let p = to_rational_distribution(&whole);
    let mut atoms = Vec::new();
    for (label, d) in conditioned {
        let mass: f64 = d.values().sum();
        if mass <= 0.0 {
            continue;
        }
        let q = to_rational_distribution(&d);
        let dbar = dbar_distributions(&q, &p, cap)?.value.to_f64().unwrap_or(f64::NAN);
        atoms.push(VwbAtom { label, mass, dbar });
    }
    let epsilon_achieved = least_epsilon(&atoms);
    Ok(VwbReport { t0, n, big_n, big_n_prime, atoms, epsilon_achieved })
}

/// `inf{ε : mass{d̄ ≥ ε} ≤ ε}`.
fn least_epsilon(atoms: &[VwbAtom]) -> f64 {
    let mut sorted: Vec<(f64, f64)> = atoms.iter().map(|a| (a.dbar, a.mass)).collect();
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = sorted.first().map_or(0.0, |a| a.0);
    let mut acc = 0.0;
    for k in 0..sorted.len() {
        acc += sorted[k].1;
        let next = sorted.get(k + 1).map_or(0.0, |a| a.0);
        let eps = acc.max(next);
        if eps <= sorted[k].0 {
            best = best.min(eps);
        }
    }
    best
}
