//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use markovflow::mixing::Distribution;
use markovflow::scalar::{ratio, Rational};
use markovflow::shift::Graph;
use markovflow::thermo::{equilibrium_measure, GibbsMeasure, Potential};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// Spectral radius of a nonnegative dense matrix from its full complex
/// spectrum. The unbounded Schur iteration can spin on matrices with several
/// eigenvalues of maximal modulus, so it is capped. On failure the primitive
/// matrix `I + A` is used, whose Perron root `1 + ρ` is strictly dominant.
pub fn dense_spectral_radius(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let radius = |s: nalgebra::Schur<f64, nalgebra::Dyn>| s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(s) = m.clone().try_schur(f64::EPSILON, 10_000) {
        return radius(s);
    }
    let shifted = m + DMatrix::identity(n, n);
    radius(shifted.try_schur(f64::EPSILON, 10_000).expect("I + A is primitive")) - 1.0
}

/// A random transitive graph on `n` vertices: a Hamiltonian cycle plus random
/// chords, with at least one chord so the graph is not a single cycle.
pub fn random_transitive_graph<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for u in 0..n {
        for v in 0..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(0.3) {
                edges.push((u, v));
            }
        }
    }
    if edges.len() == n {
        edges.push((0, 0));
    }
    Graph::from_indices(n, &edges).unwrap()
}

pub fn bernoulli(p: f64) -> GibbsMeasure {
    let g = Graph::full_shift(2).unwrap();
    let phi = Potential::from_fn(&g, (0, 0), |w| if w[0] == 0 { p.ln() } else { (1.0 - p).ln() }).unwrap();
    equilibrium_measure(&g, &phi, 1e-14).unwrap()
}

pub fn markov(p: [[f64; 2]; 2]) -> GibbsMeasure {
    let g = Graph::full_shift(2).unwrap();
    let phi = Potential::from_fn(&g, (0, 1), |w| p[w[0]][w[1]].ln()).unwrap();
    equilibrium_measure(&g, &phi, 1e-14).unwrap()
}

/// `max_i |P^N(i, a) - π_a|` by explicit matrix powers.
pub fn markov_deviation(p: [[f64; 2]; 2], a: usize, n: u32) -> f64 {
    let m = DMatrix::from_fn(2, 2, |i, j| p[i][j]);
    let pn = m.pow(n);
    let pi_a = if a == 0 { p[1][0] / (p[0][1] + p[1][0]) } else { p[0][1] / (p[0][1] + p[1][0]) };
    (0..2).map(|i| (pn[(i, a)] - pi_a).abs()).fold(0.0, f64::max)
}

fn hamming(u: &[usize], v: &[usize]) -> i64 {
    u.iter().zip(v).filter(|(a, b)| a != b).count() as i64
}

/// Exact d-bar by enumerating every coupling in units of the common
/// denominator. Optimal transport plans with integer margins are integral, so
/// the minimum over integer couplings is the true minimum.
pub fn exhaustive_dbar(p: &Distribution, q: &Distribution) -> Rational {
    let ps: Vec<(&Vec<usize>, &Rational)> = p.iter().filter(|(_, m)| !m.is_zero()).collect();
    let qs: Vec<(&Vec<usize>, &Rational)> = q.iter().filter(|(_, m)| !m.is_zero()).collect();
    let den = ps.iter().chain(&qs).fold(BigInt::from(1), |acc, (_, m)| acc.lcm(m.denom()));
    let units = |m: &Rational| (m * Rational::from_integer(den.clone())).to_integer().to_i64().unwrap();
    let mut rows: Vec<i64> = ps.iter().map(|(_, m)| units(m)).collect();
    let mut cols: Vec<i64> = qs.iter().map(|(_, m)| units(m)).collect();
    let cost: Vec<Vec<i64>> = ps.iter().map(|(u, _)| qs.iter().map(|(v, _)| hamming(u, v)).collect()).collect();
    let mut best = i64::MAX;
    fn fill(i: usize, j: usize, rows: &mut [i64], cols: &mut [i64], cost: &[Vec<i64>], acc: i64, best: &mut i64) {
        if acc >= *best {
            return;
        }
        if i == rows.len() {
            if cols.iter().all(|&c| c == 0) {
                *best = acc;
            }
            return;
        }
        if j + 1 == cols.len() {
            // the last column takes what is left of the row
            let x = rows[i];
            if x > cols[j] {
                return;
            }
            rows[i] = 0;
            cols[j] -= x;
            fill(i + 1, 0, rows, cols, cost, acc + x * cost[i][j], best);
            cols[j] += x;
            rows[i] = x;
            return;
        }
        for x in 0..=rows[i].min(cols[j]) {
            rows[i] -= x;
            cols[j] -= x;
            fill(i, j + 1, rows, cols, cost, acc + x * cost[i][j], best);
            rows[i] += x;
            cols[j] += x;
        }
    }
    fill(0, 0, &mut rows, &mut cols, &cost, 0, &mut best);
    let n = ps[0].0.len() as i64;
    Rational::new(BigInt::from(2 * best), den * BigInt::from(n))
}

/// A random distribution over label sequences of length `n` with `support`
/// atoms and masses in units of `1/den`.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, labels: usize, support: usize, den: i64) -> Distribution {
    let mut out: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
    let mut left = den;
    let keys: Vec<Vec<usize>> = (0..support).map(|_| (0..n).map(|_| rng.gen_range(0..labels)).collect()).collect();
    for (i, k) in keys.iter().enumerate() {
        let take = if i + 1 == keys.len() { left } else { rng.gen_range(0..=left) };
        left -= take;
        *out.entry(k.clone()).or_insert_with(|| ratio(0, 1)) += ratio(take, den);
    }
    out.retain(|_, m| !m.is_zero());
    out
}
