//! The Ruelle operator on functions of finitely many coordinates.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::shift::{Graph, Vertex};

use super::potential::Potential;

/// A function of `x_0, …, x_{len-1}`, stored per admissible word.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction {
    pub len: usize,
    pub values: BTreeMap<Vec<Vertex>, f64>,
}

impl CylinderFunction {
    pub fn from_fn<F: FnMut(&[Vertex]) -> f64>(graph: &Graph, len: usize, mut f: F) -> Self {
        let values = graph.words(len).into_iter().map(|w| {
            let v = f(&w);
            (w, v)
        });
        CylinderFunction { len, values: values.collect() }
    }

    pub fn constant(graph: &Graph, len: usize, c: f64) -> Self {
        Self::from_fn(graph, len, |_| c)
    }

    /// Indicator of the cylinder `[word]`, as a function of `len ≥ |word|` coordinates.
    pub fn indicator(graph: &Graph, len: usize, word: &[Vertex]) -> Self {
        Self::from_fn(graph, len, |w| if w.starts_with(word) { 1.0 } else { 0.0 })
    }

    pub fn get(&self, word: &[Vertex]) -> f64 {
        self.values.get(&word[..self.len]).copied().unwrap_or(0.0)
    }
}

/// `(Lf)(x) = Σ_{σy = x} e^{φ(y)} f(y)` for a one-sided locally constant `φ`.
pub fn transfer_apply(graph: &Graph, phi: &Potential<f64>, f: &CylinderFunction) -> Result<CylinderFunction> {
    let (l, m) = phi.window();
    if l < 0 {
        return Err(Error::NotOneSided(l));
    }
    let needed = (m as usize).max(1);
    if f.len < needed {
        return Err(Error::MemoryTooShort { needed, got: f.len });
    }
    Ok(CylinderFunction::from_fn(graph, f.len, |w| {
        graph
            .predecessors(w[0])
            .iter()
            .map(|&v| {
                let mut y = Vec::with_capacity(w.len() + 1);
                y.push(v);
                y.extend_from_slice(w);
                phi.eval_word(&y, 0).exp() * f.get(&y)
            })
            .sum()
    }))
}

/// The Ruelle operator as a sparse matrix on admissible words of length `L`:
/// `(Lf)(w) = Σ_j rows[w][j].1 · f(rows[w][j].0)`.
#[derive(Clone, Debug)]
pub(crate) struct WordOperator {
    pub words: Vec<Vec<Vertex>>,
    pub index: HashMap<Vec<Vertex>, usize>,
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl WordOperator {
    pub fn new(graph: &Graph, phi: &Potential<f64>, len: usize) -> Self {
        let words = graph.words(len);
        let index: HashMap<Vec<Vertex>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let rows = words
            .iter()
            .map(|w| {
                graph
                    .predecessors(w[0])
                    .iter()
                    .map(|&v| {
                        let mut y = Vec::with_capacity(len + 1);
                        y.push(v);
                        y.extend_from_slice(w);
                        (index[&y[..len]], phi.eval_word(&y, 0).exp())
                    })
                    .collect()
            })
            .collect();
        WordOperator { words, index, rows }
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|row| row.iter().map(|&(j, a)| a * f[j]).sum()).collect()
    }

    pub fn apply_dual(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; xi.len()];
        for (i, row) in self.rows.iter().enumerate() {
            if xi[i] != 0.0 {
                for &(j, a) in row {
                    out[j] += xi[i] * a;
                }
            }
        }
        out
    }
}

/// Result of the power iteration.
#[derive(Clone, Debug)]
pub(crate) struct Perron {
    pub lambda: f64,
    pub h: Vec<f64>,
    pub xi: Vec<f64>,
    pub iterations: usize,
}

/// Bracket widths below this count as converged once they stop shrinking.
const STAGNATION_FLOOR: f64 = 1e-11;
const STAGNATION_WINDOW: usize = 200;

/// Power iteration on the `p`-step operator restricted to one cyclic class,
/// then propagation to the other classes. Convergence is declared when the
/// Collatz–Wielandt bracket `[min (A^p v)/v, max (A^p v)/v]` has relative
/// width below `tol`, or when the width has stalled at rounding level.
pub(crate) fn perron(op: &WordOperator, class: &[usize], period: usize, tol: f64, max_iter: usize) -> Result<Perron> {
    let n = op.words.len();
    let start: Vec<f64> = (0..n).map(|i| if class[i] == 0 { 1.0 } else { 0.0 }).collect();
    let step = |v: &[f64], dual: bool| {
        let mut cur = v.to_vec();
        for _ in 0..period {
            cur = if dual { op.apply_dual(&cur) } else { op.apply(&cur) };
        }
        cur
    };
    let iterate = |dual: bool| -> Result<(Vec<f64>, f64, usize)> {
        let mut v = start.clone();
        // (best width, iteration it was reached)
        let mut best = (f64::INFINITY, 0);
        for it in 1..=max_iter {
            let w = step(&v, dual);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for i in 0..n {
                if v[i] > 0.0 {
                    let r = w[i] / v[i];
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
            let scale = w.iter().cloned().fold(0.0, f64::max);
            let next: Vec<f64> = w.iter().map(|x| x / scale).collect();
            let stalled = next.iter().zip(&v).all(|(a, b)| (a - b).abs() <= 4.0 * f64::EPSILON * a.abs());
            v = next;
            let width = (hi - lo) / hi;
            if width < 0.5 * best.0 {
                best = (width, it);
            }
            // rounding noise keeps the bracket from shrinking further
            let at_floor = best.0 <= STAGNATION_FLOOR && it - best.1 >= STAGNATION_WINDOW;
            if width <= tol.max(8.0 * f64::EPSILON) || stalled || at_floor {
                return Ok((v, (lo + hi) / 2.0, it));
            }
        }
        Err(Error::NoConvergence { iterations: max_iter })
    };
    let (h0, lp, it_h) = iterate(false)?;
    let (xi0, _, it_xi) = iterate(true)?;
    let lambda = lp.powf(1.0 / period as f64);
    let mut h = h0.clone();
    let mut piece = h0;
    for _ in 1..period {
        piece = op.apply(&piece).iter().map(|x| x / lambda).collect();
        for (a, b) in h.iter_mut().zip(&piece) {
            *a += b;
        }
    }
    let mut xi = xi0.clone();
    let mut piece = xi0;
    for _ in 1..period {
        piece = op.apply_dual(&piece).iter().map(|x| x / lambda).collect();
        for (a, b) in xi.iter_mut().zip(&piece) {
            *a += b;
        }
    }
    let xs: f64 = xi.iter().sum();
    xi.iter_mut().for_each(|x| *x /= xs);
    let pair: f64 = h.iter().zip(&xi).map(|(a, b)| a * b).sum();
    h.iter_mut().for_each(|x| *x /= pair);
    Ok(Perron { lambda, h, xi, iterations: it_h.max(it_xi) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_preimages() {
        let g = Graph::full_shift(2).unwrap();
        let zero = Potential::constant(&g, 0.0);
        let one = CylinderFunction::constant(&g, 1, 1.0);
        let lf = transfer_apply(&g, &zero, &one).unwrap();
        assert!(lf.values.values().all(|&v| v == 2.0));

        let gm = Graph::golden_mean();
        let zero = Potential::constant(&gm, 0.0);
        let lf = transfer_apply(&gm, &zero, &CylinderFunction::constant(&gm, 1, 1.0)).unwrap();
        assert_eq!(lf.get(&[0]), 2.0);
        assert_eq!(lf.get(&[1]), 1.0);
    }

    #[test]
    fn indicator_picks_single_term() {
        let g = Graph::full_shift(2).unwrap();
        let phi = Potential::from_fn(&g, (0, 1), |w| 0.1 * w[0] as f64 + 0.3 * w[1] as f64).unwrap();
        let f = CylinderFunction::indicator(&g, 2, &[0]);
        let lf = transfer_apply(&g, &phi, &f).unwrap();
        for w in g.words(2) {
            let expect = phi.eval_word(&[0, w[0]], 0).exp();
            assert!((lf.get(&w) - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn memory_and_sidedness_checks() {
        let g = Graph::full_shift(2).unwrap();
        let phi = Potential::from_fn(&g, (0, 3), |_| 0.0).unwrap();
        let f = CylinderFunction::constant(&g, 2, 1.0);
        assert_eq!(transfer_apply(&g, &phi, &f), Err(Error::MemoryTooShort { needed: 3, got: 2 }));
        let phi = Potential::from_fn(&g, (-1, 0), |_| 0.0).unwrap();
        assert_eq!(transfer_apply(&g, &phi, &f), Err(Error::NotOneSided(-1)));
    }
}
