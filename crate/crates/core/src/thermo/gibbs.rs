//! Equilibrium measures from the Perron data of the Ruelle operator.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Estimate;
use crate::shift::{Cylinder, Graph, Point, Vertex};

use super::potential::Potential;
use super::reduce::reduce_to_one_sided;
use super::transfer::{perron, WordOperator};

pub const DEFAULT_TOL: f64 = 1e-14;
pub const DEFAULT_MAX_ITER: usize = 200_000;

/// Perron triple `(λ, h, ξ)` of a one-sided potential together with the
/// invariant measure `ν = h·ξ`.
///
/// `h` and `ξ` live on admissible words of length `L = max(m, 1)` where
/// `(0, m)` is the potential window. Longer cylinders are computed through
/// the chain rule `ν[a_0 … a_{n-1}] = g(a_0 … a_L)·ν[a_1 … a_{n-1}]`.
#[derive(Clone, Debug)]
pub struct GibbsMeasure {
    graph: Graph,
    potential: Potential<f64>,
    word_len: usize,
    words: Vec<Vec<Vertex>>,
    index: HashMap<Vec<Vertex>, usize>,
    lambda: f64,
    h: Vec<f64>,
    xi: Vec<f64>,
    mass: Vec<f64>,
    period: usize,
    iterations: usize,
    residual_h: f64,
    residual_xi: f64,
}

/// `λ` and `log λ = P_top(φ)`.
pub fn pressure(graph: &Graph, phi: &Potential<f64>) -> Result<(f64, f64)> {
    let m = equilibrium_measure(graph, phi, DEFAULT_TOL)?;
    Ok((m.lambda(), m.log_pressure()))
}

/// Gibbs measure of `phi`; two-sided potentials are first reduced to a
/// cohomologous one-sided one.
pub fn equilibrium_measure(graph: &Graph, phi: &Potential<f64>, tol: f64) -> Result<GibbsMeasure> {
    GibbsMeasure::new(graph, phi, tol, DEFAULT_MAX_ITER)
}

impl GibbsMeasure {
    pub fn new(graph: &Graph, phi: &Potential<f64>, tol: f64, max_iter: usize) -> Result<Self> {
        let (period, classes) = graph.period_and_decomposition()?;
        let phi = if phi.is_one_sided() { phi.clone() } else { reduce_to_one_sided(graph, phi)?.0 };
        let word_len = (phi.window().1.max(1)) as usize;
        let op = WordOperator::new(graph, &phi, word_len);
        let mut class_of = vec![0; graph.num_vertices()];
        for (c, vs) in classes.iter().enumerate() {
            for &v in vs {
                class_of[v] = c;
            }
        }
        let class: Vec<usize> = op.words.iter().map(|w| class_of[w[0]]).collect();
        let p = perron(&op, &class, period, tol, max_iter)?;
        let lh = op.apply(&p.h);
        let hmax = p.h.iter().cloned().fold(0.0, f64::max);
        let residual_h = lh.iter().zip(&p.h).map(|(a, b)| (a - p.lambda * b).abs()).fold(0.0, f64::max) / hmax;
        let lxi = op.apply_dual(&p.xi);
        let xmax = p.xi.iter().cloned().fold(0.0, f64::max);
        let residual_xi = lxi.iter().zip(&p.xi).map(|(a, b)| (a - p.lambda * b).abs()).fold(0.0, f64::max) / xmax;
        let mass: Vec<f64> = p.h.iter().zip(&p.xi).map(|(a, b)| a * b).collect();
        Ok(GibbsMeasure {
            graph: graph.clone(),
            potential: phi,
            word_len,
            words: op.words,
            index: op.index,
            lambda: p.lambda,
            h: p.h,
            xi: p.xi,
            mass,
            period,
            iterations: p.iterations,
            residual_h,
            residual_xi,
        })
    }

    /// Rebuilds a measure with the same Perron data but with length-`L`
    /// cylinder masses replaced by `masses`; `h` is recomputed as `ν/ξ`.
    pub fn with_word_masses(&self, masses: &[f64]) -> Result<Self> {
        if masses.len() != self.words.len() {
            return Err(Error::ShapeMismatch(format!("{} masses for {} words", masses.len(), self.words.len())));
        }
        let mut out = self.clone();
        out.mass = masses.to_vec();
        out.h = masses.iter().zip(&self.xi).map(|(m, x)| m / x).collect();
        Ok(out)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The one-sided potential the measure was built from.
    pub fn potential(&self) -> &Potential<f64> {
        &self.potential
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn log_pressure(&self) -> f64 {
        self.lambda.ln()
    }

    /// Length `L` of the words carrying `h` and `ξ`.
    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn words(&self) -> &[Vec<Vertex>] {
        &self.words
    }

    pub fn h(&self, word: &[Vertex]) -> Option<f64> {
        self.index.get(word).map(|&i| self.h[i])
    }

    pub fn xi(&self, word: &[Vertex]) -> Option<f64> {
        self.index.get(word).map(|&i| self.xi[i])
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Relative sup-norm residuals of `Lh = λh` and `L*ξ = λξ`.
    pub fn residuals(&self) -> (f64, f64) {
        (self.residual_h, self.residual_xi)
    }

    /// `g(y) = e^{φ(y)} h(y) / (λ h(σy))`, reading `y_0, …, y_L`.
    pub fn g(&self, y: &[Vertex]) -> Result<f64> {
        let l = self.word_len;
        if y.len() < l + 1 {
            return Err(Error::MemoryTooShort { needed: l + 1, got: y.len() });
        }
        let y = &y[..l + 1];
        if !self.graph.is_admissible(y) {
            return Err(Error::Inadmissible(self.graph.word_name(y)));
        }
        let num = self.potential.eval_word(y, 0).exp() * self.h[self.index[&y[..l]]];
        Ok(num / (self.lambda * self.h[self.index[&y[1..]]]))
    }

    pub fn g_at(&self, y: &Point) -> f64 {
        self.g(&y.window(0, self.word_len as i64 + 1)).expect("admissible point")
    }

    /// `ν[word]` (anchor-free by shift invariance); zero when inadmissible.
    pub fn cylinder_mass(&self, word: &[Vertex]) -> f64 {
        let l = self.word_len;
        if word.is_empty() {
            return 1.0;
        }
        if !self.graph.is_admissible(word) {
            return 0.0;
        }
        if word.len() < l {
            return self.graph.extensions(word, l).iter().map(|w| self.mass[self.index[w]]).sum();
        }
        let n = word.len();
        let mut total = self.mass[self.index[&word[n - l..]]];
        for start in (0..n - l).rev() {
            total *= self.g(&word[start..start + l + 1]).expect("admissible");
        }
        total
    }

    pub fn cylinder_mass_at(&self, c: &Cylinder) -> f64 {
        self.cylinder_mass(&c.symbols)
    }

    /// Mass of `{x : x_{anchor+i} = pattern[i]}` where `None` leaves a
    /// coordinate free.
    pub fn pattern_mass(&self, pattern: &[Option<Vertex>]) -> f64 {
        let first = match pattern.iter().position(|s| s.is_some()) {
            Some(i) => i,
            None => return 1.0,
        };
        let last = pattern.iter().rposition(|s| s.is_some()).unwrap();
        let pattern = &pattern[first..=last];
        if pattern.iter().all(|s| s.is_some()) {
            let w: Vec<Vertex> = pattern.iter().map(|s| s.unwrap()).collect();
            return self.cylinder_mass(&w);
        }
        self.graph.fill_pattern(pattern).iter().map(|w| self.cylinder_mass(w)).sum()
    }

    /// `ν(past | future) = g_n(past·future)`: the product of the `n` g-values
    /// along the past word. The future must determine every g argument.
    pub fn conditional_cylinder_mass(&self, future: &[Vertex], past: &[Vertex]) -> Result<f64> {
        if past.is_empty() {
            return Ok(1.0);
        }
        let mut y = past.to_vec();
        y.extend_from_slice(future);
        if !self.graph.is_admissible(&y) {
            return Err(Error::Inadmissible(self.graph.word_name(&y)));
        }
        if future.len() < self.word_len {
            return Err(Error::MemoryTooShort { needed: self.word_len, got: future.len() });
        }
        (0..past.len()).map(|j| self.g(&y[j..])).product()
    }

    /// Kolmogorov–Sinai entropy `-Σ ν[u] log g(u)` over words of length `L + 1`.
    pub fn entropy(&self) -> f64 {
        self.graph
            .words(self.word_len + 1)
            .iter()
            .map(|u| {
                let m = self.cylinder_mass(u);
                if m > 0.0 { -m * self.g(u).unwrap().ln() } else { 0.0 }
            })
            .sum()
    }

    /// `∫ f dν` for a locally constant `f`.
    pub fn integrate(&self, f: &Potential<f64>) -> f64 {
        f.table().iter().map(|(w, v)| v * self.cylinder_mass(w)).sum()
    }
}

/// Which local manifold a projection lands on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Stable,
    Unstable,
}

/// `ν^s_x = ν∘(p^s_x)^{-1}` on `W^s_loc(x)`, or its unstable analogue.
#[derive(Clone, Debug)]
pub struct ProjectionMeasure<'a> {
    pub anchor_point: Point,
    pub side: Side,
    pub underlying: &'a GibbsMeasure,
}

impl<'a> ProjectionMeasure<'a> {
    pub fn new(measure: &'a GibbsMeasure, anchor_point: Point, side: Side) -> Self {
        ProjectionMeasure { anchor_point, side, underlying: measure }
    }

    /// Mass of a cylinder. On the stable side the coordinates `≥ 0` of the
    /// cylinder must agree with the anchor point, on the unstable side the
    /// coordinates `≤ 0`. The sum is finite, so the error bound is zero.
    pub fn mass(&self, c: &Cylinder) -> Result<Estimate<f64>> {
        let x = &self.anchor_point;
        let fixed = |i: i64| match self.side {
            Side::Stable => i >= 0,
            Side::Unstable => i <= 0,
        };
        for (k, &s) in c.symbols.iter().enumerate() {
            let i = c.anchor + k as i64;
            if fixed(i) && x.at(i) != s {
                return Err(Error::IncompatibleCylinder(format!("coordinate {i} disagrees with the anchor point")));
            }
        }
        let free: Vec<(i64, Vertex)> = c
            .symbols
            .iter()
            .enumerate()
            .map(|(k, &s)| (c.anchor + k as i64, s))
            .filter(|&(i, _)| !fixed(i))
            .collect();
        let lo = free.iter().map(|p| p.0).min().unwrap_or(0).min(0);
        let hi = free.iter().map(|p| p.0).max().unwrap_or(0).max(0);
        let mut pattern = vec![None; (hi - lo + 1) as usize];
        pattern[(-lo) as usize] = Some(x.at(0));
        for (i, s) in free {
            pattern[(i - lo) as usize] = Some(s);
        }
        Ok(Estimate::exact(self.underlying.pattern_mass(&pattern)))
    }
}

/// Empirical local product structure over cylinders `_m[v_m, …, v_n]`
/// through a fixed edge.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalProductReport {
    pub samples: usize,
    /// Extremes of `ν(C) / (ν(past)·ν(future))`.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `max_ratio / min_ratio`; equals 1 for Markov measures.
    pub worst_ratio: f64,
    /// Smallest `C` with the normalized ratio `ν(C)ν[v_0]/(ν(past)ν(future))`
    /// in `[1/C, C]` over the samples.
    pub c_estimate: f64,
    /// A priori bound `exp(Σ_j osc_j log g)` for the same normalized ratio.
    pub gibbs_bound: f64,
}

/// Ratios `ν(_m[v_m..v_n]) / (ν(_m[v_m..v_0]) ν(_0[v_0..v_n]))` for
/// `-depth ≤ m ≤ 0 < n ≤ depth` with `(v_0, v_1) = (v, w)`.
pub fn local_product_check(m: &GibbsMeasure, v: Vertex, w: Vertex, depth: usize) -> Result<LocalProductReport> {
    let g = m.graph();
    if !g.has_edge(v, w) {
        return Err(Error::Inadmissible(g.word_name(&[v, w])));
    }
    let nu_v = m.cylinder_mass(&[v]);
    let mut ratios = Vec::new();
    if depth == 0 {
        ratios.push(1.0 / nu_v);
    }
    for back in 0..=depth {
        let pasts: Vec<Vec<Vertex>> = reverse_extensions(g, v, back + 1);
        for fwd in 1..=depth {
            let futures = g.extensions(&[v, w], fwd + 1);
            for p in &pasts {
                let mp = m.cylinder_mass(p);
                for f in &futures {
                    let mut full = p.clone();
                    full.extend_from_slice(&f[1..]);
                    ratios.push(m.cylinder_mass(&full) / (mp * m.cylinder_mass(f)));
                }
            }
        }
    }
    let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    let c_estimate = (max_ratio * nu_v).max(1.0 / (min_ratio * nu_v));
    Ok(LocalProductReport {
        samples: ratios.len(),
        min_ratio,
        max_ratio,
        worst_ratio: max_ratio / min_ratio,
        c_estimate,
        gibbs_bound: gibbs_product_bound(m),
    })
}

/// Admissible words of length `len` ending in `v`.
fn reverse_extensions(g: &Graph, v: Vertex, len: usize) -> Vec<Vec<Vertex>> {
    let mut out = vec![vec![v]];
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                g.predecessors(w[0]).iter().map(move |&u| {
                    let mut x = vec![u];
                    x.extend_from_slice(&w);
                    x
                })
            })
            .collect();
    }
    out
}

/// `exp(Σ_{j=1}^{L-1} osc_j)` where `osc_j` is the largest oscillation of
/// `log g(x_{-j}, …, x_{L-j})` over the coordinates `x_1, …` with
/// `x_{-j}, …, x_0` held fixed.
fn gibbs_product_bound(m: &GibbsMeasure) -> f64 {
    let l = m.word_len();
    let g = m.graph();
    let mut total = 0.0;
    for j in 1..l {
        let mut osc = 0.0f64;
        for prefix in g.words(j + 1) {
            let vals: Vec<f64> = g.extensions(&prefix, l + 1).iter().map(|u| m.g(u).unwrap().ln()).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            osc = osc.max(hi - lo);
        }
        total += osc;
    }
    total.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bernoulli(p: f64) -> GibbsMeasure {
        let g = Graph::full_shift(2).unwrap();
        let phi = Potential::from_fn(&g, (0, 0), |w| if w[0] == 0 { p.ln() } else { (1.0 - p).ln() }).unwrap();
        equilibrium_measure(&g, &phi, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn full_shift_pressure() {
        let g = Graph::full_shift(2).unwrap();
        let (lam, p) = pressure(&g, &Potential::constant(&g, 0.0)).unwrap();
        assert!((lam - 2.0).abs() < 1e-13);
        assert!((p - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn golden_mean_mme() {
        let g = Graph::golden_mean();
        let m = equilibrium_measure(&g, &Potential::constant(&g, 0.0), DEFAULT_TOL).unwrap();
        let lam = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((m.lambda() - lam).abs() < 1e-13);
        assert!((m.g(&[0, 0]).unwrap() - 1.0 / lam).abs() < 1e-13);
        assert!((m.g(&[1, 0]).unwrap() - 1.0 / (lam * lam)).abs() < 1e-13);
        assert!((m.conditional_cylinder_mass(&[0], &[1]).unwrap() - 1.0 / (lam * lam)).abs() < 1e-13);
        assert!((m.entropy() - lam.ln()).abs() < 1e-12);
    }

    #[test]
    fn bernoulli_products() {
        let m = bernoulli(1.0 / 3.0);
        assert!((m.log_pressure()).abs() < 1e-13);
        assert!((m.cylinder_mass(&[0, 1, 0]) - 2.0 / 27.0).abs() < 1e-14);
        assert!((m.g(&[0, 1]).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!((m.conditional_cylinder_mass(&[0], &[1, 0]).unwrap() - 2.0 / 9.0).abs() < 1e-14);
        assert_eq!(m.conditional_cylinder_mass(&[0], &[]).unwrap(), 1.0);
    }

    #[test]
    fn periodic_graph_measure() {
        // period 2: a→b→c→d→a plus c→b
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let phi = Potential::from_fn(&g, (0, 1), |w| 0.2 * w[0] as f64 - 0.1 * w[1] as f64).unwrap();
        let m = equilibrium_measure(&g, &phi, DEFAULT_TOL).unwrap();
        assert_eq!(m.period(), 2);
        let (rh, rx) = m.residuals();
        assert!(rh < 1e-12 && rx < 1e-12);
        let total: f64 = (0..4).map(|v| m.cylinder_mass(&[v])).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for w in g.words(3) {
            let s: f64 = g.predecessors(w[0]).iter().map(|&b| {
                let mut x = vec![b];
                x.extend_from_slice(&w);
                m.cylinder_mass(&x)
            }).sum();
            assert!((s - m.cylinder_mass(&w)).abs() < 1e-13);
        }
    }

    #[test]
    fn projection_masses() {
        let m = bernoulli(0.5);
        let g = m.graph().clone();
        let x = Point::new(&g, vec![0], vec![0, 1], 0, vec![1]).unwrap();
        let pu = ProjectionMeasure::new(&m, x.clone(), Side::Unstable);
        assert!((pu.mass(&Cylinder::at_zero(vec![0])).unwrap().value - 0.5).abs() < 1e-14);
        assert!((pu.mass(&Cylinder::at_zero(vec![0, 1])).unwrap().value - 0.25).abs() < 1e-14);
        let ps = ProjectionMeasure::new(&m, x, Side::Stable);
        assert!((ps.mass(&Cylinder::at_zero(vec![0, 1])).unwrap().value - 0.5).abs() < 1e-14);
        assert!(matches!(ps.mass(&Cylinder::at_zero(vec![0, 0])), Err(Error::IncompatibleCylinder(_))));
        let parts: f64 = [0, 1].iter().map(|&b| ps.mass(&Cylinder::new(-1, vec![b, 0])).unwrap().value).sum();
        assert!((parts - 0.5).abs() < 1e-14);
    }

    #[test]
    fn markov_measure_factorizes() {
        let g = Graph::golden_mean();
        let phi = Potential::from_fn(&g, (0, 1), |w| [[0.3, -0.2], [0.7, 0.0]][w[0]][w[1]]).unwrap();
        let m = equilibrium_measure(&g, &phi, DEFAULT_TOL).unwrap();
        let r = local_product_check(&m, 0, 1, 4).unwrap();
        assert!((r.worst_ratio - 1.0).abs() < 1e-10);
        assert!((r.min_ratio - 1.0 / m.cylinder_mass(&[0])).abs() < 1e-9);
        let r0 = local_product_check(&m, 0, 0, 0).unwrap();
        assert_eq!(r0.samples, 1);
    }
}
