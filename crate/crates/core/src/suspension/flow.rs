//! Roof functions, the suspension flow and Bowen–Walters distance bounds.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shift::{birkhoff_sum, metric_d, Graph, Observable, Point, Vertex};
use crate::thermo::Potential;

/// A strictly positive locally constant roof with certified bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct Roof<T> {
    potential: Potential<T>,
    inf: T,
    sup: T,
}

impl<T: Scalar> Roof<T> {
    pub fn new(potential: Potential<T>) -> Result<Self> {
        let inf = potential.min_value();
        if inf <= T::zero() {
            return Err(Error::NonPositiveRoof(inf.to_f64_lossy()));
        }
        let sup = potential.max_value();
        Ok(Roof { potential, inf, sup })
    }

    pub fn constant(graph: &Graph, c: T) -> Result<Self> {
        Self::new(Potential::constant(graph, c))
    }

    pub fn potential(&self) -> &Potential<T> {
        &self.potential
    }

    pub fn inf(&self) -> T {
        self.inf.clone()
    }

    pub fn sup(&self) -> T {
        self.sup.clone()
    }

    pub fn constant_value(&self) -> Option<T> {
        (self.inf == self.sup).then(|| self.inf.clone())
    }

    pub fn eval(&self, x: &Point) -> T {
        self.potential.eval_point(x)
    }

    /// `r_n(x)` for any integer `n`.
    pub fn birkhoff(&self, x: &Point, n: i64) -> T {
        birkhoff_sum(&self.potential, x, n)
    }

    /// Smallest roof value over points whose coordinates match `pattern`
    /// starting at `anchor`.
    pub fn inf_on(&self, graph: &Graph, anchor: i64, symbols: &[Vertex]) -> T {
        self.values_on(graph, anchor, symbols)
            .into_iter()
            .map(|(_, v)| v)
            .reduce(|a, b| if b < a { b } else { a })
            .unwrap_or_else(|| self.inf.clone())
    }

    /// Roof values on the joint window of the cylinder `_anchor[symbols]` and
    /// the roof memory, one per admissible filling, with the filling's word
    /// and window start.
    pub fn values_on(&self, graph: &Graph, anchor: i64, symbols: &[Vertex]) -> Vec<((i64, Vec<Vertex>), T)> {
        let (l, m) = self.potential.window();
        let lo = l.min(anchor);
        let hi = m.max(anchor + symbols.len() as i64 - 1);
        let mut pattern = vec![None; (hi - lo + 1) as usize];
        for (k, &s) in symbols.iter().enumerate() {
            pattern[(anchor - lo) as usize + k] = Some(s);
        }
        graph
            .fill_pattern(&pattern)
            .into_iter()
            .map(|w| {
                let v = self.potential.eval_word(&w, lo);
                ((lo, w), v)
            })
            .collect()
    }

    pub fn to_f64(&self) -> Roof<f64> {
        Roof::new(self.potential.to_f64()).expect("positive roof stays positive")
    }
}

impl<T: Scalar> Observable<T> for Roof<T> {
    fn eval(&self, x: &Point) -> T {
        self.potential.eval_point(x)
    }
}

/// A point `(x, t)` of the suspension with `0 ≤ t < r(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowPoint<T> {
    pub base: Point,
    pub height: T,
}

impl<T: Scalar> FlowPoint<T> {
    pub fn new(roof: &Roof<T>, base: Point, height: T) -> Result<Self> {
        let r = roof.eval(&base);
        if height < T::zero() || height >= r {
            return Err(Error::HeightOutOfRange { height: height.to_f64_lossy(), roof: r.to_f64_lossy() });
        }
        Ok(FlowPoint { base, height })
    }

    /// Equality up to `tol` in height, accounting for the identification
    /// `(x, r(x)) ~ (σx, 0)`.
    pub fn approx_eq(&self, other: &Self, roof: &Roof<T>, tol: f64) -> bool {
        let close = |a: &Point, s: &T, b: &Point, t: &T| a == b && (s.clone() - t.clone()).abs().to_f64_lossy() <= tol;
        if close(&self.base, &self.height, &other.base, &other.height) {
            return true;
        }
        let up = |z: &Self| (z.base.shift(1), z.height.clone() - roof.eval(&z.base));
        let (b1, h1) = up(self);
        let (b2, h2) = up(other);
        close(&b1, &h1, &other.base, &other.height) || close(&self.base, &self.height, &b2, &h2)
    }
}

/// `σ_r^τ(x, t) = (σ^n x, t + τ - r_n(x))` with the unique admissible `n`.
pub fn flow_map<T: Scalar>(roof: &Roof<T>, z: &FlowPoint<T>, tau: T) -> FlowPoint<T> {
    let mut x = z.base.clone();
    let mut s = z.height.clone() + tau;
    loop {
        let r = roof.eval(&x);
        if s >= r {
            s = s - r;
            x = x.shift(1);
        } else {
            break;
        }
    }
    while s < T::zero() {
        x = x.shift(-1);
        s = s + roof.eval(&x);
    }
    FlowPoint { base: x, height: s }
}

/// An upper bound on the Bowen–Walters distance `d_r(z, w)`.
///
/// Points are moved to the unit suspension through `(x, t) ↦ (x, t/r(x))`.
/// Paths alternate horizontal segments `(p, h) → (q, h)` of length
/// `(1-h)d(p,q) + h·d(σp,σq)` and vertical segments along an orbit. Nodes are
/// shifts of both base points within `[-K, K]` and splices of their pasts and
/// futures, at heights `0` and the two normalized heights. The shortest path
/// with at most `K` segments is found by Bellman–Ford; both orders are tried.
pub fn bw_distance_upper(graph: &Graph, roof: &Roof<f64>, z: &FlowPoint<f64>, w: &FlowPoint<f64>, budget: usize) -> f64 {
    let forward = bw_one_way(graph, roof, z, w, budget);
    let backward = bw_one_way(graph, roof, w, z, budget);
    forward.min(backward)
}

fn bw_one_way(graph: &Graph, roof: &Roof<f64>, z: &FlowPoint<f64>, w: &FlowPoint<f64>, budget: usize) -> f64 {
    let budget = budget.max(1);
    let k = budget as i64;
    let uz = z.height / roof.eval(&z.base);
    let uw = w.height / roof.eval(&w.base);
    // pool entries: (family, shift) with the point σ^shift(family base)
    let mut families: Vec<Point> = vec![z.base.clone(), w.base.clone()];
    for c in -k..=k {
        for (a, b) in [(&z.base, &w.base), (&w.base, &z.base)] {
            if graph.has_edge(a.at(c), b.at(c + 1)) {
                if let Ok(p) = Point::splice(None, a, c, &[], b, c + 1) {
                    families.push(p);
                }
            }
        }
    }
    let mut pool: Vec<(usize, i64, Point)> = Vec::new();
    for (f, base) in families.iter().enumerate() {
        let range = if f < 2 { -k..=k } else { -1..=1 };
        for s in range {
            pool.push((f, s, base.shift(s)));
        }
    }
    let mut heights = vec![0.0, uz, uw];
    heights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    heights.dedup();
    let nh = heights.len();
    let n = pool.len() * nh;
    let node = |p: usize, h: usize| p * nh + h;
    let hidx = |u: f64| heights.iter().position(|&h| h == u).unwrap();
    let source = node(pool.iter().position(|e| e.0 == 0 && e.1 == 0).unwrap(), hidx(uz));
    let target = node(pool.iter().position(|e| e.0 == 1 && e.1 == 0).unwrap(), hidx(uw));
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for (i, (fi, si, pi)) in pool.iter().enumerate() {
        let spi = pi.shift(1);
        for (j, (fj, sj, pj)) in pool.iter().enumerate() {
            if i == j {
                for a in 0..nh {
                    for b in 0..nh {
                        if a != b {
                            edges.push((node(i, a), node(j, b), (heights[b] - heights[a]).abs()));
                        }
                    }
                }
                continue;
            }
            let step = if fi == fj {
                Some(sj - si).filter(|d| d.abs() <= 1)
            } else if pi == pj {
                Some(0)
            } else if spi == *pj {
                Some(1)
            } else if pj.shift(1) == *pi {
                Some(-1)
            } else {
                None
            };
            if let Some(dk) = step {
                let dk = dk as f64;
                for a in 0..nh {
                    for b in 0..nh {
                        edges.push((node(i, a), node(j, b), (dk + heights[b] - heights[a]).abs()));
                    }
                }
            }
            let d0 = metric_d(pi, pj);
            let d1 = metric_d(&spi, &pj.shift(1));
            for (a, &h) in heights.iter().enumerate() {
                edges.push((node(i, a), node(j, a), (1.0 - h) * d0 + h * d1));
            }
        }
    }
    let mut dist = vec![f64::INFINITY; n];
    dist[source] = 0.0;
    let mut best = if source == target { 0.0 } else { f64::INFINITY };
    for _ in 0..budget {
        let mut next = dist.clone();
        for &(a, b, c) in &edges {
            if dist[a] + c < next[b] {
                next[b] = dist[a] + c;
            }
        }
        dist = next;
        best = best.min(dist[target]);
    }
    best
}
