//! Eventually periodic bi-infinite sequences and cylinders.

use rand::seq::SliceRandom;
use rand::Rng;

use super::graph::{Graph, Vertex};
use crate::error::{Error, Result};
use crate::scalar::lcm;

/// The cylinder `_m[a_0, …, a_{n-1}] = {x : x_{m+i} = a_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cylinder {
    pub anchor: i64,
    pub symbols: Vec<Vertex>,
}

impl Cylinder {
    pub fn new(anchor: i64, symbols: Vec<Vertex>) -> Self {
        Cylinder { anchor, symbols }
    }

    pub fn at_zero(symbols: Vec<Vertex>) -> Self {
        Cylinder { anchor: 0, symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// One past the rightmost constrained coordinate.
    pub fn end(&self) -> i64 {
        self.anchor + self.symbols.len() as i64
    }

    /// Nonempty as a subset of the shift space iff its word is admissible.
    pub fn is_nonempty(&self, graph: &Graph) -> bool {
        graph.is_admissible(&self.symbols)
    }

    pub fn symbol_at(&self, i: i64) -> Option<Vertex> {
        if i >= self.anchor && i < self.end() {
            Some(self.symbols[(i - self.anchor) as usize])
        } else {
            None
        }
    }

    /// `σ^{-k}(C)`: preimage under `k` shifts moves the anchor right by `k`.
    pub fn shift_preimage(&self, k: i64) -> Cylinder {
        Cylinder { anchor: self.anchor + k, symbols: self.symbols.clone() }
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.symbols.iter().enumerate().all(|(i, &s)| x.at(self.anchor + i as i64) == s)
    }

    /// Intersection of two cylinders as a cylinder over the union window, or
    /// `None` when they disagree on a shared coordinate. Gaps between the two
    /// windows are reported as `None` entries in the pattern.
    pub fn merge_pattern(&self, other: &Cylinder) -> Option<(i64, Vec<Option<Vertex>>)> {
        if self.is_empty() {
            return Some((other.anchor, other.symbols.iter().map(|&s| Some(s)).collect()));
        }
        if other.is_empty() {
            return Some((self.anchor, self.symbols.iter().map(|&s| Some(s)).collect()));
        }
        let lo = self.anchor.min(other.anchor);
        let hi = self.end().max(other.end());
        let mut pattern = vec![None; (hi - lo) as usize];
        for c in [self, other] {
            for (i, &s) in c.symbols.iter().enumerate() {
                let slot = &mut pattern[(c.anchor - lo) as usize + i];
                match slot {
                    Some(t) if *t != s => return None,
                    _ => *slot = Some(s),
                }
            }
        }
        Some((lo, pattern))
    }
}

/// An eventually periodic point: `…(past)(past) core (future)(future)…` with
/// `core[0]` sitting at coordinate `anchor`.
///
/// Cycles are nonempty. Lookup `x_i` is total on all integers. Shifting only
/// moves the anchor, so shifts are exact and invertible.
#[derive(Clone, Debug)]
pub struct Point {
    past: Vec<Vertex>,
    core: Vec<Vertex>,
    anchor: i64,
    future: Vec<Vertex>,
}

impl Point {
    /// Validated constructor.
    pub fn new(
        graph: &Graph,
        past: Vec<Vertex>,
        core: Vec<Vertex>,
        anchor: i64,
        future: Vec<Vertex>,
    ) -> Result<Self> {
        if past.is_empty() || future.is_empty() {
            return Err(Error::Inadmissible("point cycles must be nonempty".into()));
        }
        if !graph.is_cycle(&past) {
            return Err(Error::Inadmissible(format!("past cycle {}", graph.word_name(&past))));
        }
        if !graph.is_cycle(&future) {
            return Err(Error::Inadmissible(format!("future cycle {}", graph.word_name(&future))));
        }
        let mut full = vec![*past.last().unwrap()];
        full.extend_from_slice(&core);
        full.push(future[0]);
        if !graph.is_admissible(&full) {
            return Err(Error::Inadmissible(format!(
                "junctions of {} | {} | {}",
                graph.word_name(&past),
                graph.word_name(&core),
                graph.word_name(&future)
            )));
        }
        Ok(Point { past, core, anchor, future })
    }

    pub(crate) fn from_parts_unchecked(
        past: Vec<Vertex>,
        core: Vec<Vertex>,
        anchor: i64,
        future: Vec<Vertex>,
    ) -> Self {
        debug_assert!(!past.is_empty() && !future.is_empty());
        Point { past, core, anchor, future }
    }

    /// The periodic point with `x_i = cycle[i mod len]`.
    pub fn periodic(graph: &Graph, cycle: &[Vertex]) -> Result<Self> {
        Point::new(graph, cycle.to_vec(), Vec::new(), 0, cycle.to_vec())
    }

    /// Extends `word` (placed at `anchor`) to a point using the graph's
    /// canonical past and future.
    pub fn extend_word(graph: &Graph, word: &[Vertex], anchor: i64) -> Result<Self> {
        if word.is_empty() || !graph.is_admissible(word) {
            return Err(Error::Inadmissible(format!("word {}", graph.word_name(word))));
        }
        let (past_cycle, mut left) = graph.canonical_past(word[0])?;
        let (right, future_cycle) = graph.canonical_future(*word.last().unwrap())?;
        left.pop();
        let offset = left.len() as i64;
        let mut core = left;
        core.extend_from_slice(word);
        core.extend_from_slice(&right[1..]);
        Point::new(graph, past_cycle, core, anchor - offset, future_cycle)
    }

    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    pub fn core(&self) -> &[Vertex] {
        &self.core
    }

    pub fn past_cycle(&self) -> &[Vertex] {
        &self.past
    }

    pub fn future_cycle(&self) -> &[Vertex] {
        &self.future
    }

    /// One past the last core coordinate; the future cycle starts here.
    pub fn end(&self) -> i64 {
        self.anchor + self.core.len() as i64
    }

    /// Coordinate `x_i`.
    pub fn at(&self, i: i64) -> Vertex {
        if i < self.anchor {
            let p = self.past.len() as i64;
            self.past[(i - self.anchor).rem_euclid(p) as usize]
        } else if i < self.end() {
            self.core[(i - self.anchor) as usize]
        } else {
            let f = self.future.len() as i64;
            self.future[(i - self.end()).rem_euclid(f) as usize]
        }
    }

    /// Coordinates `x_lo, …, x_{hi-1}`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Vertex> {
        (lo..hi).map(|i| self.at(i)).collect()
    }

    /// `σ^k(x)`, with `σ(x)_i = x_{i+1}`.
    pub fn shift(&self, k: i64) -> Point {
        Point {
            past: self.past.clone(),
            core: self.core.clone(),
            anchor: self.anchor - k,
            future: self.future.clone(),
        }
    }

    /// Radius beyond which both points are in their periodic regimes, plus
    /// one full common period on each side.
    fn comparison_radius(&self, other: &Point) -> i64 {
        let past_period = lcm(self.past.len() as u64, other.past.len() as u64) as i64;
        let future_period = lcm(self.future.len() as u64, other.future.len() as u64) as i64;
        let edges = [self.anchor, self.end(), other.anchor, other.end()];
        edges.iter().map(|e| e.abs()).max().unwrap() + past_period.max(future_period) + 1
    }

    /// Smallest `|n|` with `x_n != y_n`, or `None` when the points coincide.
    pub fn first_difference(&self, other: &Point) -> Option<u64> {
        let radius = self.comparison_radius(other);
        (0..=radius).find(|&n| self.at(n) != other.at(n) || self.at(-n) != other.at(-n)).map(|n| n as u64)
    }

    /// Do `x_{a+k}` and `y_{b+k}` agree for all `k >= 0`?
    pub fn agrees_forward(&self, a: i64, other: &Point, b: i64) -> bool {
        let period = lcm(self.future.len() as u64, other.future.len() as u64) as i64;
        let span = (self.end() - a).max(other.end() - b).max(0) + period;
        (0..=span).all(|k| self.at(a + k) == other.at(b + k))
    }

    /// Do `x_{a-k}` and `y_{b-k}` agree for all `k >= 0`?
    pub fn agrees_backward(&self, a: i64, other: &Point, b: i64) -> bool {
        let period = lcm(self.past.len() as u64, other.past.len() as u64) as i64;
        let span = (a - self.anchor).max(b - other.anchor).max(0) + period;
        (0..=span).all(|k| self.at(a - k) == other.at(b - k))
    }

    /// Builds `z` with `z_i = left_i` for `i <= cut`, then `bridge` at
    /// `cut+1 …`, then `right_{resume}, right_{resume+1}, …`. Admissibility of
    /// the two junctions is checked against `graph` when supplied.
    pub fn splice(
        graph: Option<&Graph>,
        left: &Point,
        cut: i64,
        bridge: &[Vertex],
        right: &Point,
        resume: i64,
    ) -> Result<Point> {
        if let Some(g) = graph {
            let mut junction = vec![left.at(cut)];
            junction.extend_from_slice(bridge);
            junction.push(right.at(resume));
            if !g.is_admissible(&junction) {
                return Err(Error::Inadmissible(format!("splice junction {}", g.word_name(&junction))));
            }
        }
        let bridge_start = cut + 1;
        let right_start = bridge_start + bridge.len() as i64;
        let delta = right_start - resume;
        let start = left.anchor.min(bridge_start);
        let end = (right.end() + delta).max(right_start);
        let core: Vec<Vertex> = (start..end)
            .map(|i| {
                if i <= cut {
                    left.at(i)
                } else if i < right_start {
                    bridge[(i - bridge_start) as usize]
                } else {
                    right.at(i - delta)
                }
            })
            .collect();
        let pl = left.past.len() as i64;
        let past = (0..pl).map(|j| left.past[(j + start - left.anchor).rem_euclid(pl) as usize]).collect();
        let fl = right.future.len() as i64;
        let future = (0..fl)
            .map(|j| right.future[(j + end - delta - right.end()).rem_euclid(fl) as usize])
            .collect();
        Ok(Point { past, core, anchor: start, future })
    }

    /// Smale bracket `[x, y]`: past of `x`, future of `y`. Requires `x_0 = y_0`.
    pub fn bracket(&self, other: &Point) -> Result<Point> {
        if self.at(0) != other.at(0) {
            return Err(Error::MismatchedZero);
        }
        Point::splice(None, self, 0, &[], other, 1)
    }

    /// Drops redundant core symbols that merely continue either cycle.
    pub fn normalized(&self) -> Point {
        let mut p = self.clone();
        while let Some(&first) = p.core.first() {
            // the coordinate at `anchor` continues the past cycle iff it equals
            // past[0] (the phase that would sit there)
            if first == p.past[0] {
                p.core.remove(0);
                p.past.rotate_left(1);
                p.anchor += 1;
            } else {
                break;
            }
        }
        while let Some(&last) = p.core.last() {
            if last == *p.future.last().unwrap() {
                p.core.pop();
                p.future.rotate_right(1);
            } else {
                break;
            }
        }
        p
    }

    /// A random eventually periodic point whose core has at least
    /// `core_len` symbols straddling the origin.
    pub fn random<R: Rng + ?Sized>(graph: &Graph, rng: &mut R, core_len: usize) -> Point {
        let core_len = core_len.max(1);
        let start = rng.gen_range(0..graph.num_vertices());
        let mut core = vec![start];
        while core.len() < core_len {
            let last = *core.last().unwrap();
            core.push(*graph.successors(last).choose(rng).unwrap());
        }
        // future: walk forward until a vertex repeats
        let mut walk: Vec<Vertex> = Vec::new();
        let mut cur = *core.last().unwrap();
        let future = loop {
            let next = *graph.successors(cur).choose(rng).unwrap();
            if let Some(i) = walk.iter().position(|&w| w == next) {
                core.extend_from_slice(&walk[..i]);
                break walk[i..].to_vec();
            }
            walk.push(next);
            cur = next;
        };
        // past: walk backward until a vertex repeats
        let mut back: Vec<Vertex> = Vec::new();
        let mut cur = core[0];
        let past = loop {
            let prev = *graph.predecessors(cur).choose(rng).unwrap();
            if let Some(i) = back.iter().position(|&w| w == prev) {
                let mut prefix: Vec<Vertex> = back[..i].iter().rev().copied().collect();
                prefix.extend_from_slice(&core);
                core = prefix;
                break back[i..].iter().rev().copied().collect::<Vec<_>>();
            }
            back.push(prev);
            cur = prev;
        };
        let anchor = -(rng.gen_range(0..core.len()) as i64);
        Point { past, core, anchor, future }
    }

    pub fn describe(&self, graph: &Graph) -> String {
        format!(
            "({})^∞ [{}@{}] ({})^∞",
            graph.word_name(&self.past),
            graph.word_name(&self.core),
            self.anchor,
            graph.word_name(&self.future)
        )
    }
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        self.first_difference(other).is_none()
    }
}

impl Eq for Point {}

/// `d(x, y) = exp(-min{|n| : x_n != y_n})`, and `0` when `x = y`.
pub fn metric_d(x: &Point, y: &Point) -> f64 {
    match x.first_difference(y) {
        None => 0.0,
        Some(n) => (-(n as f64)).exp(),
    }
}

pub fn smale_bracket(x: &Point, y: &Point) -> Result<Point> {
    x.bracket(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn full2() -> Graph {
        Graph::full_shift(2).unwrap()
    }

    #[test]
    fn coordinates_and_shift() {
        let g = full2();
        // …bbb · a a · aaa…  with core [a, a] at 0
        let x = Point::new(&g, vec![1], vec![0, 0], 0, vec![0]).unwrap();
        assert_eq!(x.window(-2, 3), vec![1, 1, 0, 0, 0]);
        assert_eq!(x.shift(1).at(-1), 0);
        assert_eq!(x.shift(1).at(-2), 1);
        assert_eq!(x.shift(3).shift(-3), x);
    }

    #[test]
    fn rejects_bad_junction() {
        let g = Graph::golden_mean();
        // b b is not admissible
        assert!(Point::new(&g, vec![0, 1], vec![1], 0, vec![0]).is_err());
        assert!(Point::new(&g, vec![0, 1], vec![0], 0, vec![0]).is_ok());
    }

    #[test]
    fn metric_examples() {
        let g = full2();
        let x = Point::random(&g, &mut ChaCha8Rng::seed_from_u64(1), 5);
        assert_eq!(metric_d(&x, &x), 0.0);
        // agree on |n| <= 2, differ at n = 3
        let a = Point::new(&g, vec![0], vec![0, 0, 0, 0, 0, 0, 0], -3, vec![0]).unwrap();
        let b = Point::new(&g, vec![0], vec![0, 0, 0, 0, 0, 0, 1], -3, vec![0]).unwrap();
        assert!((metric_d(&a, &b) - (-2.0f64).exp() * (-1.0f64).exp()).abs() < 1e-15);
        let c = Point::new(&g, vec![0], vec![1, 0, 0, 0, 0], -2, vec![0]).unwrap();
        let d = Point::new(&g, vec![0], vec![0, 0, 0, 0, 0], -2, vec![0]).unwrap();
        assert!((metric_d(&c, &d) - (-2.0f64).exp()).abs() < 1e-15);
        let e = Point::periodic(&g, &[0]).unwrap();
        let f = Point::periodic(&g, &[1]).unwrap();
        assert_eq!(metric_d(&e, &f), 1.0);
    }

    #[test]
    fn bracket_splices_past_and_future() {
        let g = full2();
        // x = …bbb·a·aaa…, y = …aaa·a·bbb…
        let x = Point::new(&g, vec![1], vec![0], 0, vec![0]).unwrap();
        let y = Point::new(&g, vec![0], vec![0], 0, vec![1]).unwrap();
        let z = x.bracket(&y).unwrap();
        let expect = Point::new(&g, vec![1], vec![0], 0, vec![1]).unwrap();
        assert_eq!(z, expect);
        assert_eq!(x.bracket(&x).unwrap(), x);
        let w = Point::periodic(&g, &[1]).unwrap();
        assert_eq!(x.bracket(&w), Err(Error::MismatchedZero));
    }

    #[test]
    fn extend_word_contains_word() {
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let x = Point::extend_word(&g, &[3, 0, 1], 5).unwrap();
        assert_eq!(x.window(5, 8), vec![3, 0, 1]);
        assert!(Cylinder::new(5, vec![3, 0, 1]).contains(&x));
    }

    #[test]
    fn normalized_is_equal() {
        let g = full2();
        let x = Point::new(&g, vec![0, 1], vec![0, 1, 1, 1], 2, vec![1]).unwrap();
        let n = x.normalized();
        assert_eq!(x, n);
        assert!(n.core().len() <= 2);
    }

    #[test]
    fn random_points_are_admissible() {
        let g = Graph::golden_mean();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let x = Point::random(&g, &mut rng, 6);
            assert!(g.is_admissible(&x.window(-30, 30)));
        }
    }
}
