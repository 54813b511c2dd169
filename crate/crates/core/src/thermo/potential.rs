//! Locally constant potentials with a Hölder envelope.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shift::{Graph, Observable, Point, Vertex};

/// Bounds `var_k ≤ C·e^{-αk}` used only for tail estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderEnvelope {
    pub c: f64,
    pub alpha: f64,
}

impl HolderEnvelope {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) || !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Validation {
                field: "holder".into(),
                reason: format!("need C >= 0 and alpha in (0, 1], got C={c}, alpha={alpha}"),
            });
        }
        Ok(HolderEnvelope { c, alpha })
    }

    /// `Σ_{j≥k} C e^{-αj} = C e^{-αk} / (1 - e^{-α})`.
    pub fn tail(&self, k: u64) -> f64 {
        self.c * (-self.alpha * k as f64).exp() / (1.0 - (-self.alpha).exp())
    }

    /// Constant of the Hölder bound on sums of variations, `C / (1 - e^{-α})`.
    pub fn summed_constant(&self) -> f64 {
        self.c / (1.0 - (-self.alpha).exp())
    }
}

impl Default for HolderEnvelope {
    fn default() -> Self {
        HolderEnvelope { c: 0.0, alpha: 1.0 }
    }
}

/// A function of the coordinates `x_l, …, x_m`, stored as a table over all
/// admissible words of length `m - l + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential<T> {
    lo: i64,
    hi: i64,
    table: BTreeMap<Vec<Vertex>, T>,
    envelope: HolderEnvelope,
}

impl<T: Scalar> Potential<T> {
    /// Tabulates `f` over every admissible word of the window `(l, m)`.
    pub fn from_fn<F>(graph: &Graph, window: (i64, i64), mut f: F) -> Result<Self>
    where
        F: FnMut(&[Vertex]) -> T,
    {
        let (lo, hi) = window;
        if hi < lo {
            return Err(Error::InvalidWindow(lo, hi));
        }
        let table = graph
            .words((hi - lo + 1) as usize)
            .into_iter()
            .map(|w| {
                let v = f(&w);
                (w, v)
            })
            .collect();
        Ok(Potential { lo, hi, table, envelope: HolderEnvelope::default() })
    }

    /// Fallible variant of [`Potential::from_fn`].
    pub fn try_from_fn<F>(graph: &Graph, window: (i64, i64), mut f: F) -> Result<Self>
    where
        F: FnMut(&[Vertex]) -> Result<T>,
    {
        let (lo, hi) = window;
        if hi < lo {
            return Err(Error::InvalidWindow(lo, hi));
        }
        let mut table = BTreeMap::new();
        for w in graph.words((hi - lo + 1) as usize) {
            let v = f(&w)?;
            table.insert(w, v);
        }
        Ok(Potential { lo, hi, table, envelope: HolderEnvelope::default() })
    }

    pub fn constant(graph: &Graph, c: T) -> Self {
        Self::from_fn(graph, (0, 0), |_| c.clone()).expect("window (0, 0) is valid")
    }

    pub fn zero(graph: &Graph) -> Self {
        Self::constant(graph, T::zero())
    }

    /// Validated table; every admissible window must be present and every key
    /// must be admissible.
    pub fn from_table(
        graph: &Graph,
        window: (i64, i64),
        table: BTreeMap<Vec<Vertex>, T>,
    ) -> Result<Self> {
        let (lo, hi) = window;
        if hi < lo {
            return Err(Error::InvalidWindow(lo, hi));
        }
        let len = (hi - lo + 1) as usize;
        for key in table.keys() {
            if key.len() != len || !graph.is_admissible(key) {
                return Err(Error::Inadmissible(format!("table key {}", graph.word_name(key))));
            }
        }
        for w in graph.words(len) {
            if !table.contains_key(&w) {
                return Err(Error::MissingTableEntry(graph.word_name(&w)));
            }
        }
        Ok(Potential { lo, hi, table, envelope: HolderEnvelope::default() })
    }

    pub fn with_envelope(mut self, envelope: HolderEnvelope) -> Self {
        self.envelope = envelope;
        self
    }

    pub fn envelope(&self) -> HolderEnvelope {
        self.envelope
    }

    /// The memory window `(l, m)`.
    pub fn window(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn window_len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_one_sided(&self) -> bool {
        self.lo >= 0
    }

    pub fn table(&self) -> &BTreeMap<Vec<Vertex>, T> {
        &self.table
    }

    pub fn value(&self, word: &[Vertex]) -> Option<&T> {
        self.table.get(word)
    }

    /// Value on a point whose coordinate `offset` corresponds to `word[0]`.
    /// The word must cover the window.
    pub fn eval_word(&self, word: &[Vertex], offset: i64) -> T {
        let start = (self.lo - offset) as usize;
        self.table[&word[start..start + self.window_len()]].clone()
    }

    pub fn eval_point(&self, x: &Point) -> T {
        let w = x.window(self.lo, self.hi + 1);
        self.table.get(&w).cloned().expect("admissible point has a table entry")
    }

    pub fn min_value(&self) -> T {
        self.table.values().cloned().reduce(|a, b| if b < a { b } else { a }).expect("nonempty table")
    }

    pub fn max_value(&self) -> T {
        self.table.values().cloned().reduce(|a, b| if b > a { b } else { a }).expect("nonempty table")
    }

    /// The common value when the table is constant.
    pub fn constant_value(&self) -> Option<T> {
        let first = self.table.values().next()?.clone();
        self.table.values().all(|v| *v == first).then_some(first)
    }

    /// `var_k f = sup{|f(x) - f(y)| : x_i = y_i for |i| < k}`, exact from the table.
    pub fn variation(&self, graph: &Graph, k: u64) -> T {
        let k = k as i64;
        let lo = self.lo.min(-k + 1).min(0);
        let hi = self.hi.max(k - 1).max(0);
        let full = self.extend(graph, (lo, hi)).expect("window grows");
        let mut groups: BTreeMap<Vec<Vertex>, (T, T)> = BTreeMap::new();
        for (w, v) in &full.table {
            let key: Vec<Vertex> = (lo..=hi)
                .zip(w.iter())
                .filter(|(i, _)| i.abs() < k)
                .map(|(_, &s)| s)
                .collect();
            let entry = groups.entry(key).or_insert((v.clone(), v.clone()));
            if *v < entry.0 {
                entry.0 = v.clone();
            }
            if *v > entry.1 {
                entry.1 = v.clone();
            }
        }
        groups
            .into_values()
            .map(|(a, b)| b - a)
            .reduce(|a, b| if b > a { b } else { a })
            .unwrap_or_else(T::zero)
    }

    /// The smallest envelope with exponent `alpha` dominating the actual
    /// variations of the table.
    pub fn fitted_envelope(&self, graph: &Graph, alpha: f64) -> HolderEnvelope {
        let radius = self.lo.abs().max(self.hi.abs()) as u64 + 1;
        let c = (0..=radius)
            .map(|j| self.variation(graph, j).to_f64_lossy() * (alpha * j as f64).exp())
            .fold(0.0, f64::max);
        HolderEnvelope { c, alpha }
    }

    /// The same function tabulated over a wider window.
    pub fn extend(&self, graph: &Graph, window: (i64, i64)) -> Result<Self> {
        if window.0 > self.lo || window.1 < self.hi {
            return Err(Error::InvalidWindow(window.0, window.1));
        }
        let lo = window.0;
        let mut out = Self::from_fn(graph, window, |w| self.eval_word(w, lo))?;
        out.envelope = self.envelope;
        Ok(out)
    }

    /// `f ∘ σ^k`, which reads the coordinates `l + k, …, m + k`.
    pub fn compose_shift(&self, k: i64) -> Self {
        Potential { lo: self.lo + k, hi: self.hi + k, table: self.table.clone(), envelope: self.envelope }
    }

    /// Pointwise combination of two potentials over the union window.
    pub fn combine<F>(&self, other: &Self, graph: &Graph, mut op: F) -> Result<Self>
    where
        F: FnMut(T, T) -> T,
    {
        let window = (self.lo.min(other.lo), self.hi.max(other.hi));
        let lo = window.0;
        let mut out = Self::from_fn(graph, window, |w| op(self.eval_word(w, lo), other.eval_word(w, lo)))?;
        out.envelope = HolderEnvelope {
            c: self.envelope.c + other.envelope.c,
            alpha: self.envelope.alpha.min(other.envelope.alpha),
        };
        Ok(out)
    }

    pub fn add(&self, other: &Self, graph: &Graph) -> Result<Self> {
        self.combine(other, graph, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self, graph: &Graph) -> Result<Self> {
        self.combine(other, graph, |a, b| a - b)
    }

    pub fn map<U: Scalar, F: FnMut(&T) -> U>(&self, mut f: F) -> Potential<U> {
        Potential {
            lo: self.lo,
            hi: self.hi,
            table: self.table.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
            envelope: self.envelope,
        }
    }

    pub fn to_f64(&self) -> Potential<f64> {
        self.map(|v| v.to_f64_lossy())
    }

    /// Drops redundant coordinates at either end of the window when the table
    /// does not depend on them.
    pub fn trimmed(&self, graph: &Graph) -> Self {
        let mut cur = self.clone();
        loop {
            if cur.lo == cur.hi {
                return cur;
            }
            if let Some(t) = cur.drop_coordinate(graph, true) {
                cur = t;
            } else if let Some(t) = cur.drop_coordinate(graph, false) {
                cur = t;
            } else {
                return cur;
            }
        }
    }

    fn drop_coordinate(&self, graph: &Graph, left: bool) -> Option<Self> {
        let mut table: BTreeMap<Vec<Vertex>, T> = BTreeMap::new();
        for (w, v) in &self.table {
            let key = if left { w[1..].to_vec() } else { w[..w.len() - 1].to_vec() };
            match table.get(&key) {
                Some(prev) if prev != v => return None,
                _ => {
                    table.insert(key, v.clone());
                }
            }
        }
        let (lo, hi) = if left { (self.lo + 1, self.hi) } else { (self.lo, self.hi - 1) };
        let mut out = Potential::from_table(graph, (lo, hi), table).ok()?;
        out.envelope = self.envelope;
        Some(out)
    }
}

impl<T: Scalar> Observable<T> for Potential<T> {
    fn eval(&self, x: &Point) -> T {
        self.eval_point(x)
    }
}
