//! One-sided reduction by a fixed past, and return-word recoding.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shift::{birkhoff_sum, Graph, Observable, Point, Vertex};

use super::potential::Potential;

/// `x̂`: the point with `x̂_i = x_i` for `i ≥ 0` and the canonical past of `x_0`.
pub fn with_fixed_past(graph: &Graph, x: &Point) -> Result<Point> {
    let left = Point::extend_word(graph, &[x.at(0)], 0)?;
    Point::splice(None, &left, 0, &[], x, 1)
}

/// Writes `f = f^s + h - h∘σ` with `f^s` depending only on coordinates `≥ 0`.
///
/// `h(x) = Σ_{k≥0} [f(σ^k x) - f(σ^k x̂)]`, a finite sum of `|l|` terms for a
/// window `(l, m)`. Returns `(f^s, h)`.
pub fn reduce_to_one_sided<T: Scalar>(
    graph: &Graph,
    f: &Potential<T>,
) -> Result<(Potential<T>, Potential<T>)> {
    let (l, m) = f.window();
    if l >= 0 {
        return Ok((f.clone(), Potential::zero(graph)));
    }
    let depth = -l;
    let transfer = |x: &Point| -> Result<T> {
        let xh = with_fixed_past(graph, x)?;
        let mut total = T::zero();
        for k in 0..depth {
            total = total + f.eval(&x.shift(k)) - f.eval(&xh.shift(k));
        }
        Ok(total)
    };
    let h_window = (l, (m + depth - 1).max(l));
    let h = Potential::try_from_fn(graph, h_window, |w| transfer(&Point::extend_word(graph, w, l)?))?;
    let fs_window = (0, (m + depth).max(0));
    let fs = Potential::try_from_fn(graph, fs_window, |w| {
        let x = Point::extend_word(graph, w, 0)?;
        Ok(f.eval(&x) - h.eval(&x) + h.eval(&x.shift(1)))
    })?
    .with_envelope(f.envelope());
    Ok((fs.trimmed(graph), h.trimmed(graph)))
}

/// First-return coding of the section `[a]`.
///
/// Return words are the words `s = a·ξ` such that `s·a` is admissible and
/// contains `a` only as its prefix and its suffix. The induced map is the full
/// shift on the return words found within the cap.
#[derive(Clone, Debug)]
pub struct ReturnWordRecoding<T> {
    pub base_word: Vec<Vertex>,
    pub words: Vec<Vec<Vertex>>,
    pub graph: Graph,
    pub roof: Potential<T>,
    /// Some excursion was still running at the cap.
    pub truncated: bool,
}

impl<T: Scalar> ReturnWordRecoding<T> {
    /// Concatenates induced symbols `lo..hi` of `y` into an original word.
    fn concat(&self, y: &Point, lo: i64, hi: i64) -> Vec<Vertex> {
        (lo..hi).flat_map(|i| self.words[y.at(i)].iter().copied()).collect()
    }

    /// Original point coded by the induced point `y`; induced coordinate 0
    /// starts at original coordinate 0.
    pub fn decode(&self, y: &Point) -> Point {
        let lo = y.anchor().min(0);
        let hi = y.end().max(1);
        let core = self.concat(y, lo, hi);
        let before: i64 = (lo..0).map(|i| self.words[y.at(i)].len() as i64).sum();
        // one induced period on each side, read in phase with the core boundaries
        let pn = y.past_cycle().len() as i64;
        let fnn = y.future_cycle().len() as i64;
        let past = self.concat(y, lo - pn, lo);
        let future = self.concat(y, hi, hi + fnn);
        Point::from_parts_unchecked(past, core, -before, future)
    }

    /// Return time of the induced symbol at coordinate 0.
    pub fn return_time(&self, symbol: Vertex) -> usize {
        self.words[symbol].len()
    }
}

/// Start positions of `a` inside `u`.
fn occurrences(u: &[Vertex], a: &[Vertex]) -> Vec<usize> {
    if u.len() < a.len() {
        return Vec::new();
    }
    (0..=u.len() - a.len()).filter(|&i| &u[i..i + a.len()] == a).collect()
}

/// Return words of `base_word` with return time at most `cap`, and whether
/// longer excursions exist.
pub fn return_words(graph: &Graph, base_word: &[Vertex], cap: usize) -> Result<(Vec<Vec<Vertex>>, bool)> {
    if base_word.is_empty() || !graph.is_admissible(base_word) {
        return Err(Error::Inadmissible(format!("base word {}", graph.word_name(base_word))));
    }
    let a = base_word;
    let mut found = Vec::new();
    let mut truncated = false;
    let mut stack = vec![a.to_vec()];
    while let Some(u) = stack.pop() {
        let occ = occurrences(&u, a);
        if occ.len() == 2 {
            // u = s·a with the second occurrence as the suffix
            found.push(u[..u.len() - a.len()].to_vec());
            continue;
        }
        if u.len() >= cap + a.len() {
            truncated = true;
            continue;
        }
        let last = *u.last().unwrap();
        for &v in graph.successors(last).iter().rev() {
            let mut next = u.clone();
            next.push(v);
            let occ = occurrences(&next, a);
            // a new occurrence must be the suffix; anything else is impossible
            // to reach without passing through an earlier completed return
            if occ.len() <= 2 {
                stack.push(next);
            }
        }
    }
    found.sort_by(|x, y| x.len().cmp(&y.len()).then(x.cmp(y)));
    if found.is_empty() {
        return Err(Error::CapExceeded(format!(
            "no return to {} within {cap} steps",
            graph.word_name(a)
        )));
    }
    Ok((found, truncated))
}

/// Induces `roof` on the section `[base_word]`: `R = r_{φ_a}`.
pub fn recode_return_words<T: Scalar>(
    graph: &Graph,
    roof: &Potential<T>,
    base_word: &[Vertex],
    cap: usize,
) -> Result<ReturnWordRecoding<T>> {
    let (words, truncated) = return_words(graph, base_word, cap)?;
    if words.len() < 2 {
        return Err(Error::CapExceeded(format!(
            "only one return word to {} within {cap} steps",
            graph.word_name(base_word)
        )));
    }
    let names: Vec<String> = words.iter().map(|w| {
        w.iter().map(|&v| graph.name(v)).collect::<Vec<_>>().join(".")
    }).collect();
    let n = words.len();
    let edges: Vec<(String, String)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (names[i].clone(), names[j].clone()))
        .collect();
    let induced = Graph::new(&names, &edges)?;
    let min_len = words.iter().map(|w| w.len()).min().unwrap() as i64;
    let alen = base_word.len() as i64;
    let (l, m) = roof.window();
    let lo = if l < 0 { -((-l + min_len - 1) / min_len) } else { 0 };
    let hi = if m > alen { (m - alen + min_len - 1) / min_len } else { 0 };
    let induced_roof = Potential::try_from_fn(&induced, (lo, hi), |w| {
        let before: i64 = w[..(-lo) as usize].iter().map(|&s| words[s].len() as i64).sum();
        let mut flat: Vec<Vertex> = w.iter().flat_map(|&s| words[s].iter().copied()).collect();
        flat.extend_from_slice(base_word);
        let x = Point::extend_word(graph, &flat, -before)?;
        Ok(birkhoff_sum(roof, &x, words[w[(-lo) as usize]].len() as i64))
    })?
    .with_envelope(roof.envelope());
    Ok(ReturnWordRecoding {
        base_word: base_word.to_vec(),
        words,
        graph: induced,
        roof: induced_roof.trimmed(&Graph::full_shift(n)?),
        truncated,
    })
}

/// Smallest-index unbordered admissible word of length `len`, if any.
pub fn unbordered_word(graph: &Graph, len: usize) -> Option<Vec<Vertex>> {
    graph.words(len).into_iter().find(|w| (1..w.len()).all(|k| w[..k] != w[w.len() - k..]))
}

/// Outcome of making a roof independent of the past with `0 < h < r/2`.
#[derive(Clone, Debug)]
pub struct OneSidedRoof<T> {
    /// `r^s = r - h + h∘σ` on the original shift.
    pub roof: Potential<T>,
    /// The normalized transfer function `h`.
    pub transfer: Potential<T>,
    /// Constant added to the raw transfer function.
    pub shift: T,
    /// Present when the constant shift alone could not give `h < inf(r)/2`;
    /// the induced roof is then `R^s`, the Birkhoff sum of `r^s` over returns.
    pub recoding: Option<ReturnWordRecoding<T>>,
}

/// Builds `r^s` and a transfer function with `0 < h < r/2`: shift `h` by a
/// constant first, and if its spread is too large recode on an unbordered word
/// of length `n_0 + 1`, where `n_0` is the least integer with
/// `sup h < n_0·inf(r)/2`. Return words are searched up to `|a| + extra`.
pub fn one_sided_roof<T: Scalar>(graph: &Graph, roof: &Potential<T>, extra: usize) -> Result<OneSidedRoof<T>> {
    let inf_r = roof.min_value();
    if inf_r <= T::zero() {
        return Err(Error::NonPositiveRoof(inf_r.to_f64_lossy()));
    }
    let (rs, h) = reduce_to_one_sided(graph, roof)?;
    let spread = h.max_value() - h.min_value();
    let two = T::int(2);
    let half_inf = inf_r.clone() / two.clone();
    if spread < half_inf {
        let delta = (half_inf - spread) / two;
        let shift = delta - h.min_value();
        let transfer = h.map(|v| v.clone() + shift.clone());
        return Ok(OneSidedRoof { roof: rs, transfer, shift, recoding: None });
    }
    let ratio = (two.clone() * spread.clone() / inf_r.clone()).to_f64_lossy();
    let n0 = ratio.floor() as usize + 1;
    let n0_t = T::int(n0 as i64);
    let delta = (n0_t * half_inf - spread) / two;
    let shift = delta - h.min_value();
    let transfer = h.map(|v| v.clone() + shift.clone());
    let base = (n0 + 1..=n0 + 1 + extra)
        .find_map(|len| unbordered_word(graph, len))
        .ok_or_else(|| Error::CapExceeded(format!("no unbordered word of length {}..={}", n0 + 1, n0 + 1 + extra)))?;
    let recoding = recode_return_words(graph, &rs, &base, base.len() + extra)?;
    Ok(OneSidedRoof { roof: rs, transfer, shift, recoding: Some(recoding) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn cycles(graph: &Graph, max_len: usize) -> Vec<Vec<Vertex>> {
        (1..=max_len).flat_map(|n| graph.words(n).into_iter().filter(|w| graph.is_cycle(w))).collect()
    }

    #[test]
    fn one_sided_input_is_unchanged() {
        let g = Graph::full_shift(2).unwrap();
        let f = Potential::<f64>::from_fn(&g, (0, 1), |w| (w[0] + 2 * w[1]) as f64).unwrap();
        let (fs, h) = reduce_to_one_sided(&g, &f).unwrap();
        assert_eq!(fs, f);
        assert_eq!(h.constant_value(), Some(0.0));
    }

    #[test]
    fn two_symbol_past_formula() {
        // f(x) = g(x_{-1}, x_0) gives f^s(x) = g(ω, x_0) + g(x_0, x_1) - g(ω, x_1)
        let g = Graph::full_shift(3).unwrap();
        let gv = |a: usize, b: usize| ratio((a * 5 + b * b + 1) as i64, 3);
        let f = Potential::<Rational>::from_fn(&g, (-1, 0), |w| gv(w[0], w[1])).unwrap();
        let (fs, _) = reduce_to_one_sided(&g, &f).unwrap();
        let omega = g.fixed_past_symbol();
        assert_eq!(omega, 0);
        for w in g.words(2) {
            let x = Point::extend_word(&g, &w, 0).unwrap();
            assert_eq!(fs.eval(&x), gv(omega, w[0]) + gv(w[0], w[1]) - gv(omega, w[1]));
        }
    }

    #[test]
    fn periodic_sums_preserved_exactly() {
        let g = Graph::from_indices(3, &[(0, 1), (1, 2), (2, 0), (1, 0), (2, 2)]).unwrap();
        let f = Potential::<Rational>::from_fn(&g, (-2, 1), |w| {
            ratio((w[0] * 7 + w[1] * 3 + w[2] * 11 + w[3]) as i64 % 13 + 1, 5)
        })
        .unwrap();
        let (fs, h) = reduce_to_one_sided(&g, &f).unwrap();
        assert!(fs.is_one_sided());
        for c in cycles(&g, 6) {
            let z = Point::periodic(&g, &c).unwrap();
            let n = c.len() as i64;
            assert_eq!(birkhoff_sum(&fs, &z, n), birkhoff_sum(&f, &z, n));
            // coboundary identity pointwise
            assert_eq!(fs.eval(&z), f.eval(&z) - h.eval(&z) + h.eval(&z.shift(1)));
        }
    }

    #[test]
    fn return_words_full_shift() {
        let g = Graph::full_shift(2).unwrap();
        let (words, truncated) = return_words(&g, &[0], 3).unwrap();
        assert_eq!(words, vec![vec![0], vec![0, 1], vec![0, 1, 1]]);
        assert!(truncated);
        let roof = Potential::<f64>::from_fn(&g, (0, 0), |w| [1.0, 2.5][w[0]]).unwrap();
        let rec = recode_return_words(&g, &roof, &[0], 3).unwrap();
        // a·ba: r(x) + r(σx) along the excursion
        assert_eq!(rec.roof.value(&[1]).copied(), Some(3.5));
        assert_eq!(rec.roof.value(&[2]).copied(), Some(6.0));
    }

    #[test]
    fn constant_roof_induces_return_time() {
        let g = Graph::golden_mean();
        let roof = Potential::<Rational>::constant(&g, ratio(3, 2));
        let rec = recode_return_words(&g, &roof, &[1], 6).unwrap();
        for (i, w) in rec.words.iter().enumerate() {
            assert_eq!(rec.roof.eval_word(&[i], rec.roof.window().0), ratio(3 * w.len() as i64, 2));
        }
    }

    #[test]
    fn no_return_within_cap() {
        let g = Graph::full_shift(2).unwrap();
        assert!(matches!(return_words(&g, &[0, 1, 1, 0], 2), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn induced_sums_match_original_orbit() {
        let g = Graph::full_shift(2).unwrap();
        let roof = Potential::<Rational>::from_fn(&g, (-1, 2), |w| {
            ratio((1 + w[0] + 2 * w[1] + 3 * w[2] + 5 * w[3]) as i64, 4)
        })
        .unwrap();
        let rec = recode_return_words(&g, &roof, &[0, 1], 5).unwrap();
        let ig = &rec.graph;
        for c in [vec![0, 1], vec![2], vec![1, 3, 0], vec![4, 4, 1]] {
            let c: Vec<Vertex> = c.into_iter().filter(|&s| s < ig.num_vertices()).collect();
            let y = Point::periodic(ig, &c).unwrap();
            let x = rec.decode(&y);
            let steps: i64 = c.iter().map(|&s| rec.words[s].len() as i64).sum();
            assert_eq!(birkhoff_sum(&rec.roof, &y, c.len() as i64), birkhoff_sum(&roof, &x, steps));
        }
    }

    #[test]
    fn positivity_normalization() {
        let g = Graph::full_shift(2).unwrap();
        // small spread: constant shift suffices
        let r = Potential::<Rational>::from_fn(&g, (-1, 0), |w| ratio(10 + (w[0] * 2 + w[1]) as i64, 10)).unwrap();
        let out = one_sided_roof(&g, &r, 8).unwrap();
        assert!(out.recoding.is_none());
        let half = r.min_value() / ratio(2, 1);
        assert!(out.transfer.min_value() > ratio(0, 1) && out.transfer.max_value() < half);
        // large spread: forces recoding, induced roof stays positive
        let r = Potential::<Rational>::from_fn(&g, (-1, 0), |w| {
            if w == [1, 0] { ratio(2, 1) } else { ratio(1, 2) }
        })
        .unwrap();
        let out = one_sided_roof(&g, &r, 4).unwrap();
        let rec = out.recoding.expect("recoding needed");
        assert!(rec.roof.min_value() > ratio(0, 1));
        let n0 = rec.base_word.len() - 1;
        assert!(out.transfer.max_value() < ratio(n0 as i64, 1) * r.min_value() / ratio(2, 1));
    }
}
