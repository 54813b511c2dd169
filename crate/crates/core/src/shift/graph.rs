//! Finite directed graphs defining topological Markov shifts.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::gcd;

pub type Vertex = usize;

/// A finite directed graph with named vertices.
///
/// Every vertex has at least one incoming and one outgoing edge, and the graph
/// is not a single cycle. Both conditions are checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    names: Vec<String>,
    succ: Vec<Vec<Vertex>>,
    pred: Vec<Vec<Vertex>>,
    adj: Vec<Vec<bool>>,
}

impl Graph {
    /// Builds and validates a graph from vertex names and named edges.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |s: &str| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownVertex(s.to_string()))
        };
        let mut idx = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            idx.push((lookup(u.as_ref())?, lookup(v.as_ref())?));
        }
        Self::from_parts(names, &idx)
    }

    /// Builds a graph on `n` vertices named `a`, `b`, ... (or `v0000`, ... past 26).
    pub fn from_indices(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyVertexSet);
        }
        let names = (0..n)
            .map(|i| {
                if n <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("v{i:04}")
                }
            })
            .collect();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownVertex(format!("{}", u.max(v))));
            }
        }
        Self::from_parts(names, edges)
    }

    /// Full shift on `n` symbols.
    pub fn full_shift(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
        Self::from_indices(n, &edges)
    }

    /// The golden-mean shift `{a->a, a->b, b->a}`.
    pub fn golden_mean() -> Self {
        Self::from_indices(2, &[(0, 0), (0, 1), (1, 0)]).expect("golden mean graph is valid")
    }

    /// Builds a graph from 0/1 adjacency rows.
    pub fn from_adjacency(rows: &[Vec<bool>]) -> Result<Self> {
        let edges: Vec<_> = rows
            .iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().enumerate().filter(|(_, &e)| e).map(move |(v, _)| (u, v)))
            .collect();
        Self::from_indices(rows.len(), &edges)
    }

    fn from_parts(names: Vec<String>, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let n = names.len();
        let mut adj = vec![vec![false; n]; n];
        for &(u, v) in edges {
            adj[u][v] = true;
        }
        let succ: Vec<Vec<Vertex>> =
            (0..n).map(|u| (0..n).filter(|&v| adj[u][v]).collect()).collect();
        let pred: Vec<Vec<Vertex>> =
            (0..n).map(|v| (0..n).filter(|&u| adj[u][v]).collect()).collect();
        for v in 0..n {
            if pred[v].is_empty() {
                return Err(Error::MissingInEdge(names[v].clone()));
            }
            if succ[v].is_empty() {
                return Err(Error::MissingOutEdge(names[v].clone()));
            }
        }
        let graph = Graph { names, succ, pred, adj };
        let degree_one = (0..n).all(|v| graph.succ[v].len() == 1 && graph.pred[v].len() == 1);
        if degree_one && graph.is_transitive() {
            return Err(Error::IsPureCycle);
        }
        Ok(graph)
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.names.len()
    }

    pub fn name(&self, v: Vertex) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<Vertex> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn successors(&self, v: Vertex) -> &[Vertex] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: Vertex) -> &[Vertex] {
        &self.pred[v]
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u][v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.vertices().flat_map(move |u| self.succ[u].iter().map(move |&v| (u, v)))
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Consecutive symbols are edges. The empty word is admissible.
    pub fn is_admissible(&self, word: &[Vertex]) -> bool {
        word.iter().all(|&v| v < self.num_vertices())
            && word.windows(2).all(|w| self.adj[w[0]][w[1]])
    }

    /// Like [`Graph::is_admissible`] but also requires `last -> first`.
    pub fn is_cycle(&self, word: &[Vertex]) -> bool {
        !word.is_empty()
            && self.is_admissible(word)
            && self.adj[*word.last().unwrap()][word[0]]
    }

    pub fn word_name(&self, word: &[Vertex]) -> String {
        word.iter().map(|&v| self.names[v].as_str()).collect::<Vec<_>>().join(",")
    }

    /// Parses a comma separated list of vertex names.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Vertex>> {
        if text.trim().is_empty() {
            return Ok(Vec::new());
        }
        text.split(',').map(|s| self.index_of(s.trim())).collect()
    }

    /// All admissible words of the given length, in lexicographic index order.
    pub fn words(&self, len: usize) -> Vec<Vec<Vertex>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Vertex>> = self.vertices().rev().map(|v| vec![v]).collect();
        while let Some(word) = stack.pop() {
            if word.len() == len {
                out.push(word);
                continue;
            }
            let last = *word.last().unwrap();
            for &v in self.succ[last].iter().rev() {
                let mut next = word.clone();
                next.push(v);
                stack.push(next);
            }
        }
        out
    }

    /// Admissible words of length `len` whose first symbol is `first`.
    pub fn words_from(&self, first: Vertex, len: usize) -> Vec<Vec<Vertex>> {
        self.extensions(&[first], len)
    }

    /// All admissible right-extensions of `prefix` to total length `len`.
    pub fn extensions(&self, prefix: &[Vertex], len: usize) -> Vec<Vec<Vertex>> {
        if prefix.len() >= len {
            return vec![prefix[..len].to_vec()];
        }
        let mut out = Vec::new();
        let mut stack = vec![prefix.to_vec()];
        while let Some(word) = stack.pop() {
            if word.len() == len {
                out.push(word);
                continue;
            }
            let last = *word.last().unwrap();
            for &v in self.succ[last].iter().rev() {
                let mut next = word.clone();
                next.push(v);
                stack.push(next);
            }
        }
        out
    }

    /// All admissible words matching `pattern`, where `None` is a free slot.
    pub fn fill_pattern(&self, pattern: &[Option<Vertex>]) -> Vec<Vec<Vertex>> {
        let mut partial: Vec<Vec<Vertex>> = vec![Vec::new()];
        for slot in pattern {
            let mut next = Vec::new();
            for w in &partial {
                let candidates: Vec<Vertex> = match w.last() {
                    Some(&last) => self.succ[last].clone(),
                    None => self.vertices().collect(),
                };
                for v in candidates {
                    if slot.map_or(true, |s| s == v) {
                        let mut x = w.clone();
                        x.push(v);
                        next.push(x);
                    }
                }
            }
            partial = next;
        }
        partial
    }

    fn reach(&self, start: Vertex, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.num_vertices()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            let next = if forward { &self.succ[u] } else { &self.pred[u] };
            for &v in next {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Every ordered pair of vertices is joined by a path.
    pub fn is_transitive(&self) -> bool {
        self.reach(0, true).iter().all(|&b| b) && self.reach(0, false).iter().all(|&b| b)
    }

    /// Transitive with period 1.
    pub fn is_mixing(&self) -> bool {
        self.is_transitive() && self.bfs_period().0 == 1
    }

    /// BFS levels from vertex 0 and the gcd of `level(u) + 1 - level(v)` over
    /// all edges. On a strongly connected graph this gcd is the period.
    fn bfs_period(&self) -> (usize, Vec<usize>) {
        let n = self.num_vertices();
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.succ[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut p = 0u64;
        for (u, v) in self.edges() {
            if level[u] == usize::MAX || level[v] == usize::MAX {
                continue;
            }
            let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
            p = gcd(p, diff);
        }
        (p.max(1) as usize, level)
    }

    pub fn period(&self) -> Result<usize> {
        Ok(self.period_and_decomposition()?.0)
    }

    /// Period `p` and the cyclic classes `Σ_0, …, Σ_{p-1}`; edges map class
    /// `i` into class `i+1 mod p`. Class 0 contains vertex 0.
    pub fn period_and_decomposition(&self) -> Result<(usize, Vec<Vec<Vertex>>)> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        let (p, level) = self.bfs_period();
        let mut classes = vec![Vec::new(); p];
        for v in self.vertices() {
            classes[level[v] % p].push(v);
        }
        Ok((p, classes))
    }

    /// Shortest path from `u` to `v`, both endpoints included. `[u]` when `u == v`.
    pub fn shortest_path(&self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        if u == v {
            return Some(vec![u]);
        }
        self.shortest_nontrivial_path(u, v)
    }

    /// Shortest path of length at least one edge from `u` to `v`.
    fn shortest_nontrivial_path(&self, u: Vertex, v: Vertex) -> Option<Vec<Vertex>> {
        let n = self.num_vertices();
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &w in &self.succ[u] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = u;
                queue.push_back(w);
            }
        }
        while let Some(w) = queue.pop_front() {
            if w == v {
                let mut path = vec![v];
                let mut cur = v;
                loop {
                    cur = parent[cur];
                    path.push(cur);
                    if cur == u {
                        break;
                    }
                }
                path.reverse();
                return Some(path);
            }
            for &x in &self.succ[w] {
                if !seen[x] {
                    seen[x] = true;
                    parent[x] = w;
                    queue.push_back(x);
                }
            }
        }
        None
    }

    /// Shortest cycle through `v`, listed starting at `v` (the closing edge back
    /// to `v` is implicit).
    pub fn shortest_cycle_through(&self, v: Vertex) -> Option<Vec<Vertex>> {
        let mut path = self.shortest_nontrivial_path(v, v)?;
        path.pop();
        Some(path)
    }

    /// Symbol used for the fixed past in one-sided reductions: the
    /// lexicographically smallest vertex name with a self-loop, otherwise the
    /// smallest name among vertices lying on a shortest cycle.
    pub fn fixed_past_symbol(&self) -> Vertex {
        let by_name = |vs: Vec<Vertex>| {
            vs.into_iter().min_by(|&a, &b| self.names[a].cmp(&self.names[b])).expect("nonempty")
        };
        let loops: Vec<Vertex> = self.vertices().filter(|&v| self.adj[v][v]).collect();
        if !loops.is_empty() {
            return by_name(loops);
        }
        let lengths: Vec<usize> = self
            .vertices()
            .map(|v| self.shortest_cycle_through(v).map_or(usize::MAX, |c| c.len()))
            .collect();
        let girth = *lengths.iter().min().unwrap();
        by_name(self.vertices().filter(|&v| lengths[v] == girth).collect())
    }

    /// A past ending at `v`: coordinates `…, cycle, cycle, connector` with the
    /// last connector symbol equal to `v`. The cycle runs through the fixed
    /// past symbol.
    pub fn canonical_past(&self, v: Vertex) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
        let omega = self.fixed_past_symbol();
        let cycle = self.shortest_cycle_through(omega).ok_or(Error::NotTransitive)?;
        let connector = self.shortest_path(omega, v).ok_or(Error::NotTransitive)?;
        Ok((cycle, connector))
    }

    /// A future starting at `v`: `connector, cycle, cycle, …` with the first
    /// connector symbol equal to `v`.
    pub fn canonical_future(&self, v: Vertex) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
        let omega = self.fixed_past_symbol();
        let mut cycle = self.shortest_cycle_through(omega).ok_or(Error::NotTransitive)?;
        let connector = self.shortest_path(v, omega).ok_or(Error::NotTransitive)?;
        cycle.rotate_left(1);
        Ok((connector, cycle))
    }

    /// Induced subgraph on `keep` (a finite truncation of a larger graph).
    pub fn truncate(&self, keep: &[Vertex]) -> Result<Graph> {
        let names: Vec<String> = keep.iter().map(|&v| self.names[v].clone()).collect();
        let mut edges = Vec::new();
        for (i, &u) in keep.iter().enumerate() {
            for (j, &v) in keep.iter().enumerate() {
                if self.adj[u][v] {
                    edges.push((i, j));
                }
            }
        }
        if names.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        Graph::from_parts(names, &edges)
    }

    /// Higher-power recoding of the cyclic class containing vertex 0: states
    /// are admissible words of length `p` starting in that class; `w -> w'`
    /// when `last(w) -> first(w')`.
    pub fn power_recode(&self, p: usize) -> Result<(Graph, Vec<Vec<Vertex>>)> {
        let (period, classes) = self.period_and_decomposition()?;
        let class0 = if period > 1 && p % period == 0 { classes[0].clone() } else { self.vertices().collect() };
        let mut states = Vec::new();
        for &v in &class0 {
            states.extend(self.words_from(v, p));
        }
        let names: Vec<String> = states.iter().map(|w| self.word_name(w).replace(',', "")).collect();
        let mut edges = Vec::new();
        for (i, w) in states.iter().enumerate() {
            for (j, w2) in states.iter().enumerate() {
                if self.adj[*w.last().unwrap()][w2[0]] {
                    edges.push((i, j));
                }
            }
        }
        let names = dedupe_names(names);
        Ok((Graph::from_parts(names, &edges)?, states))
    }

    /// Dense 0/1 adjacency matrix as f64.
    pub fn adjacency_f64(&self) -> Vec<Vec<f64>> {
        self.adj.iter().map(|row| row.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()).collect()
    }
}

/// Joined vertex names can collide (`a`+`bc` vs `ab`+`c`); disambiguate with a
/// suffix.
pub(crate) fn dedupe_names(names: Vec<String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(names.len());
    for name in names {
        let mut candidate = name.clone();
        let mut k = 1;
        while out.contains(&candidate) {
            candidate = format!("{name}#{k}");
            k += 1;
        }
        out.push(candidate);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_standing_assumptions() {
        assert!(Graph::new(&["a", "b"], &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")]).is_ok());
        assert_eq!(Graph::new(&["a", "b"], &[("a", "b"), ("b", "a")]), Err(Error::IsPureCycle));
        assert_eq!(
            Graph::new(&["a", "b"], &[("a", "a"), ("a", "b")]),
            Err(Error::MissingOutEdge("b".into()))
        );
        assert_eq!(
            Graph::new(&["a", "b"], &[("a", "a"), ("b", "a"), ("b", "b"), ("a", "a")])
                .map(|g| g.num_edges()),
            Ok(3)
        );
        assert_eq!(Graph::new::<&str>(&[], &[]), Err(Error::EmptyVertexSet));
        assert_eq!(Graph::new(&["a"], &[("a", "z")]), Err(Error::UnknownVertex("z".into())));
        assert_eq!(Graph::from_indices(1, &[(0, 0)]), Err(Error::IsPureCycle));
        assert_eq!(
            Graph::new(&["a", "b"], &[("a", "b"), ("b", "b")]),
            Err(Error::MissingInEdge("a".into()))
        );
    }

    #[test]
    fn golden_mean_period_one() {
        let g = Graph::golden_mean();
        let (p, classes) = g.period_and_decomposition().unwrap();
        assert_eq!(p, 1);
        assert_eq!(classes, vec![vec![0, 1]]);
        assert!(g.is_mixing());
    }

    #[test]
    fn cycle_lengths_four_and_two_give_period_two() {
        // a->b->c->d->a plus c->b: cycles of length 4 and 2
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let (p, classes) = g.period_and_decomposition().unwrap();
        assert_eq!(p, 2);
        assert_eq!(classes, vec![vec![0, 2], vec![1, 3]]);
        assert!(g.is_transitive());
        assert!(!g.is_mixing());
    }

    #[test]
    fn disjoint_components_not_transitive() {
        let g = Graph::from_indices(2, &[(0, 0), (1, 1)]).unwrap();
        assert!(!g.is_transitive());
        assert_eq!(g.period(), Err(Error::NotTransitive));
    }

    #[test]
    fn fixed_past_prefers_self_loop_then_shortest_cycle() {
        let g = Graph::golden_mean();
        assert_eq!(g.fixed_past_symbol(), 0);
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        assert_eq!(g.fixed_past_symbol(), 1);
        let (cycle, connector) = g.canonical_past(0).unwrap();
        assert!(g.is_cycle(&cycle));
        assert_eq!(connector.first(), Some(&1));
        assert_eq!(connector.last(), Some(&0));
        assert!(g.is_admissible(&connector));
        assert!(g.has_edge(*cycle.last().unwrap(), connector[0]));
    }

    #[test]
    fn words_are_admissible_and_counted() {
        let g = Graph::golden_mean();
        // Fibonacci counts
        assert_eq!(g.words(1).len(), 2);
        assert_eq!(g.words(2).len(), 3);
        assert_eq!(g.words(3).len(), 5);
        assert_eq!(g.words(4).len(), 8);
        assert!(g.words(4).iter().all(|w| g.is_admissible(w)));
    }

    #[test]
    fn power_recode_of_periodic_graph() {
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let (h, states) = g.power_recode(2).unwrap();
        // 2-paths starting in {a, c}: ab, cb, cd
        assert_eq!(states, vec![vec![0, 1], vec![2, 1], vec![2, 3]]);
        assert!(h.is_mixing());
    }
}
