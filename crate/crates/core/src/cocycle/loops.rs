//! su-paths, their lifts to the suspension and random su-loops.

use rand::Rng;

use super::pair::{bowen_marcus_p, AnchoredPair};
use crate::error::{Error, Result};
use crate::scalar::{Estimate, Scalar};
use crate::shift::{Graph, Point, Vertex};
use crate::suspension::{flow_map, FlowPoint, Roof};
use crate::thermo::Side;

/// A chain `x^0, x^1, …, x^n` where consecutive points are weakly stable or
/// weakly unstable to each other.
#[derive(Clone, Debug, PartialEq)]
pub struct SuPath {
    start: Point,
    legs: Vec<AnchoredPair>,
}

impl SuPath {
    pub fn new(start: Point, legs: Vec<AnchoredPair>) -> Result<Self> {
        let mut cur = &start;
        for (i, leg) in legs.iter().enumerate() {
            if &leg.x != cur {
                return Err(Error::BrokenChain(format!("leg {i} does not start where leg {} ended", i as i64 - 1)));
            }
            cur = &leg.y;
        }
        Ok(SuPath { start, legs })
    }

    pub fn start(&self) -> &Point {
        &self.start
    }

    pub fn end(&self) -> &Point {
        self.legs.last().map_or(&self.start, |l| &l.y)
    }

    pub fn legs(&self) -> &[AnchoredPair] {
        &self.legs
    }

    pub fn points(&self) -> Vec<&Point> {
        std::iter::once(&self.start).chain(self.legs.iter().map(|l| &l.y)).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.end() == &self.start
    }

    /// `P(γ) = Σ P^{τ_i}(x^{i-1}, x^i)`.
    pub fn weight<T: Scalar>(&self, roof: &Roof<T>, tol: f64) -> Result<Estimate<T>> {
        let mut value = T::zero();
        let mut error_bound = 0.0;
        for leg in &self.legs {
            let p = bowen_marcus_p(leg, roof, tol)?;
            value = value + p.value;
            error_bound += p.error_bound;
        }
        Ok(Estimate { value, error_bound })
    }

    pub fn reversed(&self) -> SuPath {
        SuPath { start: self.end().clone(), legs: self.legs.iter().rev().map(AnchoredPair::reversed).collect() }
    }

    pub fn shifted(&self, k: i64) -> SuPath {
        SuPath { start: self.start.shift(k), legs: self.legs.iter().map(|l| l.shifted(k)).collect() }
    }

    /// `self` followed by `next`.
    pub fn concat(&self, next: &SuPath) -> Result<SuPath> {
        if self.end() != &next.start {
            return Err(Error::BrokenChain("paths do not meet".into()));
        }
        let mut legs = self.legs.clone();
        legs.extend(next.legs.iter().cloned());
        Ok(SuPath { start: self.start.clone(), legs })
    }
}

/// A closed su-path.
#[derive(Clone, Debug, PartialEq)]
pub struct SuLoop(SuPath);

impl SuLoop {
    pub fn new(path: SuPath) -> Result<Self> {
        if !path.is_closed() {
            return Err(Error::BrokenChain("path is not closed".into()));
        }
        Ok(SuLoop(path))
    }

    pub fn path(&self) -> &SuPath {
        &self.0
    }

    pub fn base(&self) -> &Point {
        self.0.start()
    }

    pub fn reversed(&self) -> SuLoop {
        SuLoop(self.0.reversed())
    }

    pub fn shifted(&self, k: i64) -> SuLoop {
        SuLoop(self.0.shifted(k))
    }

    pub fn concat(&self, next: &SuLoop) -> Result<SuLoop> {
        Ok(SuLoop(self.0.concat(&next.0)?))
    }
}

pub fn su_loop_weight<T: Scalar>(l: &SuLoop, roof: &Roof<T>, tol: f64) -> Result<Estimate<T>> {
    l.0.weight(roof, tol)
}

/// Lift `z_i = σ_r^{θ + t_i}(x^i, 0)` with `t_0 = 0` and
/// `t_i = t_{i-1} + P^{τ_i}(x^{i-1}, x^i)`. Returns the lifted points with the
/// times `t_i`.
pub fn lift_su_path<T: Scalar>(path: &SuPath, roof: &Roof<T>, theta: T, tol: f64) -> Result<Vec<(FlowPoint<T>, T)>> {
    let r0 = roof.eval(path.start());
    if theta < T::zero() || theta >= r0 {
        return Err(Error::HeightOutOfRange { height: theta.to_f64_lossy(), roof: r0.to_f64_lossy() });
    }
    let lift = |x: &Point, t: &T| flow_map(roof, &FlowPoint { base: x.clone(), height: T::zero() }, theta.clone() + t.clone());
    let mut t = T::zero();
    let mut out = vec![(lift(path.start(), &t), t.clone())];
    for leg in path.legs() {
        t = t + bowen_marcus_p(leg, roof, tol)?.value;
        out.push((lift(&leg.y, &t), t.clone()));
    }
    Ok(out)
}

fn connector(graph: &Graph, u: Vertex, v: Vertex) -> Result<Vec<Vertex>> {
    graph
        .shortest_path(u, v)
        .ok_or_else(|| Error::Inadmissible(format!("no path from {} to {}", graph.name(u), graph.name(v))))
}

/// A random `y` with `y_m^∞ = x_n^∞` and an unrelated past.
fn stable_neighbor<R: Rng + ?Sized>(graph: &Graph, x: &Point, m: i64, n: i64, rng: &mut R) -> Result<Point> {
    let w = Point::random(graph, rng, 4);
    let p = connector(graph, w.at(0), x.at(n))?;
    let k = p.len() as i64 - 1;
    let left = w.shift(k - m);
    if k == 0 {
        Point::splice(Some(graph), &left, m, &[], x, n + 1)
    } else {
        Point::splice(Some(graph), &left, m - k, &p[1..p.len() - 1], x, n)
    }
}

/// A random `y` with `y_{-∞}^m = x_{-∞}^n` and an unrelated future.
fn unstable_neighbor<R: Rng + ?Sized>(graph: &Graph, x: &Point, m: i64, n: i64, rng: &mut R) -> Result<Point> {
    let w = Point::random(graph, rng, 4);
    let p = connector(graph, x.at(n), w.at(0))?;
    let k = p.len() as i64 - 1;
    let left = x.shift(n - m);
    if k == 0 {
        Point::splice(Some(graph), &left, m, &[], &w, 1)
    } else {
        Point::splice(Some(graph), &left, m, &p[1..p.len() - 1], &w, 0)
    }
}

/// A random pair `(x, y)` on the given side with prescribed anchors; the
/// free half of `y` is random.
pub fn random_neighbor<R: Rng + ?Sized>(
    graph: &Graph,
    x: &Point,
    side: Side,
    anchors: (i64, i64),
    rng: &mut R,
) -> Result<AnchoredPair> {
    let (m, n) = anchors;
    let y = match side {
        Side::Stable => stable_neighbor(graph, x, m, n, rng)?,
        Side::Unstable => unstable_neighbor(graph, x, m, n, rng)?,
    };
    AnchoredPair::new(x.clone(), y, side, anchors)
}

/// A random leg from `x` on the given side with anchors in `[-3, 3]`.
pub fn random_leg<R: Rng + ?Sized>(graph: &Graph, x: &Point, side: Side, rng: &mut R) -> Result<AnchoredPair> {
    let n = rng.gen_range(-3..=3);
    let m = rng.gen_range(-3..=3);
    random_neighbor(graph, x, side, (m, n), rng)
}

/// A random su-loop at `x` with `legs` random legs, closed by an unstable leg
/// to a point carrying the past of the current endpoint and the future of
/// `x`, followed by a stable leg back to `x`.
pub fn sample_su_loop<R: Rng + ?Sized>(graph: &Graph, x: &Point, legs: usize, rng: &mut R) -> Result<SuLoop> {
    let mut chain = Vec::with_capacity(legs + 2);
    let mut cur = x.clone();
    for _ in 0..legs {
        let side = if rng.gen_bool(0.5) { Side::Stable } else { Side::Unstable };
        let leg = random_leg(graph, &cur, side, rng)?;
        cur = leg.y.clone();
        chain.push(leg);
    }
    let np: i64 = rng.gen_range(-3..=3);
    let nx: i64 = rng.gen_range(-3..=3);
    let p = connector(graph, cur.at(np), x.at(nx))?;
    let k = p.len() as i64 - 1;
    let left = cur.shift(np);
    let q = if k == 0 {
        Point::splice(Some(graph), &left, 0, &[], x, nx + 1)?
    } else {
        Point::splice(Some(graph), &left, 0, &p[1..p.len() - 1], x, nx)?
    };
    chain.push(AnchoredPair::new(cur, q.clone(), Side::Unstable, (0, np))?);
    chain.push(AnchoredPair::new(q, x.clone(), Side::Stable, (nx, k))?);
    SuLoop::new(SuPath::new(x.clone(), chain)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::thermo::Potential;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn roof(g: &Graph) -> Roof<Rational> {
        Roof::new(Potential::from_fn(g, (-1, 1), |w| ratio(3 + w[0] as i64 + 2 * w[1] as i64 + w[2] as i64 * w[0] as i64, 2)).unwrap())
            .unwrap()
    }

    #[test]
    fn sampled_loops_are_closed_and_reversal_negates() {
        let g = Graph::golden_mean();
        let r = roof(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let x = Point::random(&g, &mut rng, 5);
            let l = sample_su_loop(&g, &x, 3, &mut rng).unwrap();
            let w = su_loop_weight(&l, &r, 1e-12).unwrap().value;
            let wr = su_loop_weight(&l.reversed(), &r, 1e-12).unwrap().value;
            assert_eq!(w.clone() + wr, ratio(0, 1));
            let ws = su_loop_weight(&l.shifted(2), &r, 1e-12).unwrap().value;
            assert_eq!(w, ws);
        }
    }

    #[test]
    fn lift_endpoints_match_weight() {
        let g = Graph::full_shift(2).unwrap();
        let r = roof(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Point::random(&g, &mut rng, 5);
        let l = sample_su_loop(&g, &x, 2, &mut rng).unwrap();
        let lifted = lift_su_path(l.path(), &r, ratio(1, 3), 1e-12).unwrap();
        let w = su_loop_weight(&l, &r, 1e-12).unwrap().value;
        assert_eq!(lifted.last().unwrap().1, w);
        let expected = flow_map(&r, &FlowPoint { base: x, height: ratio(0, 1) }, ratio(1, 3) + w);
        assert_eq!(lifted.last().unwrap().0, expected);
    }

    #[test]
    fn broken_chain_rejected() {
        let g = Graph::full_shift(2).unwrap();
        let x = Point::periodic(&g, &[0]).unwrap();
        let y = Point::periodic(&g, &[1]).unwrap();
        let leg = AnchoredPair::trivial(y, Side::Stable);
        assert!(matches!(SuPath::new(x, vec![leg]), Err(Error::BrokenChain(_))));
    }
}
