//! Weak stable and unstable pairs and their Bowen–Marcus cocycles.

use crate::error::{Error, Result};
use crate::scalar::{Estimate, Scalar};
use crate::shift::Point;
use crate::suspension::Roof;
use crate::thermo::Side;

/// `y ∈ W^{ws}(x)` with `y_m^∞ = x_n^∞`, or `y ∈ W^{wu}(x)` with
/// `y_{-∞}^m = x_{-∞}^n`, where `(m, n)` are the anchors.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchoredPair {
    pub x: Point,
    pub y: Point,
    pub side: Side,
    pub anchors: (i64, i64),
}

impl AnchoredPair {
    pub fn new(x: Point, y: Point, side: Side, anchors: (i64, i64)) -> Result<Self> {
        let (m, n) = anchors;
        let ok = match side {
            Side::Stable => y.agrees_forward(m, &x, n),
            Side::Unstable => y.agrees_backward(m, &x, n),
        };
        if !ok {
            return Err(Error::InvalidAnchors(format!("{side:?} agreement fails at (m, n) = ({m}, {n})")));
        }
        Ok(AnchoredPair { x, y, side, anchors })
    }

    /// `⟨x, x⟩` with anchors `(0, 0)`.
    pub fn trivial(x: Point, side: Side) -> Self {
        AnchoredPair { y: x.clone(), x, side, anchors: (0, 0) }
    }

    /// The pair `(y, x)`.
    pub fn reversed(&self) -> Self {
        AnchoredPair { x: self.y.clone(), y: self.x.clone(), side: self.side, anchors: (self.anchors.1, self.anchors.0) }
    }

    /// `(σ^k x, σ^k y)`.
    pub fn shifted(&self, k: i64) -> Self {
        AnchoredPair {
            x: self.x.shift(k),
            y: self.y.shift(k),
            side: self.side,
            anchors: (self.anchors.0 - k, self.anchors.1 - k),
        }
    }

    /// `(x, z)` from `(x, y)` and `(y, z)` on the same side.
    pub fn compose(&self, next: &AnchoredPair) -> Result<Self> {
        if self.side != next.side {
            return Err(Error::BrokenChain("cannot compose pairs of different sides".into()));
        }
        if self.y != next.x {
            return Err(Error::BrokenChain("pairs do not share the middle point".into()));
        }
        let (m1, n1) = self.anchors;
        let (m2, n2) = next.anchors;
        let q = match self.side {
            Side::Stable => m1.max(n2),
            Side::Unstable => m1.min(n2),
        };
        Ok(AnchoredPair {
            x: self.x.clone(),
            y: next.y.clone(),
            side: self.side,
            anchors: (m2 + q - n2, n1 + q - m1),
        })
    }
}

/// Bowen–Marcus cocycle `P^τ(x, y)`.
///
/// Stable: `r_m(y) - r_n(x) + Σ_{k≥0} [r(σ^{m+k} y) - r(σ^{n+k} x)]`.
/// Unstable: `r_m(y) - r_n(x) - Σ_{k≥1} [r(σ^{m-k} y) - r(σ^{n-k} x)]`.
/// For a table roof the summands vanish once the roof window sits inside the
/// agreement region, so the series terminates. A nonzero envelope constant
/// adds its tail beyond the summed terms as the error bound, with enough
/// terms summed to push that tail below `tol`.
pub fn bowen_marcus_p<T: Scalar>(pair: &AnchoredPair, roof: &Roof<T>, tol: f64) -> Result<Estimate<T>> {
    let (m, n) = pair.anchors;
    let (lo, hi) = roof.potential().window();
    let envelope = roof.potential().envelope();
    let mut terms = match pair.side {
        Side::Stable => (-lo).max(0),
        Side::Unstable => hi.max(0),
    } as u64;
    if envelope.c > 0.0 {
        while envelope.tail(terms) >= tol && terms < 10_000 {
            terms += 1;
        }
    }
    let (x, y) = (&pair.x, &pair.y);
    let mut total = roof.birkhoff(y, m) - roof.birkhoff(x, n);
    for k in 0..terms as i64 {
        total = match pair.side {
            Side::Stable => total + roof.eval(&y.shift(m + k)) - roof.eval(&x.shift(n + k)),
            Side::Unstable => total - (roof.eval(&y.shift(m - k - 1)) - roof.eval(&x.shift(n - k - 1))),
        };
    }
    let error_bound = if envelope.c > 0.0 { envelope.tail(terms) } else { 0.0 };
    Ok(Estimate { value: total, error_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::shift::Graph;
    use crate::thermo::Potential;

    #[test]
    fn anchor_validation() {
        let g = Graph::full_shift(2).unwrap();
        let x = Point::new(&g, vec![0], vec![1, 0, 1], 0, vec![1]).unwrap();
        let y = Point::new(&g, vec![1], vec![0, 0, 1], 0, vec![1]).unwrap();
        assert!(AnchoredPair::new(x.clone(), y.clone(), Side::Stable, (1, 1)).is_ok());
        assert!(AnchoredPair::new(x.clone(), y.clone(), Side::Stable, (0, 0)).is_err());
        assert!(AnchoredPair::new(x, y, Side::Unstable, (0, 0)).is_err());
    }

    #[test]
    fn local_stable_pair_with_one_symbol_roof() {
        let g = Graph::full_shift(2).unwrap();
        let roof = Roof::new(Potential::<Rational>::from_fn(&g, (0, 0), |w| ratio(1 + w[0] as i64, 1)).unwrap()).unwrap();
        let x = Point::new(&g, vec![0], vec![1, 0], 0, vec![1]).unwrap();
        let y = Point::new(&g, vec![1], vec![1, 0], 0, vec![1]).unwrap();
        let p = AnchoredPair::new(x.clone(), y.clone(), Side::Stable, (0, 0)).unwrap();
        assert_eq!(bowen_marcus_p(&p, &roof, 1e-12).unwrap().value, ratio(0, 1));
        // y_1^∞ = x_0^∞ with anchors (1, 0): only r(y) survives
        let y1 = Point::new(&g, vec![0], vec![1, 1, 0], 0, vec![1]).unwrap();
        let p = AnchoredPair::new(x, y1.clone(), Side::Stable, (1, 0)).unwrap();
        assert_eq!(bowen_marcus_p(&p, &roof, 1e-12).unwrap().value, roof.eval(&y1));
    }

    #[test]
    fn constant_roof_telescopes() {
        let g = Graph::golden_mean();
        let roof = Roof::constant(&g, ratio(3, 2)).unwrap();
        let x = Point::periodic(&g, &[0, 1]).unwrap();
        for (m, n) in [(0, 2), (3, 1), (-2, 4)] {
            let y = x.shift(n - m);
            for side in [Side::Stable, Side::Unstable] {
                let p = AnchoredPair::new(x.clone(), y.clone(), side, (m, n)).unwrap();
                let v = bowen_marcus_p(&p, &roof, 1e-12).unwrap();
                assert_eq!(v.value, ratio(3 * (m - n), 2));
                assert_eq!(v.error_bound, 0.0);
            }
        }
    }

    #[test]
    fn composition_anchors() {
        let g = Graph::full_shift(2).unwrap();
        let x = Point::new(&g, vec![0], vec![1], 0, vec![1]).unwrap();
        let y = Point::new(&g, vec![1], vec![0, 0], -3, vec![1]).unwrap();
        let z = Point::new(&g, vec![0], vec![0, 1, 0], 2, vec![1]).unwrap();
        let a = AnchoredPair::new(x.clone(), y.clone(), Side::Stable, (0, 1)).unwrap();
        let b = AnchoredPair::new(y, z.clone(), Side::Stable, (5, 2)).unwrap();
        let c = a.compose(&b).unwrap();
        assert!(AnchoredPair::new(x, z, Side::Stable, c.anchors).is_ok());
    }
}
