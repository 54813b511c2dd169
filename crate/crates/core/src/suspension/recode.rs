//! Constant-roof recoding and product coordinates for unit suspensions.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::shift::{birkhoff_sum, Graph, Point, Vertex};
use crate::thermo::Potential;

use super::flow::{FlowPoint, Roof};

/// A constant roof `c` over a graph of period `p`, rewritten over the mixing
/// component `Σ_0` with the `p`-step map and roof `p·c`.
///
/// States of the new graph are the admissible words of length `p` starting in
/// `Σ_0`, so the recoded shift is conjugate to `σ^p` on `Σ_0`.
#[derive(Clone, Debug)]
pub struct ConstantRoofRecoding<T> {
    pub graph: Graph,
    pub states: Vec<Vec<Vertex>>,
    pub period: usize,
    pub roof: Roof<T>,
}

pub fn constant_roof_recode<T: Scalar>(graph: &Graph, roof: &Roof<T>) -> Result<ConstantRoofRecoding<T>> {
    let c = roof.constant_value().ok_or(Error::RoofNotConstant)?;
    let p = graph.period()?;
    if p == 1 {
        return Ok(ConstantRoofRecoding {
            graph: graph.clone(),
            states: graph.vertices().map(|v| vec![v]).collect(),
            period: 1,
            roof: roof.clone(),
        });
    }
    let (g, states) = graph.power_recode(p)?;
    let roof = Roof::constant(&g, T::int(p as i64) * c)?;
    Ok(ConstantRoofRecoding { graph: g, states, period: p, roof })
}

impl<T: Scalar> ConstantRoofRecoding<T> {
    /// `Φ = Σ_{k<p} φ∘σ^k` as a potential on the block shift.
    pub fn lift_potential<U: Scalar>(&self, graph: &Graph, phi: &Potential<U>) -> Result<Potential<U>> {
        if self.period == 1 {
            return Ok(phi.clone());
        }
        let p = self.period as i64;
        let (l, m) = phi.window();
        let lo = l.div_euclid(p);
        let hi = (p - 1 + m).div_euclid(p);
        Potential::try_from_fn(&self.graph, (lo, hi), |blocks| {
            let flat: Vec<Vertex> = blocks.iter().flat_map(|&b| self.states[b].iter().copied()).collect();
            let x = Point::extend_word(graph, &flat, lo * p)?;
            Ok(birkhoff_sum(phi, &x, p))
        })
        .map(|f| f.trimmed(&self.graph))
    }
}

/// Coordinates of `ρ(T^t(x, s)) = (S^{s+t}(x), (s + t) mod 1)` on the unit
/// suspension. Non-integer times of the base flow `S` are abstract, so the
/// base is reported at the integer part of the time.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductCoordinates<T> {
    /// `s + t`, the time of the base flow.
    pub base_image_time: T,
    /// `⌊s + t⌋`.
    pub base_shift: i64,
    /// `σ^{⌊s+t⌋}(x)`.
    pub base: Point,
    /// `(s + t) mod 1`.
    pub circle: T,
}

pub fn product_coordinates<T: Scalar>(roof: &Roof<T>, z: &FlowPoint<T>, t: T) -> Result<ProductCoordinates<T>> {
    if roof.constant_value() != Some(T::one()) {
        return Err(Error::RoofNotOne);
    }
    let total = z.height.clone() + t;
    let k = total.floor_int();
    Ok(ProductCoordinates {
        base_shift: k,
        base: z.base.shift(k),
        circle: total.clone() - T::int(k),
        base_image_time: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::suspension::flow_map;

    #[test]
    fn period_two_recoding() {
        let g = Graph::from_indices(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (2, 1)]).unwrap();
        let roof = Roof::constant(&g, 1.0).unwrap();
        let rec = constant_roof_recode(&g, &roof).unwrap();
        assert_eq!(rec.period, 2);
        assert_eq!(rec.roof.constant_value(), Some(2.0));
        assert!(rec.graph.is_mixing());
        // 2-paths in the even class: ab, cb, cd
        assert_eq!(rec.states.len(), 3);
        let nonconst = Roof::new(Potential::from_fn(&g, (0, 0), |w| 1.0 + w[0] as f64).unwrap()).unwrap();
        assert!(matches!(constant_roof_recode(&g, &nonconst), Err(Error::RoofNotConstant)));
        let mixing = Graph::golden_mean();
        let rec = constant_roof_recode(&mixing, &Roof::constant(&mixing, 1.5).unwrap()).unwrap();
        assert_eq!(rec.graph, mixing);
        assert_eq!(rec.roof.constant_value(), Some(1.5));
    }

    #[test]
    fn product_coordinate_examples() {
        let g = Graph::full_shift(2).unwrap();
        let roof = Roof::constant(&g, ratio(1, 1)).unwrap();
        let x = Point::periodic(&g, &[0, 1, 1]).unwrap();
        let z0 = FlowPoint::new(&roof, x.clone(), ratio(0, 1)).unwrap();
        let c = product_coordinates(&roof, &z0, ratio(1, 1)).unwrap();
        assert_eq!((c.base_shift, c.circle.clone()), (1, ratio(0, 1)));
        assert_eq!(c.base, x.shift(1));
        let z = FlowPoint::new(&roof, x.clone(), ratio(1, 4)).unwrap();
        let c = product_coordinates(&roof, &z, ratio(1, 2)).unwrap();
        assert_eq!((c.base_shift, c.circle), (0, ratio(3, 4)));
        let z = FlowPoint::new(&roof, x.clone(), ratio(1, 2)).unwrap();
        let c = product_coordinates(&roof, &z, ratio(9, 4)).unwrap();
        assert_eq!((c.base_shift, c.circle), (2, ratio(3, 4)));
        let two = Roof::<Rational>::constant(&g, ratio(2, 1)).unwrap();
        assert!(matches!(product_coordinates(&two, &FlowPoint::new(&two, x, ratio(0, 1)).unwrap(), ratio(1, 1)), Err(Error::RoofNotOne)));
    }

    #[test]
    fn conjugacy_at_integer_times() {
        let g = Graph::golden_mean();
        let roof = Roof::constant(&g, ratio(1, 1)).unwrap();
        let x = Point::periodic(&g, &[0, 1, 0, 0, 1]).unwrap();
        let z = FlowPoint::new(&roof, x, ratio(2, 7)).unwrap();
        let rz = product_coordinates(&roof, &z, ratio(0, 1)).unwrap();
        for t in -4..=4 {
            let moved = flow_map(&roof, &z, ratio(t, 1));
            let lhs = product_coordinates(&roof, &moved, ratio(0, 1)).unwrap();
            assert_eq!(lhs.base, rz.base.shift(t));
            assert_eq!(lhs.circle, rz.circle);
        }
    }
}
