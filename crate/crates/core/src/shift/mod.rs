//! Topological Markov shifts: graphs, points, cylinders, Birkhoff sums.

mod graph;
mod point;

pub use graph::{Graph, Vertex};
pub use point::{metric_d, smale_bracket, Cylinder, Point};

use crate::scalar::Scalar;

/// A function on the shift space that can be evaluated at eventually
/// periodic points.
pub trait Observable<T: Scalar> {
    fn eval(&self, x: &Point) -> T;
}

impl<T: Scalar, F: Fn(&Point) -> T> Observable<T> for F {
    fn eval(&self, x: &Point) -> T {
        self(x)
    }
}

/// Birkhoff sum `f_n(x)`, extended to negative `n` by
/// `f_n = -f_{|n|} ∘ σ^{-|n|}` so that `f_{m+n} = f_n + f_m ∘ σ^n`.
pub fn birkhoff_sum<T: Scalar, O: Observable<T> + ?Sized>(f: &O, x: &Point, n: i64) -> T {
    let mut total = T::zero();
    if n >= 0 {
        for k in 0..n {
            total = total + f.eval(&x.shift(k));
        }
    } else {
        for k in 1..=-n {
            total = total - f.eval(&x.shift(-k));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn birkhoff_basics() {
        let g = Graph::full_shift(2).unwrap();
        let x = Point::random(&g, &mut ChaCha8Rng::seed_from_u64(3), 4);
        let c = |_: &Point| 1.5f64;
        assert_eq!(birkhoff_sum(&c, &x, 0), 0.0);
        assert_eq!(birkhoff_sum(&c, &x, 5), 7.5);
        assert_eq!(birkhoff_sum(&c, &x, -2), -3.0);
    }

    #[test]
    fn cocycle_identity_exact() {
        let g = Graph::golden_mean();
        let f = |p: &Point| -> Rational { ratio(1 + 2 * p.at(0) as i64 + 3 * p.at(1) as i64, 7) };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = Point::random(&g, &mut rng, 6);
            let m = rng.gen_range(-6..=6);
            let n = rng.gen_range(-6..=6);
            let lhs = birkhoff_sum(&f, &x, m + n);
            let rhs = birkhoff_sum(&f, &x, n) + birkhoff_sum(&f, &x.shift(n), m);
            assert_eq!(lhs, rhs);
        }
    }
}
