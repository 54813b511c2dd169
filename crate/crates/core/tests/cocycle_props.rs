mod common;

use markovflow::cocycle::{bowen_marcus_p, random_neighbor, AnchoredPair};
use markovflow::scalar::{ratio, Rational, Scalar};
use markovflow::shift::{metric_d, Graph, Point};
use markovflow::suspension::Roof;
use markovflow::thermo::{Potential, Side};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random rational roof in `[1, 3]` on the window `(-1, 1)`.
fn random_roof(graph: &Graph, rng: &mut ChaCha8Rng) -> Roof<Rational> {
    let phi = Potential::from_fn(graph, (-1, 1), |_| ratio(rng.gen_range(8..=24), 8)).unwrap();
    Roof::new(phi).unwrap()
}

fn graph_for(seed: u64, rng: &mut ChaCha8Rng) -> Graph {
    match seed % 3 {
        0 => Graph::full_shift(2).unwrap(),
        1 => Graph::golden_mean(),
        _ => {
            let size = rng.gen_range(2..=5);
            common::random_transitive_graph(rng, size)
        }
    }
}

fn side(b: bool) -> Side {
    if b { Side::Stable } else { Side::Unstable }
}

fn p(pair: &AnchoredPair, roof: &Roof<Rational>) -> Rational {
    bowen_marcus_p(pair, roof, 1e-12).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_identity_is_exact(seed in any::<u64>(), stable in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph_for(seed, &mut rng);
        let roof = random_roof(&g, &mut rng);
        let x = Point::random(&g, &mut rng, 6);
        let anchors = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let pair = random_neighbor(&g, &x, side(stable), anchors, &mut rng).unwrap();
        let lhs = p(&pair.shifted(1), &roof) - p(&pair, &roof);
        prop_assert_eq!(lhs, roof.eval(&pair.x) - roof.eval(&pair.y));
    }

    #[test]
    fn cocycle_equation_and_antisymmetry(seed in any::<u64>(), stable in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph_for(seed, &mut rng);
        let roof = random_roof(&g, &mut rng);
        let x = Point::random(&g, &mut rng, 6);
        let a = random_neighbor(&g, &x, side(stable), (rng.gen_range(-3..=3), rng.gen_range(-3..=3)), &mut rng).unwrap();
        let b = random_neighbor(&g, &a.y, side(stable), (rng.gen_range(-3..=3), rng.gen_range(-3..=3)), &mut rng).unwrap();
        let c = a.compose(&b).unwrap();
        prop_assert_eq!(p(&a, &roof) + p(&b, &roof), p(&c, &roof));
        prop_assert_eq!(p(&a, &roof), -p(&a.reversed(), &roof));
        prop_assert_eq!(p(&AnchoredPair::trivial(x, side(stable)), &roof), ratio(0, 1));
    }

    #[test]
    fn holder_bound_on_local_manifolds(seed in any::<u64>(), stable in any::<bool>(), alpha in 0.2f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph_for(seed, &mut rng);
        let roof = random_roof(&g, &mut rng).to_f64();
        let env = roof.potential().fitted_envelope(&g, alpha);
        let x = Point::random(&g, &mut rng, 6);
        let pair = random_neighbor(&g, &x, side(stable), (0, 0), &mut rng).unwrap();
        let v = bowen_marcus_p(&pair, &roof, 1e-12).unwrap();
        let bound = env.summed_constant() * metric_d(&pair.x, &pair.y).powf(alpha);
        prop_assert!(v.value.abs() <= bound + v.error_bound + 1e-12, "{} > {}", v.value, bound);
    }

    #[test]
    fn float_roof_with_envelope_stays_within_error_bounds(seed in any::<u64>(), stable in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = graph_for(seed, &mut rng);
        let exact = random_roof(&g, &mut rng);
        let env = exact.potential().to_f64().fitted_envelope(&g, 0.5);
        let roof = Roof::new(exact.potential().to_f64().with_envelope(env)).unwrap();
        let x = Point::random(&g, &mut rng, 6);
        let pair = random_neighbor(&g, &x, side(stable), (rng.gen_range(-3..=3), rng.gen_range(-3..=3)), &mut rng).unwrap();
        let v = bowen_marcus_p(&pair, &roof, 1e-9).unwrap();
        let truth = p(&pair, &exact).to_f64_lossy();
        prop_assert!((v.value - truth).abs() <= v.error_bound + 1e-9);
        let s = bowen_marcus_p(&pair.shifted(1), &roof, 1e-9).unwrap();
        let lhs = s.value - v.value;
        let rhs = roof.eval(&pair.x) - roof.eval(&pair.y);
        prop_assert!((lhs - rhs).abs() <= 2.0 * v.error_bound.max(s.error_bound) + 1e-9);
    }
}
