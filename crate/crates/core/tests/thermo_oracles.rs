mod common;

use markovflow::shift::{Graph, Point};
use markovflow::thermo::{equilibrium_measure, pressure, Potential};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn zero_potential_pressure_is_log_perron_root() {
    for g in [Graph::full_shift(2).unwrap(), Graph::golden_mean(), Graph::full_shift(3).unwrap()] {
        let (_, p) = pressure(&g, &Potential::zero(&g)).unwrap();
        let oracle = common::dense_spectral_radius(&g.adjacency_f64()).ln();
        assert!((p - oracle).abs() < 1e-9, "{p} vs {oracle}");
    }
}

#[test]
fn one_symbol_potential_gives_product_measure() {
    for p in [0.1, 1.0 / 3.0, 0.5] {
        let m = common::bernoulli(p);
        for len in 1..=6 {
            for w in m.graph().words(len) {
                let prod: f64 = w.iter().map(|&s| if s == 0 { p } else { 1.0 - p }).product();
                assert!((m.cylinder_mass(&w) - prod).abs() < 1e-10);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pressure_of_locally_constant_potential_matches_weighted_matrix(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(2..=5);
        let g = common::random_transitive_graph(&mut rng, size);
        let phi = Potential::from_fn(&g, (0, 1), |_| rng.gen_range(-1.0..1.0)).unwrap();
        let n = g.num_vertices();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|u| (0..n).map(|v| if g.has_edge(u, v) { phi.value(&[u, v]).unwrap().exp() } else { 0.0 }).collect())
            .collect();
        let (_, p) = pressure(&g, &phi).unwrap();
        prop_assert!((p - common::dense_spectral_radius(&rows).ln()).abs() < 1e-9);
    }

    #[test]
    fn g_function_sums_to_one_over_preimages(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(2..=6);
        let g = common::random_transitive_graph(&mut rng, size);
        let phi = Potential::from_fn(&g, (0, 1), |_| rng.gen_range(-1.0..1.0)).unwrap();
        let m = equilibrium_measure(&g, &phi, 1e-14).unwrap();
        for _ in 0..20 {
            let x = Point::random(&g, &mut rng, 6);
            let s: f64 = g.predecessors(x.at(0)).iter().map(|&a| {
                let mut w = vec![a];
                w.extend(x.window(0, m.word_len() as i64));
                m.g(&w).unwrap()
            }).sum();
            prop_assert!((s - 1.0).abs() < 1e-12, "{}", s);
        }
    }
}
