use clustered_ising::classes::{
    build_lumped_chain, class_energy_exact, class_size, classify, enumerate_classes, flip_multiplicities, move_of_vertex,
};
use clustered_ising::model::{build_graph, flip, flip_delta_exact, hamiltonian_exact, SpinConfig};
use clustered_ising::{rat, Params, Rational};
use proptest::prelude::*;

fn rational(lo: i64, hi: i64) -> impl Strategy<Value = Rational> {
    (lo..=hi).prop_map(|k| rat(k, 20))
}

fn params(n_max: usize) -> impl Strategy<Value = Params> {
    (2..=n_max, rational(-20, 20), rational(0, 20)).prop_map(|(n, e, h)| Params::new(n, e, h).unwrap())
}

fn config_on(n_max: usize) -> impl Strategy<Value = (Params, SpinConfig)> {
    params(n_max)
        .prop_flat_map(|p| {
            let len = 2 * p.n();
            (Just(p), proptest::collection::vec(any::<bool>(), len))
        })
        .prop_map(|(p, bits)| {
            let signs: Vec<i8> = bits.iter().map(|&b| if b { 1 } else { -1 }).collect();
            (p, SpinConfig::from_signs(&signs).unwrap())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn energy_depends_only_on_class((p, sigma) in config_on(9)) {
        let g = build_graph(&p);
        let c = classify(&g, &sigma).unwrap();
        let direct = hamiltonian_exact(&g, &sigma).unwrap();
        prop_assert_eq!(direct, class_energy_exact(c, p.n()).unwrap());
    }

    #[test]
    fn flip_delta_is_energy_difference((p, sigma) in config_on(9), v in 0usize..18) {
        let g = build_graph(&p);
        let v = v % sigma.len();
        let flipped = flip(&sigma, v).unwrap();
        let delta = flip_delta_exact(&g, &sigma, v).unwrap();
        prop_assert_eq!(hamiltonian_exact(&g, &flipped).unwrap() - hamiltonian_exact(&g, &sigma).unwrap(), delta);
        prop_assert_eq!(flip_delta_exact(&g, &flipped, v).unwrap(), -delta);
        prop_assert_eq!(flip(&flipped, v).unwrap(), sigma.clone());
        prop_assert_eq!(sigma.hamming(&flipped), 1);
    }

    #[test]
    fn vertex_moves_match_multiplicities((p, sigma) in config_on(9)) {
        let n = p.n();
        let g = build_graph(&p);
        let c = classify(&g, &sigma).unwrap();
        let mult = flip_multiplicities(c, n).unwrap();
        let mut counts = [0u64; 8];
        for v in 0..2 * n {
            let mv = move_of_vertex(&sigma, n, v);
            counts[mv.index()] += 1;
            prop_assert_eq!(mv.target(c, n), Some(classify(&g, &flip(&sigma, v).unwrap()).unwrap()));
        }
        prop_assert_eq!(counts, mult.counts);
        prop_assert_eq!(mult.total(), 2 * n as u64);
    }

    #[test]
    fn lumped_chain_is_reversible_and_stationary(p in params(8), beta in 0.05f64..12.0) {
        let chain = build_lumped_chain(&p, beta).unwrap();
        prop_assert!(chain.chain().row_sum_error() <= 1e-12);
        prop_assert!(chain.chain().detailed_balance_error() <= 1e-10);
        prop_assert!(chain.chain().stationarity_error() <= 1e-10);
    }
}

#[test]
fn class_sizes_partition_the_cube() {
    for n in 2..=6 {
        let total: u128 = enumerate_classes(n).into_iter().map(|c| class_size(c, n).unwrap()).sum();
        assert_eq!(total, 4u128.pow(n as u32));
    }
}

#[test]
fn exhaustive_classification_matches_class_sizes() {
    for n in 2..=5 {
        let g = build_graph(&Params::parse(n, "0", "0").unwrap());
        let mut counts = std::collections::HashMap::new();
        for code in 0..1u64 << (2 * n) {
            *counts.entry(classify(&g, &SpinConfig::from_code(code, 2 * n)).unwrap()).or_insert(0u128) += 1;
        }
        assert_eq!(counts.len(), enumerate_classes(n).len());
        for (c, k) in counts {
            assert_eq!(k, class_size(c, n).unwrap(), "n = {n}, {c}");
        }
    }
}
