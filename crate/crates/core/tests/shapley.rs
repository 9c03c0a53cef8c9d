use ikit_core::shapley::{self, oracle};
use ikit_core::synthetic::random_game;
use ikit_core::Subset;

const TOL: f64 = 1e-9;

#[test]
fn shapley_matches_permutation_average() {
    for seed in 0..12u64 {
        let n = 1 + (seed as usize % 8);
        let vt = random_game(n, 10.0, seed).unwrap();
        let fast = shapley::shapley_values(&vt).unwrap();
        let slow = oracle::permutation_shapley(&vt).unwrap();
        for i in 0..n {
            assert!((fast.phi[i] - slow[i]).abs() <= TOL * vt.scale(), "seed {seed} player {i}");
        }
    }
}

#[test]
fn interaction_index_matches_discrete_derivatives() {
    for seed in 0..10u64 {
        let n = 2 + (seed as usize % 7);
        let vt = random_game(n, 10.0, seed).unwrap();
        for t in 1..(1u32 << n) {
            let t = Subset(t);
            let fast = shapley::shapley_interaction_index(&vt, t).unwrap();
            let slow = oracle::direct_interaction_index(&vt, t).unwrap();
            assert!((fast - slow).abs() <= TOL * vt.scale(), "seed {seed} {t:?}");
        }
    }
}

#[test]
fn taylor_matches_definition_and_is_complete() {
    for seed in 0..8u64 {
        let n = 1 + (seed as usize % 8);
        let vt = random_game(n, 10.0, seed).unwrap();
        for k in 1..=n {
            let table = shapley::shapley_taylor(&vt, k).unwrap();
            let total: f64 = oracle::pairwise_sum(&table.entries.values().copied().collect::<Vec<_>>());
            assert!((total - vt.full_value()).abs() <= TOL * vt.scale(), "seed {seed} k {k}");
            for (&t, &x) in &table.entries {
                let slow = oracle::direct_shapley_taylor(&vt, k, t).unwrap();
                assert!((x - slow).abs() <= TOL * vt.scale(), "seed {seed} k {k} {t:?}");
            }
        }
    }
}

#[test]
fn singletons_of_interaction_index_are_shapley_values() {
    let vt = random_game(6, 3.0, 99).unwrap();
    let phi = shapley::shapley_values(&vt).unwrap();
    for i in 0..6 {
        let x = shapley::shapley_interaction_index(&vt, Subset(1 << i)).unwrap();
        assert!((x - phi.phi[i]).abs() <= TOL);
    }
}
