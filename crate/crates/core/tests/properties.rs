use std::sync::Arc;

use proptest::prelude::*;

use online_fw::algorithms::{
    MetaFrankWolfe, MetaFwConfig, OneShotConfig, OneShotFrankWolfe, OnlineAlgorithm,
    ProjectedGradient, RegularizedOfw, RegularizedOfwConfig,
};
use online_fw::lmo::{BudgetedBox, PartitionMatroid, MEMBERSHIP_TOL};
use online_fw::problems::{quadratic_stream, QuadraticParams, QuadraticPattern};
use online_fw::{stream_rng, ConstraintSet, ObjectiveSense, StochasticGradientOracle};

fn algorithms(set: Arc<dyn ConstraintSet>, sense: ObjectiveSense, horizon: usize, seed: u64) -> Vec<Box<dyn OnlineAlgorithm>> {
    let mut rng = stream_rng(seed, 1);
    let mut mc = MetaFwConfig::for_horizon(horizon);
    mc.inner_steps = 6;
    let mut out: Vec<Box<dyn OnlineAlgorithm>> = vec![
        Box::new(MetaFrankWolfe::new(set.clone(), sense, mc.clone(), &mut rng).unwrap()),
        Box::new(MetaFrankWolfe::new(set.clone(), sense, MetaFwConfig { variance_reduction: false, ..mc }, &mut rng).unwrap()),
        Box::new(OneShotFrankWolfe::new(set.clone(), sense, OneShotConfig::for_horizon(horizon)).unwrap()),
        Box::new(RegularizedOfw::new(set.clone(), sense, RegularizedOfwConfig::for_horizon(horizon)).unwrap()),
    ];
    if set.supports_projection() {
        out.push(Box::new(ProjectedGradient::new(set, sense, None, None).unwrap()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_played_point_is_feasible(n in 2usize..8, budget in 0.3f64..6.0, seed in 0u64..1000, sigma in 0.0f64..2.0) {
        let horizon = 12;
        let stream = quadratic_stream(&QuadraticParams {
            n,
            budget,
            horizon,
            pattern: QuadraticPattern::Switching,
            sigma,
            seed,
        }).unwrap();
        for sense in [ObjectiveSense::MinimizeConvex, ObjectiveSense::MaximizeDRSubmodular] {
            for mut alg in algorithms(stream.constraint.clone(), sense, horizon, seed) {
                for t in 1..=horizon {
                    let x = alg.play().unwrap();
                    prop_assert!(stream.constraint.contains(&x, MEMBERSHIP_TOL), "{} round {t}", alg.name());
                    let mut oracle = stream.oracle(t);
                    alg.feedback(&mut oracle).unwrap();
                }
            }
        }
    }

    #[test]
    fn submodular_meta_fw_iterate_is_mean_of_vertices(seed in 0u64..1000, k in 1usize..9) {
        let set: Arc<dyn ConstraintSet> = Arc::new(
            PartitionMatroid::new(6, vec![vec![0, 1, 2], vec![3, 4, 5]], vec![1, 2]).unwrap(),
        );
        let stream = quadratic_stream(&QuadraticParams {
            n: 6,
            budget: 3.0,
            horizon: 5,
            pattern: QuadraticPattern::Iid,
            sigma: 1.0,
            seed,
        }).unwrap();
        let mut rng = stream_rng(seed, 1);
        let cfg = MetaFwConfig { inner_steps: k, ..MetaFwConfig::for_horizon(5) };
        let mut alg = MetaFrankWolfe::new(set, ObjectiveSense::MaximizeDRSubmodular, cfg, &mut rng).unwrap();
        for t in 1..=5 {
            let x = alg.play().unwrap();
            let mut oracle = stream.oracle(t);
            let out = alg.feedback(&mut oracle).unwrap();
            prop_assert_eq!(out.vertices.len(), k);
            prop_assert_eq!(oracle.queries(), k as u64);
            for i in 0..6 {
                let mean = out.vertices.iter().map(|v| v[i]).sum::<f64>() / k as f64;
                prop_assert!((x[i] - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_is_idempotent_and_feasible(
        y in proptest::collection::vec(-2.0f64..3.0, 6),
        budget in 0.1f64..6.0,
    ) {
        let sets: Vec<Box<dyn ConstraintSet>> = vec![
            Box::new(BudgetedBox::new(6, budget).unwrap()),
            Box::new(PartitionMatroid::new(6, vec![vec![0, 5], vec![1, 2, 3, 4]], vec![1, 2]).unwrap()),
        ];
        for set in sets {
            let p = set.project(&y).unwrap();
            prop_assert!(set.contains(&p, MEMBERSHIP_TOL));
            let q = set.project(&p).unwrap();
            for i in 0..6 {
                prop_assert!((p[i] - q[i]).abs() < 1e-9);
            }
        }
    }
}
