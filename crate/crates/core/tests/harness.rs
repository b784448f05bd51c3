mod common;

use treegini::experiments::{
    mapped_steps, run_replicates, Regime, POISSON_ARM_STREAM,
};
use treegini::urn::predicted_limit;
use treegini::{
    convergence_sweep, degree_gini, duality_experiment, limit_gini, predict_proportions,
    principal_eigenpair, run_monte_carlo, BinaryModel, EstimateRecord, GiniVariant, Parallelism,
    ReplacementMatrix, Scenario, TreeClass,
};

use common::*;

fn untimed(mut r: EstimateRecord) -> EstimateRecord {
    r.wall_ms = 0;
    r
}

fn scenarios() -> Vec<Scenario> {
    vec![
        Scenario::discrete(TreeClass::Bst, 500, 0),
        Scenario::discrete(TreeClass::Pyramid, 500, 0),
        Scenario::discrete(TreeClass::CaterpillarUniform, 300, 5),
        Scenario::discrete(TreeClass::CaterpillarPa, 300, 5),
        Scenario::poisson(TreeClass::Bst, 6.0, 0),
        Scenario::poisson(TreeClass::Pyramid, 8.0, 0),
        Scenario::poisson(TreeClass::CaterpillarUniform, 50.0, 5),
        Scenario::poisson(TreeClass::CaterpillarPa, 3.0, 5),
    ]
}

#[test]
fn identical_for_every_worker_count() {
    for sc in scenarios() {
        for variant in [GiniVariant::Topological, GiniVariant::Class] {
            let run = |k| untimed(run_monte_carlo(&sc, variant, 64, 3, Parallelism(k)).unwrap());
            let base = run(None);
            for k in [Some(1), Some(2), Some(5)] {
                let other = run(k);
                assert_eq!(base, other, "{sc:?} {variant:?} threads {k:?}");
                assert_eq!(base.mean.to_bits(), other.mean.to_bits());
                assert_eq!(base.se.to_bits(), other.se.to_bits());
            }
        }
    }
}

#[test]
fn repeated_runs_are_identical() {
    let sc = Scenario::discrete(TreeClass::CaterpillarUniform, 1000, 10);
    let a = untimed(run_monte_carlo(&sc, GiniVariant::Wealth, 50, 9, Parallelism::default()).unwrap());
    let b = untimed(run_monte_carlo(&sc, GiniVariant::Wealth, 50, 9, Parallelism::default()).unwrap());
    assert_eq!(a, b);
}

#[test]
fn replicate_values_come_from_their_streams() {
    let sc = Scenario::discrete(TreeClass::Pyramid, 40, 0);
    let reps = run_replicates(&sc, GiniVariant::Topological, 8, 5, 100, Parallelism::default()).unwrap();
    for (r, rep) in reps.iter().enumerate() {
        let mut rng = treegini::RandomSource::new(5, 100 + r as u64);
        let tree = treegini::experiments::grow(&sc, &mut rng).unwrap();
        assert_eq!(rep.value, Some(degree_gini(&tree.degrees()).unwrap()));
    }
}

#[test]
fn monte_carlo_agrees_with_enumeration() {
    for class in TreeClass::ALL {
        for n in 2..=6 {
            let (exact, mean, se) = oracle_agreement(class, n, 3, 100_000, 1);
            assert!(within_3se(exact, mean, se), "{class} n={n}: exact {exact}, mean {mean}, se {se}");
        }
    }
}

#[test]
fn sweep_limit_column_is_the_eigen_limit() {
    for model in [BinaryModel::Bst, BinaryModel::Pyramid] {
        let class = if model == BinaryModel::Bst { TreeClass::Bst } else { TreeClass::Pyramid };
        let pred = principal_eigenpair(&ReplacementMatrix::for_model(model)).unwrap();
        let expected = limit_gini(&predict_proportions(model, &pred).unwrap());
        let rows = convergence_sweep(class, Regime::Discrete, &[50.0, 100.0], 0, GiniVariant::Topological, 4, 1, Parallelism::default()).unwrap();
        assert!(rows.iter().all(|r| r.limit == expected));
        assert_eq!(expected, predicted_limit(model).unwrap());
    }
    for class in [TreeClass::CaterpillarUniform, TreeClass::CaterpillarPa] {
        let rows = convergence_sweep(class, Regime::Discrete, &[10.0], 4, GiniVariant::Topological, 4, 1, Parallelism::default()).unwrap();
        assert_eq!(rows[0].limit, 0.5);
    }
    let rows = convergence_sweep(TreeClass::CaterpillarUniform, Regime::Discrete, &[10.0], 4, GiniVariant::Wealth, 4, 1, Parallelism::default()).unwrap();
    assert_eq!(rows[0].limit, 0.0);
}

#[test]
fn single_point_grid_gives_one_row() {
    let rows = convergence_sweep(TreeClass::Bst, Regime::Discrete, &[100.0], 0, GiniVariant::Topological, 10, 1, Parallelism::default()).unwrap();
    assert_eq!(rows.len(), 1);
}

#[test]
fn bst_sweep_approaches_limit() {
    let limit = 2.0 / 9.0;
    let grid = [100.0, 1000.0, 10_000.0];
    let mut devs = vec![Vec::new(); grid.len()];
    for seed in 1..=5 {
        let rows = convergence_sweep(TreeClass::Bst, Regime::Discrete, &grid, 0, GiniVariant::Topological, 200, seed, Parallelism::default()).unwrap();
        for (i, row) in rows.iter().enumerate() {
            devs[i].push((row.record.mean - limit).abs());
        }
    }
    let medians: Vec<f64> = devs.into_iter().map(median).collect();
    assert!(medians[0] > medians[1] && medians[1] > medians[2], "{medians:?}");
}

#[test]
fn wealth_gini_decays() {
    let at = |n: u64, seed: u64| {
        run_monte_carlo(&Scenario::discrete(TreeClass::CaterpillarUniform, n, 10), GiniVariant::Wealth, 20, seed, Parallelism::default())
            .unwrap()
            .mean
    };
    let small = median((1..=5).map(|s| at(1000, s)).collect());
    let large = median((1..=5).map(|s| at(100_000, s)).collect());
    assert!(large < small, "{large} vs {small}");
}

#[test]
fn duality_arms_use_disjoint_streams() {
    let report = duality_experiment(TreeClass::Pyramid, 0, 5.0, 30, 4, 0.02, GiniVariant::Topological, Parallelism::default()).unwrap();
    assert_eq!(report.mapped_n, mapped_steps(TreeClass::Pyramid, 5.0, 0));
    assert_eq!(report.mapped_n, 148);
    let poisson = run_replicates(&Scenario::poisson(TreeClass::Pyramid, 5.0, 0), GiniVariant::Topological, 30, 4, POISSON_ARM_STREAM, Parallelism::default()).unwrap();
    let mean = poisson.iter().map(|r| r.value.unwrap()).sum::<f64>() / 30.0;
    assert!((report.poisson.mean - mean).abs() < 1e-12);
    let discrete = untimed(run_monte_carlo(&Scenario::discrete(TreeClass::Pyramid, 148, 0), GiniVariant::Topological, 30, 4, Parallelism::default()).unwrap());
    assert_eq!(untimed(report.discrete.clone()), discrete);
    assert_eq!(report.abs_diff, (report.discrete.mean - report.poisson.mean).abs());
    assert_eq!(report.pass, report.abs_diff <= 0.02 + 3.0 * report.pooled_se);
}

#[test]
fn duality_rejects_bad_input() {
    assert!(duality_experiment(TreeClass::Bst, 0, -1.0, 10, 1, 0.02, GiniVariant::Topological, Parallelism::default()).is_err());
    assert!(duality_experiment(TreeClass::Bst, 0, 2.0, 10, 1, -0.1, GiniVariant::Topological, Parallelism::default()).is_err());
    assert!(duality_experiment(TreeClass::CaterpillarPa, 1, 2.0, 10, 1, 0.02, GiniVariant::Topological, Parallelism::default()).is_err());
}

#[test]
fn class_variant_of_fixed_order_matches_topological_at_order_three() {
    let sc = Scenario::discrete(TreeClass::Bst, 3, 0);
    let rec = run_monte_carlo(&sc, GiniVariant::Class, 40, 2, Parallelism::default()).unwrap();
    assert!((rec.mean - 1.0 / 6.0).abs() < 1e-15);
    assert!(rec.se < 1e-15);
}

#[test]
fn caterpillar_duality_at_scale() {
    let report = duality_experiment(TreeClass::CaterpillarUniform, 10, 1000.0, 50, 1, 0.01, GiniVariant::Topological, Parallelism::default()).unwrap();
    assert!(report.pass);
    assert!((report.poisson.mean - 0.5).abs() < 0.005);
}
