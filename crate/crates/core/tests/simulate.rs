//! End-to-end experiments at small scale.

use algest::estimators::Clazz;
use algest::homotopy::TrackerConfig;
use algest::models::{log_marginal, ModelId};
use algest::simulate::*;

const STAR: [f64; 6] = [1.0 / 6.0, 0.25, 1.0 / 12.0, 1.0 / 12.0, 0.25, 1.0 / 6.0];

#[test]
fn exact_data_recovers_truth() {
    for (model, truth) in [(ModelId::LogMarginal, STAR.to_vec()), (ModelId::PeriodicGaussian, vec![0.5]), (ModelId::ToyLinear, vec![0.3])] {
        let mut plan = ExperimentPlan::new(model, truth);
        plan.n_grid = vec![100];
        plan.trials = 1;
        plan.sampler = SamplerMode::Exact;
        let records = run_experiment(&plan).unwrap();
        let t = model.build().truth(&plan.truth).unwrap();
        for r in &records {
            assert!(r.success, "{model} {}", r.estimator);
            if r.estimator.bias_corrected {
                continue;
            }
            let eta = r.eta.as_ref().unwrap();
            for (a, b) in eta.iter().zip(&t.eta) {
                assert!((a - b).abs() < 1e-8, "{model} {}: {eta:?}", r.estimator);
            }
        }
    }
}

#[test]
fn path_counts_per_estimator() {
    let mut plan = ExperimentPlan::new(ModelId::LogMarginal, STAR.to_vec());
    plan.n_grid = vec![1000];
    plan.trials = 1;
    let records = run_experiment(&plan).unwrap();
    let paths = |c| records.iter().find(|r| r.estimator == EstimatorSpec::plain(c)).unwrap().paths;
    assert_eq!(paths(Clazz::Mle), 500);
    assert_eq!(paths(Clazz::ReducedSecondOrder), 32);
    assert_eq!(paths(Clazz::ReducedFirstOrder), 4);
}

#[test]
fn large_sample_mle_is_consistent() {
    let mut plan = ExperimentPlan::new(ModelId::LogMarginal, STAR.to_vec());
    plan.n_grid = vec![1_000_000];
    plan.trials = 1;
    plan.estimators = vec![EstimatorSpec::plain(Clazz::Mle)];
    let r = &run_experiment(&plan).unwrap()[0];
    assert!(r.success);
    for (a, b) in r.eta.as_ref().unwrap().iter().zip(STAR) {
        assert!((a - b).abs() < 0.01);
    }
    let m = log_marginal();
    assert!(m.constraint_residual(r.eta.as_ref().unwrap(), r.eta.as_ref().unwrap()).unwrap() < 1e-8);
}

#[test]
fn identical_plans_give_identical_bytes() {
    let mut plan = ExperimentPlan::new(ModelId::PeriodicGaussian, vec![0.3]);
    plan.n_grid = vec![50, 500];
    plan.trials = 5;
    plan.timing = false;
    let csv = |plan: &ExperimentPlan| {
        let recs = run_experiment(plan).unwrap();
        let truth = ModelId::PeriodicGaussian.build().truth(&plan.truth).unwrap();
        let mut buf = Vec::new();
        write_csv(&aggregate(plan.model, &truth, &recs), 3, &mut buf).unwrap();
        buf
    };
    assert_eq!(csv(&plan), csv(&plan));
}

#[test]
fn invalid_plans_are_rejected() {
    let mut plan = ExperimentPlan::new(ModelId::LogMarginal, STAR.to_vec());
    plan.n_grid = vec![100, 100];
    assert!(run_experiment(&plan).is_err());
    let mut plan = ExperimentPlan::new(ModelId::LogMarginal, vec![0.2, 0.2, 0.2, 0.2, 0.2, 0.3]);
    plan.trials = 1;
    assert!(run_experiment(&plan).is_err());
    let mut plan = ExperimentPlan::new(ModelId::PeriodicGaussian, vec![0.5]);
    plan.tracker = TrackerConfig { min_step: 1.0, ..Default::default() };
    assert!(run_experiment(&plan).is_err());
}
