//! Million-trial runs of the simulator against closed-form rates.

use qsep::cloning::CloningTask;
use qsep::separation::{build_optimal_operation, SeparationTask};
use qsep::sim::{
    run_cloning, run_discrimination_pipeline, run_separation, Pipeline, SimConfig, CLONED, CORRECT,
    ERROR, INCONCLUSIVE, SUCCESS,
};
use qsep::states::StatePair;

const TRIALS: u64 = 1_000_000;

fn config(seed: u64, pipeline: Pipeline) -> SimConfig {
    SimConfig::new(TRIALS, seed, pipeline).unwrap()
}

fn within_4_sigma(freq: f64, expected: f64) -> bool {
    let se = (freq * (1.0 - freq) / TRIALS as f64)
        .sqrt()
        .max(1.0 / TRIALS as f64);
    (freq - expected).abs() <= 4.0 * se
}

#[test]
fn separation_runs() {
    for (a, b, expect, seed) in [(0.5, 0.0, 0.5, 1), (0.8, 0.4, 1.0 / 3.0, 2)] {
        let task = SeparationTask::from_overlaps(a, b).unwrap();
        let op = build_optimal_operation(&task).unwrap();
        let r = run_separation(&task, &op, &config(seed, Pipeline::Separation)).unwrap();
        assert_eq!(r.counts.values().sum::<u64>(), TRIALS);
        assert!(within_4_sigma(r.frequency(SUCCESS), expect), "{r:?}");
    }
}

#[test]
fn discrimination_runs() {
    let task = SeparationTask::from_overlaps(0.5, 0.5).unwrap();
    let r =
        run_discrimination_pipeline(&task, &config(3, Pipeline::SeparationThenHelstrom)).unwrap();
    let p_h = 0.5 * (1.0 + 0.75f64.sqrt());
    assert!((p_h - 0.9330).abs() < 1e-4);
    assert!(within_4_sigma(r.frequency(CORRECT), p_h));
    assert!(within_4_sigma(r.frequency(ERROR), 1.0 - p_h));
    assert_eq!(r.count(INCONCLUSIVE), 0);

    let task = SeparationTask::from_overlaps(0.5, 0.0).unwrap();
    let r =
        run_discrimination_pipeline(&task, &config(4, Pipeline::SeparationThenHelstrom)).unwrap();
    assert_eq!(r.count(ERROR), 0);
    assert!(within_4_sigma(r.frequency(CORRECT), 0.5));

    let task = SeparationTask::from_overlaps(0.8, 0.4).unwrap();
    let r =
        run_discrimination_pipeline(&task, &config(5, Pipeline::SeparationThenHelstrom)).unwrap();
    let p_s = 0.2 / 0.6;
    let p_h = 0.5 * (1.0 + 0.84f64.sqrt());
    assert!(within_4_sigma(r.frequency(CORRECT), p_s * p_h));
    assert!(within_4_sigma(r.frequency(ERROR), p_s * (1.0 - p_h)));
    assert!(within_4_sigma(r.frequency(INCONCLUSIVE), 1.0 - p_s));
    assert!((r.frequencies.values().sum::<f64>() - 1.0).abs() <= 1e-12);
}

#[test]
fn cloning_runs() {
    let base = StatePair::with_overlap(0.5).unwrap();
    let r = run_cloning(
        &CloningTask::new(base.clone(), 1, 2).unwrap(),
        &config(6, Pipeline::Cloning),
    )
    .unwrap();
    assert!(within_4_sigma(r.frequency(CLONED), 2.0 / 3.0));

    let r = run_cloning(
        &CloningTask::new(base, 1, 20).unwrap(),
        &config(7, Pipeline::Cloning),
    )
    .unwrap();
    let expect = 0.5 / (1.0 - 0.5f64.powi(20));
    assert!((expect - 0.50000048).abs() < 1e-8);
    assert!(within_4_sigma(r.frequency(CLONED), expect));
}
