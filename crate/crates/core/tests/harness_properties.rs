use sparse_afe::harness::run_experiment_with_threads;
use sparse_afe::metrics::to_db;
use sparse_afe::{run_experiment, run_trial, ExperimentConfig, TrialData};

fn quick(m: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::with_presets(m).unwrap();
    c.trials = 20;
    c.iterations = 500;
    c
}

#[test]
fn algorithms_share_trial_data() {
    let c = quick(4);
    // data depends only on (config minus roster, trial)
    let mut solo = c.clone();
    solo.roster.truncate(1);
    for t in 0..c.trials {
        let a = TrialData::generate(&c, t).unwrap();
        let b = TrialData::generate(&solo, t).unwrap();
        assert_eq!(a.checksum(), b.checksum());
    }
    let first = TrialData::generate(&c, 0).unwrap().checksum();
    let second = TrialData::generate(&c, 1).unwrap().checksum();
    assert_ne!(first, second);
}

#[test]
fn trial_curves_replay_from_trial_data() {
    let c = quick(1);
    for entry in &c.roster {
        let direct = run_trial(&c, &entry.spec, 3).unwrap();
        let replay = TrialData::generate(&c, 3).unwrap().run(&entry.spec).unwrap();
        assert_eq!(direct, replay);
    }
}

#[test]
fn results_do_not_depend_on_scheduling() {
    let c = quick(4).tracking(600);
    let serial = run_experiment_with_threads(&c, 1).unwrap();
    let parallel = run_experiment_with_threads(&c, 4).unwrap();
    let default = run_experiment(&c).unwrap();
    assert_eq!(serial, parallel);
    assert_eq!(serial, default);
}

#[test]
fn curves_start_at_zero_db() {
    for c in [quick(1), quick(4), quick(4).tracking(400)] {
        let r = run_experiment(&c).unwrap();
        for rep in &r.reports {
            let curve = rep.curve.as_ref().unwrap();
            assert!(to_db(curve.msd()[0]).abs() < 1e-9);
            assert_eq!(curve.len(), c.iterations);
            assert_eq!(curve.trials(), c.trials);
        }
    }
}

#[test]
fn doubling_trials_moves_steady_state_less_than_half_a_db() {
    let mut base = ExperimentConfig::with_presets(4).unwrap();
    base.trials = 200;
    let mut doubled = base.clone();
    doubled.trials = 400;
    let a = run_experiment(&base).unwrap();
    let b = run_experiment(&doubled).unwrap();
    for label in ["LMS", "ZA-LMS", "NLMS", "LMMN"] {
        let sa = a.report(label).unwrap().summary.steady_state_db;
        let sb = b.report(label).unwrap().summary.steady_state_db;
        assert!((sa - sb).abs() < 0.5, "{label}: {sa} vs {sb}");
    }
}
