//! Exit criteria for the benchmark. Each test prints one PASS/FAIL line.
//!
//! Run with `cargo test -p sparse-afe-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparse_afe::harness::run_experiment_with_threads;
use sparse_afe::metrics::to_db;
use sparse_afe::signal::{self, synthesize_desired};
use sparse_afe::{
    run_experiment, AlgorithmSpec, ExperimentConfig, FilterState, LmmnParams, LmsParams,
    ZaLmsParams,
};
use sparse_afe_cli::emit_csv;

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id}: {name} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn steady(result: &sparse_afe::ExperimentResult, label: &str) -> f64 {
    result.report(label).unwrap().summary.steady_state_db
}

#[test]
fn c1_lmmn_gain_over_lms_table_two() {
    let config = ExperimentConfig::with_presets(4).unwrap();
    let start = Instant::now();
    let result = run_experiment(&config).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let gain = steady(&result, "LMS") - steady(&result, "LMMN");
    // at least 2 dB, and within ±1.5 dB of the 3 dB target
    let pass = gain.is_finite() && gain >= 2.0 && (gain - 3.0).abs() <= 1.5 && elapsed < 10.0;
    verdict(
        1,
        "LMMN steady-state gain over LMS (m=4)",
        pass,
        &format!(
            "LMS {:.3} dB, LMMN {:.3} dB, gain {gain:.3} dB (need >= 2 and within 3±1.5), {elapsed:.2}s",
            steady(&result, "LMS"),
            steady(&result, "LMMN")
        ),
    );
}

#[test]
fn c2_lmmn_lowest_steady_state_table_one() {
    let config = ExperimentConfig::with_presets(1).unwrap();
    let result = run_experiment(&config).unwrap();
    let lmmn = steady(&result, "LMMN");
    let runner_up = ["LMS", "ZA-LMS", "NLMS"]
        .iter()
        .map(|l| steady(&result, l))
        .fold(f64::INFINITY, f64::min);
    let margin = runner_up - lmmn;
    let summary: Vec<String> = result
        .reports
        .iter()
        .map(|r| format!("{} {:.3}", r.label, r.summary.steady_state_db))
        .collect();
    verdict(
        2,
        "LMMN lowest steady-state MSD (m=1), margin >= 0.5 dB",
        lmmn.is_finite() && margin >= 0.5,
        &format!("{} dB; margin {margin:.3} dB", summary.join(", ")),
    );
}

#[test]
fn c3_lmmn_fastest_retracking() {
    let mut details = Vec::new();
    let mut pass = true;
    for seed in [1, 2, 3] {
        let mut config = ExperimentConfig::with_presets(4).unwrap().tracking(2000);
        config.master_seed = seed;
        let result = run_experiment(&config).unwrap();
        let iters: Vec<(String, Option<usize>)> = result
            .reports
            .iter()
            .map(|r| (r.label.clone(), r.summary.tracking_convergence_iteration))
            .collect();
        let lmmn = iters.iter().find(|(l, _)| l == "LMMN").unwrap().1;
        let ok = match lmmn {
            None => false,
            Some(n) => iters
                .iter()
                .filter(|(l, _)| l != "LMMN")
                .all(|(_, other)| other.is_none_or(|o| n <= o)),
        };
        pass &= ok;
        details.push(format!("seed {seed}: {iters:?}"));
    }
    verdict(
        3,
        "LMMN re-converges first after the channel change (3 seeds)",
        pass,
        &details.join("; "),
    );
}

fn random_stream(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
        .collect()
}

fn trajectory(spec: &AlgorithmSpec, taps: usize, stream: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let mut state = FilterState::new(taps, spec);
    stream
        .iter()
        .map(|&(x, d)| {
            state = state.clone().step(x, d, spec).unwrap().0;
            state.weights().to_vec()
        })
        .collect()
}

fn max_gap(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn c4_reduction_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let taps = rng.random_range(1..=16);
        let mu = rng.random_range(1e-3..2e-2);
        let stream = random_stream(&mut rng, 1000);
        let lms = trajectory(&AlgorithmSpec::Lms(LmsParams { mu }), taps, &stream);

        let lmmn_one = trajectory(&AlgorithmSpec::Lmmn(LmmnParams::fixed(mu, 1.0)), taps, &stream);
        let za_zero = trajectory(&AlgorithmSpec::ZaLms(ZaLmsParams { mu, rho: 0.0 }), taps, &stream);

        let alpha0 = rng.random_range(0.0..=1.0);
        let relaxed = AlgorithmSpec::Lmmn(LmmnParams {
            mu,
            alpha0,
            gamma: 0.0,
            beta: rng.random_range(0.0..=1.0),
            delta: 1.0,
            variable: true,
        });
        let fixed = AlgorithmSpec::Lmmn(LmmnParams::fixed(mu, alpha0));

        worst = worst
            .max(max_gap(&lmmn_one, &lms))
            .max(max_gap(&za_zero, &lms))
            .max(max_gap(&trajectory(&relaxed, taps, &stream), &trajectory(&fixed, taps, &stream)));
    }
    verdict(
        4,
        "LMMN(α=1)≡LMS, LMMN(γ=0,δ=1)≡fixed LMMN, ZA-LMS(ρ=0)≡LMS",
        worst <= 1e-12,
        &format!("max elementwise gap {worst:e} over 1000-step trajectories"),
    );
}

/// Central finite-difference gradient of `cost(e)` with `e = d − wᵀx`.
fn fd_gradient(w: &[f64], x: &[f64], d: f64, cost: impl Fn(f64) -> f64) -> Vec<f64> {
    let h = 1e-6;
    let eval = |w: &[f64]| cost(d - w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>());
    (0..w.len())
        .map(|i| {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[i] += h;
            minus[i] -= h;
            (eval(&plus) - eval(&minus)) / (2.0 * h)
        })
        .collect()
}

fn relative_gap(got: &[f64], want: &[f64]) -> f64 {
    let diff: f64 = got.iter().zip(want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
    diff / norm.max(1e-300)
}

#[test]
fn c5_updates_follow_cost_gradients() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = rng.random_range(1..=16);
        let w: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = rng.random_range(-2.0..2.0);
        let mu = rng.random_range(1e-3..1e-1);
        let alpha = rng.random_range(0.0..=1.0);

        let state = FilterState::from_parts(w.clone(), x.clone(), alpha).unwrap();
        let e = state.predict_and_error(d);

        let mixed = state.clone().lmmn_step(e, &LmmnParams::fixed(mu, alpha)).unwrap();
        let step: Vec<f64> = mixed.weights().iter().zip(&w).map(|(a, b)| a - b).collect();
        let grad = fd_gradient(&w, &x, d, |e| alpha * e * e + (1.0 - alpha) * e.powi(4));
        let want: Vec<f64> = grad.iter().map(|g| -0.5 * mu * g).collect();
        worst = worst.max(relative_gap(&step, &want));

        let lms = state.lms_step(e, &LmsParams { mu }).unwrap();
        let step: Vec<f64> = lms.weights().iter().zip(&w).map(|(a, b)| a - b).collect();
        let grad = fd_gradient(&w, &x, d, |e| e * e);
        let want: Vec<f64> = grad.iter().map(|g| -0.5 * mu * g).collect();
        worst = worst.max(relative_gap(&step, &want));
    }
    verdict(
        5,
        "LMMN/LMS updates equal -(μ/2)∇cost by central differences",
        worst <= 1e-5,
        &format!("max relative gap {worst:e} over 100 random states"),
    );
}

#[test]
fn c6_model_matches_toeplitz_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=256);
        let m = rng.random_range(1..=32);
        let channel = signal::generate_sparse_channel(m, rng.random_range(1..=m), &mut rng).unwrap();
        let input = signal::generate_input_sequence(n, &mut rng).unwrap();
        let noise = signal::generate_noise(n, 1e-2, &mut rng).unwrap();
        let stream = synthesize_desired(&channel, &input, &noise).unwrap();

        // Toeplitz matrix built entry by entry, independent of the library
        let mut a = DMatrix::zeros(n, m);
        for row in 0..n {
            for col in 0..m.min(row + 1) {
                a[(row, col)] = input[row - col];
            }
        }
        assert_eq!(a, signal::build_convolution_matrix(&input, m));
        let oracle = &a * DVector::from_column_slice(channel.taps()) + DVector::from_column_slice(&noise);
        for (got, want) in stream.desired.iter().zip(oracle.iter()) {
            worst = worst.max((got - want).abs());
        }
    }
    verdict(
        6,
        "desired signal equals A·w + v",
        worst <= 1e-12,
        &format!("max abs gap {worst:e} over 50 cases"),
    );
}

fn csv_bytes(config: &ExperimentConfig, threads: usize, dir: &Path) -> Vec<u8> {
    let result = run_experiment_with_threads(config, threads).unwrap();
    let path = dir.join(format!("curves_{threads}.csv"));
    emit_csv(&result, &path, false).unwrap();
    std::fs::read(path).unwrap()
}

#[test]
fn c7_csv_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = ExperimentConfig::with_presets(4).unwrap();
    let serial = csv_bytes(&config, 1, dir.path());
    let auto = csv_bytes(&config, 0, dir.path());
    let again = csv_bytes(&config, 0, dir.path());

    // end to end through the binary, with the thread cap from the environment
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(&cfg_path, "sparsity_m = 4\n").unwrap();
    let mut binary_outputs = Vec::new();
    for threads in ["1", "0"] {
        let out = dir.path().join(format!("run_{threads}"));
        let status = Command::new(env!("CARGO_BIN_EXE_sparse-afe"))
            .args(["run", "--no-plot", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .env("SPARSE_AFE_THREADS", threads)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        binary_outputs.push(std::fs::read(out.join("curves.csv")).unwrap());
    }

    let pass = serial == auto
        && auto == again
        && binary_outputs[0] == binary_outputs[1]
        && binary_outputs[0] == serial;
    verdict(
        7,
        "identical (config, seed) gives byte-identical CSV across runs and thread counts",
        pass,
        &format!("{} bytes per CSV", serial.len()),
    );
}

#[test]
fn c8_curves_start_at_zero_db() {
    let configs = [
        ExperimentConfig::with_presets(1).unwrap(),
        ExperimentConfig::with_presets(4).unwrap(),
        ExperimentConfig::with_presets(4).unwrap().tracking(2000),
    ];
    let mut worst: f64 = 0.0;
    let mut curves = 0;
    for config in &configs {
        let result = run_experiment(config).unwrap();
        for report in &result.reports {
            let curve = report.curve.as_ref().expect("curve present");
            worst = worst.max(to_db(curve.msd()[0]).abs());
            curves += 1;
        }
    }
    verdict(
        8,
        "every learning curve starts at 0 dB",
        worst <= 1e-9,
        &format!("max |MSD(0)| = {worst:e} dB over {curves} curves"),
    );
}
