//! Seeded Monte Carlo learning-curve experiments.
//!
//! Each trial draws its channel (or channel schedule), excitation and noise
//! from a generator keyed by `(master_seed, trial)`. Every algorithm in the
//! roster is run on the same trial data, so between-algorithm differences are
//! paired comparisons. Per-trial curves are reduced in trial order, which
//! makes the result independent of how trials are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::filters::{AlgorithmSpec, FilterState, LmmnParams, LmsParams, NlmsParams, ZaLmsParams};
use crate::filters::DEFAULT_NLMS_EPSILON;
use crate::metrics::{self, LearningCurve, DEFAULT_MARGIN_DB, DEFAULT_TAIL_FRACTION};
use crate::signal::{self, ChannelSchedule, SampleStream};

pub const DEFAULT_CHANNEL_LENGTH: usize = 16;
pub const DEFAULT_SNR_DB: f64 = 30.0;
pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_STATIONARY_ITERATIONS: usize = 1000;
pub const DEFAULT_TRACKING_ITERATIONS: usize = 2000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    Stationary,
    /// The true channel is re-drawn once, at iteration `change_at`.
    Tracking { change_at: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub label: String,
    pub spec: AlgorithmSpec,
}

impl RosterEntry {
    pub fn new(label: impl Into<String>, spec: AlgorithmSpec) -> Self {
        Self {
            label: label.into(),
            spec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub channel_length: usize,
    pub sparsity_m: usize,
    pub snr_db: f64,
    pub iterations: usize,
    pub trials: usize,
    pub master_seed: u64,
    pub unit_energy: bool,
    pub scenario: Scenario,
    /// Fraction of the curve averaged for the steady-state level.
    pub tail_fraction: f64,
    /// Band around the steady-state level that counts as converged.
    pub margin_db: f64,
    pub roster: Vec<RosterEntry>,
}

impl ExperimentConfig {
    /// Stationary 16-tap, 30 dB, 200-trial experiment with the tabulated
    /// roster for `sparsity_m`.
    pub fn with_presets(sparsity_m: usize) -> Result<Self> {
        Ok(Self::new(sparsity_m, table_presets(sparsity_m)?))
    }

    pub fn new(sparsity_m: usize, roster: Vec<RosterEntry>) -> Self {
        Self {
            channel_length: DEFAULT_CHANNEL_LENGTH,
            sparsity_m,
            snr_db: DEFAULT_SNR_DB,
            iterations: DEFAULT_STATIONARY_ITERATIONS,
            trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            unit_energy: true,
            scenario: Scenario::Stationary,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            margin_db: DEFAULT_MARGIN_DB,
            roster,
        }
    }

    /// Switches to the tracking scenario with the channel change at mid-run.
    pub fn tracking(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self.scenario = Scenario::Tracking {
            change_at: iterations / 2,
        };
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.iterations == 0 {
            return fail("iterations must be at least 1".into());
        }
        if self.sparsity_m == 0 || self.sparsity_m > self.channel_length {
            return fail(format!(
                "sparsity_m = {} must lie in [1, channel_length = {}]",
                self.sparsity_m, self.channel_length
            ));
        }
        if !self.snr_db.is_finite() {
            return fail("snr_db must be finite".into());
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return fail(format!("tail_fraction = {} must lie in (0, 1]", self.tail_fraction));
        }
        if !(self.margin_db > 0.0 && self.margin_db.is_finite()) {
            return fail(format!("margin_db = {} must be positive", self.margin_db));
        }
        if let Scenario::Tracking { change_at } = self.scenario {
            if change_at == 0 || change_at >= self.iterations {
                return fail(format!(
                    "change_at = {change_at} must lie strictly inside (0, {})",
                    self.iterations
                ));
            }
        }
        if self.roster.is_empty() {
            return fail("roster is empty".into());
        }
        for (i, entry) in self.roster.iter().enumerate() {
            if entry.label.is_empty() {
                return fail(format!("roster entry {i} has an empty label"));
            }
            if self.roster[..i].iter().any(|e| e.label == entry.label) {
                return fail(format!("duplicate roster label `{}`", entry.label));
            }
            entry
                .spec
                .validate()
                .map_err(|e| Error::Config(format!("roster entry `{}`: {e}", entry.label)))?;
        }
        Ok(())
    }
}

/// Tabulated hyperparameters for sparsity levels 1 and 4.
pub fn table_presets(sparsity_m: usize) -> Result<Vec<RosterEntry>> {
    let (lms, za, nlms, lmmn) = match sparsity_m {
        1 => (
            LmsParams { mu: 5e-3 },
            ZaLmsParams { mu: 6e-3, rho: 2e-4 },
            NlmsParams { mu: 0.02, epsilon: DEFAULT_NLMS_EPSILON },
            LmmnParams {
                mu: 8e-3,
                alpha0: 0.7,
                gamma: 0.02,
                beta: 0.3,
                delta: 0.7,
                variable: true,
            },
        ),
        4 => (
            LmsParams { mu: 4e-3 },
            ZaLmsParams { mu: 4e-3, rho: 3e-5 },
            NlmsParams { mu: 0.015, epsilon: DEFAULT_NLMS_EPSILON },
            LmmnParams {
                mu: 4e-3,
                alpha0: 0.85,
                gamma: 0.03,
                beta: 0.9,
                delta: 0.95,
                variable: true,
            },
        ),
        other => return Err(Error::NoPreset(other)),
    };
    Ok(vec![
        RosterEntry::new("LMS", AlgorithmSpec::Lms(lms)),
        RosterEntry::new("ZA-LMS", AlgorithmSpec::ZaLms(za)),
        RosterEntry::new("NLMS", AlgorithmSpec::Nlms(nlms)),
        RosterEntry::new("LMMN", AlgorithmSpec::Lmmn(lmmn)),
    ])
}

/// Everything random about one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialData {
    pub schedule: ChannelSchedule,
    pub stream: SampleStream,
}

impl TrialData {
    pub fn generate(config: &ExperimentConfig, trial: usize) -> Result<Self> {
        let mut rng = signal::trial_rng(config.master_seed, trial as u64);
        let (length, m) = (config.channel_length, config.sparsity_m);
        let schedule = match config.scenario {
            Scenario::Stationary => ChannelSchedule::stationary(signal::generate_sparse_channel_with(
                length,
                m,
                config.unit_energy,
                &mut rng,
            )?),
            Scenario::Tracking { change_at } if config.unit_energy => {
                signal::make_tracking_schedule(length, m, config.iterations, change_at, &mut rng)?
            }
            Scenario::Tracking { change_at } => {
                let before = signal::generate_sparse_channel_with(length, m, false, &mut rng)?;
                let after = signal::generate_sparse_channel_with(length, m, false, &mut rng)?;
                ChannelSchedule::new(vec![(0, before), (change_at, after)])?
            }
        };
        let input = signal::generate_input_sequence(config.iterations, &mut rng)?;
        let noise_variance =
            signal::noise_variance_for_snr(&schedule.segments()[0].1, config.snr_db, 1.0)?;
        let noise = signal::generate_noise(config.iterations, noise_variance, &mut rng)?;
        let stream = schedule.synthesize(&input, &noise)?;
        Ok(Self { schedule, stream })
    }

    /// SHA-256 over the bit patterns of every channel tap and stream sample.
    pub fn checksum(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        for (start, channel) in self.schedule.segments() {
            hasher.update((*start as u64).to_le_bytes());
            for t in channel.taps() {
                hasher.update(t.to_bits().to_le_bytes());
            }
        }
        for series in [&self.stream.input, &self.stream.noise, &self.stream.desired] {
            for v in series.iter() {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
        hasher.finalize().into()
    }

    /// Runs a fresh filter over the trial and returns the deviation of the
    /// a-priori estimate `ŵ(k)` from the active channel at every iteration.
    pub fn run(&self, spec: &AlgorithmSpec) -> Result<Vec<f64>> {
        let n = self.stream.len();
        let mut state = FilterState::new(self.schedule.channel_length(), spec);
        let mut curve = Vec::with_capacity(n);
        for k in 0..n {
            let truth = self.schedule.active_at(k);
            curve.push(metrics::msd_instant(truth.taps(), state.weights())?);
            let (next, _) = state.step(self.stream.input[k], self.stream.desired[k], spec)?;
            state = next;
        }
        Ok(curve)
    }
}

/// Per-iteration MSD of one algorithm on one trial.
pub fn run_trial(config: &ExperimentConfig, spec: &AlgorithmSpec, trial: usize) -> Result<Vec<f64>> {
    TrialData::generate(config, trial)?
        .run(spec)
        .map_err(|e| Error::Trial {
            trial,
            source: Box::new(e),
        })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub label: String,
    /// NaN when any trial diverged.
    pub steady_state_db: f64,
    pub convergence_iteration: Option<usize>,
    /// Iterations after the channel change until re-convergence (tracking only).
    pub tracking_convergence_iteration: Option<usize>,
    pub trials: usize,
    pub diverged_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmReport {
    pub label: String,
    pub spec: AlgorithmSpec,
    /// `None` when the entry was aborted by a divergent trial.
    pub curve: Option<LearningCurve>,
    pub summary: AlgorithmSummary,
    pub diagnostic: Option<String>,
}

impl AlgorithmReport {
    pub fn diverged(&self) -> bool {
        self.curve.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub reports: Vec<AlgorithmReport>,
}

impl ExperimentResult {
    pub fn report(&self, label: &str) -> Option<&AlgorithmReport> {
        self.reports.iter().find(|r| r.label == label)
    }

    pub fn summaries(&self) -> Vec<&AlgorithmSummary> {
        self.reports.iter().map(|r| &r.summary).collect()
    }

    pub fn any_diverged(&self) -> bool {
        self.reports.iter().any(AlgorithmReport::diverged)
    }
}

/// Runs the experiment on rayon's global pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let per_trial: Vec<Vec<Result<Vec<f64>>>> = (0..config.trials)
        .into_par_iter()
        .map(|t| match TrialData::generate(config, t) {
            Ok(data) => config.roster.iter().map(|e| data.run(&e.spec)).collect(),
            Err(err) => config.roster.iter().map(|_| Err(err.clone())).collect(),
        })
        .collect();

    let reports = config
        .roster
        .iter()
        .enumerate()
        .map(|(j, entry)| reduce_entry(config, entry, per_trial.iter().map(|row| &row[j])))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        config: config.clone(),
        reports,
    })
}

/// Runs the experiment on a dedicated pool of `threads` workers (0 = rayon's
/// default).
pub fn run_experiment_with_threads(config: &ExperimentConfig, threads: usize) -> Result<ExperimentResult> {
    if threads == 0 {
        return run_experiment(config);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_experiment(config))
}

fn reduce_entry<'a>(
    config: &ExperimentConfig,
    entry: &RosterEntry,
    results: impl Iterator<Item = &'a Result<Vec<f64>>>,
) -> Result<AlgorithmReport> {
    let mut curves = Vec::with_capacity(config.trials);
    let mut diverged = 0;
    let mut diagnostic = None;
    for (trial, result) in results.enumerate() {
        match result {
            Ok(curve) => curves.push(curve.as_slice()),
            Err(err @ Error::Diverged { .. }) => {
                diverged += 1;
                diagnostic.get_or_insert_with(|| format!("{}: trial {trial}: {err}", entry.label));
            }
            Err(err) => {
                return Err(Error::Trial {
                    trial,
                    source: Box::new(err.clone()),
                })
            }
        }
    }

    let mut summary = AlgorithmSummary {
        label: entry.label.clone(),
        steady_state_db: f64::NAN,
        convergence_iteration: None,
        tracking_convergence_iteration: None,
        trials: config.trials,
        diverged_trials: diverged,
    };
    if diverged > 0 {
        return Ok(AlgorithmReport {
            label: entry.label.clone(),
            spec: entry.spec,
            curve: None,
            summary,
            diagnostic,
        });
    }

    let curve = metrics::ensemble_average(&curves, entry.label.clone())?;
    summary.steady_state_db = curve.steady_state_db(config.tail_fraction)?;
    summary.convergence_iteration = Some(metrics::convergence_iteration_with(
        curve.msd(),
        config.tail_fraction,
        config.margin_db,
    ));
    if let Scenario::Tracking { change_at } = config.scenario {
        summary.tracking_convergence_iteration = Some(metrics::convergence_iteration_with(
            &curve.msd()[change_at..],
            config.tail_fraction,
            config.margin_db,
        ));
    }
    Ok(AlgorithmReport {
        label: entry.label.clone(),
        spec: entry.spec,
        curve: Some(curve),
        summary,
        diagnostic: None,
    })
}
