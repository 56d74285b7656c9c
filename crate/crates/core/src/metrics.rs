//! Mean-square deviation and learning-curve summaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest linear value mapped to dB; exact zeros land at −150 dB.
pub const DB_FLOOR: f64 = 1e-15;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
pub const DEFAULT_MARGIN_DB: f64 = 1.0;

/// Ensemble-averaged MSD per iteration, linear scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningCurve {
    msd: Vec<f64>,
    trials: usize,
    label: String,
}

impl LearningCurve {
    pub fn new(msd: Vec<f64>, trials: usize, label: impl Into<String>) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Shape("learning curve needs at least one trial".into()));
        }
        if let Some(bad) = msd.iter().find(|v| v.is_nan() || **v < 0.0) {
            return Err(Error::InvalidParameter {
                name: "msd",
                value: *bad,
                reason: "MSD values must be non-negative",
            });
        }
        Ok(Self {
            msd,
            trials,
            label: label.into(),
        })
    }

    pub fn msd(&self) -> &[f64] {
        &self.msd
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.msd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.msd.is_empty()
    }

    pub fn db(&self) -> Vec<f64> {
        self.msd.iter().copied().map(to_db).collect()
    }

    /// Deviation summed over the whole run rather than per iteration.
    pub fn time_summed(&self) -> f64 {
        self.msd.iter().sum()
    }

    pub fn steady_state_db(&self, tail_fraction: f64) -> Result<f64> {
        steady_state_msd(&self.msd, tail_fraction)
    }

    pub fn convergence_iteration(&self, margin_db: f64) -> usize {
        convergence_iteration(&self.msd, margin_db)
    }
}

/// `Σᵢ (w_true[i] − w_hat[i])²`.
pub fn msd_instant(w_true: &[f64], w_hat: &[f64]) -> Result<f64> {
    if w_true.len() != w_hat.len() {
        return Err(Error::Shape(format!(
            "true channel has {} taps, estimate has {}",
            w_true.len(),
            w_hat.len()
        )));
    }
    Ok(w_true
        .iter()
        .zip(w_hat)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// Pointwise mean of equal-length per-trial curves.
pub fn ensemble_average<C: AsRef<[f64]>>(
    curves: &[C],
    label: impl Into<String>,
) -> Result<LearningCurve> {
    let Some(first) = curves.first() else {
        return Err(Error::Shape("no curves to average".into()));
    };
    let n = first.as_ref().len();
    if curves.iter().any(|c| c.as_ref().len() != n) {
        return Err(Error::Shape("curves have different lengths".into()));
    }
    let mut acc = vec![0.0; n];
    for c in curves {
        for (a, v) in acc.iter_mut().zip(c.as_ref()) {
            *a += v;
        }
    }
    let count = curves.len() as f64;
    for a in &mut acc {
        *a /= count;
    }
    LearningCurve::new(acc, curves.len(), label)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.max(DB_FLOOR).log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dB of the mean over the last `⌈tail_fraction·N⌉` samples.
pub fn steady_state_msd(msd: &[f64], tail_fraction: f64) -> Result<f64> {
    if msd.is_empty() {
        return Err(Error::Shape("empty learning curve".into()));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            value: tail_fraction,
            reason: "must lie in (0, 1]",
        });
    }
    let n = msd.len();
    let count = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let tail = &msd[n - count..];
    Ok(to_db(tail.iter().sum::<f64>() / count as f64))
}

/// First iteration after which the curve stays within `margin_db` of its
/// steady-state level (default tail window); `msd.len()` if it never settles.
pub fn convergence_iteration(msd: &[f64], margin_db: f64) -> usize {
    convergence_iteration_with(msd, DEFAULT_TAIL_FRACTION, margin_db)
}

pub fn convergence_iteration_with(msd: &[f64], tail_fraction: f64, margin_db: f64) -> usize {
    let Ok(level) = steady_state_msd(msd, tail_fraction) else {
        return msd.len();
    };
    msd.iter()
        .rposition(|v| (to_db(*v) - level).abs() > margin_db)
        .map_or(0, |k| k + 1)
}
