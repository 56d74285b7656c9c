//! Per-sample weight recursions for the LMS family.
//!
//! All filters share one a-priori error, `e(k) = d(k) − ŵᵀ(k)x(k)`, and differ
//! only in how `e(k)` is turned into a weight correction:
//!
//! ```text
//! LMS     ŵ ← ŵ + μ·e·x
//! ZA-LMS  ŵ ← ŵ + μ·e·x − ρ·sgn(ŵ)                 sgn(0) = 0
//! NLMS    ŵ ← ŵ + μ·e·x / (ε + xᵀx)
//! LMMN    ŵ ← ŵ + μ·[α·e + 2·(1−α)·e³]·x
//! ```
//!
//! The mixed-norm filter descends `α·e² + (1−α)·e⁴`; the coefficients above
//! are half the true gradient, the factor 2 being folded into `μ`. With
//! variable mixing the weight `α` follows
//!
//! ```text
//! p ← β·p + (1−β)·e(k)·e(k−1)
//! α ← clamp(δ·α + γ·p², 0, 1)
//! ```
//!
//! evaluated after the weight update, `p` first, with `e(−1) = 0`.
//!
//! [`FilterState`] is a plain value. Every update consumes the state and
//! returns the next one, so a clone is a complete snapshot of the filter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default NLMS regularizer.
pub const DEFAULT_NLMS_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmsParams {
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZaLmsParams {
    pub mu: f64,
    /// Zero-attractor strength (λ·μ of the ℓ₁-penalized cost).
    pub rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NlmsParams {
    pub mu: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_NLMS_EPSILON
}

fn default_variable() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LmmnParams {
    pub mu: f64,
    /// Initial mixing weight on the quadratic term.
    pub alpha0: f64,
    pub gamma: f64,
    pub beta: f64,
    pub delta: f64,
    /// Time-varying mixing. When false `α` stays at `alpha0`.
    #[serde(default = "default_variable")]
    pub variable: bool,
}

impl LmmnParams {
    /// Fixed-mixing filter with weight `alpha` on the quadratic term.
    pub fn fixed(mu: f64, alpha: f64) -> Self {
        Self {
            mu,
            alpha0: alpha,
            gamma: 0.0,
            beta: 0.0,
            delta: 1.0,
            variable: false,
        }
    }
}

/// Algorithm selector with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    Lms(LmsParams),
    ZaLms(ZaLmsParams),
    Nlms(NlmsParams),
    Lmmn(LmmnParams),
}

fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason,
        })
    }
}

fn unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

impl AlgorithmSpec {
    pub fn mu(&self) -> f64 {
        match self {
            Self::Lms(p) => p.mu,
            Self::ZaLms(p) => p.mu,
            Self::Nlms(p) => p.mu,
            Self::Lmmn(p) => p.mu,
        }
    }

    /// Short algorithm name, e.g. for default labels.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Lms(_) => "LMS",
            Self::ZaLms(_) => "ZA-LMS",
            Self::Nlms(_) => "NLMS",
            Self::Lmmn(_) => "LMMN",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mu = self.mu();
        check("mu", mu, mu > 0.0, "step size must be positive")?;
        match self {
            Self::Lms(_) => Ok(()),
            Self::ZaLms(p) => check("rho", p.rho, p.rho >= 0.0, "must be non-negative"),
            Self::Nlms(p) => check("epsilon", p.epsilon, p.epsilon > 0.0, "must be positive"),
            Self::Lmmn(p) => {
                check("alpha0", p.alpha0, unit(p.alpha0), "must lie in [0, 1]")?;
                check("beta", p.beta, unit(p.beta), "must lie in [0, 1]")?;
                check("gamma", p.gamma, p.gamma >= 0.0, "must be non-negative")?;
                check("delta", p.delta, unit(p.delta), "must lie in [0, 1]")
            }
        }
    }
}

fn sgn(w: f64) -> f64 {
    if w > 0.0 {
        1.0
    } else if w < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Weight estimate, regressor window and mixing state of one filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterState {
    weights: Vec<f64>,
    /// Newest sample first: `[x(k), x(k−1), …, x(k−K+1)]`.
    regressor: Vec<f64>,
    alpha: f64,
    p: f64,
    prev_error: f64,
    iteration: u64,
}

impl FilterState {
    /// Zero weights and regressor; `α` starts at `alpha0` for mixed-norm
    /// filters and at 1 otherwise.
    pub fn new(taps: usize, spec: &AlgorithmSpec) -> Self {
        let alpha = match spec {
            AlgorithmSpec::Lmmn(p) => p.alpha0,
            _ => 1.0,
        };
        Self {
            weights: vec![0.0; taps],
            regressor: vec![0.0; taps],
            alpha,
            p: 0.0,
            prev_error: 0.0,
            iteration: 0,
        }
    }

    /// State with explicit weights and regressor, for driving single updates.
    pub fn from_parts(weights: Vec<f64>, regressor: Vec<f64>, alpha: f64) -> Result<Self> {
        if weights.len() != regressor.len() {
            return Err(Error::Shape(format!(
                "{} weights but {} regressor samples",
                weights.len(),
                regressor.len()
            )));
        }
        check("alpha", alpha, unit(alpha), "must lie in [0, 1]")?;
        Ok(Self {
            weights,
            regressor,
            alpha,
            p: 0.0,
            prev_error: 0.0,
            iteration: 0,
        })
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn regressor(&self) -> &[f64] {
        &self.regressor
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Error from the previous iteration (0 before the first one).
    pub fn prev_error(&self) -> f64 {
        self.prev_error
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn push_regressor(mut self, x_new: f64) -> Self {
        if !self.regressor.is_empty() {
            self.regressor.rotate_right(1);
            self.regressor[0] = x_new;
        }
        self
    }

    /// `ŵᵀx`.
    pub fn predict(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.regressor)
            .map(|(w, x)| w * x)
            .sum()
    }

    pub fn predict_and_error(&self, d: f64) -> f64 {
        d - self.predict()
    }

    fn regressor_energy(&self) -> f64 {
        self.regressor.iter().map(|x| x * x).sum()
    }

    fn ensure_finite(self) -> Result<Self> {
        if self.weights.iter().all(|w| w.is_finite()) {
            Ok(self)
        } else {
            Err(Error::Diverged {
                iteration: self.iteration,
            })
        }
    }

    /// `ŵ ← ŵ + gain·x`.
    fn correct(mut self, gain: f64) -> Result<Self> {
        for (w, x) in self.weights.iter_mut().zip(&self.regressor) {
            *w += gain * x;
        }
        self.ensure_finite()
    }

    pub fn lms_step(self, e: f64, params: &LmsParams) -> Result<Self> {
        self.correct(params.mu * e)
    }

    pub fn zalms_step(mut self, e: f64, params: &ZaLmsParams) -> Result<Self> {
        let gain = params.mu * e;
        for (w, x) in self.weights.iter_mut().zip(&self.regressor) {
            *w = *w + gain * x - params.rho * sgn(*w);
        }
        self.ensure_finite()
    }

    pub fn nlms_step(self, e: f64, params: &NlmsParams) -> Result<Self> {
        let norm = params.epsilon + self.regressor_energy();
        self.correct(params.mu * e / norm)
    }

    /// Mixed-norm update using the state's current `α` on both terms.
    pub fn lmmn_step(self, e: f64, params: &LmmnParams) -> Result<Self> {
        let alpha = self.alpha;
        self.correct(params.mu * (alpha * e + 2.0 * (1.0 - alpha) * e * e * e))
    }

    /// Smoothed error correlation followed by the mixing-weight recursion.
    pub fn update_mixing_parameter(mut self, e_new: f64, e_prev: f64, params: &LmmnParams) -> Self {
        self.p = params.beta * self.p + (1.0 - params.beta) * e_new * e_prev;
        self.alpha = (params.delta * self.alpha + params.gamma * self.p * self.p).clamp(0.0, 1.0);
        self
    }

    /// One full iteration: shift in `x_new`, form the a-priori error against
    /// `d`, update the weights (and mixing state). Returns the new state and
    /// the a-priori error.
    pub fn step(self, x_new: f64, d: f64, spec: &AlgorithmSpec) -> Result<(Self, f64)> {
        let state = self.push_regressor(x_new);
        let e = state.predict_and_error(d);
        if !e.is_finite() {
            return Err(Error::Diverged {
                iteration: state.iteration,
            });
        }
        let mut state = match spec {
            AlgorithmSpec::Lms(p) => state.lms_step(e, p)?,
            AlgorithmSpec::ZaLms(p) => state.zalms_step(e, p)?,
            AlgorithmSpec::Nlms(p) => state.nlms_step(e, p)?,
            AlgorithmSpec::Lmmn(p) => {
                let state = state.lmmn_step(e, p)?;
                if p.variable {
                    let prev = state.prev_error;
                    state.update_mixing_parameter(e, prev, p)
                } else {
                    state
                }
            }
        };
        state.prev_error = e;
        state.iteration += 1;
        Ok((state, e))
    }
}
