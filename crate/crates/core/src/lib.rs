//! Gradient-family adaptive filters for sparse FIR channel estimation.
//!
//! The crate is organised bottom-up:
//!
//! - [`signal`] draws sparse channels, white excitation and AWGN, and
//!   synthesizes the desired signal `d(k) = wᵀx(k) + v(k)`.
//! - [`filters`] holds the per-sample recursions (LMS, ZA-LMS, NLMS and the
//!   LMS/LMF mixed-norm filter with fixed or time-varying mixing).
//! - [`metrics`] turns weight trajectories into mean-square-deviation
//!   learning curves and summary numbers.
//! - [`harness`] runs seeded, paired Monte Carlo experiments over a roster
//!   of algorithms.
//!
//! ```
//! use sparse_afe::{AlgorithmSpec, FilterState, LmsParams};
//!
//! let spec = AlgorithmSpec::Lms(LmsParams { mu: 0.5 });
//! let state = FilterState::new(2, &spec);
//! let (state, e) = state.step(1.0, 1.0, &spec).unwrap();
//! assert_eq!(e, 1.0);
//! assert_eq!(state.weights(), &[0.5, 0.0]);
//! ```

pub mod error;
pub mod filters;
pub mod harness;
pub mod metrics;
pub mod signal;

pub use error::{Error, Result};
pub use filters::{AlgorithmSpec, FilterState, LmmnParams, LmsParams, NlmsParams, ZaLmsParams};
pub use harness::{
    run_experiment, run_trial, table_presets, AlgorithmReport, AlgorithmSummary,
    ExperimentConfig, ExperimentResult, RosterEntry, Scenario, TrialData,
};
pub use metrics::LearningCurve;
pub use signal::{ChannelModel, ChannelSchedule, SampleStream};
