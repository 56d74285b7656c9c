use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sparsity: {m} nonzero taps requested for a channel of length {length}")]
    InvalidSparsity { m: usize, length: usize },

    #[error("empty sample stream requested")]
    EmptyStream,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid tracking schedule: change point {change_at} not inside (0, {total})")]
    InvalidSchedule { change_at: usize, total: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("filter diverged at iteration {iteration} (non-finite weights); step size too large")]
    Diverged { iteration: u64 },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no parameter preset for sparsity {0}; only 1 and 4 have tables")]
    NoPreset(usize),

    #[error("invalid config: {0}")]
    Config(String),
}
