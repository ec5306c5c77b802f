use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field amplitude {alpha} with superposition constant {r} is the zero state")]
    ZeroState { alpha: f64, r: f64 },

    #[error("the closed-form engine requires zero detuning (got delta = {0})")]
    ResonanceRequired(f64),

    #[error("phase is undefined for a vanishing overlap")]
    UndefinedPhase,

    #[error("state shapes differ: {0} vs {1} amplitudes")]
    ShapeMismatch(usize, usize),

    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("symmetric eigen-solver did not converge")]
    EigenSolver,

    #[error("norm drift {error:e} at tau = {tau} exceeds {limit:e}")]
    NormDrift { tau: f64, error: f64, limit: f64 },

    #[error("engine deviation {deviation:e} exceeds tolerance {tolerance:e}")]
    ToleranceExceeded { deviation: f64, tolerance: f64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics themselves as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NormDrift { .. } | Error::EigenSolver | Error::ToleranceExceeded { .. }
        )
    }

    /// Process exit status: 3 for numerical failures, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }
}
