use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// Both gains vanish and the detected mode is unseeded, so no light reaches D1.
    #[error("dark interferometer: no light reaches D1 at any phase, visibility is 0/0")]
    DarkInterferometer,

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    /// The fringe slope vanishes (sin phi = 0), so the error-propagation formula diverges.
    #[error("phase sensitivity diverges at phi = {phi} (fringe slope vanishes)")]
    DivergentSensitivity { phi: f64 },

    #[error("not supported by the closed-form model: {0}")]
    Unsupported(String),

    #[error("Fock truncation budget exceeded: norm deficit {deficit:e} > budget {budget:e}")]
    TruncationBudgetExceeded { deficit: f64, budget: f64 },

    #[error("oracle precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("number-state seed |{count}> is not Gaussian")]
    NonGaussianSeed { count: u32 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

impl Error {
    /// Errors raised by the physics itself (as opposed to malformed input).
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::DarkInterferometer
                | Error::Degenerate(_)
                | Error::DivergentSensitivity { .. }
                | Error::Unsupported(_)
                | Error::TruncationBudgetExceeded { .. }
                | Error::PreconditionViolated(_)
                | Error::NonGaussianSeed { .. }
        )
    }
}
