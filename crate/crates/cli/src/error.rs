use std::process::ExitCode;

use rskp_core::integrator::FlowError;
use rskp_core::Error as CoreError;

/// Failures mapped onto the exit-code contract.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed arguments or files, or data violating an invariant (exit 2).
    #[error("{0}")]
    Input(String),
    /// A flow left the generic regime (exit 3).
    #[error("collision: {0}")]
    Collision(String),
    /// At least one verification record failed (exit 1).
    #[error("verification failed: {failed} of {total} checks")]
    Verification { failed: usize, total: usize },
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification { .. } => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Collision(_) => 3,
        })
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

/// Whether a core error means the configuration stopped being generic.
pub fn is_collision(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::Collision { .. } | CoreError::StepSizeUnderflow { .. } | CoreError::ZeroVelocity { .. }
    )
}

/// Errors raised while integrating: collisions exit 3, everything else 2.
pub fn from_dynamics(e: CoreError) -> CliError {
    if is_collision(&e) {
        CliError::Collision(e.to_string())
    } else {
        CliError::Input(e.to_string())
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        if is_collision(&e.cause) {
            CliError::Collision(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
