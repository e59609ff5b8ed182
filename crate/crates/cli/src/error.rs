//! Error wrapper mapping every failure onto the process exit codes:
//! 1 for configuration and I/O problems, 2 for numerical failures in
//! the solver core. Exit code 3 is reserved for a completed
//! equivalence run whose deviation exceeds the tolerance, which is a
//! result rather than an error and never passes through this type.

use mirror_sim_core::error::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Mistakes in flags, the config file, or their combination.
    #[error("{0}")]
    Config(String),

    /// Filesystem failures, reported with the offending path.
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    /// Anything the solver core rejects or fails to converge on.
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Core(Error::InvalidParameter(_) | Error::DimensionMismatch(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_split_config_from_numerics() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 1);
        assert_eq!(CliError::Core(Error::InvalidParameter("x".into())).exit_code(), 1);
        assert_eq!(
            CliError::Core(Error::SteadyStateResidual { residual: 1.0, bound: 0.1 }).exit_code(),
            2
        );
        assert_eq!(
            CliError::Core(Error::CorrelationTail { tail: 1.0, bound: 0.1, tau_max: 10.0 })
                .exit_code(),
            2
        );
    }
}
