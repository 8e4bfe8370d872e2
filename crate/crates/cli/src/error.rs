use greenspread::dynamics::DynamicsError;
use greenspread::graph::GraphError;
use greenspread::ip_gen::IpError;
use greenspread::optimize::OptimizeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag combinations.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input, infeasible or oversized instances.
    #[error("{0}")]
    Data(String),
    /// A proven bound did not hold; this is a bug.
    #[error("internal bound violation: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::BoundViolation { .. } => CliError::Internal(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<OptimizeError> for CliError {
    fn from(e: OptimizeError) -> Self {
        match e {
            OptimizeError::Dynamics(d) => d.into(),
            OptimizeError::VariantMismatch(_) => CliError::Usage(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<IpError> for CliError {
    fn from(e: IpError) -> Self {
        match e {
            IpError::Dynamics(d) => d.into(),
            IpError::Optimize(o) => o.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}
