use std::fmt;

use rotating_trap::bifurcation::BifurcationError;
use rotating_trap::large_omega::LargeOmegaError;
use rotating_trap::monte_carlo::WalkError;
use rotating_trap::optimizer::OptimizerError;
use rotating_trap::reference::ReferenceError;
use rotating_trap::series::SeriesError;
use rotating_trap::transition::TransitionError;

/// Usage errors exit with 2, numerical failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<ReferenceError> for CliError {
    fn from(e: ReferenceError) -> Self {
        match e {
            ReferenceError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(format!("reference: {e}")),
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::InvalidTruncation(_) | SeriesError::RadiusOutOfRange(_) | SeriesError::SourceOutOfRange(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Numerical(format!("series: {e}")),
        }
    }
}

impl From<LargeOmegaError> for CliError {
    fn from(e: LargeOmegaError) -> Self {
        match e {
            LargeOmegaError::InvalidParameters { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(format!("large-omega: {e}")),
        }
    }
}

impl From<TransitionError> for CliError {
    fn from(e: TransitionError) -> Self {
        match e {
            TransitionError::InvalidParams(_)
            | TransitionError::InvalidS0(_)
            | TransitionError::InvalidRadius(_)
            | TransitionError::InvalidOmega0(_)
            | TransitionError::OutOfTable { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(format!("transition: {e}")),
        }
    }
}

impl From<BifurcationError> for CliError {
    fn from(e: BifurcationError) -> Self {
        match e {
            BifurcationError::NonPositiveOmega(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numerical(format!("bifurcation: {e}")),
        }
    }
}

impl From<OptimizerError> for CliError {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::Series(e) => e.into(),
            OptimizerError::LargeOmega(e) => e.into(),
            OptimizerError::Transition(e) => e.into(),
            OptimizerError::Reference(e) => e.into(),
            OptimizerError::NoValidRegime { .. } | OptimizerError::BadGrid(_) => CliError::Usage(e.to_string()),
        }
    }
}
