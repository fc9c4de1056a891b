use std::path::PathBuf;

/// Errors produced by the design, synthesis and evaluation routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("partial design: placed {achieved} of {requested} points")]
    PartialDesign { achieved: usize, requested: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("iteration {iteration}: {source}")]
    Iteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Strips `Trial` and `Iteration` wrappers to get at the underlying failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } | Error::Iteration { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
