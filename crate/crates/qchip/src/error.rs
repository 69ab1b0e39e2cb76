use crate::qubit_lg::Axis;

/// Unified error type for the placement engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Not enough substrate for the requested components.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Constraint system cannot fit the available extent. Carries the
    /// longest violating chain (component ids, source/sink omitted).
    #[error("{axis} constraints infeasible: need {required} cells, have {available} (chain {path:?})")]
    Infeasible {
        axis: Axis,
        required: i64,
        available: i64,
        path: Vec<u32>,
    },

    /// A maze-routing attempt found no usable path or could not pad it.
    #[error("route failure: {0}")]
    RouteFailure(String),

    /// An internal invariant was broken; indicates a bug, not bad input.
    #[error("internal invariant breach: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 invalid input, 3 capacity/infeasible, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Capacity(_) | Error::Infeasible { .. } | Error::RouteFailure(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
