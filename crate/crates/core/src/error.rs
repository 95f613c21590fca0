use thiserror::Error;

/// Errors raised by the samplers, the validation machinery and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coin budget of {budget} exhausted before the stopping failure{}", atom_context(*.row, *.location))]
    CoinBudgetExceeded {
        budget: u64,
        row: Option<u64>,
        location: Option<f64>,
    },

    #[error("proposal budget of {budget} exhausted without an accepted proposal{}", atom_context(*.row, *.location))]
    ProposalBudgetExceeded {
        budget: u64,
        row: Option<u64>,
        location: Option<f64>,
    },

    #[error("location collision at {0:e}")]
    LocationCollision(f64),

    #[error("pairing index overflow for cell ({n}, {m})")]
    PairingOverflow { n: u64, m: u64 },

    #[error("row {row} is outside an array limited to {limit} rows")]
    RowNotRetained { row: u64, limit: u64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed record: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn atom_context(row: Option<u64>, location: Option<f64>) -> String {
    match (row, location) {
        (Some(r), Some(l)) => format!(" (row {r}, atom at {l:e})"),
        (Some(r), None) => format!(" (row {r})"),
        (None, Some(l)) => format!(" (atom at {l:e})"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Attach the offending row and atom to a budget error.
    pub fn with_atom(self, at_row: u64, at: f64) -> Self {
        match self {
            Error::CoinBudgetExceeded { budget, .. } => Error::CoinBudgetExceeded {
                budget,
                row: Some(at_row),
                location: Some(at),
            },
            Error::ProposalBudgetExceeded { budget, .. } => Error::ProposalBudgetExceeded {
                budget,
                row: Some(at_row),
                location: Some(at),
            },
            other => other,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::CoinBudgetExceeded { .. } | Error::ProposalBudgetExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
