use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("enumeration too large: {count} items exceeds budget {budget}")]
    EnumerationTooLarge { count: u128, budget: u128 },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("search budget exhausted after {nodes} nodes; best volume so far {best_volume}")]
    PartialResult { nodes: u64, best_volume: f64 },

    #[error("hit starvation: {0}")]
    Starvation(String),

    #[error("degenerate point: {0}")]
    Degenerate(String),

    #[error("conversion error: {0}")]
    Conversion(String),

    #[error("mode error: {0}")]
    Mode(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no closed form for property {0}")]
    NoClosedForm(String),

    #[error("oracle is not exact: {0}")]
    NotExact(String),

    #[error("unsupported layout: {0}")]
    UnsupportedLayout(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

impl Error {
    /// Refusals caused by size limits or sampling starvation, as opposed to
    /// bad inputs.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::EnumerationTooLarge { .. }
                | Error::Budget(_)
                | Error::PartialResult { .. }
                | Error::Starvation(_)
                | Error::Capacity(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
