use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 2..=4")]
    Dimension(usize),

    #[error("value {value} exceeds the supported bound {bound}")]
    TooLarge { value: u64, bound: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("the zero vector has no primitive part")]
    ZeroVector,

    #[error("point {0} does not lie on the sphere of squared radius {1}")]
    NotOnSphere(String, u64),

    #[error("eigenfunction is not normalized: sum of squared amplitudes is {0}")]
    NotNormalized(f64),

    #[error("pair count {pairs} exceeds the pair budget {budget}")]
    PairBudget { pairs: u64, budget: u64 },

    #[error("tail tolerance {0} cannot be reached within the frequency budget")]
    TailUnreachable(f64),

    #[error("cache: {0}")]
    Cache(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Cache(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if (2..=4).contains(&d) {
        Ok(())
    } else {
        Err(Error::Dimension(d))
    }
}
