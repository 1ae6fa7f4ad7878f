use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("dataset contains a single class")]
    SingleClass,

    #[error("ball set has no balls labelled {0}")]
    MissingClass(i8),

    #[error("symmetric factorization failed at pivot {pivot} (ridge shift {ridge:e})")]
    Factorization { pivot: usize, ridge: f64 },

    #[error("every cross-validation fold failed")]
    AllFoldsFailed,

    #[error("Friedman F statistic undefined: chi-square {chi2} equals M(l-1)")]
    DegenerateFriedman { chi2: f64 },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
