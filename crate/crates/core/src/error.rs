use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("NonFourDimensional: p + q = {0}, only d = 4 is supported")]
    NonFourDimensional(usize),
    #[error("ConjugationNotFound: no monomial charge conjugation for signature ({p},{q})")]
    ConjugationNotFound { p: usize, q: usize },
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("NotSelfAdjoint: relative anti-Hermitian part {0:.3e}")]
    NotSelfAdjoint(f64),
    #[error("NotFlat: the triple-index blocks X or S are nonzero")]
    NotFlat,
    #[error("NotRiemannian: signature ({p},{q}) is not (0,4)")]
    NotRiemannian { p: usize, q: usize },
    #[error("UnstableAction: action {0:.3e} diverged during burn-in")]
    UnstableAction(f64),
    #[error("NonIntegrable: {0}")]
    NonIntegrable(String),
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("Format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than by a computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::NonFourDimensional(_)
                | Error::InvalidConfig(_)
                | Error::Format(_)
                | Error::NonIntegrable(_)
                | Error::Io(_)
        )
    }
}
