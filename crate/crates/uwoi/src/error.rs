use thiserror::Error;

/// Every failure the library reports. Variants map one-to-one onto the
/// machine-readable codes used by the CLI and the C interface.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("singular matrix")]
    Singular,
    #[error("matrix is not in the orbit of the standard nilpotent: {0}")]
    NotInOrbit(String),
    #[error("parabolics are not adjacent")]
    NotAdjacent,
    #[error("direction lies on a singular hyperplane")]
    SingularDirection,
    #[error("divergent global constant: {0}")]
    Divergence(String),
    #[error("pole of a zeta factor at {0}")]
    Pole(String),
    #[error("point lies on a boundary: {0}")]
    Boundary(String),
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short code for JSON reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::SizeMismatch(_) => "size_mismatch",
            Error::Singular => "singular",
            Error::NotInOrbit(_) => "not_in_orbit",
            Error::NotAdjacent => "not_adjacent",
            Error::SingularDirection => "singular_direction",
            Error::Divergence(_) => "divergence",
            Error::Pole(_) => "pole",
            Error::Boundary(_) => "boundary",
            Error::Unsupported(_) => "unsupported",
            Error::Internal(_) => "internal",
        }
    }
}
