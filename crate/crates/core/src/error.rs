//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid Lorentz index: {0}")]
    InvalidIndex(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("incompatible exponents: {0}")]
    Exponents(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid drift parameters: {0}")]
    DriftWindow(String),

    #[error(
        "Picard iteration is not contracting (measured ratio {ratio:.4} over window {t_bar:.3e}); \
         retry with a smaller time window"
    )]
    NonContractive { ratio: f64, t_bar: f64 },

    #[error("numerical fault: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 = invalid config/input, 3 = runtime fault.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidGrid(_)
            | Error::InvalidIndex(_)
            | Error::Exponents(_)
            | Error::DriftWindow(_) => 2,
            _ => 3,
        }
    }
}
