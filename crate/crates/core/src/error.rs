use thiserror::Error;

/// Errors raised by the simulation, observable and spectral layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid grid or parameter configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The initial wavepacket does not fit inside the spatial domain.
    #[error("domain too small: wavepacket support {support:.4} exceeds x_max {x_max:.4}")]
    DomainTooSmall { support: f64, x_max: f64 },

    /// Two objects defined on different grids were combined.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Stochasticity parameter outside the elliptic range 0 < K < 4.
    #[error("K = {0} is outside the elliptic regime (0, 4)")]
    NonElliptic(f64),

    /// A frequency prediction is undefined for the supplied parameters.
    #[error("regime error: {0}")]
    Regime(String),

    /// A spectral band is too narrow for the available frequency resolution.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// No local maximum lies strictly inside the requested band.
    #[error("no peak in band [{lo}, {hi}]")]
    NoPeak { lo: f64, hi: f64 },

    /// Invalid call argument (lengths, lags, kick indices).
    #[error("argument error: {0}")]
    Argument(String),

    /// Wavefunction amplitude reached the grid boundary.
    #[error("boundary leak: amplitude {amplitude:.3e} at grid edge")]
    Leak { amplitude: f64 },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
