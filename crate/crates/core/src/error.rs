use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u64),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("escape radius {radius} is below the provably safe radius {minimum} for this map")]
    UnsafeEscapeRadius { radius: f64, minimum: f64 },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("no Julia pixels at this resolution")]
    NoJuliaPixels,

    #[error("criterion inconclusive at this epsilon: r_n = {r_n} lies in [1 - {epsilon}, 1 + {epsilon}]")]
    InconclusiveTrap { r_n: f64, epsilon: f64 },

    #[error("epsilon {epsilon} is not below the gap {gap} between r_n and 1")]
    EpsilonTooLarge { epsilon: f64, gap: f64 },

    #[error("the zero angle has a constant classification sequence")]
    ZeroAngle,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
