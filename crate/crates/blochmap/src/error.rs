use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state (0, 0) is not a point of projective space")]
    NullState,

    #[error("colatitude out of range: base {base} + delta {delta} exceeds pi")]
    OutOfRange { base: f64, delta: f64 },

    #[error("fidelity argument {0} outside [0, 1]")]
    FidelityDomain(f64),

    #[error("map image degenerated to (0, 0) at iteration {iteration}")]
    DegenerateImage { iteration: usize },

    #[error("post-selection annihilated the state (success probability {0:e})")]
    PostSelectionNull(f64),

    #[error("zero variance in {side} sample; correlation undefined")]
    ZeroVariance { side: &'static str },

    #[error("series never satisfied the saturation rule")]
    NotReached,

    #[error("no occupied boxes at scale {scale_px} px")]
    InsufficientOccupancy { scale_px: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
