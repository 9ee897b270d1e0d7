use thiserror::Error;

use crate::fan::Cone;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed fan `{fan}`: {reason}")]
    MalformedFan { fan: String, reason: String },
    #[error("fan `{0}` is not smooth and complete")]
    NotSmoothComplete(String),
    #[error("fan `{0}` is not complete")]
    NotComplete(String),
    #[error("fan `{0}` is not smooth")]
    NotSmooth(String),
    #[error("cone {{{cone}}} is not a cone of fan `{fan}`")]
    NotACone { fan: String, cone: Cone },
    #[error("ray index {ray} out of range for fan `{fan}`")]
    RayOutOfRange { fan: String, ray: usize },
    #[error("blow-up center {{{0}}} must have dimension at least 2")]
    CenterTooSmall(Cone),
    #[error("point {point} lies outside the support of fan `{fan}`")]
    OutsideSupport { fan: String, point: String },
    #[error("lattice map has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    ShapeMismatch { rows: usize, cols: usize, expected_rows: usize, expected_cols: usize },
    #[error("morphism {0} is not compatible with the fans")]
    IncompatibleMorphism(String),
    #[error("morphisms are not composable: target `{0}` differs from source `{1}`")]
    NotComposable(String, String),
    #[error("operands live on different fans (`{0}` and `{1}`)")]
    FanMismatch(String, String),
    #[error("orbit of cone {{{0}}} maps onto a proper subtorus with finite fibers; the image is not torus-invariant")]
    NonInvariantImage(Cone),
    #[error("lattice point does not satisfy the divisor-restriction constraints for cone {{{0}}}")]
    BadCharacter(Cone),
    #[error("blow-up center {{{0}}} meets the open set, so the subdivision does not present the same open set")]
    CenterMeetsOpenSet(Cone),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
}

pub type Result<T> = std::result::Result<T, Error>;
