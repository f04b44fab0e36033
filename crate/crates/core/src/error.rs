use crate::multi_index::MultiIndex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("truncation order mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { got: usize, expected: usize },
    #[error("bivector is not antisymmetric at entry ({i}, {j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("Moyal product requires a constant bivector; entry ({i}, {j}) is not constant")]
    NonConstantBivector { i: usize, j: usize },
    #[error("antisymmetrized first-order correction differs from the bracket on ({left}, {right})")]
    FirstOrderMismatch { left: MultiIndex, right: MultiIndex },
    #[error("C_{order}({left}, {right}) is nonzero, so 1 is not a unit")]
    NotUnital { order: usize, left: MultiIndex, right: MultiIndex },
    #[error("{given} corrections supplied for truncation order {order}")]
    TooManyCorrections { given: usize, order: usize },
    #[error("truncation order {given} is below the required minimum {min}")]
    TruncationTooLow { given: usize, min: usize },
    #[error("nilpotency probe needs a nonzero element")]
    ZeroElement,
    #[error("star power needs an exponent of at least 1")]
    ZeroPower,
    #[error("expression uses argument slot {slot} but only {given} arguments were supplied")]
    MissingArgument { slot: usize, given: usize },
    #[error("expression contains a star product but no product was supplied")]
    NoProduct,
    #[error("expression contains a bracket but no bivector was supplied")]
    NoBivector,
    #[error("degree bound {given} is below the certificate bound {required}")]
    InsufficientDegree { given: u32, required: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
