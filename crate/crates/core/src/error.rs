use thiserror::Error;

/// Errors raised by the numerical layer, the relation checkers and the map tooling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖a − a*‖ = {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("element `{which}` is not a contraction (‖x‖ = {norm:.6})")]
    NotContraction { which: String, norm: f64 },

    #[error("element `{which}` is not in the unit interval [0, 1] (defect {defect:.3e})")]
    NotInUnitInterval { which: String, defect: f64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("eigenvalue {eigenvalue} lies within tolerance of endpoint {endpoint}")]
    EndpointAmbiguity { eigenvalue: f64, endpoint: f64 },

    #[error("incompatible shapes: {0}")]
    ShapeIncompatible(String),

    #[error("element `{which}` is not unitary (defect {defect:.3e})")]
    NotUnitary { which: String, defect: f64 },

    #[error("pair generator exhausted after {attempts} attempts ({strategy})")]
    GeneratorExhausted { strategy: String, attempts: usize },

    #[error("strategy {strategy} does not support shape {shape}")]
    UnsupportedShape { strategy: String, shape: String },

    #[error("map is not a triple homomorphism (defect {defect:.3e})")]
    NotTripleHom { defect: f64 },

    #[error("block {block} is neither multiplicative ({hom_defect:.3e}) nor anti-multiplicative ({antihom_defect:.3e})")]
    AmbiguousBlock {
        block: usize,
        hom_defect: f64,
        antihom_defect: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
