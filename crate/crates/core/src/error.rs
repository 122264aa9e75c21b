use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate matrix: |det| = {det:e} <= threshold {threshold:e}")]
    Degenerate { det: f64, threshold: f64 },

    #[error("wrong metric signature: {positive} positive / {negative} negative eigenvalues, expected 1 / 3")]
    WrongSignature { positive: usize, negative: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown symbol `{name}` at byte {offset}")]
    UnknownSymbol { name: String, offset: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("frame field is not Lorentz-orthonormal (residual {residual:e})")]
    FrameNotOrthonormal { residual: f64 },

    #[error("linear system is rank-deficient")]
    SingularSystem,

    #[error("spin density has imaginary residue {residue:e}")]
    NonRealDensity { residue: f64 },

    #[error("Dirac Lagrangian has imaginary residue {residue:e}")]
    NonRealLagrangian { residue: f64 },

    #[error("stress-energy tensor has imaginary residue {residue:e}")]
    NonRealTensor { residue: f64 },

    #[error("current has imaginary residue {residue:e}")]
    NonRealCurrent { residue: f64 },

    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
