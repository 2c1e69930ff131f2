use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator set error: {0}")]
    GeneratorSet(String),

    #[error("incompatible generator sets: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },

    #[error("body root-finding did not converge from seed {seed}")]
    NoRoot { seed: f64 },

    #[error("derivative of the body relation vanishes at {at}")]
    SingularLinearization { at: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("integration path passes through branch point {point}")]
    SingularPath { point: String },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("stencil evaluation failed for `{label}` at ({x}, {y}): {reason}")]
    Stencil {
        label: String,
        x: f64,
        y: f64,
        reason: String,
    },

    #[error("derivative order ({i}, {j}) exceeds the supported total order 3")]
    OrderTooHigh { i: u8, j: u8 },

    #[error("parity error: {0}")]
    Parity(String),

    #[error("registered derivative {index:?} of `{label}` disagrees with finite differences by {discrepancy:e}")]
    DerivativeMismatch {
        label: String,
        index: (u8, u8),
        discrepancy: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parameter constraint violated: {0}")]
    ParamConstraint(String),

    #[error("inversion failed: {0}")]
    Invertibility(String),

    #[error("subalgebra `{0}` admits no reduction")]
    NotReducible(String),

    #[error("catalog entry `{id}` fails its residual check: {residual:e} above {tol:e}")]
    GateFailed { id: String, residual: f64, tol: f64 },
}
