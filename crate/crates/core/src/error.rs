use thiserror::Error;

/// Errors produced by the simulation and estimation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Params(#[from] ParamError),

    #[error("unknown built-in model id {0} (valid ids are 1..=5)")]
    UnknownModel(u32),

    #[error("unknown scheme name {0:?} (valid: AE, SE, HM, PTE, FTE, or an f1,f2,f3 triple)")]
    UnknownScheme(String),

    #[error("invalid fix-function triple {0}: must have f1=id with f3 in {{abs, sym}}, or f1=f2=f3 in {{abs, sym}}")]
    InvalidSchemeTriple(String),

    #[error("unknown fix function {0:?} (valid: id, abs, sym)")]
    UnknownFixFn(String),

    #[error("increment grid needs at least one step")]
    ZeroSteps,

    #[error("cannot coarsen a grid with an odd number of steps ({0})")]
    OddLevel(usize),

    #[error("step count {0} must be a power of two for coupled estimation")]
    NotPowerOfTwo(usize),

    #[error("need at least {needed} paths, got {got}")]
    TooFewPaths { needed: usize, got: usize },

    #[error("need at least 2 usable points in the fit range, got {0}")]
    TooFewFitPoints(usize),

    #[error("level {level} exceeds the reference resolution (must be <= {max})")]
    LevelAboveReference { level: usize, max: usize },

    #[error("refusing run: n_max * paths = {product} exceeds the configured cap {cap}")]
    ProductCapExceeded { product: u128, cap: u128 },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Collected parameter violations; `validate` reports all of them at once.
#[derive(Debug, Error)]
#[error("invalid model parameters: {}", issues.join("; "))]
pub struct ParamError {
    pub issues: Vec<String>,
}

pub type Result<T> = std::result::Result<T, Error>;
