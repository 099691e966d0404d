use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Im(tau) must be positive, got {0}")]
    BadTau(f64),
    #[error("truncation order {order} too small: orders {order} and {next} differ by {diff:.3e}")]
    Truncation { order: usize, next: usize, diff: f64 },
    #[error("argument {z} lies within {dist:.3e} of a pole")]
    Pole { z: String, dist: f64 },
    #[error("coupling vector must not be all zero")]
    ZeroCoupling,
    #[error("no one-dimensional kernel found for degrees near {candidate}: {detail}")]
    Kernel { candidate: usize, detail: String },
    #[error("Q(E) is not independent of x: relative spread {0:.3e}")]
    NotConstant(f64),
    #[error("the block space is not invariant under H: relative residual {0:.3e}")]
    NotInvariant(f64),
    #[error("ill-conditioned linear system (condition {0:.3e}); try other sample points")]
    IllConditioned(f64),
    #[error("E = {0} is a root of Q; use the root-specific routine")]
    AtRoot(String),
    #[error("integration path blocked: {0}")]
    Path(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
