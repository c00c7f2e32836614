use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed map: {0}")]
    MalformedMap(String),

    #[error("map is not a local diffeomorphism: det Df = {det:.3e} at ({x:.6}, {y:.6}) within oscillation bound {bound:.3e}")]
    NotLocalDiffeo {
        x: f64,
        y: f64,
        det: f64,
        bound: f64,
    },

    #[error("linear part has |det| = {0}; endomorphisms need degree at least 2 (set allow_degree_one to override)")]
    DegreeTooLow(i64),

    #[error("singular matrix (det = {0:e})")]
    SingularMatrix(f64),

    #[error("class ({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),

    #[error("class ({cls0}, {cls1}) is not an eigenvector of A: A*cls = ({img0}, {img1})")]
    NotEigenvector {
        cls0: i64,
        cls1: i64,
        img0: i64,
        img1: i64,
    },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("invalid strip map: {0}")]
    InvalidStripMap(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last increment {last_increment:e})")]
    NonConvergence {
        iterations: usize,
        last_increment: f64,
    },

    #[error("limit iteration overflow: |P(F^n p)| = {value:e} after {n} steps")]
    Overflow { n: usize, value: f64 },

    #[error("center field width {width:e} exceeds tangency tolerance {tol:e} at ({x:.6}, {y:.6})")]
    TangencyUncertain {
        x: f64,
        y: f64,
        width: f64,
        tol: f64,
    },

    #[error("orientation ambiguity at ({x:.6}, {y:.6}); reduce the step size")]
    StepSize { x: f64, y: f64 },

    #[error(
        "curve left the cone field at ({x:.6}, {y:.6}) on iterate {n} (angle excess {excess:e})"
    )]
    TangencyLost {
        n: usize,
        x: f64,
        y: f64,
        excess: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
