use thiserror::Error;

/// Errors raised by curve construction and the geometric pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("degenerate segment at sample {index}")]
    DegenerateSegment { index: usize },

    #[error("curve is not convex")]
    NotConvex,

    #[error("origin is not strictly inside the curve")]
    OriginOutside,

    #[error("support function is not an oval: p + p'' = {value:e} at sample {index}")]
    NotAnOval { index: usize, value: f64 },

    #[error("invalid support grid: {0}")]
    InvalidGrid(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("ODE solution blew up at theta = {theta}: p = {p:e}")]
    BlowUp { theta: f64, p: f64 },

    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),

    #[error("time step {dt:e} exceeds stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("curve collapsed at t = {time}: area {area:e}")]
    CurveCollapsed { time: f64, area: f64 },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("isoperimetric violation: L^2 - 4 pi A = {deficit:e}")]
    IsoperimetricViolation { deficit: f64 },

    #[error("symmetrized curve {which} is not convex")]
    NotConvexAfterGluing { which: usize },

    #[error("support function is not centrally symmetric: max |p(t+pi) - p(t)| = {deviation:e}")]
    NotSymmetric { deviation: f64 },

    #[error("not a shrinker: max |1/(p+p'') - p| = {residual:e}")]
    NotAShrinker { residual: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
