use crate::case::Case;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("k = {num}/{den} is not on the lattice of case {case}")]
    OffLattice { num: f64, den: usize, case: Case },

    #[error("unknown matrix name `{0}`")]
    UnknownMatrix(String),

    #[error("unknown case `{0}` (expected 4a, 5a or 6a)")]
    UnknownCase(String),

    #[error("{what} is only available for case 4a, got {case}")]
    Unsupported { what: &'static str, case: Case },

    #[error("({s1}, {s2}) is not in region (a): {reason}")]
    NotInRegionA { s1: f64, s2: f64, reason: String },

    #[error("solution blows up near x = {x:.6e}")]
    BlowUp { x: f64 },

    #[error("step size underflow at x = {x:.6e}")]
    StepSizeUnderflow { x: f64 },

    #[error("x_start = {x_start} too small: initial amplitude {amplitude:.3e} exceeds 1e-3")]
    InitTooClose { x_start: f64, amplitude: f64 },

    #[error("solution not in the logarithmic regime (fit residual {residual:.3e})")]
    NotLogarithmic { residual: f64 },

    #[error("root tracking degenerates at homotopy parameter {lambda:.4}")]
    PathObstruction { lambda: f64 },

    #[error("Fredholm determinant for k = {k} is numerically zero")]
    DeterminantNearZero { k: usize },

    #[error("quadrature grid insufficient: refining changes q by {change:.3e}")]
    GridInsufficient { change: f64 },

    #[error("leading-order Y(0) has a non-positive eigenvalue (a = {a:.6e}, b = {b:.6e})")]
    NonPositiveEigenvalue { a: f64, b: f64 },

    #[error("angle {theta} is not a ray of the contour")]
    NotOnContour { theta: f64 },

    #[error("positivity conditions never hold")]
    NoThreshold,

    #[error("grid is empty")]
    EmptyGrid,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
