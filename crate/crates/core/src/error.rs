use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ray passes through an edge endpoint or runs along the edge")]
    DegenerateCrossing,
    #[error("query point lies on the walk")]
    PointOnBoundary,
    #[error("obstacles {0} and {1} coincide or overlap collinearly")]
    DegenerateInput(usize, usize),
    #[error("segment {0} is degenerate (a = b)")]
    DegenerateSegment(usize),
    #[error("point lies on obstacle {0}")]
    PointOnObstacle(usize),
    #[error("point lies inside disk {0}")]
    PointCoveredByObstacle(usize),
    #[error("grid pitch is too coarse for the instance's feature separation")]
    ResolutionTooCoarse,
    #[error("left/right chain property violated for cell pair {0:?}-{1:?}")]
    ChainViolation((i64, i64), (i64, i64)),
    #[error("degenerate drawing: {0}")]
    DegenerateDrawing(String),
    #[error("minimum cut must use an infinite arc; some point shares the outer face")]
    NoFiniteCut,
    #[error("point {0} cannot be enclosed by the full obstacle set")]
    Infeasible(usize),
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("circulation residual {0:e} is too large to decompose")]
    ResidualTooLarge(f64),
    #[error("no subset of at most {0} obstacles encloses every point")]
    BudgetExceeded(usize),
    #[error("method {method} cannot be used with {kind} instances")]
    MethodKindMismatch { method: String, kind: String },
    #[error("instance generation failed after {0} rejections")]
    GenerationFailed(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
}
