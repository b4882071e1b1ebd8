use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("derivative order {0} out of range 1..=4")]
    OrderOutOfRange(usize),
    #[error("curve has {got} nodes, need at least {need}")]
    CurveTooSmall { got: usize, need: usize },
    #[error("ambient dimension {0} out of range (need n >= 2)")]
    DimensionTooSmall(usize),
    #[error("immersion lost: min |dγ/dx| = {min_speed:e} below floor {floor:e}")]
    ImmersionLost { min_speed: f64, floor: f64 },
    #[error("field length {field} does not match curve node count {curve}")]
    LengthMismatch { field: usize, curve: usize },
    #[error("field is not normal along the curve: max tangential part {0:e}")]
    FieldNotNormal(f64),
    #[error("cumulative arclength is not strictly monotone at interval {0}")]
    NonMonotoneArclength(usize),
    #[error("syntax error at byte offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("`{name}` expects {expected} argument(s), got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("domain error evaluating `{0}`")]
    Domain(&'static str),
    #[error("point is not on the surface: |signed distance| = {0:e}")]
    PointNotOnSurface(f64),
    #[error("degenerate level-set gradient: |∇F| = {0:e}")]
    DegenerateGradient(f64),
    #[error("nearest-point projection diverged: residual {residual:e} after {iters} iterations")]
    ProjectionDiverged { residual: f64, iters: usize },
    #[error("vector is not tangent to the surface: normal part {0:e}")]
    NotTangent(f64),
    #[error("elastic energy {0:e} below floor; non-flatness condition lost")]
    EnergyTooSmall(f64),
    #[error("datum violates orthogonal attachment: |<tangent, normal>| = {0:.3}")]
    NotOrthogonal(f64),
    #[error("boundary orientation sign flipped during the flow")]
    TauFlipped,
    #[error("linear system is singular at pivot {0}")]
    SolverSingular(usize),
    #[error("explicit step too large: dt = {dt:e} exceeds stability bound {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("length-correction secant failed after {0} iterations")]
    SecantFailed(usize),
    #[error("non-flatness lost: {0}")]
    NonFlatnessLost(String),
    #[error("invalid initial datum: {0}")]
    InvalidInitialDatum(String),
    #[error("classification requires the planar flat case (n = 2, M an axis-aligned plane)")]
    NotPlanarFlatCase,
    #[error("reflection seam mismatch: endpoint off the surface by {0:e}")]
    SeamMismatch(f64),
    #[error("polyline is not closed or degenerate: {0}")]
    NotClosed(String),
    #[error("turning angle sum {0:.4} turns is not near an integer")]
    AngleSumNotInteger(f64),
    #[error("curve is not stationary: gradient norm {norm:e} above tolerance {tol:e}")]
    NotStationary { norm: f64, tol: f64 },
    #[error("incompatible datum parameters: {0}")]
    IncompatibleParams(String),
    #[error("unsupported ambient dimension {0} for this operation")]
    UnsupportedDimension(usize),
}
