use thiserror::Error;

/// Errors raised across the pipeline. Numeric payloads are reported in `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("argument {value} outside the admissible range {range}")]
    OutOfRange { value: f64, range: &'static str },

    #[error("boundary curve is not closed (gap {gap:e})")]
    NotClosed { gap: f64 },
    #[error("boundary curve self-intersects near ({x}, {y})")]
    SelfIntersecting { x: f64, y: f64 },
    #[error("segment {index} has degenerate arc length {length:e}")]
    DegenerateSegment { index: usize, length: f64 },
    #[error("arc-length quadrature did not converge on segment {index}")]
    NonRectifiable { index: usize },
    #[error("anchor lies {distance:e} away from the boundary")]
    AnchorOffBoundary { distance: f64 },
    #[error("domain membership check failed: {0}")]
    MembershipCheck(String),
    #[error("localized region is not connected ({components} components)")]
    NotConnected { components: usize },
    #[error("graph leaves the unit ball at x = {x}")]
    GraphExitsBall { x: f64 },
    #[error("every sampled boundary pair was degenerate")]
    AllPairsDegenerate,

    #[error("least-squares system numerically rank deficient: rank {rank} of {columns}, condition estimate {condition:e}")]
    RankDeficient {
        rank: usize,
        columns: usize,
        condition: f64,
    },
    #[error("data support touches the zero-Dirichlet boundary")]
    SupportTouchesDirichlet,
    #[error("peak must lie strictly inside the support arc")]
    PeakOnSupportBoundary,
    #[error("evaluation at a charge point ({x}, {y})")]
    EvalAtCharge { x: f64, y: f64 },

    #[error("harmonic conjugate construction failed: {0}")]
    ConjugateFailed(String),
    #[error("Cauchy-Riemann residual {residual:e} exceeds {limit:e}")]
    CauchyRiemann { residual: f64, limit: f64 },

    #[error("map sends the anchor to ({x:e}, {y:e}) instead of the origin")]
    AnchorNotMapped { x: f64, y: f64 },
    #[error("map has failed diagnostics: {0}")]
    MapDiagnostics(String),
    #[error("critical point on level curve at ({x}, {y})")]
    CriticalOnLevelCurve { x: f64, y: f64 },
    #[error("inversion failed, last iterate ({x}, {y}) with residual {residual:e}")]
    InversionFailed { x: f64, y: f64, residual: f64 },
    #[error("inversion converged to ({x}, {y}) outside the domain")]
    LeftDomain { x: f64, y: f64 },

    #[error("not a Dirichlet-zero trace: |U| = {max:e} on the reflection line (tolerance {tolerance:e})")]
    NotDirichletZeroTrace { max: f64, tolerance: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
