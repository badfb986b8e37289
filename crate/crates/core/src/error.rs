use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("direction vector is not unit length (|omega| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("speed c must be nonzero{0}")]
    InvalidSpeed(&'static str),

    #[error("tau = {tau} must exceed {min}")]
    TauTooSmall { tau: f64, min: f64 },

    #[error("omega and omega_perp are not orthogonal (dot = {dot})")]
    NotOrthogonal { dot: f64 },

    #[error("probe point lies in or on the closure of the domain (distance {distance})")]
    PoleInsideDomain { distance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("grid does not resolve the source: spacing {spacing} > {limit} (min region extent / 8)")]
    UnderResolved { spacing: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("singular system in {0}")]
    Singular(&'static str),

    #[error("oscillation gate violated: tau = {tau}, c = {c} needs N_t >= {required}, have {have}")]
    OscillationGate { tau: f64, c: f64, required: usize, have: usize },

    #[error("only {survivors} usable samples remain (need at least {needed})")]
    InsufficientSamples { survivors: usize, needed: usize },

    #[error("ill-conditioned slope fit (condition number {cond:.3e} > {limit:.1e})")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("every direction rejected by the fit-residual gate ({gate})")]
    AllRejected { gate: f64 },

    #[error("empty source specification")]
    EmptySource,

    #[error("missing field snapshot at final time")]
    MissingSnapshot,

    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),

    #[error("projection residual {residual:.3e} exceeds {limit:.1e}")]
    ProjectionResidual { residual: f64, limit: f64 },

    #[error("density changes sign or vanishes near the onset")]
    MixedSignDensity,
}
