use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("physical array has {got} samples, grid expects {expected}")]
    ShapeMismatch { got: usize, expected: usize },
    #[error("multiplier symbol is not finite at |xi| = {radius}")]
    NonFiniteSymbol { radius: f64 },
    #[error("operation requires a {required}-dimensional grid")]
    WrongDimension { required: usize },
    #[error("abcd parameters ({a}, {b}, {c}, {d}) violate b,d >= 0, a,c <= 0")]
    InadmissibleAbcd { a: f64, b: f64, c: f64, d: f64 },
    #[error("degenerate phase: g(r) = r, no dispersion to classify")]
    DegeneratePhase,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("depth floor violated: min(1 + eps*zeta) = {min_depth} < {floor}")]
    DepthFloor { min_depth: f64, floor: f64 },
    #[error("elliptic solve did not converge: residual {residual} after {iters} iterations")]
    EllipticNonConvergence { residual: f64, iters: usize },
    #[error("boundary contamination: {fraction:.3e} of field mass in boundary strip (limit {limit:.1e})")]
    BoundaryContamination { fraction: f64, limit: f64 },
    #[error("probe resolution insufficient: needs {required} modes, cap is {cap}")]
    ResolutionInsufficient { required: usize, cap: usize },
    #[error("kernel probe skipped: tail exponent alpha = {alpha} excluded by the decay hypotheses")]
    ProbeExcludedAlpha { alpha: i32 },
    #[error("rate fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rate fit requires positive values")]
    NonPositiveValues,
    #[error("rate fit regressor is degenerate (no spread)")]
    DegenerateSpread,
    #[error("unknown theorem tag `{0}`")]
    UnknownTheorem(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
