use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 16")]
    GridSize(usize),
    #[error("half-length must be positive and finite, got {0}")]
    HalfLength(f64),
    #[error("expected {expected} samples, got {got}")]
    Length { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("band {k} lies outside the resolved window |k| <= {k_max}")]
    UnresolvedBand { k: i64, k_max: i64 },
    #[error("invalid modulation parameters p = {p}, s = {s}")]
    ModulationParams { p: f64, s: f64 },
    #[error("parameters outside the admissible range: {0}")]
    OutOfRange(String),
    #[error("kappa must be positive and finite, got {0}")]
    Kappa(f64),
    #[error("operator size {n_op} exceeds the configured cap {cap}")]
    OperatorTooLarge { n_op: usize, cap: usize },
    #[error("invalid operator layout: {0}")]
    OperatorLayout(String),
    #[error("trace series diverges at kappa = {kappa}: spectral radius {radius} >= 1")]
    Diverged { kappa: f64, radius: f64 },
    #[error("relative spectral mass {mass:e} beyond |xi| > {cutoff} exceeds {threshold:e}")]
    Aliasing { mass: f64, cutoff: f64, threshold: f64 },
    #[error("scale factor must be positive and finite, got {0}")]
    Scale(f64),
    #[error("invalid time stepping: {0}")]
    TimeStep(String),
    #[error("solution blew up; last good time t = {t}")]
    BlowUp { t: f64 },
    #[error("weight sequence covers |k| <= {have}, norm needs |k| <= {need}")]
    WeightsTooShort { have: i64, need: i64 },
    #[error("family is empty")]
    EmptyFamily,
    #[error("family not equicontinuous at this resolution: edge tail {tail:e} exceeds {floor:e}")]
    NotEquicontinuous { tail: f64, floor: f64 },
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
