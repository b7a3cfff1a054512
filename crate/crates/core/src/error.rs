use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small along {axis}: need at least {need} nodes, got {got}")]
    GridTooSmall {
        axis: &'static str,
        need: usize,
        got: usize,
    },

    #[error("invalid direction: {0}")]
    InvalidDirection(String),

    #[error("azimuthal derivative requested at a pole (theta = {theta})")]
    PoleEvaluation { theta: f64 },

    #[error("degree {degree} exceeds the exact-arithmetic bound {max}")]
    DegreeOutOfRange { degree: usize, max: usize },

    #[error("eigen index must be at least 1")]
    InvalidIndex,

    #[error("q and Q are singular at gamma = 3/2, lambda = 0")]
    SingularParameter,

    #[error("minimization did not reach tolerance {tol:e} within {iterations} iterations")]
    BudgetExhausted { tol: f64, iterations: usize },

    #[error("swirl quotient {value} is below the swirl bound {bound}")]
    InconsistentSwirlQuotient { value: f64, bound: f64 },

    #[error("grid t-range [{t_min}, {t_max}] does not cover the support [{lo}, {hi}]")]
    SupportNotCovered {
        lo: f64,
        hi: f64,
        t_min: f64,
        t_max: f64,
    },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("array shape {got:?} does not match grid shape {expected:?}")]
    ShapeMismatch {
        expected: [usize; 3],
        got: Vec<usize>,
    },

    #[error("swirl component depends on phi (variation {variation:e})")]
    PhiDependentSwirl { variation: f64 },

    #[error("field is not axisymmetric (variation {variation:e})")]
    NotAxisymmetric { variation: f64 },

    #[error("base field carries a swirl component")]
    BaseNotSwirlFree,

    #[error("swirl field carries radial or polar components")]
    SwirlNotPure,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("field is identically zero")]
    ZeroField,

    #[error("{fraction:e} of the spectral energy lies in the top quarter band below Nyquist")]
    Aliasing { fraction: f64 },

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("spec file line {line}: {msg}")]
    SpecParse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
