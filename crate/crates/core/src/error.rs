use thiserror::Error;

/// Everything that can go wrong while building or checking a solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Kummer parameter b = {0} is a non-positive integer")]
    InvalidKummerParameter(f64),

    #[error("Kummer argument z = {0} is outside the supported range [0, 100]")]
    KummerOutOfRange(f64),

    #[error("Kummer series for a = {a}, b = {b}, z = {z} did not converge within {terms} terms")]
    KummerNonConvergence { a: f64, b: f64, z: f64, terms: usize },

    #[error("oscillator state n = {0} exceeds the stability bound n <= 60")]
    OscillatorIndex(usize),

    #[error("x = {0} is outside the working range |x| <= 10")]
    OutOfRange(f64),

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("seed chain degenerates: u_{index} vanishes identically")]
    DegenerateChain { index: usize },

    #[error("real seed with eps1 = {eps1} >= 1/2 risks a singular transformation")]
    RiskySeed { eps1: f64 },

    #[error("eps1 = E_{j} with j <= k = {k} is not supported")]
    UnsupportedDegenerate { j: usize, k: usize },

    #[error("singular Wronskian at x = {x}")]
    SingularWronskian { x: f64 },

    #[error("state is annihilated by the Crum map")]
    AnnihilatedState,

    #[error("extremal state of family {family} vanishes identically")]
    ExtremalStateZero { family: u8 },

    #[error("degenerate: g identically zero")]
    DegenerateSolution,

    #[error("solution is singular: {masked} of {total} grid points are masked poles")]
    SingularSolution { masked: usize, total: usize },

    #[error("family must be 1, 2 or 3 (got {0})")]
    InvalidFamily(u8),

    #[error("ladder depth N = {0} exceeds 20")]
    LadderDepth(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: {n} points, need at least {min}")]
    GridTooCoarse { n: usize, min: usize },

    #[error("only {admissible} of {total} grid points are admissible")]
    TooFewAdmissiblePoints { admissible: usize, total: usize },

    #[error("grid function carries derivative data to order {available}, need {needed}")]
    MissingJets { needed: usize, available: usize },

    #[error("grid functions live on different grids")]
    GridMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;
