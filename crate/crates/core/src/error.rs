use thiserror::Error;

/// Errors raised by the cocycle toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("transition matrix is not a square 0/1 matrix: {0}")]
    MalformedTransitionMatrix(String),
    #[error("symbol {0} has an all-zero row or column")]
    NonAdmissibleAlphabet(usize),
    #[error("transition matrix is not irreducible")]
    NotIrreducible,
    #[error("symbol {symbol} out of range for alphabet of size {size}")]
    SymbolOutOfRange { symbol: usize, size: usize },
    #[error("sequence is not admissible: transition {from} -> {to} at index {index}")]
    NotAdmissible { from: usize, to: usize, index: i64 },
    #[error("periodic word must be nonempty")]
    EmptyPeriod,
    #[error("bracket undefined: p_0 = {p0} but x_0 = {x0}")]
    BracketUndefined { p0: usize, x0: usize },
    #[error("orbit budget exceeded: more than {0} orbits")]
    BudgetExceeded(usize),
    #[error("matrix is not in SL(2,R): det = {0}")]
    NotSl2(f64),
    #[error("matrix is degenerate: |det| = {0}")]
    DegenerateMatrix(f64),
    #[error("window word {0:?} not present in cocycle table")]
    WordNotInTable(Vec<usize>),
    #[error("invalid cocycle specification: {0}")]
    InvalidSpec(String),
    #[error("cocycle is not fiber-bunched (margin {0})")]
    NotBunched(f64),
    #[error("points are not on a common stable set")]
    NotOnStableSet,
    #[error("points are not on a common unstable set")]
    NotOnUnstableSet,
    #[error("holonomy did not converge within {0} steps")]
    HolonomyDiverged(usize),
    #[error("cone certification requires a one-step cocycle (window [0,0])")]
    NotOneStep,
    #[error("singular values too close to separate directions (ratio {0})")]
    DegenerateSingularGap(f64),
    #[error("search set is empty")]
    EmptySearchSet,
    #[error("reconstruction residual {residual} exceeds allowance {allowance}")]
    IdentityResidualExceeded { residual: f64, allowance: f64 },
    #[error("cone undefined at k = {0} (requires k > k0)")]
    ConeUndefined(u64),
    #[error("point has no future return to V")]
    NoReturn,
    #[error("point is not in V (x_0 != 1)")]
    NotInV,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
