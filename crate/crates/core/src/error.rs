use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(&'static str),

    #[error("row {row} of the transition matrix sums to {sum}, expected 1")]
    NonStochastic { row: usize, sum: f64 },

    #[error("transition entry ({row}, {col}) = {value} must lie strictly inside (0, 1)")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("stationary distribution solve failed (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },

    #[error("singular linear system (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("epsilon[{index}] = {value} must lie strictly inside (0, 1)")]
    EpsilonOutOfRange { index: usize, value: f64 },

    #[error("zero-symbol matrix E0 is not invertible (pivot {pivot:e})")]
    SingularE0 { pivot: f64 },

    #[error("symbol {symbol} at position {position} is outside the alphabet 0..{q}")]
    SymbolOutOfRange { position: usize, symbol: usize, q: usize },

    #[error("observation sequence is empty")]
    EmptySequence,

    #[error("belief update has zero normalizer")]
    ZeroNormalizer,

    #[error("fixed-point iteration did not converge in {iterations} steps")]
    NoConvergence { iterations: usize },

    #[error("contraction factor gamma = {gamma} is not below 1; no certified error bound")]
    GammaNotContracting { gamma: f64 },

    #[error("least-squares normal equations are rank deficient (pivot {pivot:e})")]
    RankDeficient { pivot: f64 },

    #[error("enumeration of {leaves:e} words of length {n} exceeds the guard")]
    TooLarge { n: usize, leaves: f64 },

    #[error("observation sequence has zero likelihood (first impossible symbol at position {position})")]
    ZeroLikelihood { position: usize },

    #[error("parameter {name} = {value} out of range")]
    ParameterOutOfRange { name: &'static str, value: f64 },
}
