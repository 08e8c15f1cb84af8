use thiserror::Error;

/// Errors shared across the crate.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// A series denominator factor `c + k·d` vanishes at the given index.
    #[error("series denominator c + {index}*d vanishes")]
    DenominatorPole { index: u32 },

    /// The certified tail bound did not drop below the tolerance within the
    /// configured term budget.
    #[error("series did not converge within {max_terms} terms")]
    NoConvergence { max_terms: u32 },

    /// Circle sample counts must be powers of two.
    #[error("sample count {n} is not a power of two")]
    BadSampleCount { n: usize },

    /// The extraction divisor `|P(..; rho^2)| * rho^|m|` fell below the
    /// representable floor.
    #[error("extraction divisor {divisor:e} for mode {m} is below the floor")]
    DivisorNearZero { m: i32, divisor: f64 },

    /// A requested mode index cannot be resolved by the given sample count.
    #[error("mode {m} aliases: need more than {n} circle samples")]
    AliasWarning { m: i32, n: usize },

    /// The two operator elements are not equivalent modulo the mode-`m`
    /// kernel line.
    #[error("operator elements are not equivalent modulo the mode-{m} kernel")]
    NotEquivalent { m: u32 },

    /// The Wronskian deviation failed to shrink when the integration step was
    /// halved, so the requested step is too coarse to trust.
    #[error("deviation {at_requested:e} did not shrink under step halving (got {at_halved:e})")]
    StepTooCoarse { at_requested: f64, at_halved: f64 },

    /// A constructor or configuration invariant was violated.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
