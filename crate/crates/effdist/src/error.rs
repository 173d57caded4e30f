use thiserror::Error;

/// Errors surfaced by the certified computation paths.
///
/// Every failure is a *typed* refusal: the library never silently degrades a
/// guarantee. An `Err` means the requested certificate could not be produced
/// within the configured limits, or the inputs violate a stated contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Internal working precision exceeded the configured budget.
    #[error("working precision exceeded the configured budget")]
    PrecisionOverflow,

    /// A bounded search (tightness, modulus doubling, ...) ran past its cap.
    #[error("search budget exhausted: {0}")]
    BudgetExhausted(&'static str),

    /// An improper integral was requested for an integrand without a usable
    /// envelope.
    #[error("integrand has no usable envelope for tail truncation")]
    UnsupportedEnvelope,

    /// Atom weights do not certify to total mass 1.
    #[error("atom weights do not certify to total mass 1")]
    InvalidWeights,

    /// A density whose certified integral excludes 1.
    #[error("density does not certify to total mass 1")]
    NotNormalized,

    /// The dyadic evaluation grid would exceed the configured cap.
    #[error("evaluation grid exceeds the configured cap ({0} points)")]
    GridBudgetExceeded(u64),

    /// An enclosure that must contain a real value has an imaginary part
    /// certifiably different from zero.
    #[error("imaginary part of a real quantity excludes zero")]
    ImaginaryResidual,

    /// A density enclosure is certifiably negative.
    #[error("density enclosure is certifiably negative")]
    NegativityViolation,

    /// The oracle does not carry the assertions the operation requires.
    #[error("invalid characteristic-function oracle: {0}")]
    InvalidChar(&'static str),

    /// Domain-type invariant violated at construction time.
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),

    /// A complex-logarithm enclosure touched the branch-cut guard region.
    #[error("complex logarithm enclosure touches the branch-cut guard region")]
    LogBranchCut,

    /// Malformed CLI or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
