use alloc::string::String;

/// Errors raised by the computations in this crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid field specification: {0}")]
    InvalidField(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by an element that is zero to precision")]
    DivisionByZero,
    #[error("valuation {valuation} outside the precision window (precision {precision})")]
    PrecisionWindow { valuation: i64, precision: i32 },
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular to precision")]
    Singular,
    #[error("generators do not span a full-rank lattice")]
    RankDeficient,
    #[error("lattice containment violated")]
    NotContained,
    #[error("quotient has more than {limit} cosets")]
    QuotientTooLarge { limit: u64 },
    #[error("{0} is not a slope of the Newton polygon")]
    NotASlope(String),
    #[error("polygon has several fractional slopes ({0}); reduce through a matrix power first")]
    FractionalSlope(String),
    #[error("constant coefficient is zero to precision")]
    ZeroConstantTerm,
    #[error("Hensel lifting did not converge: {0}")]
    HenselNonConvergence(String),
    #[error("residue factors are not coprime")]
    NotCoprime,
    #[error("lattice saturation exceeded its budget on component {component}")]
    SaturationBudget { component: usize },
    #[error("norm is not adapted: {0}")]
    NotAdapted(String),
    #[error("formula and oracle disagree: {0}")]
    OracleDisagreement(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("matrix does not preserve the bracket: {0}")]
    NotBracketPreserving(String),
    #[error("element lies outside the ball of level {level}")]
    OutsideBall { level: i32 },
    #[error("ball is not a subgroup: {0}")]
    NotSubgroup(String),
}

impl Error {
    /// True for failures caused by running out of working precision rather
    /// than by bad input or a mathematical disagreement.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionWindow { .. }
                | Error::PrecisionExhausted(_)
                | Error::HenselNonConvergence(_)
                | Error::SaturationBudget { .. }
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
