use thiserror::Error;

/// Errors raised by grid construction, norms, operators and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at cell {index}")]
    NonFiniteValue { index: usize, value: f64 },

    #[error("invalid tail: {0}")]
    InvalidTail(String),

    /// A power-law tail whose transformed integral diverges. The divergent
    /// term is `|c|^q * int_{from}^{inf} x^(-exponent) dx` with `exponent <= 1`.
    #[error("not integrable: |c|^q * x^(-{exponent}) on [{from}, inf) with |c| = {coeff}")]
    NotIntegrable {
        coeff: f64,
        exponent: f64,
        from: f64,
    },

    #[error("spacings {0} and {1} are not commensurable")]
    Incommensurable(f64, f64),

    #[error("incompatible tails: {0}")]
    IncompatibleTails(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("shift {requested} is not a multiple of spacing {spacing}; nearest aligned shift is {nearest}")]
    MisalignedShift {
        requested: f64,
        spacing: f64,
        nearest: f64,
    },

    #[error("operation not supported for power-law tails: {0}")]
    TailNotSupported(&'static str),

    #[error("unbounded set cannot be represented as an indicator")]
    UnboundedSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nonempty family required")]
    EmptyFamily,

    #[error("member {index}: {source}")]
    Member {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("member {index} has infinite L^p norm")]
    InfiniteLpNorm { index: usize },

    #[error("shift lattice is empty")]
    EmptyLattice,

    #[error("level condition fails: member {index} has |{{|f| > {level}}}| = {measure}, above the budget {bound}")]
    LevelConditionFailed {
        level: f64,
        index: usize,
        measure: f64,
        bound: f64,
    },

    #[error("net refers to member {index} but family has {len} members")]
    DanglingIndex { index: usize, len: usize },

    #[error("unbounded support: {0}")]
    UnboundedSupport(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn member(index: usize, err: Error) -> Error {
        Error::Member {
            index,
            source: Box::new(err),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
