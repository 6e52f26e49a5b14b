use std::fmt;

/// Position of a token in its source text, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what}: needs {needed} but the configured cap is {cap}")]
    BudgetExceeded { what: String, needed: String, cap: String },

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("`{symbol}` expects {expected} argument(s), got {got}")]
    Arity { symbol: String, expected: usize, got: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("structures must have a nonempty domain")]
    EmptyDomain,

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),

    #[error("expected a sentence, but `{0}` occurs free")]
    OpenFormula(String),

    #[error("inconsistent observations: both {0} and its negation are recorded")]
    InconsistentObservations(String),

    #[error("not a subclass: {0}")]
    NotASubclass(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("closure did not stabilise within {0} iterations")]
    CapExceeded(usize),

    #[error("extension problem cannot be solved: {0}")]
    ExtensionUnsolvable(String),

    #[error("the chain is reducible: state {from} cannot reach state {to}")]
    ReducibleChain { from: usize, to: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid stochastic matrix: {0}")]
    InvalidMatrix(String),

    #[error("two observations share the time {0}")]
    DuplicateTime(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, needed: impl fmt::Display, cap: impl fmt::Display) -> Self {
        Error::BudgetExceeded { what: what.into(), needed: needed.to_string(), cap: cap.to_string() }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::CapExceeded(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
