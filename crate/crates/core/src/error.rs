use std::fmt;

use thiserror::Error;

use crate::term::Var;

/// Location-tagged parse failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("unknown theory `{0}`")]
    UnknownTheory(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{pred}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        pred: String,
        expected: usize,
        found: usize,
    },
    #[error("clause is not Horn: {0}")]
    NotHorn(String),
    #[error("the empty clause has no maximal literal")]
    EmptyFirstOrderPart,
    #[error("argument of `{pred}` must stay a variable, but `{var}` is bound to a number")]
    NonVariableArgument { pred: String, var: Var },
    #[error("variable `{0}` is not assigned")]
    UnassignedVariable(Var),
    #[error("variable `{0}` has a non-integer value under LIA")]
    NonIntegerValue(Var),
    #[error("operation requires theory {required}, problem uses {found}")]
    TheoryMismatch {
        required: &'static str,
        found: &'static str,
    },
    #[error("tuple lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("delta precondition violated: {0}")]
    DeltaPrecondition(String),
    #[error("clause set contains a refutation (clause {0})")]
    ContainsRefutation(String),
    #[error("point {0} is not in the model")]
    NotInModel(String),
    #[error("invalid precedence: {0}")]
    InvalidPrecedence(String),
    #[error("invalid window [{0}, {1}]")]
    InvalidWindow(i64, i64),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
