use thiserror::Error;

use crate::names::Name;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything the kernel can reject.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unbound name `{0}`")]
    Unbound(Name),

    #[error("type mismatch in {context}: expected {expected}, found {found}")]
    TypeMismatch {
        context: String,
        expected: String,
        found: String,
    },

    #[error("`{0}` is not a function")]
    NotAFunction(String),

    #[error("ill-formed {what}: {reason}")]
    IllFormed { what: &'static str, reason: String },

    #[error("non-monotonic operator: `{var}` occurs negatively at {path}")]
    NonMonotonic { var: Name, path: String },

    #[error("stray predicate variable `{0}`")]
    StrayPredicateVariable(Name),

    #[error("arity mismatch for {what}: expected {expected}, found {found}")]
    Arity {
        what: String,
        expected: usize,
        found: usize,
    },

    #[error("fuel exhausted after {steps} steps during {during}")]
    FuelExhausted { steps: u64, during: &'static str },

    #[error("invalid rewrite rule `{rule}`: {reason}")]
    InvalidRule { rule: String, reason: String },

    #[error("no complete set of unifiers can be computed for {lhs} = {rhs}; an explicit one is required")]
    DemandAnnotation { lhs: String, rhs: String },

    #[error("check failed at {path} ({rule}): {detail}")]
    Check {
        path: String,
        rule: &'static str,
        detail: String,
    },

    #[error("stuck equality redex at {path}: no branch factors {theta}")]
    StuckEqualityRedex { path: String, theta: String },

    #[error("recursive definition rejected: {0}")]
    Rejected(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::FuelExhausted { .. })
    }

    pub(crate) fn ill_formed(what: &'static str, reason: impl Into<String>) -> Self {
        Error::IllFormed {
            what,
            reason: reason.into(),
        }
    }
}
