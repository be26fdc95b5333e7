//! Kernel for intuitionistic natural deduction modulo a rewrite system, with
//! least and greatest fixed points and closed-world equality.
//!
//! Layers, bottom up: simply-typed terms ([`term`]), formulas and predicate
//! operators ([`formula`]), the rewriting congruence ([`rewrite`]),
//! first-order unification ([`unify`]), proof terms ([`proof`]), the
//! bidirectional checker ([`check`]), functoriality and proof reduction
//! ([`functor`], [`reduce`]) and the admissibility check for recursive
//! definitions ([`recdefs`]).

pub mod check;
pub mod derived;
pub mod error;
pub mod formula;
pub mod functor;
pub mod names;
pub mod print;
pub mod proof;
pub mod recdefs;
pub mod reduce;
pub mod rewrite;
pub mod term;
pub mod trust;
pub mod unify;

pub use derived::{derive_nat_rules, induction_conclusion, induction_goal, induction_template, nat, nat_operator, nat_type, NatRules};
pub use recdefs::{admit, check_condition_1, check_condition_2, collect_may_occur, Admission, Comparison, Measure, MayOccurAtom, OrderSpec, Report};
pub use reduce::{subst_proofs_typed, contract_at, is_normal, normalize, redex_rule, redexes, reduce_step, Outcome, Reducer, SubjectCheck, TraceStep, DEFAULT_REDUCTION_FUEL};
pub use functor::{functoriality, operator_functoriality, Sign, Template};
pub use check::{check_proof, check_subst_typing, is_inferable, Checker, Scope};
pub use error::{Error, Result};
pub use formula::{
    alpha_eq_formula, alpha_eq_operator, alpha_eq_predicate, check_antimonotonic, check_formula, check_monotonic,
    instantiate_operator, polarity_of, FixKind, Formula, Polarity, PredOperator, Predicate,
};
pub use names::{fresh_name, name, Fuel, Name};
pub use proof::{alpha_eq_proof, Branch, Context, EqElim, Iteration, ProofSubst, ProofTerm};
pub use rewrite::{RewriteRule, RewriteSystem, DEFAULT_REWRITE_FUEL};
pub use term::{
    alpha_eq, apply_term_subst, beta_normalize, infer_term_type, Signature, Term, TermCtx, TermSubst, TermType,
};
pub use trust::{TrustEntry, TrustLog};
pub use unify::{factor_subst, fo_unify, match_term, Completeness, CsuResult};
