//! Admissibility of recursive definitions: coherence of overlapping rules
//! and well-founded decrease of every atom that may occur in a body.

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::Formula;
use crate::names::{fresh_name, Name};
use crate::rewrite::{validate_rule, AtomRule, RewriteRule, RewriteSystem};
use crate::term::{alpha_eq, Signature, Term, TermSubst};
use crate::trust::{TrustEntry, TrustLog};
use crate::unify::{in_constructor_fragment, robinson};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    /// The argument must shrink to a proper subterm or stay equal.
    Strict,
    /// The argument may not grow; it never witnesses a decrease.
    NonStrict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measure {
    /// One-based argument position.
    pub pos: usize,
    pub cmp: Comparison,
}

/// A lexicographic subterm order over argument positions. Predicates earlier
/// in `precedence` are smaller once every measure ties.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderSpec {
    pub measures: Vec<Measure>,
    pub precedence: Vec<Name>,
}

impl OrderSpec {
    pub fn lex(measures: impl IntoIterator<Item = (usize, Comparison)>) -> Self {
        OrderSpec {
            measures: measures.into_iter().map(|(pos, cmp)| Measure { pos, cmp }).collect(),
            precedence: Vec::new(),
        }
    }

    fn rank(&self, a: &Name) -> Option<usize> {
        self.precedence.iter().position(|p| p == a)
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("lex(")?;
        for (i, m) in self.measures.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let kw = match m.cmp {
                Comparison::Strict => "subterm",
                Comparison::NonStrict => "subterm_eq",
            };
            write!(f, "{kw} {}", m.pos)?;
        }
        f.write_str(")")
    }
}

/// An atom of a defined predicate occurring in a rule body. Variables in
/// `arbitrary` are bound by a quantifier or fixed point inside the body, so
/// the atom may occur with any term in their place.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MayOccurAtom {
    pub pred: Name,
    pub args: Vec<Term>,
    pub arbitrary: BTreeSet<Name>,
}

impl MayOccurAtom {
    pub fn is_arbitrary(&self, i: usize) -> bool {
        self.args[i].free_vars().iter().any(|x| self.arbitrary.contains(x))
    }
}

impl fmt::Display for MayOccurAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        for (i, a) in self.args.iter().enumerate() {
            if self.is_arbitrary(i) {
                f.write_str(" *")?;
            } else {
                write!(f, " {}", crate::print::AtomicTerm(a))?;
            }
        }
        Ok(())
    }
}

/// Every occurrence of a predicate in `defined` inside `body`.
pub fn collect_may_occur(body: &Formula, defined: &BTreeSet<Name>) -> Vec<MayOccurAtom> {
    fn go(f: &Formula, defined: &BTreeSet<Name>, bound: &mut Vec<Name>, out: &mut Vec<MayOccurAtom>) {
        use Formula::*;
        match f {
            Top | Bot | Eq(..) | PVar(..) => {}
            Atom(a, args) => {
                if defined.contains(a) {
                    let fv: BTreeSet<Name> = args.iter().flat_map(|t| t.free_vars()).collect();
                    out.push(MayOccurAtom {
                        pred: a.clone(),
                        args: args.clone(),
                        arbitrary: bound.iter().filter(|x| fv.contains(*x)).cloned().collect(),
                    });
                }
            }
            Imp(a, b) | And(a, b) | Or(a, b) => {
                go(a, defined, bound, out);
                go(b, defined, bound, out);
            }
            Forall(x, _, b) | Exists(x, _, b) => {
                bound.push(x.clone());
                go(b, defined, bound, out);
                bound.pop();
            }
            Mu(op, _) | Nu(op, _) => {
                let n = bound.len();
                bound.extend(op.params.iter().map(|(x, _)| x.clone()));
                go(&op.body, defined, bound, out);
                bound.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    go(body, defined, &mut Vec::new(), &mut out);
    out
}

/// Findings of one condition.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.warnings.extend(other.warnings);
    }
}

fn show(r: &AtomRule) -> String {
    RewriteRule::Atom(r.clone()).to_string()
}

/// Renames the variables of `r` away from `avoid`.
fn rename_apart(r: &AtomRule, avoid: &BTreeSet<Name>) -> AtomRule {
    let mut theta = TermSubst::new();
    let mut taken = avoid.clone();
    let mut vars = Vec::with_capacity(r.vars.len());
    for (x, ty) in &r.vars {
        let x2 = fresh_name(x, |c| taken.contains(c));
        taken.insert(x2.clone());
        theta.insert(x.clone(), Term::Var(x2.clone()));
        vars.push((x2, ty.clone()));
    }
    AtomRule {
        vars,
        pred: r.pred.clone(),
        args: r.args.iter().map(|a| theta.apply(a)).collect(),
        rhs: r.rhs.subst_terms(&theta),
    }
}

fn tuple(args: &[Term]) -> Term {
    Term::apps(Term::cnst("(tuple)"), args.iter().cloned())
}

/// Overlapping left sides must have congruent bodies under the unifier.
/// Every ordered pair is tried, including each rule against a renamed copy
/// of itself. Left sides outside the constructor fragment only warn.
pub fn check_condition_1(rs: &RewriteSystem, rules: &[AtomRule]) -> Result<Report> {
    let mut rep = Report::default();
    for r in rules {
        if !r.args.iter().all(|a| in_constructor_fragment(rs, a)) {
            rep.warnings.push(format!(
                "non-constructor left side in `{}`: coherence is assumed, not checked",
                show(r)
            ));
        }
    }
    for (i, r1) in rules.iter().enumerate() {
        for (j, r2) in rules.iter().enumerate() {
            if r1.pred != r2.pred || r1.args.len() != r2.args.len() {
                continue;
            }
            let avoid: BTreeSet<Name> = r1.vars.iter().map(|(x, _)| x.clone()).collect();
            let r2 = rename_apart(r2, &avoid);
            let Some(mgu) = robinson(tuple(&r1.args), tuple(&r2.args)) else {
                continue;
            };
            let b1 = r1.rhs.subst_terms(&mgu);
            let b2 = r2.rhs.subst_terms(&mgu);
            if !rs.congruent_formulas(&b1, &b2)? {
                rep.violations.push(format!(
                    "rules {} `{}` and {} `{}` overlap under {mgu} but {} is not congruent to {}",
                    i + 1,
                    show(r1),
                    j + 1,
                    show(rules.get(j).expect("rule")),
                    rs.normalize_formula(&b1)?,
                    rs.normalize_formula(&b2)?,
                ));
            }
        }
    }
    Ok(rep)
}

fn proper_subterm(small: &Term, big: &Term) -> bool {
    let (_, args) = big.spine();
    args.iter().any(|a| alpha_eq(small, a) || proper_subterm(small, a))
}

/// Why `occ` is not below `head` in `order`, if it is not.
fn decrease(rs: &RewriteSystem, order: &OrderSpec, head: &AtomRule, occ: &MayOccurAtom) -> Result<Option<String>> {
    for m in &order.measures {
        let k = m.pos - 1;
        if occ.is_arbitrary(k) {
            return Ok(Some(format!(
                "argument {} of `{occ}` is quantified and no earlier measure decreased",
                m.pos
            )));
        }
        let o = rs.normalize_term(&occ.args[k])?;
        let h = rs.normalize_term(&head.args[k])?;
        let strict = proper_subterm(&o, &h);
        if strict && m.cmp == Comparison::Strict {
            return Ok(None);
        }
        if !strict && !alpha_eq(&o, &h) {
            return Ok(Some(format!("measure {}: {o} is neither {h} nor a subterm of it", m.pos)));
        }
    }
    match (order.rank(&occ.pred), order.rank(&head.pred)) {
        (Some(a), Some(b)) if a < b => Ok(None),
        _ => Ok(Some(format!("no measure strictly decreases from `{}` to `{occ}`", head.lhs()))),
    }
}

/// Positions of the order must exist for every predicate of the family.
fn check_order(rules: &[AtomRule], order: &OrderSpec) -> Vec<String> {
    let mut out = Vec::new();
    if order.measures.is_empty() && order.precedence.is_empty() {
        out.push("empty order".to_string());
    }
    for r in rules {
        for m in &order.measures {
            if m.pos == 0 || m.pos > r.args.len() {
                out.push(format!("measure position {} is out of range for `{}` of arity {}", m.pos, r.pred, r.args.len()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every atom of the family that may occur in a body is strictly below the
/// rule's left side, for every instantiation of the rule.
pub fn check_condition_2(rs: &RewriteSystem, rules: &[AtomRule], order: &OrderSpec) -> Result<Report> {
    let mut rep = Report {
        violations: check_order(rules, order),
        warnings: Vec::new(),
    };
    if !rep.is_ok() {
        return Ok(rep);
    }
    let defined: BTreeSet<Name> = rules.iter().map(|r| r.pred.clone()).collect();
    for (i, r) in rules.iter().enumerate() {
        for occ in collect_may_occur(&r.rhs, &defined) {
            if let Some(why) = decrease(rs, order, r, &occ)? {
                rep.violations.push(format!("rule {} `{}`: {why}", i + 1, show(r)));
            }
        }
    }
    Ok(rep)
}

/// Result of a successful admission.
#[derive(Debug, Clone, Default)]
pub struct Admission {
    pub preds: Vec<Name>,
    pub warnings: Vec<String>,
    pub trust: TrustLog,
}

/// Validates `rules`, runs both conditions and, on success, adds the rules
/// to `rs` as one recursive group.
pub fn admit(sig: &Signature, rs: &mut RewriteSystem, rules: Vec<AtomRule>, order: &OrderSpec) -> Result<Admission> {
    let mut rep = Report::default();
    let mut preds: Vec<Name> = Vec::new();
    for r in &rules {
        if let Err(e) = validate_rule(sig, &RewriteRule::Atom(r.clone())) {
            rep.violations.push(e.to_string());
        }
        if !preds.contains(&r.pred) {
            if rs.is_defined_pred(&r.pred) {
                rep.violations.push(format!("`{}` already has rewrite rules", r.pred));
            }
            preds.push(r.pred.clone());
        }
    }
    if rep.is_ok() {
        rep.merge(check_condition_1(rs, &rules)?);
        rep.merge(check_condition_2(rs, &rules, order)?);
    }
    if !rep.is_ok() {
        return Err(Error::Rejected(rep.violations.join("; ")));
    }
    let mut trust = TrustLog::new();
    trust.record(TrustEntry::AdmittedRecursive {
        preds: preds.iter().map(|p| p.to_string()).collect(),
    });
    for r in &rules {
        if !r.args.iter().all(|a| in_constructor_fragment(rs, a)) {
            trust.record(TrustEntry::NonConstructorCoherence {
                pred: r.pred.to_string(),
                rule: show(r),
            });
        }
    }
    for r in rules {
        rs.add_rule(RewriteRule::Atom(r));
    }
    rs.groups.push(preds.clone());
    Ok(Admission {
        preds,
        warnings: rep.warnings,
        trust,
    })
}
