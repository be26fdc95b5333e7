//! Formulas, predicate operators and polarity analysis.

use std::collections::{BTreeMap, BTreeSet};

use crate::names::{fresh_name, name, Name};
use crate::term::{alpha_eq_in, check_term_type, Signature, Term, TermCtx, TermSubst, TermType};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Imp(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Forall(Name, TermType, Box<Formula>),
    Exists(Name, TermType, Box<Formula>),
    Eq(Term, Term),
    Mu(Box<PredOperator>, Vec<Term>),
    Nu(Box<PredOperator>, Vec<Term>),
    /// Application of a bound predicate variable.
    PVar(Name, Vec<Term>),
    /// Atomic formula `a t1 .. tn` headed by a predicate constant.
    Atom(Name, Vec<Term>),
}

/// `λp λx̄. body`, the argument of a fixed-point combinator. The type of `p`
/// is `γ̄ → o` where `γ̄` are the parameter types.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredOperator {
    pub pvar: Name,
    pub params: Vec<(Name, TermType)>,
    pub body: Formula,
}

/// A predicate `λx̄. body` of type `γ̄ → o`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    pub params: Vec<(Name, TermType)>,
    pub body: Formula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixKind {
    Mu,
    Nu,
}

impl Formula {
    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, ty: TermType, body: Formula) -> Self {
        Formula::Forall(name(x), ty, Box::new(body))
    }

    pub fn exists(x: &str, ty: TermType, body: Formula) -> Self {
        Formula::Exists(name(x), ty, Box::new(body))
    }

    pub fn eq(t: Term, u: Term) -> Self {
        Formula::Eq(t, u)
    }

    pub fn atom(a: &str, args: Vec<Term>) -> Self {
        Formula::Atom(name(a), args)
    }

    pub fn pvar(p: &str, args: Vec<Term>) -> Self {
        Formula::PVar(name(p), args)
    }

    pub fn mu(op: PredOperator, args: Vec<Term>) -> Self {
        Formula::Mu(Box::new(op), args)
    }

    pub fn nu(op: PredOperator, args: Vec<Term>) -> Self {
        Formula::Nu(Box::new(op), args)
    }

    pub fn fixpoint(kind: FixKind, op: PredOperator, args: Vec<Term>) -> Self {
        match kind {
            FixKind::Mu => Formula::mu(op, args),
            FixKind::Nu => Formula::nu(op, args),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot => 1,
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => 1 + b.size(),
            Formula::Eq(t, u) => 1 + t.size() + u.size(),
            Formula::Mu(op, args) | Formula::Nu(op, args) => {
                1 + op.body.size() + args.iter().map(Term::size).sum::<usize>()
            }
            Formula::PVar(_, args) | Formula::Atom(_, args) => {
                1 + args.iter().map(Term::size).sum::<usize>()
            }
        }
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_terms(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free_terms(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Top | Formula::Bot => {}
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free_terms(bound, out);
                b.collect_free_terms(bound, out);
            }
            Formula::Forall(x, _, b) | Formula::Exists(x, _, b) => {
                bound.push(x.clone());
                b.collect_free_terms(bound, out);
                bound.pop();
            }
            Formula::Eq(t, u) => {
                t.collect_free(bound, out);
                u.collect_free(bound, out);
            }
            Formula::Mu(op, args) | Formula::Nu(op, args) => {
                op.collect_free_terms(bound, out);
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Formula::PVar(_, args) | Formula::Atom(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
        }
    }

    pub fn free_pvars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_pvars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_pvars(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free_pvars(bound, out);
                b.collect_free_pvars(bound, out);
            }
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => b.collect_free_pvars(bound, out),
            Formula::Mu(op, _) | Formula::Nu(op, _) => {
                bound.push(op.pvar.clone());
                op.body.collect_free_pvars(bound, out);
                bound.pop();
            }
            Formula::PVar(p, _) => {
                if !bound.contains(p) {
                    out.insert(p.clone());
                }
            }
            _ => {}
        }
    }

    pub fn occurs_pvar(&self, p: &str) -> bool {
        self.free_pvars().contains(p)
    }

    /// Capture-avoiding substitution of term variables; embedded terms come
    /// out β-normal.
    pub fn subst_terms(&self, theta: &TermSubst) -> Formula {
        if theta.is_empty() {
            return self.clone();
        }
        self.subst_terms_in(theta.as_map(), &theta.range_vars())
    }

    fn subst_terms_in(&self, map: &BTreeMap<Name, Term>, range_fv: &BTreeSet<Name>) -> Formula {
        let apply = |t: &Term| {
            let raw = t.subst_raw(map, range_fv);
            crate::term::beta_normalize(&raw).unwrap_or(raw)
        };
        match self {
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Imp(a, b) => Formula::imp(a.subst_terms_in(map, range_fv), b.subst_terms_in(map, range_fv)),
            Formula::And(a, b) => Formula::and(a.subst_terms_in(map, range_fv), b.subst_terms_in(map, range_fv)),
            Formula::Or(a, b) => Formula::or(a.subst_terms_in(map, range_fv), b.subst_terms_in(map, range_fv)),
            Formula::Forall(x, ty, b) | Formula::Exists(x, ty, b) => {
                let (x2, body) = subst_under_binders(std::slice::from_ref(x), b, map, range_fv);
                let x2 = x2.into_iter().next().expect("one binder");
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(x2, ty.clone(), Box::new(body))
                } else {
                    Formula::Exists(x2, ty.clone(), Box::new(body))
                }
            }
            Formula::Eq(t, u) => Formula::Eq(apply(t), apply(u)),
            Formula::Mu(op, args) => Formula::Mu(Box::new(op.subst_terms_in(map, range_fv)), args.iter().map(apply).collect()),
            Formula::Nu(op, args) => Formula::Nu(Box::new(op.subst_terms_in(map, range_fv)), args.iter().map(apply).collect()),
            Formula::PVar(p, args) => Formula::PVar(p.clone(), args.iter().map(apply).collect()),
            Formula::Atom(a, args) => Formula::Atom(a.clone(), args.iter().map(apply).collect()),
        }
    }

    /// Replaces every free occurrence `p t̄` by `pred t̄`.
    pub fn subst_pvar(&self, p: &Name, pred: &Predicate) -> Formula {
        let fv_terms = pred.free_term_vars();
        let fv_preds = pred.body.free_pvars();
        self.subst_pvar_in(p, pred, &fv_terms, &fv_preds)
    }

    fn subst_pvar_in(
        &self,
        p: &Name,
        pred: &Predicate,
        fv_terms: &BTreeSet<Name>,
        fv_preds: &BTreeSet<Name>,
    ) -> Formula {
        let rec = |f: &Formula| f.subst_pvar_in(p, pred, fv_terms, fv_preds);
        match self {
            Formula::Top | Formula::Bot | Formula::Eq(..) | Formula::Atom(..) => self.clone(),
            Formula::Imp(a, b) => Formula::imp(rec(a), rec(b)),
            Formula::And(a, b) => Formula::and(rec(a), rec(b)),
            Formula::Or(a, b) => Formula::or(rec(a), rec(b)),
            Formula::Forall(x, ty, b) | Formula::Exists(x, ty, b) => {
                let (x2, b2) = if fv_terms.contains(x) && b.occurs_pvar(p) {
                    let taken = b.free_term_vars();
                    let x2 = fresh_name(x, |c| fv_terms.contains(c) || taken.contains(c));
                    (x2.clone(), b.subst_terms(&TermSubst::singleton(x.clone(), Term::Var(x2))))
                } else {
                    (x.clone(), (**b).clone())
                };
                let body = Box::new(rec(&b2));
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(x2, ty.clone(), body)
                } else {
                    Formula::Exists(x2, ty.clone(), body)
                }
            }
            Formula::Mu(op, args) | Formula::Nu(op, args) => {
                let op2 = if op.pvar == *p || !op.body.occurs_pvar(p) {
                    (**op).clone()
                } else {
                    let op = op.freshen_against(fv_terms, fv_preds);
                    PredOperator {
                        pvar: op.pvar.clone(),
                        params: op.params.clone(),
                        body: op.body.subst_pvar_in(p, pred, fv_terms, fv_preds),
                    }
                };
                let kind = if matches!(self, Formula::Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                Formula::fixpoint(kind, op2, args.clone())
            }
            Formula::PVar(q, args) => {
                if q == p {
                    pred.apply(args)
                } else {
                    self.clone()
                }
            }
        }
    }
}

/// Substitutes under a group of binders, renaming those that would capture.
fn subst_under_binders(
    binders: &[Name],
    body: &Formula,
    map: &BTreeMap<Name, Term>,
    range_fv: &BTreeSet<Name>,
) -> (Vec<Name>, Formula) {
    let mut inner = map.clone();
    for x in binders {
        inner.remove(x);
    }
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let body_fv = body.free_term_vars();
    if !body_fv.iter().any(|y| inner.contains_key(y)) {
        return (binders.to_vec(), body.clone());
    }
    let mut fv = range_of(&inner);
    let mut out = Vec::with_capacity(binders.len());
    let mut renames = Vec::new();
    for x in binders {
        if fv.contains(x) {
            let x2 = fresh_name(x, |c| {
                fv.contains(c) || body_fv.contains(c) || inner.contains_key(c) || binders.iter().any(|b| &**b == c)
            });
            renames.push((x.clone(), x2.clone()));
            fv.insert(x2.clone());
            out.push(x2);
        } else {
            out.push(x.clone());
        }
    }
    for (x, x2) in renames {
        inner.insert(x, Term::Var(x2));
    }
    let _ = range_fv;
    (out, body.subst_terms_in(&inner, &fv))
}

fn range_of(map: &BTreeMap<Name, Term>) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for t in map.values() {
        t.collect_free(&mut Vec::new(), &mut out);
    }
    out
}

impl PredOperator {
    pub fn new(pvar: &str, params: Vec<(Name, TermType)>, body: Formula) -> Self {
        PredOperator {
            pvar: name(pvar),
            params,
            body,
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_types(&self) -> Vec<TermType> {
        self.params.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free_terms(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free_terms(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let n = bound.len();
        bound.extend(self.params.iter().map(|(x, _)| x.clone()));
        self.body.collect_free_terms(bound, out);
        bound.truncate(n);
    }

    fn subst_terms_in(&self, map: &BTreeMap<Name, Term>, range_fv: &BTreeSet<Name>) -> PredOperator {
        let names: Vec<Name> = self.params.iter().map(|(x, _)| x.clone()).collect();
        let (names, body) = subst_under_binders(&names, &self.body, map, range_fv);
        PredOperator {
            pvar: self.pvar.clone(),
            params: names
                .into_iter()
                .zip(self.params.iter().map(|(_, t)| t.clone()))
                .collect(),
            body,
        }
    }

    pub fn subst_terms(&self, theta: &TermSubst) -> PredOperator {
        if theta.is_empty() {
            return self.clone();
        }
        self.subst_terms_in(theta.as_map(), &theta.range_vars())
    }

    /// Renames the bound predicate variable and parameters away from the
    /// given free names.
    fn freshen_against(&self, terms: &BTreeSet<Name>, preds: &BTreeSet<Name>) -> PredOperator {
        let mut op = self.clone();
        if preds.contains(&op.pvar) {
            let body_p = op.body.free_pvars();
            let q = fresh_name(&op.pvar, |c| preds.contains(c) || body_p.contains(c));
            let pred = Predicate::of_pvar(&q, &op.param_types());
            op.body = op.body.subst_pvar(&op.pvar.clone(), &pred);
            op.pvar = q;
        }
        if op.params.iter().any(|(x, _)| terms.contains(x)) {
            let body_fv = op.body.free_term_vars();
            let mut theta = TermSubst::new();
            let mut used: BTreeSet<Name> = BTreeSet::new();
            for (x, _) in op.params.iter_mut() {
                if terms.contains(x) {
                    let x2 = fresh_name(x, |c| terms.contains(c) || body_fv.contains(c) || used.contains(c));
                    theta.insert(x.clone(), Term::Var(x2.clone()));
                    *x = x2;
                }
                used.insert(x.clone());
            }
            op.body = op.body.subst_terms(&theta);
        }
        op
    }

    /// `λx̄. fix B x̄` for this operator.
    pub fn fixpoint_predicate(&self, kind: FixKind) -> Predicate {
        let params = self.params.clone();
        let args = params.iter().map(|(x, _)| Term::Var(x.clone())).collect();
        Predicate {
            params,
            body: Formula::fixpoint(kind, self.clone(), args),
        }
    }

    /// `B S t̄`.
    pub fn instantiate(&self, s: &Predicate, args: &[Term]) -> Result<Formula> {
        instantiate_operator(self, s, args)
    }

    /// The operator `λp. body[args/x̄]` with `p` still free.
    pub fn body_at(&self, args: &[Term]) -> Result<Formula> {
        if args.len() != self.arity() {
            return Err(Error::Arity {
                what: format!("operator over `{}`", self.pvar),
                expected: self.arity(),
                found: args.len(),
            });
        }
        let theta = TermSubst::from_pairs(
            self.params
                .iter()
                .zip(args)
                .map(|((x, _), t)| (x.clone(), t.clone())),
        );
        Ok(self.body.subst_terms(&theta))
    }
}

impl Predicate {
    pub fn new(params: Vec<(Name, TermType)>, body: Formula) -> Self {
        Predicate { params, body }
    }

    /// `λx̄. p x̄`.
    pub fn of_pvar(p: &str, types: &[TermType]) -> Self {
        let params: Vec<(Name, TermType)> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (name(&format!("x{}", i + 1)), t.clone()))
            .collect();
        let args = params.iter().map(|(x, _)| Term::Var(x.clone())).collect();
        Predicate {
            params,
            body: Formula::PVar(name(p), args),
        }
    }

    /// `λx̄. a x̄`.
    pub fn of_atom(a: &str, types: &[TermType]) -> Self {
        let params: Vec<(Name, TermType)> = types
            .iter()
            .enumerate()
            .map(|(i, t)| (name(&format!("x{}", i + 1)), t.clone()))
            .collect();
        let args = params.iter().map(|(x, _)| Term::Var(x.clone())).collect();
        Predicate {
            params,
            body: Formula::Atom(name(a), args),
        }
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn param_types(&self) -> Vec<TermType> {
        self.params.iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut bound: Vec<Name> = self.params.iter().map(|(x, _)| x.clone()).collect();
        self.body.collect_free_terms(&mut bound, &mut out);
        out
    }

    /// `P t̄` with the parameters instantiated simultaneously.
    pub fn apply(&self, args: &[Term]) -> Formula {
        debug_assert_eq!(args.len(), self.params.len(), "predicate arity");
        let theta = TermSubst::from_pairs(
            self.params
                .iter()
                .zip(args)
                .map(|((x, _), t)| (x.clone(), t.clone())),
        );
        self.body.subst_terms(&theta)
    }

    pub fn subst_terms(&self, theta: &TermSubst) -> Predicate {
        if theta.is_empty() {
            return self.clone();
        }
        let names: Vec<Name> = self.params.iter().map(|(x, _)| x.clone()).collect();
        let (names, body) = subst_under_binders(&names, &self.body, theta.as_map(), &theta.range_vars());
        Predicate {
            params: names
                .into_iter()
                .zip(self.params.iter().map(|(_, t)| t.clone()))
                .collect(),
            body,
        }
    }
}

/// `B S t̄`: the body of `B` with `p := S` and `x̄ := t̄`.
pub fn instantiate_operator(op: &PredOperator, s: &Predicate, args: &[Term]) -> Result<Formula> {
    if s.param_types() != op.param_types() {
        return Err(Error::TypeMismatch {
            context: format!("instance of operator over `{}`", op.pvar),
            expected: format!("{:?}", op.param_types()),
            found: format!("{:?}", s.param_types()),
        });
    }
    let body = op.body_at(args)?;
    Ok(body.subst_pvar(&op.pvar, s))
}

/// Occurrence sign of a predicate variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Absent,
    PositiveOnly,
    NegativeOnly,
    Both,
}

impl Polarity {
    pub fn join(self, other: Polarity) -> Polarity {
        use Polarity::*;
        match (self, other) {
            (Absent, x) | (x, Absent) => x,
            (a, b) if a == b => a,
            _ => Both,
        }
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::PositiveOnly => Polarity::NegativeOnly,
            Polarity::NegativeOnly => Polarity::PositiveOnly,
            x => x,
        }
    }

    /// Lattice order: `Absent ⊑ PositiveOnly, NegativeOnly ⊑ Both`.
    pub fn leq(self, other: Polarity) -> bool {
        self.join(other) == other
    }
}

/// Polarity of the free occurrences of `p` in `f`; implications flip the
/// left side, every other position (including nested fixed-point bodies)
/// keeps the current sign.
pub fn polarity_of(p: &str, f: &Formula) -> Polarity {
    polarity_in(p, f, true)
}

fn polarity_in(p: &str, f: &Formula, positive: bool) -> Polarity {
    match f {
        Formula::Imp(a, b) => polarity_in(p, a, !positive).join(polarity_in(p, b, positive)),
        Formula::And(a, b) | Formula::Or(a, b) => polarity_in(p, a, positive).join(polarity_in(p, b, positive)),
        Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => polarity_in(p, b, positive),
        Formula::Mu(op, _) | Formula::Nu(op, _) => {
            if &*op.pvar == p {
                Polarity::Absent
            } else {
                polarity_in(p, &op.body, positive)
            }
        }
        Formula::PVar(q, _) if &**q == p => {
            if positive {
                Polarity::PositiveOnly
            } else {
                Polarity::NegativeOnly
            }
        }
        _ => Polarity::Absent,
    }
}

/// Path to the first occurrence of `p` with the wrong sign, if any.
fn offending_occurrence(p: &str, f: &Formula, positive: bool, want_positive: bool, path: &mut Vec<&'static str>) -> Option<String> {
    match f {
        Formula::Imp(a, b) => {
            path.push("imp.left");
            if let Some(r) = offending_occurrence(p, a, !positive, want_positive, path) {
                return Some(r);
            }
            path.pop();
            path.push("imp.right");
            let r = offending_occurrence(p, b, positive, want_positive, path);
            path.pop();
            r
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let tag = if matches!(f, Formula::And(..)) { "and" } else { "or" };
            path.push(if tag == "and" { "and.left" } else { "or.left" });
            if let Some(r) = offending_occurrence(p, a, positive, want_positive, path) {
                return Some(r);
            }
            path.pop();
            path.push(if tag == "and" { "and.right" } else { "or.right" });
            let r = offending_occurrence(p, b, positive, want_positive, path);
            path.pop();
            r
        }
        Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => {
            path.push("binder");
            let r = offending_occurrence(p, b, positive, want_positive, path);
            path.pop();
            r
        }
        Formula::Mu(op, _) | Formula::Nu(op, _) if &*op.pvar != p => {
            path.push("fixpoint.body");
            let r = offending_occurrence(p, &op.body, positive, want_positive, path);
            path.pop();
            r
        }
        Formula::PVar(q, _) if &**q == p && positive != want_positive => {
            Some(if path.is_empty() { "body".to_string() } else { format!("body/{}", path.join("/")) })
        }
        _ => None,
    }
}

/// Accepts operators whose bound variable occurs only positively (or not at all).
pub fn check_monotonic(op: &PredOperator) -> Result<()> {
    check_polarity(op, true)
}

/// Accepts operators whose bound variable occurs only negatively (or not at all).
pub fn check_antimonotonic(op: &PredOperator) -> Result<()> {
    check_polarity(op, false)
}

fn check_polarity(op: &PredOperator, positive: bool) -> Result<()> {
    match offending_occurrence(&op.pvar, &op.body, true, positive, &mut Vec::new()) {
        None => Ok(()),
        Some(path) => Err(Error::NonMonotonic {
            var: op.pvar.clone(),
            path,
        }),
    }
}

/// Predicate-variable typing: `p ↦ γ̄`.
pub type PredCtx = Vec<(Name, Vec<TermType>)>;

/// Well-formedness: sorts, homogeneous equalities, bound predicate
/// variables, monotonic fixed-point operators.
pub fn check_formula(sig: &Signature, ctx: &TermCtx, f: &Formula) -> Result<()> {
    check_formula_in(sig, &mut ctx.clone(), &mut Vec::new(), f)
}

pub fn check_formula_in(sig: &Signature, ctx: &mut TermCtx, pctx: &mut PredCtx, f: &Formula) -> Result<()> {
    match f {
        Formula::Top | Formula::Bot => Ok(()),
        Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            check_formula_in(sig, ctx, pctx, a)?;
            check_formula_in(sig, ctx, pctx, b)
        }
        Formula::Forall(x, ty, b) | Formula::Exists(x, ty, b) => {
            sig.check_term_type(ty)?;
            ctx.push(x.clone(), ty.clone());
            let r = check_formula_in(sig, ctx, pctx, b);
            ctx.pop();
            r
        }
        Formula::Eq(t, u) => {
            let tt = crate::term::infer_term_type(sig, ctx, t)?;
            let tu = crate::term::infer_term_type(sig, ctx, u)?;
            if tt != tu {
                return Err(Error::TypeMismatch {
                    context: format!("equality {t} = {u}"),
                    expected: tt.to_string(),
                    found: tu.to_string(),
                });
            }
            if !tt.is_term_type() {
                return Err(Error::ill_formed("equality", format!("{tt} is not a term type")));
            }
            Ok(())
        }
        Formula::Atom(a, args) => {
            let tys = sig.pred_args(a).ok_or_else(|| Error::Unbound(a.clone()))?.to_vec();
            check_args(sig, ctx, &format!("predicate `{a}`"), &tys, args)
        }
        Formula::PVar(p, args) => {
            let tys = pctx
                .iter()
                .rev()
                .find(|(q, _)| q == p)
                .map(|(_, t)| t.clone())
                .ok_or_else(|| Error::StrayPredicateVariable(p.clone()))?;
            check_args(sig, ctx, &format!("predicate variable `{p}`"), &tys, args)
        }
        Formula::Mu(op, args) | Formula::Nu(op, args) => {
            check_operator_in(sig, ctx, pctx, op)?;
            check_args(sig, ctx, "fixed point", &op.param_types(), args)
        }
    }
}

/// Well-formedness of an operator including monotonicity.
pub fn check_operator_in(sig: &Signature, ctx: &mut TermCtx, pctx: &mut PredCtx, op: &PredOperator) -> Result<()> {
    for (_, ty) in &op.params {
        sig.check_term_type(ty)?;
    }
    let n = ctx.len();
    for (x, ty) in &op.params {
        ctx.push(x.clone(), ty.clone());
    }
    pctx.push((op.pvar.clone(), op.param_types()));
    let r = check_formula_in(sig, ctx, pctx, &op.body);
    pctx.pop();
    while ctx.len() > n {
        ctx.pop();
    }
    r?;
    check_monotonic(op)
}

/// Well-formedness of a predicate `λx̄. body`.
pub fn check_predicate(sig: &Signature, ctx: &TermCtx, pred: &Predicate) -> Result<()> {
    let mut c = ctx.clone();
    for (x, ty) in &pred.params {
        sig.check_term_type(ty)?;
        c.push(x.clone(), ty.clone());
    }
    check_formula_in(sig, &mut c, &mut Vec::new(), &pred.body)
}

fn check_args(sig: &Signature, ctx: &TermCtx, what: &str, tys: &[TermType], args: &[Term]) -> Result<()> {
    if tys.len() != args.len() {
        return Err(Error::Arity {
            what: what.to_string(),
            expected: tys.len(),
            found: args.len(),
        });
    }
    for (t, ty) in args.iter().zip(tys) {
        check_term_type(sig, ctx, t, ty)?;
    }
    Ok(())
}

/// Equality up to renaming of bound term and predicate variables.
pub fn alpha_eq_formula(a: &Formula, b: &Formula) -> bool {
    alpha_formula(a, b, &mut Vec::new(), &mut Vec::new())
}

pub fn alpha_eq_predicate(a: &Predicate, b: &Predicate) -> bool {
    if a.param_types() != b.param_types() {
        return false;
    }
    let mut env: Vec<(Name, Name)> = a
        .params
        .iter()
        .zip(&b.params)
        .map(|((x, _), (y, _))| (x.clone(), y.clone()))
        .collect();
    alpha_formula(&a.body, &b.body, &mut env, &mut Vec::new())
}

pub(crate) fn alpha_formula(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>, penv: &mut Vec<(Name, Name)>) -> bool {
    use Formula::*;
    let terms = |xs: &[Term], ys: &[Term], env: &mut Vec<(Name, Name)>| {
        xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, env))
    };
    match (a, b) {
        (Top, Top) | (Bot, Bot) => true,
        (Imp(a1, a2), Imp(b1, b2)) | (And(a1, a2), And(b1, b2)) | (Or(a1, a2), Or(b1, b2)) => {
            alpha_formula(a1, b1, env, penv) && alpha_formula(a2, b2, env, penv)
        }
        (Forall(x, tx, a1), Forall(y, ty, b1)) | (Exists(x, tx, a1), Exists(y, ty, b1)) => {
            if tx != ty {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let r = alpha_formula(a1, b1, env, penv);
            env.pop();
            r
        }
        (Eq(t1, u1), Eq(t2, u2)) => alpha_eq_in(t1, t2, env) && alpha_eq_in(u1, u2, env),
        (Mu(o1, a1), Mu(o2, a2)) | (Nu(o1, a1), Nu(o2, a2)) => {
            alpha_operator(o1, o2, env, penv) && terms(a1, a2, env)
        }
        (PVar(p, a1), PVar(q, a2)) => {
            let lp = penv.iter().rposition(|(x, _)| x == p);
            let lq = penv.iter().rposition(|(_, y)| y == q);
            let same = match (lp, lq) {
                (None, None) => p == q,
                (Some(i), Some(j)) => i == j,
                _ => false,
            };
            same && terms(a1, a2, env)
        }
        (Atom(p, a1), Atom(q, a2)) => p == q && terms(a1, a2, env),
        _ => false,
    }
}

fn alpha_operator(a: &PredOperator, b: &PredOperator, env: &mut Vec<(Name, Name)>, penv: &mut Vec<(Name, Name)>) -> bool {
    if a.param_types() != b.param_types() {
        return false;
    }
    let n = env.len();
    env.extend(a.params.iter().zip(&b.params).map(|((x, _), (y, _))| (x.clone(), y.clone())));
    penv.push((a.pvar.clone(), b.pvar.clone()));
    let r = alpha_formula(&a.body, &b.body, env, penv);
    penv.pop();
    env.truncate(n);
    r
}

pub fn alpha_eq_operator(a: &PredOperator, b: &PredOperator) -> bool {
    alpha_operator(a, b, &mut Vec::new(), &mut Vec::new())
}
