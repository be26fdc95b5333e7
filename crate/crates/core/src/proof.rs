//! Proof terms, contexts, and term-/proof-level substitution.
//!
//! Substitutions never enter the branches of an equality elimination: a term
//! substitution composes onto the stored `θ`, a proof substitution onto the
//! stored `σ`, and both act on the major premise only.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{alpha_eq_formula, alpha_eq_operator, alpha_eq_predicate, alpha_formula, Formula, PredOperator, Predicate};
use crate::names::{fresh_name, Name};
use crate::term::{alpha_eq_in, Term, TermSubst, TermType};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    Var(Name),
    /// `⟨⟩`
    Unit,
    Abort(Box<ProofTerm>),
    /// `λα.π`; the optional annotation is the type of `α`.
    Lam(Name, Option<Formula>, Box<ProofTerm>),
    App(Box<ProofTerm>, Box<ProofTerm>),
    Pair(Box<ProofTerm>, Box<ProofTerm>),
    Fst(Box<ProofTerm>),
    Snd(Box<ProofTerm>),
    Inl(Box<ProofTerm>),
    Inr(Box<ProofTerm>),
    /// `elimv(π, α.π1, β.π2)`
    Case(Box<ProofTerm>, Name, Box<ProofTerm>, Name, Box<ProofTerm>),
    /// `λx.π`
    LamX(Name, Box<ProofTerm>),
    /// `π t`
    TApp(Box<ProofTerm>, Term),
    /// `⟨t, π⟩`
    Wit(Term, Box<ProofTerm>),
    /// `elimex(π, x.α.π')`
    Dest(Box<ProofTerm>, Name, Name, Box<ProofTerm>),
    Refl(Term),
    EqCase(Box<EqElim>),
    /// `μ(B, t̄, π)`
    Fold(Box<PredOperator>, Vec<Term>, Box<ProofTerm>),
    /// `δ_μ(π, x̄.α.π')` with its invariant.
    Iter(Box<Iteration>),
    /// `ν(π, x̄.α.π')` with its invariant.
    Coiter(Box<Iteration>),
    /// `δ_ν(B, t̄, π)`
    Unfold(Box<PredOperator>, Vec<Term>, Box<ProofTerm>),
    /// `(π : P)`: type ascription. Lets the checker infer a type for an
    /// introduction that reduction has moved into an elimination position.
    Ann(Box<ProofTerm>, Formula),
}

/// `elimeq{Γ, θ, σ, u, v, Q, π}{(θ'_i.π_i)_i}`.
///
/// `locals` types the term variables of `Γ`, `u`, `v` and `Q`; `θ` maps
/// each of them to a term of the surrounding scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EqElim {
    pub locals: Vec<(Name, TermType)>,
    pub hyps: Context,
    pub theta: TermSubst,
    pub sigma: ProofSubst,
    pub lhs: Term,
    pub rhs: Term,
    pub goal: Formula,
    pub major: ProofTerm,
    pub branches: Vec<Branch>,
}

/// One case `θ'.π` of an equality elimination. `fresh` types variables
/// introduced by the range of `θ'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Branch {
    pub fresh: Vec<(Name, TermType)>,
    pub subst: TermSubst,
    pub proof: ProofTerm,
}

/// Shared payload of `δ_μ` and `ν`: invariant `S`, principal argument,
/// bound `x̄.α` and the step proof.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Iteration {
    pub inv: Predicate,
    pub arg: ProofTerm,
    pub params: Vec<Name>,
    pub hyp: Name,
    pub step: ProofTerm,
}

/// Ordered assignment of formulas to proof variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Context {
    entries: Vec<(Name, Formula)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Formula)>) -> Self {
        Context {
            entries: pairs.into_iter().collect(),
        }
    }

    pub fn push(&mut self, a: Name, f: Formula) {
        self.entries.push((a, f));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn with(&self, a: Name, f: Formula) -> Self {
        let mut c = self.clone();
        c.push(a, f);
        c
    }

    pub fn lookup(&self, a: &str) -> Option<&Formula> {
        self.entries.iter().rev().find(|(b, _)| &**b == a).map(|(_, f)| f)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Formula)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Name> {
        self.entries.iter().map(|(a, _)| a)
    }

    /// True when every variable is declared once.
    pub fn has_unique_names(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.entries.iter().all(|(a, _)| seen.insert(a.clone()))
    }

    pub fn subst_terms(&self, theta: &TermSubst) -> Context {
        Context {
            entries: self
                .entries
                .iter()
                .map(|(a, f)| (a.clone(), f.subst_terms(theta)))
                .collect(),
        }
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        self.entries.iter().flat_map(|(_, f)| f.free_term_vars()).collect()
    }
}

/// Finite map from proof variables to proof terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ProofSubst {
    map: BTreeMap<Name, ProofTerm>,
}

impl ProofSubst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(a: Name, p: ProofTerm) -> Self {
        let mut s = Self::new();
        s.insert(a, p);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, ProofTerm)>) -> Self {
        ProofSubst {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, a: Name, p: ProofTerm) {
        self.map.insert(a, p);
    }

    pub fn get(&self, a: &str) -> Option<&ProofTerm> {
        self.map.get(a)
    }

    pub fn contains(&self, a: &str) -> bool {
        self.map.contains_key(a)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &ProofTerm)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    fn without(&self, a: &str) -> ProofSubst {
        let mut m = self.map.clone();
        m.remove(a);
        ProofSubst { map: m }
    }

    fn range_proof_vars(&self) -> BTreeSet<Name> {
        self.map.values().flat_map(|p| p.free_proof_vars()).collect()
    }

    fn range_term_vars(&self) -> BTreeSet<Name> {
        self.map.values().flat_map(|p| p.free_term_vars()).collect()
    }

    /// Pointwise application of a term substitution to the range.
    pub fn subst_terms(&self, theta: &TermSubst) -> ProofSubst {
        ProofSubst {
            map: self
                .map
                .iter()
                .map(|(a, p)| (a.clone(), p.subst_terms(theta)))
                .collect(),
        }
    }

    /// Pointwise application of a proof substitution to the range.
    pub fn then(&self, sigma: &ProofSubst) -> ProofSubst {
        ProofSubst {
            map: self
                .map
                .iter()
                .map(|(a, p)| (a.clone(), p.subst_proofs(sigma)))
                .collect(),
        }
    }
}

/// Renamings needed before pushing a substitution under binders.
struct Avoid {
    terms: BTreeSet<Name>,
    proofs: BTreeSet<Name>,
}

impl ProofTerm {
    pub fn var(a: &str) -> Self {
        ProofTerm::Var(crate::names::name(a))
    }

    pub fn lam(a: &str, body: ProofTerm) -> Self {
        ProofTerm::Lam(crate::names::name(a), None, Box::new(body))
    }

    pub fn lam_ann(a: &str, ty: Formula, body: ProofTerm) -> Self {
        ProofTerm::Lam(crate::names::name(a), Some(ty), Box::new(body))
    }

    pub fn app(f: ProofTerm, a: ProofTerm) -> Self {
        ProofTerm::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: ProofTerm, b: ProofTerm) -> Self {
        ProofTerm::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(p: ProofTerm) -> Self {
        ProofTerm::Fst(Box::new(p))
    }

    pub fn snd(p: ProofTerm) -> Self {
        ProofTerm::Snd(Box::new(p))
    }

    pub fn inl(p: ProofTerm) -> Self {
        ProofTerm::Inl(Box::new(p))
    }

    pub fn inr(p: ProofTerm) -> Self {
        ProofTerm::Inr(Box::new(p))
    }

    pub fn case(p: ProofTerm, a: &str, l: ProofTerm, b: &str, r: ProofTerm) -> Self {
        ProofTerm::Case(
            Box::new(p),
            crate::names::name(a),
            Box::new(l),
            crate::names::name(b),
            Box::new(r),
        )
    }

    pub fn lamx(x: &str, body: ProofTerm) -> Self {
        ProofTerm::LamX(crate::names::name(x), Box::new(body))
    }

    pub fn tapp(p: ProofTerm, t: Term) -> Self {
        ProofTerm::TApp(Box::new(p), t)
    }

    pub fn wit(t: Term, p: ProofTerm) -> Self {
        ProofTerm::Wit(t, Box::new(p))
    }

    pub fn dest(p: ProofTerm, x: &str, a: &str, body: ProofTerm) -> Self {
        ProofTerm::Dest(Box::new(p), crate::names::name(x), crate::names::name(a), Box::new(body))
    }

    pub fn fold(op: PredOperator, args: Vec<Term>, p: ProofTerm) -> Self {
        ProofTerm::Fold(Box::new(op), args, Box::new(p))
    }

    pub fn unfold(op: PredOperator, args: Vec<Term>, p: ProofTerm) -> Self {
        ProofTerm::Unfold(Box::new(op), args, Box::new(p))
    }

    pub fn iter(inv: Predicate, arg: ProofTerm, params: Vec<Name>, hyp: &str, step: ProofTerm) -> Self {
        ProofTerm::Iter(Box::new(Iteration {
            inv,
            arg,
            params,
            hyp: crate::names::name(hyp),
            step,
        }))
    }

    pub fn coiter(inv: Predicate, arg: ProofTerm, params: Vec<Name>, hyp: &str, step: ProofTerm) -> Self {
        ProofTerm::Coiter(Box::new(Iteration {
            inv,
            arg,
            params,
            hyp: crate::names::name(hyp),
            step,
        }))
    }

    /// Node count, used by traces.
    pub fn size(&self) -> usize {
        use ProofTerm::*;
        match self {
            Var(_) | Unit | Refl(_) => 1,
            Abort(p) | Fst(p) | Snd(p) | Inl(p) | Inr(p) | Lam(_, _, p) | LamX(_, p) | TApp(p, _) | Wit(_, p) => 1 + p.size(),
            App(a, b) | Pair(a, b) | Dest(a, _, _, b) => 1 + a.size() + b.size(),
            Case(a, _, b, _, c) => 1 + a.size() + b.size() + c.size(),
            EqCase(e) => {
                1 + e.major.size()
                    + e.sigma.map.values().map(ProofTerm::size).sum::<usize>()
                    + e.branches.iter().map(|b| b.proof.size()).sum::<usize>()
            }
            Fold(_, _, p) | Unfold(_, _, p) | Ann(p, _) => 1 + p.size(),
            Iter(it) | Coiter(it) => 1 + it.arg.size() + it.step.size(),
        }
    }

    pub fn free_proof_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_proof_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_proof_vars(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use ProofTerm::*;
        let under = |a: &Name, p: &ProofTerm, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>| {
            bound.push(a.clone());
            p.collect_proof_vars(bound, out);
            bound.pop();
        };
        match self {
            Var(a) => {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            Unit | Refl(_) => {}
            Abort(p) | Fst(p) | Snd(p) | Inl(p) | Inr(p) | LamX(_, p) | TApp(p, _) | Wit(_, p) | Fold(_, _, p) | Unfold(_, _, p) | Ann(p, _) => {
                p.collect_proof_vars(bound, out)
            }
            Lam(a, _, p) => under(a, p, bound, out),
            App(a, b) | Pair(a, b) => {
                a.collect_proof_vars(bound, out);
                b.collect_proof_vars(bound, out);
            }
            Case(p, a, l, b, r) => {
                p.collect_proof_vars(bound, out);
                under(a, l, bound, out);
                under(b, r, bound, out);
            }
            Dest(p, _, a, q) => {
                p.collect_proof_vars(bound, out);
                under(a, q, bound, out);
            }
            EqCase(e) => {
                for q in e.sigma.map.values() {
                    q.collect_proof_vars(bound, out);
                }
                e.major.collect_proof_vars(bound, out);
            }
            Iter(it) | Coiter(it) => {
                it.arg.collect_proof_vars(bound, out);
                under(&it.hyp, &it.step, bound, out);
            }
        }
    }

    pub fn free_term_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_term_vars(&mut Vec::new(), &mut out);
        out
    }

    fn collect_term_vars(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        use ProofTerm::*;
        match self {
            Var(_) | Unit => {}
            Refl(t) => t.collect_free(bound, out),
            Abort(p) | Fst(p) | Snd(p) | Inl(p) | Inr(p) => p.collect_term_vars(bound, out),
            Ann(p, f) => {
                f.collect_free_terms(bound, out);
                p.collect_term_vars(bound, out);
            }
            Lam(_, ann, p) => {
                if let Some(f) = ann {
                    f.collect_free_terms(bound, out);
                }
                p.collect_term_vars(bound, out);
            }
            App(a, b) | Pair(a, b) => {
                a.collect_term_vars(bound, out);
                b.collect_term_vars(bound, out);
            }
            Case(p, _, l, _, r) => {
                p.collect_term_vars(bound, out);
                l.collect_term_vars(bound, out);
                r.collect_term_vars(bound, out);
            }
            LamX(x, p) => {
                bound.push(x.clone());
                p.collect_term_vars(bound, out);
                bound.pop();
            }
            TApp(p, t) | Wit(t, p) => {
                p.collect_term_vars(bound, out);
                t.collect_free(bound, out);
            }
            Dest(p, x, _, q) => {
                p.collect_term_vars(bound, out);
                bound.push(x.clone());
                q.collect_term_vars(bound, out);
                bound.pop();
            }
            EqCase(e) => {
                for t in e.theta.as_map().values() {
                    t.collect_free(bound, out);
                }
                for q in e.sigma.map.values() {
                    q.collect_term_vars(bound, out);
                }
                e.major.collect_term_vars(bound, out);
            }
            Fold(op, args, p) | Unfold(op, args, p) => {
                for x in op.free_term_vars() {
                    if !bound.contains(&x) {
                        out.insert(x);
                    }
                }
                for a in args {
                    a.collect_free(bound, out);
                }
                p.collect_term_vars(bound, out);
            }
            Iter(it) | Coiter(it) => {
                for x in it.inv.free_term_vars() {
                    if !bound.contains(&x) {
                        out.insert(x);
                    }
                }
                it.arg.collect_term_vars(bound, out);
                let n = bound.len();
                bound.extend(it.params.iter().cloned());
                it.step.collect_term_vars(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// `πθ`.
    pub fn subst_terms(&self, theta: &TermSubst) -> ProofTerm {
        if theta.is_empty() {
            return self.clone();
        }
        let avoid = theta.range_vars();
        self.st(theta, &avoid)
    }

    fn st(&self, theta: &TermSubst, rfv: &BTreeSet<Name>) -> ProofTerm {
        use ProofTerm::*;
        let b = |p: &ProofTerm| Box::new(p.st(theta, rfv));
        match self {
            Var(_) | Unit => self.clone(),
            Refl(t) => Refl(theta.apply(t)),
            Abort(p) => Abort(b(p)),
            Ann(p, f) => Ann(b(p), f.subst_terms(theta)),
            Lam(a, ann, p) => Lam(a.clone(), ann.as_ref().map(|f| f.subst_terms(theta)), b(p)),
            App(p, q) => App(b(p), b(q)),
            Pair(p, q) => Pair(b(p), b(q)),
            Fst(p) => Fst(b(p)),
            Snd(p) => Snd(b(p)),
            Inl(p) => Inl(b(p)),
            Inr(p) => Inr(b(p)),
            Case(p, a, l, c, r) => Case(b(p), a.clone(), b(l), c.clone(), b(r)),
            LamX(x, p) => {
                let (xs, body) = term_binders(std::slice::from_ref(x), p, theta, rfv);
                LamX(xs.into_iter().next().expect("binder"), Box::new(body))
            }
            TApp(p, t) => TApp(b(p), theta.apply(t)),
            Wit(t, p) => Wit(theta.apply(t), b(p)),
            Dest(p, x, a, q) => {
                let (xs, body) = term_binders(std::slice::from_ref(x), q, theta, rfv);
                Dest(b(p), xs.into_iter().next().expect("binder"), a.clone(), Box::new(body))
            }
            EqCase(e) => {
                // θ composes onto the stored substitution; branches are suspended.
                let mut e2 = (**e).clone();
                e2.theta = TermSubst::from_pairs(e.theta.iter().map(|(x, t)| (x.clone(), theta.apply(t))));
                e2.sigma = e.sigma.subst_terms(theta);
                e2.major = e.major.st(theta, rfv);
                EqCase(Box::new(e2))
            }
            Fold(op, args, p) => Fold(Box::new(op.subst_terms(theta)), args.iter().map(|t| theta.apply(t)).collect(), b(p)),
            Unfold(op, args, p) => Unfold(Box::new(op.subst_terms(theta)), args.iter().map(|t| theta.apply(t)).collect(), b(p)),
            Iter(it) | Coiter(it) => {
                let (params, step) = term_binders(&it.params, &it.step, theta, rfv);
                let it2 = Iteration {
                    inv: it.inv.subst_terms(theta),
                    arg: it.arg.st(theta, rfv),
                    params,
                    hyp: it.hyp.clone(),
                    step,
                };
                if matches!(self, Iter(_)) {
                    Iter(Box::new(it2))
                } else {
                    Coiter(Box::new(it2))
                }
            }
        }
    }

    /// `πσ`.
    pub fn subst_proofs(&self, sigma: &ProofSubst) -> ProofTerm {
        if sigma.is_empty() {
            return self.clone();
        }
        let avoid = Avoid {
            terms: sigma.range_term_vars(),
            proofs: sigma.range_proof_vars(),
        };
        self.sp(sigma, &avoid)
    }

    fn sp(&self, sigma: &ProofSubst, av: &Avoid) -> ProofTerm {
        use ProofTerm::*;
        let b = |p: &ProofTerm| Box::new(p.sp(sigma, av));
        match self {
            Var(a) => sigma.get(a).cloned().unwrap_or_else(|| self.clone()),
            Unit | Refl(_) => self.clone(),
            Abort(p) => Abort(b(p)),
            Ann(p, f) => Ann(b(p), f.clone()),
            Lam(a, ann, p) => {
                let (a2, body) = proof_binder(a, p, sigma, av);
                Lam(a2, ann.clone(), Box::new(body))
            }
            App(p, q) => App(b(p), b(q)),
            Pair(p, q) => Pair(b(p), b(q)),
            Fst(p) => Fst(b(p)),
            Snd(p) => Snd(b(p)),
            Inl(p) => Inl(b(p)),
            Inr(p) => Inr(b(p)),
            Case(p, a, l, c, r) => {
                let (a2, l2) = proof_binder(a, l, sigma, av);
                let (c2, r2) = proof_binder(c, r, sigma, av);
                Case(b(p), a2, Box::new(l2), c2, Box::new(r2))
            }
            LamX(x, p) => {
                let (xs, body) = rename_term_binders(std::slice::from_ref(x), p, &av.terms);
                LamX(xs.into_iter().next().expect("binder"), Box::new(body.sp(sigma, av)))
            }
            TApp(p, t) => TApp(b(p), t.clone()),
            Wit(t, p) => Wit(t.clone(), b(p)),
            Dest(p, x, a, q) => {
                let (xs, q) = rename_term_binders(std::slice::from_ref(x), q, &av.terms);
                let (a2, q2) = proof_binder(a, &q, sigma, av);
                Dest(b(p), xs.into_iter().next().expect("binder"), a2, Box::new(q2))
            }
            EqCase(e) => {
                let mut e2 = (**e).clone();
                e2.sigma = e.sigma.then(sigma);
                e2.major = e.major.sp(sigma, av);
                EqCase(Box::new(e2))
            }
            Fold(op, args, p) => Fold(op.clone(), args.clone(), b(p)),
            Unfold(op, args, p) => Unfold(op.clone(), args.clone(), b(p)),
            Iter(it) | Coiter(it) => {
                let (params, step) = rename_term_binders(&it.params, &it.step, &av.terms);
                let (hyp, step) = proof_binder(&it.hyp, &step, sigma, av);
                let it2 = Iteration {
                    inv: it.inv.clone(),
                    arg: it.arg.sp(sigma, av),
                    params,
                    hyp,
                    step,
                };
                if matches!(self, Iter(_)) {
                    Iter(Box::new(it2))
                } else {
                    Coiter(Box::new(it2))
                }
            }
        }
    }
}

/// Pushes `θ` under term binders, renaming binders that would capture.
fn term_binders(binders: &[Name], body: &ProofTerm, theta: &TermSubst, rfv: &BTreeSet<Name>) -> (Vec<Name>, ProofTerm) {
    let mut inner = theta.clone();
    for x in binders {
        inner.remove(x);
    }
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let body_fv = body.free_term_vars();
    if !body_fv.iter().any(|y| inner.contains(y)) {
        return (binders.to_vec(), body.clone());
    }
    let mut rfv = rfv.clone();
    let mut out = Vec::with_capacity(binders.len());
    for x in binders {
        if rfv.contains(x) {
            let x2 = fresh_name(x, |c| {
                rfv.contains(c) || body_fv.contains(c) || inner.contains(c) || binders.iter().any(|b| &**b == c)
            });
            inner.insert(x.clone(), Term::Var(x2.clone()));
            rfv.insert(x2.clone());
            out.push(x2);
        } else {
            out.push(x.clone());
        }
    }
    (out, body.st(&inner, &rfv))
}

/// Renames term binders that clash with `avoid`.
fn rename_term_binders(binders: &[Name], body: &ProofTerm, avoid: &BTreeSet<Name>) -> (Vec<Name>, ProofTerm) {
    if !binders.iter().any(|x| avoid.contains(x)) {
        return (binders.to_vec(), body.clone());
    }
    let body_fv = body.free_term_vars();
    let mut ren = TermSubst::new();
    let mut out = Vec::with_capacity(binders.len());
    for x in binders {
        if avoid.contains(x) {
            let x2 = fresh_name(x, |c| {
                avoid.contains(c) || body_fv.contains(c) || binders.iter().any(|b| &**b == c) || out.iter().any(|b: &Name| &**b == c)
            });
            ren.insert(x.clone(), Term::Var(x2.clone()));
            out.push(x2);
        } else {
            out.push(x.clone());
        }
    }
    (out, body.subst_terms(&ren))
}

/// Pushes `σ` under a proof binder.
fn proof_binder(a: &Name, body: &ProofTerm, sigma: &ProofSubst, av: &Avoid) -> (Name, ProofTerm) {
    let inner = if sigma.contains(a) { sigma.without(a) } else { sigma.clone() };
    if inner.is_empty() {
        return (a.clone(), body.clone());
    }
    if av.proofs.contains(a) {
        let body_fv = body.free_proof_vars();
        if body_fv.iter().any(|b| inner.contains(b)) {
            let a2 = fresh_name(a, |c| av.proofs.contains(c) || body_fv.contains(c) || inner.contains(c));
            let renamed = body.subst_proofs(&ProofSubst::singleton(a.clone(), ProofTerm::Var(a2.clone())));
            let mut av2 = Avoid {
                terms: av.terms.clone(),
                proofs: av.proofs.clone(),
            };
            av2.proofs.insert(a2.clone());
            return (a2, renamed.sp(&inner, &av2));
        }
    }
    (a.clone(), body.sp(&inner, av))
}

pub fn subst_term_in_proof(p: &ProofTerm, theta: &TermSubst) -> ProofTerm {
    p.subst_terms(theta)
}

pub fn subst_proof_in_proof(p: &ProofTerm, sigma: &ProofSubst) -> ProofTerm {
    p.subst_proofs(sigma)
}

/// Equality up to renaming of bound term and proof variables.
pub fn alpha_eq_proof(a: &ProofTerm, b: &ProofTerm) -> bool {
    alpha_proof(a, b, &mut Vec::new(), &mut Vec::new())
}

fn alpha_proof(a: &ProofTerm, b: &ProofTerm, tenv: &mut Vec<(Name, Name)>, penv: &mut Vec<(Name, Name)>) -> bool {
    use ProofTerm::*;
    fn under<R>(env: &mut Vec<(Name, Name)>, pairs: &[(Name, Name)], f: impl FnOnce(&mut Vec<(Name, Name)>) -> R) -> R {
        let n = env.len();
        env.extend(pairs.iter().cloned());
        let r = f(env);
        env.truncate(n);
        r
    }
    let formula = |f: &Formula, g: &Formula, tenv: &mut Vec<(Name, Name)>| alpha_formula(f, g, tenv, &mut Vec::new());
    match (a, b) {
        (Var(x), Var(y)) => {
            let lx = penv.iter().rposition(|(p, _)| p == x);
            let ly = penv.iter().rposition(|(_, q)| q == y);
            match (lx, ly) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Unit, Unit) => true,
        (Refl(t), Refl(u)) => alpha_eq_in(t, u, tenv),
        (Ann(p, f), Ann(q, g)) => formula(f, g, tenv) && alpha_proof(p, q, tenv, penv),
        (Abort(p), Abort(q)) | (Fst(p), Fst(q)) | (Snd(p), Snd(q)) | (Inl(p), Inl(q)) | (Inr(p), Inr(q)) => alpha_proof(p, q, tenv, penv),
        (Lam(x, ax, p), Lam(y, ay, q)) => {
            let ann_ok = match (ax, ay) {
                (None, None) => true,
                (Some(f), Some(g)) => formula(f, g, tenv),
                _ => false,
            };
            ann_ok && under(penv, &[(x.clone(), y.clone())], |penv| alpha_proof(p, q, tenv, penv))
        }
        (App(p1, p2), App(q1, q2)) | (Pair(p1, p2), Pair(q1, q2)) => alpha_proof(p1, q1, tenv, penv) && alpha_proof(p2, q2, tenv, penv),
        (Case(p, a1, l1, b1, r1), Case(q, a2, l2, b2, r2)) => {
            alpha_proof(p, q, tenv, penv)
                && under(penv, &[(a1.clone(), a2.clone())], |penv| alpha_proof(l1, l2, tenv, penv))
                && under(penv, &[(b1.clone(), b2.clone())], |penv| alpha_proof(r1, r2, tenv, penv))
        }
        (LamX(x, p), LamX(y, q)) => under(tenv, &[(x.clone(), y.clone())], |tenv| alpha_proof(p, q, tenv, penv)),
        (TApp(p, t), TApp(q, u)) => alpha_proof(p, q, tenv, penv) && alpha_eq_in(t, u, tenv),
        (Wit(t, p), Wit(u, q)) => alpha_eq_in(t, u, tenv) && alpha_proof(p, q, tenv, penv),
        (Dest(p, x, a1, p2), Dest(q, y, a2, q2)) => {
            alpha_proof(p, q, tenv, penv)
                && under(tenv, &[(x.clone(), y.clone())], |tenv| {
                    under(penv, &[(a1.clone(), a2.clone())], |penv| alpha_proof(p2, q2, tenv, penv))
                })
        }
        (EqCase(e1), EqCase(e2)) => {
            e1.locals == e2.locals
                && e1.hyps == e2.hyps
                && e1.lhs == e2.lhs
                && e1.rhs == e2.rhs
                && e1.goal == e2.goal
                && e1.branches == e2.branches
                && e1.theta.len() == e2.theta.len()
                && e1
                    .theta
                    .iter()
                    .zip(e2.theta.iter())
                    .all(|((x, t), (y, u))| x == y && alpha_eq_in(t, u, tenv))
                && e1.sigma.len() == e2.sigma.len()
                && e1
                    .sigma
                    .iter()
                    .zip(e2.sigma.iter())
                    .all(|((x, p), (y, q))| x == y && alpha_proof(p, q, tenv, penv))
                && alpha_proof(&e1.major, &e2.major, tenv, penv)
        }
        (Fold(o1, a1, p), Fold(o2, a2, q)) | (Unfold(o1, a1, p), Unfold(o2, a2, q)) => {
            // Operators are closed up to the term environment.
            let ops = if tenv.is_empty() {
                alpha_eq_operator(o1, o2)
            } else {
                let f1 = Formula::mu((**o1).clone(), vec![]);
                let f2 = Formula::mu((**o2).clone(), vec![]);
                alpha_formula(&f1, &f2, tenv, &mut Vec::new())
            };
            ops && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(t, u)| alpha_eq_in(t, u, tenv))
                && alpha_proof(p, q, tenv, penv)
        }
        (Iter(i1), Iter(i2)) | (Coiter(i1), Coiter(i2)) => {
            let inv_ok = if tenv.is_empty() {
                alpha_eq_predicate(&i1.inv, &i2.inv)
            } else {
                i1.inv.param_types() == i2.inv.param_types()
                    && under(
                        tenv,
                        &i1.inv
                            .params
                            .iter()
                            .zip(&i2.inv.params)
                            .map(|((x, _), (y, _))| (x.clone(), y.clone()))
                            .collect::<Vec<_>>(),
                        |tenv| formula(&i1.inv.body, &i2.inv.body, tenv),
                    )
            };
            inv_ok
                && alpha_proof(&i1.arg, &i2.arg, tenv, penv)
                && i1.params.len() == i2.params.len()
                && under(
                    tenv,
                    &i1.params.iter().cloned().zip(i2.params.iter().cloned()).collect::<Vec<_>>(),
                    |tenv| under(penv, &[(i1.hyp.clone(), i2.hyp.clone())], |penv| alpha_proof(&i1.step, &i2.step, tenv, penv)),
                )
        }
        _ => false,
    }
}

/// Structural check that every annotated formula is α-comparable; used by tests.
pub fn same_annotations(a: &Formula, b: &Formula) -> bool {
    alpha_eq_formula(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::name;

    fn nat() -> TermType {
        TermType::base("nat")
    }

    fn eqcase_example() -> ProofTerm {
        // p x, x = y ⊢ p y with CSU {[y/x]}
        ProofTerm::EqCase(Box::new(EqElim {
            locals: vec![(name("x"), nat()), (name("y"), nat())],
            hyps: Context::from_pairs([(name("h"), Formula::atom("p", vec![Term::var("x")]))]),
            theta: TermSubst::from_pairs([(name("x"), Term::var("x")), (name("y"), Term::var("y"))]),
            sigma: ProofSubst::singleton(name("h"), ProofTerm::var("H1")),
            lhs: Term::var("x"),
            rhs: Term::var("y"),
            goal: Formula::atom("p", vec![Term::var("y")]),
            major: ProofTerm::var("H2"),
            branches: vec![Branch {
                fresh: vec![],
                subst: TermSubst::singleton(name("x"), Term::var("y")),
                proof: ProofTerm::var("h"),
            }],
        }))
    }

    #[test]
    fn refl_term_subst() {
        let p = ProofTerm::Refl(Term::var("x"));
        let th = TermSubst::singleton(name("x"), Term::cnst("0"));
        assert_eq!(p.subst_terms(&th), ProofTerm::Refl(Term::cnst("0")));
    }

    #[test]
    fn eqcase_term_subst_composes_and_suspends() {
        let p = eqcase_example();
        let th = TermSubst::from_pairs([(name("x"), Term::var("t1")), (name("y"), Term::var("t2"))]);
        let ProofTerm::EqCase(before) = &p else { unreachable!() };
        let ProofTerm::EqCase(after) = p.subst_terms(&th) else { unreachable!() };
        assert_eq!(after.theta, before.theta.compose(&th).restrict(before.theta.domain()));
        assert_eq!(after.theta.get("x"), Some(&Term::var("t1")));
        assert_eq!(after.branches, before.branches);
        assert_eq!(after.hyps, before.hyps);
        assert_eq!(after.goal, before.goal);
    }

    #[test]
    fn eqcase_proof_subst_composes_and_suspends() {
        let p = eqcase_example();
        let sigma = ProofSubst::from_pairs([(name("H1"), ProofTerm::var("K")), (name("h"), ProofTerm::Unit)]);
        let ProofTerm::EqCase(before) = &p else { unreachable!() };
        let ProofTerm::EqCase(after) = p.subst_proofs(&sigma) else { unreachable!() };
        assert_eq!(after.sigma.get("h"), Some(&ProofTerm::var("K")));
        assert_eq!(after.branches, before.branches, "branch `h` must not receive σ");
        assert_eq!(after.major, ProofTerm::var("H2"));
    }

    #[test]
    fn lam_has_no_term_occurrences() {
        let p = ProofTerm::lam("a", ProofTerm::var("a"));
        let th = TermSubst::singleton(name("x"), Term::cnst("0"));
        assert_eq!(p.subst_terms(&th), p);
    }

    #[test]
    fn proof_subst_examples() {
        let s = ProofSubst::singleton(name("a"), ProofTerm::Unit);
        assert_eq!(ProofTerm::var("a").subst_proofs(&s), ProofTerm::Unit);
        // (λb. a)[b/a] must rename the binder.
        let p = ProofTerm::lam("b", ProofTerm::var("a"));
        let s = ProofSubst::singleton(name("a"), ProofTerm::var("b"));
        match p.subst_proofs(&s) {
            ProofTerm::Lam(b2, _, body) => {
                assert_ne!(&*b2, "b");
                assert_eq!(*body, ProofTerm::var("b"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn term_binder_renamed_under_proof_subst() {
        // (λx. a)[refl x / a]: the free x of the substituted proof must stay free.
        let p = ProofTerm::lamx("x", ProofTerm::var("a"));
        let s = ProofSubst::singleton(name("a"), ProofTerm::Refl(Term::var("x")));
        let r = p.subst_proofs(&s);
        assert!(r.free_term_vars().contains("x"));
    }

    #[test]
    fn alpha_eq_proofs() {
        let a = ProofTerm::lam("a", ProofTerm::var("a"));
        let b = ProofTerm::lam("b", ProofTerm::var("b"));
        assert!(alpha_eq_proof(&a, &b));
        let c = ProofTerm::lam("b", ProofTerm::var("a"));
        assert!(!alpha_eq_proof(&a, &c));
        let x = ProofTerm::lamx("x", ProofTerm::Refl(Term::var("x")));
        let y = ProofTerm::lamx("y", ProofTerm::Refl(Term::var("y")));
        assert!(alpha_eq_proof(&x, &y));
    }

    #[test]
    fn free_vars_skip_branches() {
        let p = eqcase_example();
        let fv = p.free_proof_vars();
        assert!(fv.contains("H1") && fv.contains("H2"));
        assert!(!fv.contains("h"));
        let tv = p.free_term_vars();
        assert!(tv.contains("x") && tv.contains("y"));
    }
}
