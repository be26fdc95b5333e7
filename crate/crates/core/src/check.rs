//! Bidirectional type checking of proof terms modulo the congruence.
//!
//! Introductions are checked against a goal whose root is first exposed by
//! rewriting; eliminations infer the type of their major premise. Every
//! comparison of formulas goes through the rewrite system.

use std::cell::RefCell;
use std::collections::BTreeSet;

use crate::formula::{check_formula, check_predicate, Formula, PredOperator, Predicate};
use crate::names::{fresh_name, Name};
use crate::proof::{Context, EqElim, Iteration, ProofSubst, ProofTerm};
use crate::rewrite::RewriteSystem;
use crate::term::{infer_term_type, Signature, Term, TermCtx, TermSubst, TermType};
use crate::trust::{TrustEntry, TrustLog};
use crate::unify::{factor_subst, fo_unify, is_unifier, Completeness};
use crate::{Error, Result};

/// Checks judgments against one signature and rewrite system, collecting
/// the assumptions it relied on.
pub struct Checker<'a> {
    pub sig: &'a Signature,
    pub rs: &'a RewriteSystem,
    trust: RefCell<TrustLog>,
    path: RefCell<Vec<&'static str>>,
}

/// A judgment's scope: typed term variables and proof hypotheses.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    pub terms: TermCtx,
    pub proofs: Context,
}

impl Scope {
    pub fn new(terms: TermCtx, proofs: Context) -> Self {
        Scope { terms, proofs }
    }
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature, rs: &'a RewriteSystem) -> Self {
        Checker {
            sig,
            rs,
            trust: RefCell::new(rs.trust_log()),
            path: RefCell::new(Vec::new()),
        }
    }

    pub fn trust_log(&self) -> TrustLog {
        self.trust.borrow().clone()
    }

    /// `Γ ⊢ π : P` after checking that `Γ` and `P` are well formed.
    pub fn check_proof(&self, scope: &Scope, p: &ProofTerm, goal: &Formula) -> Result<()> {
        self.path.borrow_mut().clear();
        for (_, ty) in scope.terms.iter() {
            self.sig.check_term_type(ty)?;
        }
        for (_, f) in scope.proofs.iter() {
            check_formula(self.sig, &scope.terms, f)?;
        }
        check_formula(self.sig, &scope.terms, goal)?;
        let mut sc = scope.clone();
        self.check(&mut sc, p, goal)
    }

    /// Infers the type of `π`, for the forms where it is determined.
    pub fn infer_proof(&self, scope: &Scope, p: &ProofTerm) -> Result<Formula> {
        self.path.borrow_mut().clear();
        let mut sc = scope.clone();
        self.infer(&mut sc, p)
    }

    fn fail(&self, rule: &'static str, detail: impl Into<String>) -> Error {
        let path = self.path.borrow();
        Error::Check {
            path: if path.is_empty() { "root".into() } else { format!("root/{}", path.join("/")) },
            rule,
            detail: detail.into(),
        }
    }

    fn enter<R>(&self, seg: &'static str, f: impl FnOnce() -> Result<R>) -> Result<R> {
        self.path.borrow_mut().push(seg);
        let r = f();
        if r.is_ok() {
            self.path.borrow_mut().pop();
        }
        r
    }

    fn head(&self, p: &Formula) -> Result<Formula> {
        self.rs.head_normalize_formula(p)
    }

    fn require_congruent(&self, rule: &'static str, want: &Formula, got: &Formula) -> Result<()> {
        if self.rs.congruent_formulas(want, got)? {
            Ok(())
        } else {
            let a = self.rs.normalize_formula(want)?;
            let b = self.rs.normalize_formula(got)?;
            Err(self.fail(rule, format!("expected {a}, found {b}")))
        }
    }

    fn term_type(&self, sc: &Scope, t: &Term, rule: &'static str) -> Result<TermType> {
        infer_term_type(self.sig, &sc.terms, t).map_err(|e| self.fail(rule, e.to_string()))
    }

    fn expect_term(&self, sc: &Scope, t: &Term, ty: &TermType, rule: &'static str) -> Result<()> {
        let found = self.term_type(sc, t, rule)?;
        if found == *ty {
            Ok(())
        } else {
            Err(self.fail(rule, format!("term {t} has type {found}, expected {ty}")))
        }
    }

    /// A name for a term binder that does not capture anything in scope.
    fn fresh_term_var(&self, sc: &Scope, x: &Name, avoid: &BTreeSet<Name>) -> Name {
        if !sc.terms.contains(x) && !avoid.contains(x) {
            return x.clone();
        }
        fresh_name(x, |c| sc.terms.contains(c) || avoid.contains(c))
    }

    /// Opens term binders `xs` over `body`, renaming any that shadow the scope.
    fn open_binders(&self, sc: &Scope, xs: &[Name], body: &ProofTerm) -> (Vec<Name>, ProofTerm) {
        let mut ren = TermSubst::new();
        let mut out = Vec::with_capacity(xs.len());
        let mut taken: BTreeSet<Name> = BTreeSet::new();
        for x in xs {
            let x2 = self.fresh_term_var(sc, x, &taken);
            if x2 != *x {
                ren.insert(x.clone(), Term::Var(x2.clone()));
            }
            taken.insert(x2.clone());
            out.push(x2);
        }
        (out, body.subst_terms(&ren))
    }

    fn check(&self, sc: &mut Scope, p: &ProofTerm, goal: &Formula) -> Result<()> {
        use ProofTerm::*;
        match p {
            Unit => match self.head(goal)? {
                Formula::Top => Ok(()),
                g => Err(self.fail("top-intro", format!("goal {g} is not top"))),
            },
            Abort(q) => self.enter("abort", || self.check(sc, q, &Formula::Bot)),
            Lam(a, ann, body) => {
                let (l, r) = match self.head(goal)? {
                    Formula::Imp(l, r) => (*l, *r),
                    g => return Err(self.fail("imp-intro", format!("goal {g} is not an implication"))),
                };
                if let Some(ty) = ann {
                    check_formula(self.sig, &sc.terms, ty).map_err(|e| self.fail("imp-intro", e.to_string()))?;
                    self.require_congruent("imp-intro", &l, ty)?;
                }
                sc.proofs.push(a.clone(), l);
                let r = self.enter("lam", || self.check(sc, body, &r));
                sc.proofs.pop();
                r
            }
            Pair(a, b) => {
                let (l, r) = match self.head(goal)? {
                    Formula::And(l, r) => (*l, *r),
                    g => return Err(self.fail("and-intro", format!("goal {g} is not a conjunction"))),
                };
                self.enter("pair.left", || self.check(sc, a, &l))?;
                self.enter("pair.right", || self.check(sc, b, &r))
            }
            Inl(q) | Inr(q) => {
                let (l, r) = match self.head(goal)? {
                    Formula::Or(l, r) => (*l, *r),
                    g => return Err(self.fail("or-intro", format!("goal {g} is not a disjunction"))),
                };
                if matches!(p, Inl(_)) {
                    self.enter("inl", || self.check(sc, q, &l))
                } else {
                    self.enter("inr", || self.check(sc, q, &r))
                }
            }
            Case(q, a, l, b, r) => {
                let (fl, fr) = match self.head(&self.enter("case.scrutinee", || self.infer(sc, q))?)? {
                    Formula::Or(fl, fr) => (*fl, *fr),
                    f => return Err(self.fail("or-elim", format!("scrutinee has type {f}, not a disjunction"))),
                };
                sc.proofs.push(a.clone(), fl);
                let res = self.enter("case.left", || self.check(sc, l, goal));
                sc.proofs.pop();
                res?;
                sc.proofs.push(b.clone(), fr);
                let res = self.enter("case.right", || self.check(sc, r, goal));
                sc.proofs.pop();
                res
            }
            LamX(x, body) => {
                let (y, ty, b) = match self.head(goal)? {
                    Formula::Forall(y, ty, b) => (y, ty, *b),
                    g => return Err(self.fail("forall-intro", format!("goal {g} is not universal"))),
                };
                let (xs, body) = self.open_binders(sc, std::slice::from_ref(x), body);
                let x2 = xs.into_iter().next().expect("binder");
                let b = b.subst_terms(&TermSubst::singleton(y, Term::Var(x2.clone())));
                sc.terms.push(x2, ty);
                let r = self.enter("lamx", || self.check(sc, &body, &b));
                sc.terms.pop();
                r
            }
            Wit(t, q) => {
                let (y, ty, b) = match self.head(goal)? {
                    Formula::Exists(y, ty, b) => (y, ty, *b),
                    g => return Err(self.fail("exists-intro", format!("goal {g} is not existential"))),
                };
                self.expect_term(sc, t, &ty, "exists-intro")?;
                let b = b.subst_terms(&TermSubst::singleton(y, t.clone()));
                self.enter("wit", || self.check(sc, q, &b))
            }
            Dest(q, x, a, body) => {
                let (y, ty, b) = match self.head(&self.enter("dest.major", || self.infer(sc, q))?)? {
                    Formula::Exists(y, ty, b) => (y, ty, *b),
                    f => return Err(self.fail("exists-elim", format!("major premise has type {f}, not existential"))),
                };
                let (xs, body) = self.open_binders(sc, std::slice::from_ref(x), body);
                let x2 = xs.into_iter().next().expect("binder");
                let b = b.subst_terms(&TermSubst::singleton(y, Term::Var(x2.clone())));
                sc.terms.push(x2, ty);
                sc.proofs.push(a.clone(), b);
                let r = self.enter("dest.body", || self.check(sc, &body, goal));
                sc.proofs.pop();
                sc.terms.pop();
                r
            }
            Refl(t) => {
                self.term_type(sc, t, "refl")?;
                match self.head(goal)? {
                    Formula::Eq(u, v) => {
                        let ok = self.rs.congruent_terms(t, &u)? && self.rs.congruent_terms(t, &v)?;
                        if ok {
                            Ok(())
                        } else {
                            let (u, v, t) = (self.rs.normalize_term(&u)?, self.rs.normalize_term(&v)?, self.rs.normalize_term(t)?);
                            Err(self.fail("refl", format!("goal {u} = {v} is not {t} = {t}")))
                        }
                    }
                    g => Err(self.fail("refl", format!("goal {g} is not an equality"))),
                }
            }
            Fold(op, args, q) => {
                let mu = Formula::mu((**op).clone(), args.clone());
                check_formula(self.sig, &sc.terms, &mu).map_err(|e| self.fail("mu-intro", e.to_string()))?;
                self.require_congruent("mu-intro", goal, &mu)?;
                let unfolded = op.instantiate(&op.fixpoint_predicate(crate::formula::FixKind::Mu), args)?;
                self.enter("fold", || self.check(sc, q, &unfolded))
            }
            Coiter(it) => {
                let (op, args) = match self.head(goal)? {
                    Formula::Nu(op, args) => (*op, args),
                    g => return Err(self.fail("nu-intro", format!("goal {g} is not a greatest fixed point"))),
                };
                self.check_invariant(sc, &it.inv, &op, "nu-intro")?;
                let start = it.inv.apply(&args);
                self.enter("coiter.arg", || self.check(sc, &it.arg, &start))?;
                self.check_step(sc, it, &op, true)
            }
            EqCase(e) => {
                let got = self.check_eqcase(sc, e)?;
                self.require_congruent("eq-elim", goal, &got)
            }
            // A redex with an annotated function: the body is checked against
            // the goal directly, so it need not be inferable.
            App(f, arg) if matches!(&**f, Lam(_, Some(_), _)) => {
                let Lam(a, Some(ty), body) = &**f else { unreachable!() };
                check_formula(self.sig, &sc.terms, ty).map_err(|e| self.fail("imp-intro", e.to_string()))?;
                self.enter("app.arg", || self.check(sc, arg, ty))?;
                sc.proofs.push(a.clone(), ty.clone());
                let r = self.enter("app.fun", || self.enter("lam", || self.check(sc, body, goal)));
                sc.proofs.pop();
                r
            }
            Var(_) | Ann(..) | App(..) | Fst(_) | Snd(_) | TApp(..) | Unfold(..) | Iter(_) => {
                let got = self.infer(sc, p)?;
                self.require_congruent(rule_name(p), goal, &got)
            }
        }
    }

    fn infer(&self, sc: &mut Scope, p: &ProofTerm) -> Result<Formula> {
        use ProofTerm::*;
        match p {
            Var(a) => sc
                .proofs
                .lookup(a)
                .cloned()
                .ok_or_else(|| self.fail("axiom", format!("unbound hypothesis `{a}`"))),
            Unit => Ok(Formula::Top),
            Refl(t) => {
                self.term_type(sc, t, "refl")?;
                Ok(Formula::Eq(t.clone(), t.clone()))
            }
            Lam(a, Some(ty), body) => {
                check_formula(self.sig, &sc.terms, ty).map_err(|e| self.fail("imp-intro", e.to_string()))?;
                sc.proofs.push(a.clone(), ty.clone());
                let r = self.enter("lam", || self.infer(sc, body));
                sc.proofs.pop();
                Ok(Formula::imp(ty.clone(), r?))
            }
            Pair(a, b) => {
                let l = self.enter("pair.left", || self.infer(sc, a))?;
                let r = self.enter("pair.right", || self.infer(sc, b))?;
                Ok(Formula::and(l, r))
            }
            App(f, a) => {
                let ft = self.enter("app.fun", || self.infer(sc, f))?;
                match self.head(&ft)? {
                    Formula::Imp(l, r) => {
                        self.enter("app.arg", || self.check(sc, a, &l))?;
                        Ok(*r)
                    }
                    f => Err(self.fail("imp-elim", format!("function has type {f}, not an implication"))),
                }
            }
            Fst(q) | Snd(q) => {
                let t = self.enter(if matches!(p, Fst(_)) { "fst" } else { "snd" }, || self.infer(sc, q))?;
                match self.head(&t)? {
                    Formula::And(l, r) => Ok(if matches!(p, Fst(_)) { *l } else { *r }),
                    f => Err(self.fail("and-elim", format!("argument has type {f}, not a conjunction"))),
                }
            }
            TApp(q, t) => {
                let ft = self.enter("tapp", || self.infer(sc, q))?;
                match self.head(&ft)? {
                    Formula::Forall(y, ty, b) => {
                        self.expect_term(sc, t, &ty, "forall-elim")?;
                        Ok(b.subst_terms(&TermSubst::singleton(y, t.clone())))
                    }
                    f => Err(self.fail("forall-elim", format!("argument has type {f}, not universal"))),
                }
            }
            Case(q, a, l, b, r) => {
                let (fl, fr) = match self.head(&self.enter("case.scrutinee", || self.infer(sc, q))?)? {
                    Formula::Or(fl, fr) => (*fl, *fr),
                    f => return Err(self.fail("or-elim", format!("scrutinee has type {f}, not a disjunction"))),
                };
                // Infer from whichever branch allows it, check the other.
                let left_first = is_inferable(l) || !is_inferable(r);
                let (first, second) = if left_first {
                    ((a, l, fl, "case.left"), (b, r, fr, "case.right"))
                } else {
                    ((b, r, fr, "case.right"), (a, l, fl, "case.left"))
                };
                sc.proofs.push(first.0.clone(), first.2);
                let res = self.enter(first.3, || self.infer(sc, first.1));
                sc.proofs.pop();
                let ty = res?;
                sc.proofs.push(second.0.clone(), second.2);
                let res = self.enter(second.3, || self.check(sc, second.1, &ty));
                sc.proofs.pop();
                res.map(|_| ty)
            }
            Ann(q, ty) => {
                check_formula(self.sig, &sc.terms, ty).map_err(|e| self.fail("ascription", e.to_string()))?;
                self.enter("ann", || self.check(sc, q, ty))?;
                Ok(ty.clone())
            }
            Fold(op, args, _) => {
                let mu = Formula::mu((**op).clone(), args.clone());
                self.check(sc, p, &mu)?;
                Ok(mu)
            }
            Unfold(op, args, q) => {
                let nu = Formula::nu((**op).clone(), args.clone());
                check_formula(self.sig, &sc.terms, &nu).map_err(|e| self.fail("nu-elim", e.to_string()))?;
                self.enter("unfold", || self.check(sc, q, &nu))?;
                Ok(op.instantiate(&op.fixpoint_predicate(crate::formula::FixKind::Nu), args)?)
            }
            Iter(it) => {
                let major = self.enter("iter.arg", || self.infer(sc, &it.arg))?;
                let (op, args) = match self.head(&major)? {
                    Formula::Mu(op, args) => (*op, args),
                    f => return Err(self.fail("mu-elim", format!("major premise has type {f}, not a least fixed point"))),
                };
                self.check_invariant(sc, &it.inv, &op, "mu-elim")?;
                self.check_step(sc, it, &op, false)?;
                Ok(it.inv.apply(&args))
            }
            EqCase(e) => self.check_eqcase(sc, e),
            Abort(_) | Lam(_, None, _) | Inl(_) | Inr(_) | LamX(..) | Wit(..) | Dest(..) | Coiter(_) => {
                Err(self.fail(rule_name(p), "the type of this proof cannot be inferred; annotate it"))
            }
        }
    }

    fn check_invariant(&self, sc: &Scope, inv: &Predicate, op: &PredOperator, rule: &'static str) -> Result<()> {
        check_predicate(self.sig, &sc.terms, inv).map_err(|e| self.fail(rule, e.to_string()))?;
        if inv.param_types() != op.param_types() {
            return Err(self.fail(rule, format!("invariant {inv} does not fit the operator's parameters")));
        }
        Ok(())
    }

    /// The minor premise of an iteration (`B S x̄ ⊢ S x̄`) or coiteration
    /// (`S x̄ ⊢ B S x̄`) with fresh `x̄`.
    fn check_step(&self, sc: &mut Scope, it: &Iteration, op: &PredOperator, co: bool) -> Result<()> {
        if it.params.len() != op.arity() {
            return Err(self.fail(
                if co { "nu-intro" } else { "mu-elim" },
                format!("step binds {} variables, operator has {}", it.params.len(), op.arity()),
            ));
        }
        let (xs, step) = self.open_binders(sc, &it.params, &it.step);
        let vars: Vec<Term> = xs.iter().map(|x| Term::Var(x.clone())).collect();
        let types = op.param_types();
        let n = sc.terms.len();
        for (x, ty) in xs.iter().zip(types) {
            sc.terms.push(x.clone(), ty);
        }
        let b_s = op.instantiate(&it.inv, &vars)?;
        let s_x = it.inv.apply(&vars);
        let (hyp, goal) = if co { (s_x, b_s) } else { (b_s, s_x) };
        sc.proofs.push(it.hyp.clone(), hyp);
        let r = self.enter(if co { "coiter.step" } else { "iter.step" }, || self.check(sc, &step, &goal));
        sc.proofs.pop();
        while sc.terms.len() > n {
            sc.terms.pop();
        }
        r
    }

    /// Checks every premise of an equality elimination and returns `Qθ`.
    fn check_eqcase(&self, sc: &mut Scope, e: &EqElim) -> Result<Formula> {
        const R: &str = "eq-elim";
        let locals = TermCtx::from_pairs(e.locals.iter().cloned());
        let mut seen = BTreeSet::new();
        for (x, ty) in &e.locals {
            if !seen.insert(x.clone()) {
                return Err(self.fail(R, format!("local `{x}` declared twice")));
            }
            self.sig.check_term_type(ty).map_err(|err| self.fail(R, err.to_string()))?;
        }
        if !e.hyps.has_unique_names() {
            return Err(self.fail(R, "stored context declares a hypothesis twice"));
        }
        for (_, f) in e.hyps.iter() {
            check_formula(self.sig, &locals, f).map_err(|err| self.fail(R, format!("stored context: {err}")))?;
        }
        check_formula(self.sig, &locals, &e.goal).map_err(|err| self.fail(R, format!("stored goal: {err}")))?;
        let ut = infer_term_type(self.sig, &locals, &e.lhs).map_err(|err| self.fail(R, err.to_string()))?;
        let vt = infer_term_type(self.sig, &locals, &e.rhs).map_err(|err| self.fail(R, err.to_string()))?;
        if ut != vt {
            return Err(self.fail(R, format!("equation sides have types {ut} and {vt}")));
        }

        // θ is total on the locals and well typed in the surrounding scope.
        let dom: BTreeSet<Name> = e.theta.domain().cloned().collect();
        if dom != seen {
            return Err(self.fail(R, "stored substitution must bind exactly the locals"));
        }
        for (x, ty) in &e.locals {
            let t = e.theta.get(x).expect("total");
            self.expect_term(sc, t, ty, R)?;
        }

        let eq = Formula::eq(e.theta.apply(&e.lhs), e.theta.apply(&e.rhs));
        self.enter("eqcase.major", || self.check(sc, &e.major, &eq))?;
        let hyps = e.hyps.subst_terms(&e.theta);
        self.enter("eqcase.sigma", || self.check_subst(sc, &e.sigma, &hyps))?;

        self.check_csu(&locals, e)?;

        for (i, b) in e.branches.iter().enumerate() {
            let _ = i;
            self.enter("eqcase.branch", || self.check_branch(e, b))?;
        }
        Ok(e.goal.subst_terms(&e.theta))
    }

    fn check_csu(&self, locals: &TermCtx, e: &EqElim) -> Result<()> {
        const R: &str = "eq-elim";
        for b in &e.branches {
            if !is_unifier(self.rs, &b.subst, &e.lhs, &e.rhs)? {
                return Err(self.fail(R, format!("{} does not unify {} and {}", b.subst, e.lhs, e.rhs)));
            }
        }
        match fo_unify(self.rs, &e.lhs, &e.rhs) {
            Ok(csu) => {
                debug_assert_eq!(csu.completeness, Completeness::Complete);
                // Every computed unifier has to be an instance of some branch.
                for mgu in &csu.unifiers {
                    let total = totalize(mgu, locals);
                    let mut covered = false;
                    for b in &e.branches {
                        if factor_subst(self.rs, &total, &totalize(&b.subst, locals))?.is_some() {
                            covered = true;
                            break;
                        }
                    }
                    if !covered {
                        return Err(self.fail(R, format!("branches miss the unifier {mgu} of {} and {}", e.lhs, e.rhs)));
                    }
                }
                Ok(())
            }
            Err(Error::DemandAnnotation { lhs, rhs }) => {
                self.trust.borrow_mut().record(TrustEntry::AssumedCompleteCsu {
                    lhs,
                    rhs,
                    unifiers: e.branches.len(),
                });
                Ok(())
            }
            Err(err) => Err(err),
        }
    }

    /// `Γθ'ᵢ ⊢ πᵢ : Qθ'ᵢ` in the closed scope the branch sees.
    fn check_branch(&self, e: &EqElim, b: &crate::proof::Branch) -> Result<()> {
        const R: &str = "eq-elim";
        let local_names: BTreeSet<Name> = e.locals.iter().map(|(x, _)| x.clone()).collect();
        let range = b.subst.range_vars();
        let mut terms = TermCtx::new();
        let mut fresh_names = BTreeSet::new();
        for (x, ty) in &b.fresh {
            if local_names.contains(x) || !fresh_names.insert(x.clone()) {
                return Err(self.fail(R, format!("branch variable `{x}` clashes with another binder")));
            }
            if !range.contains(x) {
                return Err(self.fail(R, format!("branch variable `{x}` does not occur in {}", b.subst)));
            }
            self.sig.check_term_type(ty).map_err(|err| self.fail(R, err.to_string()))?;
            terms.push(x.clone(), ty.clone());
        }
        for (x, ty) in &e.locals {
            if !b.subst.contains(x) || range.contains(x) {
                terms.push(x.clone(), ty.clone());
            }
        }
        for x in b.subst.domain() {
            if !local_names.contains(x) {
                return Err(self.fail(R, format!("branch substitution binds non-local `{x}`")));
            }
        }
        if let Some(x) = range.iter().find(|x| !terms.contains(x)) {
            return Err(self.fail(R, format!("branch substitution mentions undeclared `{x}`")));
        }
        for (x, ty) in &e.locals {
            if let Some(t) = b.subst.get(x) {
                let found = infer_term_type(self.sig, &terms, t).map_err(|err| self.fail(R, err.to_string()))?;
                if found != *ty {
                    return Err(self.fail(R, format!("branch binds `{x} : {ty}` to {t} of type {found}")));
                }
            }
        }
        let mut sc = Scope::new(terms, e.hyps.subst_terms(&b.subst));
        let goal = e.goal.subst_terms(&b.subst);
        self.check(&mut sc, &b.proof, &goal)
    }

    fn check_subst(&self, sc: &mut Scope, sigma: &ProofSubst, ctx: &Context) -> Result<()> {
        let want: BTreeSet<&Name> = ctx.names().collect();
        let have: BTreeSet<&Name> = sigma.domain().collect();
        if want != have {
            return Err(self.fail(
                "subst",
                format!(
                    "substitution domain {{{}}} differs from context {{{}}}",
                    have.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", "),
                    want.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ")
                ),
            ));
        }
        for (a, f) in ctx.iter() {
            let q = sigma.get(a).expect("same domain");
            self.check(sc, q, f)?;
        }
        Ok(())
    }
}

/// Extends `θ` with `x ↦ x` for every local it leaves unbound.
pub(crate) fn totalize(theta: &TermSubst, locals: &TermCtx) -> TermSubst {
    let mut out = theta.clone();
    for (x, _) in locals.iter() {
        if !out.contains(x) {
            out.insert(x.clone(), Term::Var(x.clone()));
        }
    }
    out
}

fn rule_name(p: &ProofTerm) -> &'static str {
    use ProofTerm::*;
    match p {
        Var(_) => "axiom",
        Unit => "top-intro",
        Abort(_) => "bot-elim",
        Lam(..) => "imp-intro",
        App(..) => "imp-elim",
        Pair(..) => "and-intro",
        Fst(_) | Snd(_) => "and-elim",
        Inl(_) | Inr(_) => "or-intro",
        Case(..) => "or-elim",
        LamX(..) => "forall-intro",
        TApp(..) => "forall-elim",
        Wit(..) => "exists-intro",
        Dest(..) => "exists-elim",
        Refl(_) => "refl",
        EqCase(_) => "eq-elim",
        Fold(..) => "mu-intro",
        Iter(_) => "mu-elim",
        Coiter(_) => "nu-intro",
        Unfold(..) => "nu-elim",
        Ann(..) => "ascription",
    }
}

/// Whether the checker can synthesize a type for `p` without a goal. This
/// is a syntactic condition; inference can still fail on ill-typed input.
pub fn is_inferable(p: &ProofTerm) -> bool {
    use ProofTerm::*;
    match p {
        Var(_) | Unit | Refl(_) | EqCase(_) | Fold(..) | Unfold(..) | Ann(..) => true,
        Lam(_, Some(_), b) => is_inferable(b),
        App(f, _) => is_inferable(f),
        Pair(a, b) => is_inferable(a) && is_inferable(b),
        Fst(q) | Snd(q) | TApp(q, _) => is_inferable(q),
        Iter(it) => is_inferable(&it.arg),
        Case(q, _, l, _, r) => is_inferable(q) && (is_inferable(l) || is_inferable(r)),
        Abort(_) | Lam(_, None, _) | Inl(_) | Inr(_) | LamX(..) | Wit(..) | Dest(..) | Coiter(_) => false,
    }
}

/// `Γ ⊢ π : P`; returns the assumptions used on success.
pub fn check_proof(
    sig: &Signature,
    rs: &RewriteSystem,
    terms: &TermCtx,
    ctx: &Context,
    p: &ProofTerm,
    goal: &Formula,
) -> Result<TrustLog> {
    let c = Checker::new(sig, rs);
    c.check_proof(&Scope::new(terms.clone(), ctx.clone()), p, goal)?;
    Ok(c.trust_log())
}

/// `Γ' ⊢ σ : Γ`: equal domains and `Γ' ⊢ σ(α) : Γ(α)` for each `α`.
pub fn check_subst_typing(
    sig: &Signature,
    rs: &RewriteSystem,
    terms: &TermCtx,
    target: &Context,
    sigma: &ProofSubst,
    source: &Context,
) -> Result<()> {
    let c = Checker::new(sig, rs);
    let mut sc = Scope::new(terms.clone(), target.clone());
    c.check_subst(&mut sc, sigma, source)
}
