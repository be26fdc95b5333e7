//! Functoriality of positive and negative formula contexts.
//!
//! Given `λp. B` and a template `x̄.α.π` with `α : P x̄ ⊢ π : P' x̄`, builds a
//! proof of `B P ⊃ B P'` (positive) or `B P' ⊃ B P` (negative). Every
//! emitted abstraction carries its domain so the result can be applied in
//! inference position.

use std::collections::BTreeSet;

use crate::formula::{polarity_of, FixKind, Formula, PredOperator, Predicate};
use crate::names::{fresh_name, Name};
use crate::proof::{Iteration, ProofTerm};
use crate::term::{Term, TermSubst};
use crate::{Error, Result};

/// `x̄.α.π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub params: Vec<Name>,
    pub hyp: Name,
    pub body: ProofTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// `F^sign_{λp.body}(template)`.
pub fn functoriality(
    p: &Name,
    body: &Formula,
    sign: Sign,
    src: &Predicate,
    tgt: &Predicate,
    tmpl: &Template,
) -> Result<ProofTerm> {
    if src.param_types() != tgt.param_types() || tmpl.params.len() != src.arity() {
        return Err(Error::Arity {
            what: format!("functoriality template over `{p}`"),
            expected: src.arity(),
            found: tmpl.params.len(),
        });
    }
    let mut proof_avoid = tmpl.body.free_proof_vars();
    proof_avoid.insert(tmpl.hyp.clone());
    let mut term_avoid = tmpl.body.free_term_vars();
    term_avoid.extend(tmpl.params.iter().cloned());
    term_avoid.extend(src.free_term_vars());
    term_avoid.extend(tgt.free_term_vars());
    term_avoid.extend(body.free_term_vars());
    let mut pred_avoid = src.body.free_pvars();
    pred_avoid.extend(tgt.body.free_pvars());
    pred_avoid.insert(p.clone());
    let b = fresh_name("b", |c| proof_avoid.contains(c));
    let c = fresh_name("c", |c| proof_avoid.contains(c) || c == &*b);
    let st = Builder {
        p,
        src,
        tgt,
        tmpl,
        term_avoid,
        pred_avoid,
        b,
        c,
    };
    st.go(sign, body)
}

/// `F_{λp.B p t̄}` for an operator `B` over `p`; the shape used by the
/// fixed-point reduction rules.
pub fn operator_functoriality(
    op: &PredOperator,
    args: &[Term],
    src: &Predicate,
    tgt: &Predicate,
    tmpl: &Template,
) -> Result<ProofTerm> {
    let body = op.body_at(args)?;
    functoriality(&op.pvar, &body, Sign::Pos, src, tgt, tmpl)
}

struct Builder<'a> {
    p: &'a Name,
    src: &'a Predicate,
    tgt: &'a Predicate,
    tmpl: &'a Template,
    term_avoid: BTreeSet<Name>,
    pred_avoid: BTreeSet<Name>,
    b: Name,
    c: Name,
}

impl Builder<'_> {
    fn ends(&self, sign: Sign) -> (&Predicate, &Predicate) {
        match sign {
            Sign::Pos => (self.src, self.tgt),
            Sign::Neg => (self.tgt, self.src),
        }
    }

    fn fresh_term(&self, x: &Name, bound: &BTreeSet<Name>) -> Name {
        if !self.term_avoid.contains(x) && !bound.contains(x) {
            return x.clone();
        }
        fresh_name(x, |c| self.term_avoid.contains(c) || bound.contains(c))
    }

    fn go(&self, sign: Sign, q: &Formula) -> Result<ProofTerm> {
        self.go_in(sign, q, &BTreeSet::new())
    }

    /// A proof of `q[S/p] ⊃ q[T/p]` for the current orientation.
    fn go_in(&self, sign: Sign, q: &Formula, bound: &BTreeSet<Name>) -> Result<ProofTerm> {
        let (s, t) = self.ends(sign);
        let dom = q.subst_pvar(self.p, s);
        let b = || ProofTerm::Var(self.b.clone());
        let c = || ProofTerm::Var(self.c.clone());
        let lam_b = |body: ProofTerm| ProofTerm::Lam(self.b.clone(), Some(dom.clone()), Box::new(body));
        if !q.occurs_pvar(self.p) {
            return Ok(lam_b(b()));
        }
        match q {
            Formula::PVar(r, args) if r == self.p => {
                if sign == Sign::Neg {
                    return Err(Error::NonMonotonic {
                        var: self.p.clone(),
                        path: format!("{q} occurs negatively"),
                    });
                }
                let theta = TermSubst::from_pairs(self.tmpl.params.iter().cloned().zip(args.iter().cloned()));
                Ok(ProofTerm::Lam(
                    self.tmpl.hyp.clone(),
                    Some(self.src.apply(args)),
                    Box::new(self.tmpl.body.subst_terms(&theta)),
                ))
            }
            Formula::And(l, r) => {
                let fl = self.go_in(sign, l, bound)?;
                let fr = self.go_in(sign, r, bound)?;
                Ok(lam_b(ProofTerm::pair(
                    ProofTerm::app(fl, ProofTerm::fst(b())),
                    ProofTerm::app(fr, ProofTerm::snd(b())),
                )))
            }
            Formula::Or(l, r) => {
                let fl = self.go_in(sign, l, bound)?;
                let fr = self.go_in(sign, r, bound)?;
                Ok(lam_b(ProofTerm::Case(
                    Box::new(b()),
                    self.c.clone(),
                    Box::new(ProofTerm::inl(ProofTerm::app(fl, c()))),
                    self.c.clone(),
                    Box::new(ProofTerm::inr(ProofTerm::app(fr, c()))),
                )))
            }
            Formula::Imp(l, r) => {
                let fl = self.go_in(sign.flip(), l, bound)?;
                let fr = self.go_in(sign, r, bound)?;
                let inner = ProofTerm::app(fr, ProofTerm::app(b(), ProofTerm::app(fl, c())));
                Ok(lam_b(ProofTerm::Lam(self.c.clone(), Some(l.subst_pvar(self.p, t)), Box::new(inner))))
            }
            Formula::Forall(y, _, body) | Formula::Exists(y, _, body) => {
                let y2 = self.fresh_term(y, bound);
                let body = body.subst_terms(&TermSubst::singleton(y.clone(), Term::Var(y2.clone())));
                let mut bound = bound.clone();
                bound.insert(y2.clone());
                let f = self.go_in(sign, &body, &bound)?;
                let yv = Term::Var(y2.clone());
                Ok(lam_b(if matches!(q, Formula::Forall(..)) {
                    ProofTerm::LamX(y2, Box::new(ProofTerm::app(f, ProofTerm::TApp(Box::new(b()), yv))))
                } else {
                    ProofTerm::Dest(
                        Box::new(b()),
                        y2,
                        self.c.clone(),
                        Box::new(ProofTerm::Wit(yv, Box::new(ProofTerm::app(f, c())))),
                    )
                }))
            }
            Formula::Mu(op, _) | Formula::Nu(op, _) => {
                let kind = if matches!(q, Formula::Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                let (op, zs, bound) = self.open_operator(op, bound);
                // μ: the invariant is μ(B T); ν: the invariant is ν(B S).
                let fixed = PredOperator {
                    pvar: op.pvar.clone(),
                    params: op.params.clone(),
                    body: op.body.subst_pvar(self.p, if kind == FixKind::Mu { t } else { s }),
                };
                let inv = fixed.fixpoint_predicate(kind);
                let inner_body = op.body.subst_pvar(&op.pvar, &inv);
                let f = self.go_in(sign, &inner_body, &bound)?;
                let zvars: Vec<Term> = zs.iter().map(|z| Term::Var(z.clone())).collect();
                let step = match kind {
                    FixKind::Mu => ProofTerm::fold(fixed, zvars, ProofTerm::app(f, c())),
                    FixKind::Nu => ProofTerm::app(f, ProofTerm::unfold(fixed, zvars, c())),
                };
                let it = Box::new(Iteration {
                    inv,
                    arg: b(),
                    params: zs,
                    hyp: self.c.clone(),
                    step,
                });
                Ok(lam_b(match kind {
                    FixKind::Mu => ProofTerm::Iter(it),
                    FixKind::Nu => ProofTerm::Coiter(it),
                }))
            }
            // p occurs, so every remaining shape is unreachable.
            _ => Err(Error::ill_formed("functoriality", format!("unexpected occurrence of the hole in {q}"))),
        }
    }

    /// Renames the operator's predicate variable and parameters so that
    /// neither captures anything.
    fn open_operator(&self, op: &PredOperator, bound: &BTreeSet<Name>) -> (PredOperator, Vec<Name>, BTreeSet<Name>) {
        let mut op = op.clone();
        if self.pred_avoid.contains(&op.pvar) {
            let used = op.body.free_pvars();
            let r = fresh_name(&op.pvar, |c| self.pred_avoid.contains(c) || used.contains(c));
            op.body = op.body.subst_pvar(&op.pvar.clone(), &Predicate::of_pvar(&r, &op.param_types()));
            op.pvar = r;
        }
        let mut bound = bound.clone();
        let mut theta = TermSubst::new();
        let mut zs = Vec::with_capacity(op.params.len());
        for (z, _) in op.params.iter_mut() {
            let z2 = self.fresh_term(z, &bound);
            if z2 != *z {
                theta.insert(z.clone(), Term::Var(z2.clone()));
                *z = z2.clone();
            }
            bound.insert(z2.clone());
            zs.push(z2);
        }
        op.body = op.body.subst_terms(&theta);
        (op, zs, bound)
    }
}

/// Polarity check used before building: `p` must occur only with the given
/// sign.
pub fn admits_sign(p: &Name, body: &Formula, sign: Sign) -> bool {
    use crate::formula::Polarity;
    let pol = polarity_of(p, body);
    match sign {
        Sign::Pos => pol.leq(Polarity::PositiveOnly),
        Sign::Neg => pol.leq(Polarity::NegativeOnly),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::check_proof;
    use crate::formula::tests::nat_op;
    use crate::names::name;
    use crate::proof::Context;
    use crate::rewrite::RewriteSystem;
    use crate::term::{Signature, TermCtx, TermType};

    fn nat() -> TermType {
        TermType::base("nat")
    }

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort("nat").unwrap();
        sig.add_const("0", nat()).unwrap();
        sig.add_const("s", TermType::arrow(nat(), nat())).unwrap();
        sig.add_pred("even", &TermType::arrows([nat()], TermType::Prop)).unwrap();
        sig.add_pred("odd", &TermType::arrows([nat()], TermType::Prop)).unwrap();
        sig
    }

    /// `α : even x ⊢ ... : odd x` from a hypothesis `h : ∀x. even x ⊃ odd x`.
    fn setup() -> (Predicate, Predicate, Template, Context) {
        let p = Predicate::of_atom("even", &[nat()]);
        let q = Predicate::of_atom("odd", &[nat()]);
        let h_ty = Formula::forall("x", nat(), Formula::imp(Formula::atom("even", vec![Term::var("x")]), Formula::atom("odd", vec![Term::var("x")])));
        let tmpl = Template {
            params: vec![name("x")],
            hyp: name("a"),
            body: ProofTerm::app(ProofTerm::tapp(ProofTerm::var("h"), Term::var("x")), ProofTerm::var("a")),
        };
        (p, q, tmpl, Context::from_pairs([(name("h"), h_ty)]))
    }

    fn verify(p: &Name, body: &Formula, sign: Sign) {
        let (src, tgt, tmpl, ctx) = setup();
        let f = functoriality(p, body, sign, &src, &tgt, &tmpl).unwrap();
        let (a, b) = match sign {
            Sign::Pos => (&src, &tgt),
            Sign::Neg => (&tgt, &src),
        };
        let goal = Formula::imp(body.subst_pvar(p, a), body.subst_pvar(p, b));
        let terms = TermCtx::from_pairs([(name("x"), nat())]);
        check_proof(&sig(), &RewriteSystem::new(), &terms, &ctx, &f, &goal)
            .unwrap_or_else(|e| panic!("{f}\n  against {goal}\n  {e}"));
    }

    fn pv(args: Vec<Term>) -> Formula {
        Formula::pvar("P", args)
    }

    #[test]
    fn connectives() {
        let p = name("P");
        let x = || Term::var("x");
        verify(&p, &pv(vec![x()]), Sign::Pos);
        verify(&p, &Formula::Top, Sign::Pos);
        verify(&p, &Formula::and(pv(vec![x()]), Formula::Top), Sign::Pos);
        verify(&p, &Formula::or(Formula::Bot, pv(vec![Term::cnst("0")])), Sign::Pos);
        verify(&p, &Formula::imp(pv(vec![x()]), Formula::Bot), Sign::Neg);
        verify(&p, &Formula::imp(Formula::imp(pv(vec![x()]), Formula::Bot), pv(vec![x()])), Sign::Pos);
        verify(&p, &Formula::forall("y", nat(), pv(vec![Term::var("y")])), Sign::Pos);
        verify(&p, &Formula::exists("x", nat(), pv(vec![Term::var("x")])), Sign::Pos);
    }

    #[test]
    fn fixed_points() {
        let p = name("P");
        // μN x. P x ∨ ∃y. x = s y ∧ N y
        let mut op = nat_op();
        op.body = Formula::or(pv(vec![Term::var("x")]), match op.body {
            Formula::Or(_, r) => *r,
            _ => unreachable!(),
        });
        verify(&p, &Formula::mu(op.clone(), vec![Term::var("x")]), Sign::Pos);
        verify(&p, &Formula::nu(op, vec![Term::cnst("0")]), Sign::Pos);
    }

    #[test]
    fn wrong_sign_is_rejected() {
        let (src, tgt, tmpl, _) = setup();
        let e = functoriality(&name("P"), &pv(vec![Term::var("x")]), Sign::Neg, &src, &tgt, &tmpl).unwrap_err();
        assert!(matches!(e, Error::NonMonotonic { .. }));
        assert!(!admits_sign(&name("P"), &Formula::imp(pv(vec![Term::var("x")]), Formula::Bot), Sign::Pos));
    }

    #[test]
    fn binders_avoid_template_variables() {
        // The template mentions a free `y`, and so does the quantifier.
        let p = name("P");
        let (src, tgt, mut tmpl, ctx) = setup();
        tmpl.body = ProofTerm::app(ProofTerm::lam_ann("z", Formula::eq(Term::var("y"), Term::var("y")), tmpl.body), ProofTerm::Refl(Term::var("y")));
        let body = Formula::forall("y", nat(), pv(vec![Term::var("y")]));
        let f = functoriality(&p, &body, Sign::Pos, &src, &tgt, &tmpl).unwrap();
        let goal = Formula::imp(body.subst_pvar(&p, &src), body.subst_pvar(&p, &tgt));
        let terms = TermCtx::from_pairs([(name("y"), nat())]);
        check_proof(&sig(), &RewriteSystem::new(), &terms, &ctx, &f, &goal).unwrap();
    }
}
