//! Natural numbers as a least fixed point and the rules derived from it:
//! `nat 0`, `nat x ⊃ nat (s x)` and induction.

use std::collections::BTreeSet;

use crate::check::check_proof;
use crate::formula::{Formula, PredOperator, Predicate};
use crate::names::{fresh_name, name, Name};
use crate::proof::{Branch, Context, EqElim, ProofSubst, ProofTerm};
use crate::rewrite::RewriteSystem;
use crate::term::{Signature, Term, TermCtx, TermSubst, TermType};
use crate::{Error, Result};

pub fn nat_type() -> TermType {
    TermType::base("nat")
}

fn zero() -> Term {
    Term::cnst("0")
}

fn succ(t: Term) -> Term {
    Term::app(Term::cnst("s"), t)
}

/// `λN λx. x = 0 ∨ ∃y. x = s y ∧ N y`.
pub fn nat_operator() -> PredOperator {
    PredOperator::new(
        "N",
        vec![(name("x"), nat_type())],
        Formula::or(
            Formula::eq(Term::var("x"), zero()),
            Formula::exists(
                "y",
                nat_type(),
                Formula::and(
                    Formula::eq(Term::var("x"), succ(Term::var("y"))),
                    Formula::pvar("N", vec![Term::var("y")]),
                ),
            ),
        ),
    )
}

/// `nat t`.
pub fn nat(t: Term) -> Formula {
    Formula::mu(nat_operator(), vec![t])
}

/// The derived rules, each checked when built.
#[derive(Debug, Clone)]
pub struct NatRules<'a> {
    sig: &'a Signature,
    rs: &'a RewriteSystem,
    /// `nat 0`.
    pub zero_intro: ProofTerm,
    /// `∀x. nat x ⊃ nat (s x)`.
    pub succ_intro: ProofTerm,
}

pub fn succ_intro_goal() -> Formula {
    Formula::forall("x", nat_type(), Formula::imp(nat(Term::var("x")), nat(succ(Term::var("x")))))
}

/// Builds and checks zero-intro and successor-intro.
pub fn derive_nat_rules<'a>(sig: &'a Signature, rs: &'a RewriteSystem) -> Result<NatRules<'a>> {
    let nat_ty = nat_type();
    let missing = |what: &str| Error::ill_formed("signature", format!("natural numbers need {what}"));
    if !sig.has_sort("nat") {
        return Err(missing("the sort nat"));
    }
    if sig.const_type("0") != Some(&nat_ty) {
        return Err(missing("0 : nat"));
    }
    if sig.const_type("s") != Some(&TermType::arrow(nat_ty.clone(), nat_ty)) {
        return Err(missing("s : nat -> nat"));
    }
    let op = nat_operator();
    let zero_intro = ProofTerm::fold(op.clone(), vec![zero()], ProofTerm::inl(ProofTerm::Refl(zero())));
    let x = Term::var("x");
    let succ_intro = ProofTerm::lamx(
        "x",
        ProofTerm::lam(
            "h",
            ProofTerm::fold(
                op,
                vec![succ(x.clone())],
                ProofTerm::inr(ProofTerm::wit(x.clone(), ProofTerm::pair(ProofTerm::Refl(succ(x)), ProofTerm::var("h")))),
            ),
        ),
    );
    let none = TermCtx::new();
    check_proof(sig, rs, &none, &Context::new(), &zero_intro, &nat(zero()))?;
    check_proof(sig, rs, &none, &Context::new(), &succ_intro, &succ_intro_goal())?;
    Ok(NatRules {
        sig,
        rs,
        zero_intro,
        succ_intro,
    })
}

/// Names for the template's binders, clear of `P`'s free variables.
struct Names {
    x: Name,
    y: Name,
}

impl Names {
    fn new(p: &Predicate) -> Self {
        let fv = p.free_term_vars();
        let x = fresh_name("x", |c| fv.contains(c));
        let y = fresh_name("y", |c| fv.contains(c) || c == &*x);
        Names { x, y }
    }
}

/// `∀y. P y ⊃ P (s y)`.
pub fn step_goal(p: &Predicate) -> Formula {
    let n = Names::new(p);
    let y = Term::Var(n.y.clone());
    Formula::Forall(n.y.clone(), nat_type(), Box::new(Formula::imp(p.apply(&[y.clone()]), p.apply(&[succ(y)]))))
}

/// `∀x. nat x ⊃ P x`.
pub fn induction_conclusion(p: &Predicate) -> Formula {
    let n = Names::new(p);
    let x = Term::Var(n.x.clone());
    Formula::Forall(n.x, nat_type(), Box::new(Formula::imp(nat(x.clone()), p.apply(&[x]))))
}

/// `P 0 ⊃ (∀y. P y ⊃ P (s y)) ⊃ ∀x. nat x ⊃ P x`.
pub fn induction_goal(p: &Predicate) -> Formula {
    Formula::imp(p.apply(&[zero()]), Formula::imp(step_goal(p), induction_conclusion(p)))
}

impl NatRules<'_> {
    /// The induction template for `P`, checked at [`induction_goal`].
    /// `params` types the free variables of `P`.
    pub fn induction(&self, p: &Predicate, params: &TermCtx) -> Result<ProofTerm> {
        let proof = induction_template(p, params)?;
        check_proof(self.sig, self.rs, params, &Context::new(), &proof, &induction_goal(p))?;
        Ok(proof)
    }

    /// `∀x. nat x ⊃ P x` from proofs of the base case and the step.
    pub fn apply_induction(&self, p: &Predicate, params: &TermCtx, base: ProofTerm, step: ProofTerm) -> Result<ProofTerm> {
        let head = ProofTerm::Ann(Box::new(self.induction(p, params)?), induction_goal(p));
        Ok(ProofTerm::app(ProofTerm::app(head, base), step))
    }
}

/// `λb. λst. λx. λn. iter[P] n (x a. case a (e. ...) (w. dest w (y c. ...)))`,
/// where both cases rewrite the goal with an equality elimination.
pub fn induction_template(p: &Predicate, params: &TermCtx) -> Result<ProofTerm> {
    if p.param_types() != [nat_type()] {
        return Err(Error::ill_formed("induction predicate", format!("{p} is not a predicate over nat")));
    }
    let fv: BTreeSet<Name> = p.free_term_vars();
    let mut extra = Vec::new();
    for v in &fv {
        let ty = params.lookup(v).ok_or_else(|| Error::Unbound(v.clone()))?;
        extra.push((v.clone(), ty.clone()));
    }
    let Names { x, y } = Names::new(p);
    let xv = Term::Var(x.clone());
    let yv = Term::Var(y.clone());
    let identity = |locals: &[(Name, TermType)]| {
        TermSubst::from_pairs(locals.iter().map(|(v, _)| (v.clone(), Term::Var(v.clone()))))
    };
    let pb = || ProofTerm::var("b");

    // x = 0 ⊢ P x from b : P 0.
    let mut locals0 = vec![(x.clone(), nat_type())];
    locals0.extend(extra.iter().cloned());
    let base = EqElim {
        theta: identity(&locals0),
        locals: locals0,
        hyps: Context::from_pairs([(name("b"), p.apply(&[zero()]))]),
        sigma: ProofSubst::singleton(name("b"), pb()),
        lhs: xv.clone(),
        rhs: zero(),
        goal: p.apply(&[xv.clone()]),
        major: ProofTerm::var("e"),
        branches: vec![Branch {
            fresh: vec![],
            subst: TermSubst::singleton(x.clone(), zero()),
            proof: pb(),
        }],
    };

    // x = s y ⊢ P x from st : ∀y. P y ⊃ P (s y) and ih : P y.
    let mut locals1 = vec![(x.clone(), nat_type()), (y.clone(), nat_type())];
    locals1.extend(extra.iter().cloned());
    let step = EqElim {
        theta: identity(&locals1),
        locals: locals1,
        hyps: Context::from_pairs([(name("st"), step_goal(p)), (name("ih"), p.apply(&[yv.clone()]))]),
        sigma: ProofSubst::from_pairs([
            (name("st"), ProofTerm::var("st")),
            (name("ih"), ProofTerm::snd(ProofTerm::var("c"))),
        ]),
        lhs: xv.clone(),
        rhs: succ(yv.clone()),
        goal: p.apply(&[xv.clone()]),
        major: ProofTerm::fst(ProofTerm::var("c")),
        branches: vec![Branch {
            fresh: vec![],
            subst: TermSubst::singleton(x.clone(), succ(yv.clone())),
            proof: ProofTerm::app(ProofTerm::tapp(ProofTerm::var("st"), yv), ProofTerm::var("ih")),
        }],
    };

    let body = ProofTerm::case(
        ProofTerm::var("a"),
        "e",
        ProofTerm::EqCase(Box::new(base)),
        "w",
        ProofTerm::Dest(Box::new(ProofTerm::var("w")), y, name("c"), Box::new(ProofTerm::EqCase(Box::new(step)))),
    );
    let iter = ProofTerm::iter(p.clone(), ProofTerm::var("n"), vec![x.clone()], "a", body);
    Ok(ProofTerm::lam(
        "b",
        ProofTerm::lam("st", ProofTerm::LamX(x, Box::new(ProofTerm::lam("n", iter)))),
    ))
}
