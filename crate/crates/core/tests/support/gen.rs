//! Random generation of small well-typed proofs over a fixed arithmetic
//! theory, with every kind of redex represented. Shared by the property
//! tests of this crate and the acceptance suite of the command-line crate.

#![allow(dead_code)]

use munj_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn nat() -> TermType {
    TermType::base("nat")
}
pub fn zero() -> Term {
    Term::cnst("0")
}
pub fn s(t: Term) -> Term {
    Term::app(Term::cnst("s"), t)
}
pub fn plus(a: Term, b: Term) -> Term {
    Term::apps(Term::cnst("+"), [a, b])
}
pub fn v(x: &str) -> Term {
    Term::var(x)
}
pub fn numeral(n: usize) -> Term {
    (0..n).fold(zero(), |t, _| s(t))
}

/// `nat`, `0`, `s`, `+` with its two defining rules, and predicates `p`,
/// `q` over `nat` and a proposition `r`.
pub fn theory() -> (Signature, RewriteSystem) {
    let mut sig = Signature::new();
    sig.add_sort("nat").unwrap();
    sig.add_const("0", nat()).unwrap();
    sig.add_const("s", TermType::arrow(nat(), nat())).unwrap();
    sig.add_const("+", TermType::arrows([nat(), nat()], nat())).unwrap();
    sig.add_pred("p", &TermType::arrow(nat(), TermType::Prop)).unwrap();
    sig.add_pred("q", &TermType::arrow(nat(), TermType::Prop)).unwrap();
    sig.add_pred("r", &TermType::Prop).unwrap();
    let mut rs = RewriteSystem::new();
    rs.add_rule(RewriteRule::term(vec![(name("y"), nat())], plus(zero(), v("y")), v("y")));
    rs.add_rule(RewriteRule::term(
        vec![(name("x"), nat()), (name("y"), nat())],
        plus(s(v("x")), v("y")),
        s(plus(v("x"), v("y"))),
    ));
    (sig, rs)
}

pub fn p(t: Term) -> Formula {
    Formula::atom("p", vec![t])
}
pub fn q(t: Term) -> Formula {
    Formula::atom("q", vec![t])
}

/// Term variables `x`, `y` and the hypotheses every generated proof may use.
pub fn base_terms() -> TermCtx {
    TermCtx::from_pairs([(name("x"), nat()), (name("y"), nat())])
}

pub fn base_hyps() -> Context {
    Context::from_pairs([
        (name("h1"), p(v("x"))),
        (name("h2"), Formula::imp(p(v("x")), q(v("y")))),
        (name("h3"), Formula::forall("z", nat(), Formula::imp(p(v("z")), q(s(v("z")))))),
        (name("h4"), Formula::eq(v("x"), v("y"))),
        (name("h5"), Formula::or(p(v("x")), q(v("x")))),
    ])
}

/// `λN λz. z = 0 ∨ ∃y. z = s y ∧ N y`.
pub fn nat_op() -> PredOperator {
    nat_operator()
}

/// The canonical proof of `nat n`.
pub fn nat_proof(n: usize) -> ProofTerm {
    let mut pf = ProofTerm::fold(nat_op(), vec![zero()], ProofTerm::inl(ProofTerm::Refl(zero())));
    for k in 0..n {
        let t = numeral(k + 1);
        pf = ProofTerm::fold(
            nat_op(),
            vec![t.clone()],
            ProofTerm::inr(ProofTerm::wit(numeral(k), ProofTerm::pair(ProofTerm::Refl(t), pf))),
        );
    }
    pf
}

#[derive(Clone)]
pub struct Env {
    pub terms: Vec<(Name, TermType)>,
    pub hyps: Vec<(Name, Formula)>,
}

impl Env {
    pub fn base() -> Self {
        Env {
            terms: base_terms().iter().cloned().collect(),
            hyps: base_hyps().iter().cloned().collect(),
        }
    }
    fn with_term(&self, x: &Name) -> Self {
        let mut e = self.clone();
        e.terms.push((x.clone(), nat()));
        e
    }
    fn with_hyp(&self, a: &Name, f: Formula) -> Self {
        let mut e = self.clone();
        e.hyps.push((a.clone(), f));
        e
    }
    fn without_term(&self, x: &str) -> Self {
        let mut e = self.clone();
        e.terms.retain(|(y, _)| &**y != x);
        e.hyps.retain(|(_, f)| !f.free_term_vars().contains(x));
        e
    }
    pub fn term_ctx(&self) -> TermCtx {
        TermCtx::from_pairs(self.terms.iter().cloned())
    }
    pub fn context(&self) -> Context {
        Context::from_pairs(self.hyps.iter().cloned())
    }
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    counter: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
        }
    }

    fn fresh(&mut self, base: &str) -> Name {
        self.counter += 1;
        name(&format!("{base}{}", self.counter))
    }

    /// A term binder name: sometimes `w`, which substitutions in the tests
    /// introduce, so that capture avoidance is exercised.
    fn binder(&mut self, env: &Env) -> Name {
        if self.rng.gen_bool(0.3) && !env.terms.iter().any(|(x, _)| &**x == "w") {
            name("w")
        } else {
            self.fresh("z")
        }
    }

    pub fn term(&mut self, env: &Env, depth: u32) -> Term {
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..4) };
        match choice {
            0 => zero(),
            1 => match env.terms.choose(&mut self.rng) {
                Some((x, _)) => Term::Var(x.clone()),
                None => zero(),
            },
            2 => s(self.term(env, depth - 1)),
            _ => plus(self.term(env, depth - 1), self.term(env, depth - 1)),
        }
    }

    pub fn formula(&mut self, env: &Env, depth: u32) -> Formula {
        let choice = if depth == 0 { self.rng.gen_range(0..5) } else { self.rng.gen_range(0..8) };
        match choice {
            0 => Formula::Top,
            1 => p(self.term(env, 1)),
            2 => q(self.term(env, 1)),
            3 => Formula::atom("r", vec![]),
            4 => Formula::eq(self.term(env, 1), self.term(env, 1)),
            5 => Formula::and(self.formula(env, depth - 1), self.formula(env, depth - 1)),
            6 => Formula::imp(self.formula(env, depth - 1), self.formula(env, depth - 1)),
            _ => Formula::or(self.formula(env, depth - 1), self.formula(env, depth - 1)),
        }
    }

    fn leaf(&mut self, env: &Env) -> (ProofTerm, Formula) {
        match self.rng.gen_range(0..4) {
            0 => (ProofTerm::Unit, Formula::Top),
            1 => {
                let t = self.term(env, 1);
                (ProofTerm::Refl(t.clone()), Formula::eq(t.clone(), t))
            }
            _ => match env.hyps.choose(&mut self.rng) {
                Some((a, f)) => (ProofTerm::Var(a.clone()), f.clone()),
                None => (ProofTerm::Unit, Formula::Top),
            },
        }
    }

    /// A proof together with its type, well-typed under `env`.
    pub fn proof(&mut self, env: &Env, depth: u32) -> (ProofTerm, Formula) {
        if depth == 0 {
            return self.leaf(env);
        }
        let d = depth - 1;
        match self.rng.gen_range(0..20) {
            0 => {
                let (a, fa) = self.proof(env, d);
                let (b, fb) = self.proof(env, d);
                (ProofTerm::pair(a, b), Formula::and(fa, fb))
            }
            1 => {
                let (a, fa) = self.proof(env, d);
                let other = self.formula(env, 1);
                if self.rng.gen_bool(0.5) {
                    (ProofTerm::inl(a), Formula::or(fa, other))
                } else {
                    (ProofTerm::inr(a), Formula::or(other, fa))
                }
            }
            2 => {
                let fa = self.formula(env, 1);
                let a = self.fresh("a");
                let (b, fb) = self.proof(&env.with_hyp(&a, fa.clone()), d);
                let ann = self.rng.gen_bool(0.5).then(|| fa.clone());
                (ProofTerm::Lam(a, ann, Box::new(b)), Formula::imp(fa, fb))
            }
            3 => {
                let z = self.binder(env);
                let (b, fb) = self.proof(&env.with_term(&z), d);
                (ProofTerm::LamX(z.clone(), Box::new(b)), Formula::Forall(z, nat(), Box::new(fb)))
            }
            4 => self.witness(env, d),
            5 => {
                // (λa:A. π) ρ
                let (arg, fa) = self.proof(env, d);
                let a = self.fresh("a");
                let (body, fb) = self.proof(&env.with_hyp(&a, fa.clone()), d);
                let head = if self.rng.gen_bool(0.5) {
                    ProofTerm::Lam(a, Some(fa), Box::new(body))
                } else {
                    ProofTerm::Ann(Box::new(ProofTerm::lam(&a, body)), Formula::imp(fa, fb.clone()))
                };
                (ProofTerm::app(head, arg), fb)
            }
            6 => {
                let (a, fa) = self.proof(env, d);
                let (b, fb) = self.proof(env, d);
                let pair = ProofTerm::Ann(Box::new(ProofTerm::pair(a, b)), Formula::and(fa.clone(), fb.clone()));
                if self.rng.gen_bool(0.5) {
                    (ProofTerm::fst(pair), fa)
                } else {
                    (ProofTerm::snd(pair), fb)
                }
            }
            7 => {
                // case (inl π : A ∨ A) (l. ρ) (r. ρ[r/l])
                let (a, fa) = self.proof(env, d);
                let inj = if self.rng.gen_bool(0.5) { ProofTerm::inl(a) } else { ProofTerm::inr(a) };
                let scrut = ProofTerm::Ann(Box::new(inj), Formula::or(fa.clone(), fa.clone()));
                let l = self.fresh("l");
                let r = self.fresh("r");
                let (body, fb) = self.proof(&env.with_hyp(&l, fa), d);
                let body_r = body.subst_proofs(&ProofSubst::singleton(l.clone(), ProofTerm::Var(r.clone())));
                (ProofTerm::Case(Box::new(scrut), l, Box::new(body), r, Box::new(body_r)), fb)
            }
            8 => {
                // (λx. π : ∀x. B) t
                let z = self.binder(env);
                let (b, fb) = self.proof(&env.with_term(&z), d);
                let t = self.term(env, 1);
                let all = Formula::Forall(z.clone(), nat(), Box::new(fb.clone()));
                let ty = fb.subst_terms(&TermSubst::singleton(z.clone(), t.clone()));
                (ProofTerm::tapp(ProofTerm::Ann(Box::new(ProofTerm::LamX(z, Box::new(b))), all), t), ty)
            }
            9 => self.destruct(env, d),
            10 => self.eqcase_refl(env, d),
            11 => self.eqcase_hyp(env, d),
            12 => self.iterate(env, d),
            13 => self.coiterate(env, d),
            14 => self.instantiate_h3(env),
            15 => {
                // Case on the disjunctive hypothesis, with both branches
                // proving the same thing.
                if !env.hyps.iter().any(|(a, _)| &**a == "h5") {
                    return self.leaf(env);
                }
                let l = self.fresh("l");
                let r = self.fresh("r");
                let (body, fb) = self.proof(env, d);
                (ProofTerm::Case(Box::new(ProofTerm::var("h5")), l, Box::new(body.clone()), r, Box::new(body)), fb)
            }
            _ => self.leaf(env),
        }
    }

    /// `app (tapp h3 t) h` for a hypothesis `h : p t`.
    fn instantiate_h3(&mut self, env: &Env) -> (ProofTerm, Formula) {
        let h3 = base_hyps().lookup("h3").cloned();
        let usable = env.hyps.iter().any(|(a, f)| &**a == "h3" && Some(f) == h3.as_ref());
        let args: Vec<(Name, Term)> = env
            .hyps
            .iter()
            .filter_map(|(a, f)| match f {
                Formula::Atom(c, ts) if &**c == "p" => Some((a.clone(), ts[0].clone())),
                _ => None,
            })
            .collect();
        match args.choose(&mut self.rng) {
            Some((h, t)) if usable => (
                ProofTerm::app(ProofTerm::tapp(ProofTerm::var("h3"), t.clone()), ProofTerm::Var(h.clone())),
                q(s(t.clone())),
            ),
            _ => self.leaf(env),
        }
    }

    fn witness(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let (b, fb) = self.proof(env, d);
        let z = self.binder(env);
        let fv = fb.free_term_vars();
        let abstracted = env.terms.iter().find(|(x, _)| fv.contains(x) && self.rng.gen_bool(0.7)).map(|(x, _)| x.clone());
        let (t, body) = match abstracted {
            Some(x) => (Term::Var(x.clone()), fb.subst_terms(&TermSubst::singleton(x, Term::Var(z.clone())))),
            None => (self.term(env, 1), fb),
        };
        (ProofTerm::wit(t, b), Formula::Exists(z, nat(), Box::new(body)))
    }

    fn destruct(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let (w, fw) = self.witness(env, d);
        let Formula::Exists(z, _, body) = &fw else { unreachable!() };
        let packed = ProofTerm::Ann(Box::new(w), fw.clone());
        let z2 = self.fresh("e");
        let a = self.fresh("c");
        let opened = body.subst_terms(&TermSubst::singleton(z.clone(), Term::Var(z2.clone())));
        let inner = env.with_term(&z2).with_hyp(&a, opened);
        let (mut c, mut fc) = self.proof(&inner, d);
        if fc.free_term_vars().contains(&z2) {
            (c, fc) = self.proof(env, d);
        }
        (ProofTerm::Dest(Box::new(packed), z2, a, Box::new(c)), fc)
    }

    /// `eqcase` on `refl (s t)` against `s u = s w`, with one branch `[u := w]`.
    fn eqcase_refl(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let u = self.fresh("u");
        let w = self.fresh("m");
        let t = self.term(env, 1);
        let mut locals = env.terms.clone();
        locals.push((u.clone(), nat()));
        locals.push((w.clone(), nat()));
        let mut theta = TermSubst::from_pairs(env.terms.iter().map(|(x, _)| (x.clone(), Term::Var(x.clone()))));
        theta.insert(u.clone(), t.clone());
        theta.insert(w.clone(), t.clone());
        let branch_env = env.with_term(&w);
        let (bp, goal) = self.proof(&branch_env, d);
        let sigma = ProofSubst::from_pairs(env.hyps.iter().map(|(a, _)| (a.clone(), ProofTerm::Var(a.clone()))));
        let ty = goal.subst_terms(&TermSubst::singleton(w.clone(), t.clone()));
        let e = EqElim {
            locals,
            hyps: env.context(),
            theta,
            sigma,
            lhs: s(Term::Var(u.clone())),
            rhs: s(Term::Var(w.clone())),
            goal,
            major: ProofTerm::Refl(s(t)),
            branches: vec![Branch {
                fresh: vec![],
                subst: TermSubst::singleton(u, Term::Var(w)),
                proof: bp,
            }],
        };
        (ProofTerm::EqCase(Box::new(e)), ty)
    }

    /// `eqcase` on the hypothesis `x = y`.
    fn eqcase_hyp(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let has = |n: &str| env.terms.iter().any(|(x, _)| &**x == n);
        if !has("x") || !has("y") || !env.hyps.iter().any(|(a, _)| &**a == "h4") {
            return self.leaf(env);
        }
        let locals = env.terms.clone();
        let theta = TermSubst::from_pairs(env.terms.iter().map(|(x, _)| (x.clone(), Term::Var(x.clone()))));
        let mgu = TermSubst::singleton(name("x"), v("y"));
        let branch_env = Env {
            terms: env.terms.iter().filter(|(x, _)| &**x != "x").cloned().collect(),
            hyps: env.hyps.iter().map(|(a, f)| (a.clone(), f.subst_terms(&mgu))).collect(),
        };
        let (bp, goal) = self.proof(&branch_env, d);
        let sigma = ProofSubst::from_pairs(env.hyps.iter().map(|(a, _)| (a.clone(), ProofTerm::Var(a.clone()))));
        let e = EqElim {
            locals,
            hyps: env.context(),
            theta,
            sigma,
            lhs: v("x"),
            rhs: v("y"),
            goal: goal.clone(),
            major: ProofTerm::var("h4"),
            branches: vec![Branch {
                fresh: vec![],
                subst: mgu,
                proof: bp,
            }],
        };
        (ProofTerm::EqCase(Box::new(e)), goal)
    }

    /// `iter[λz. F] (nat proof of k) (z a. π)`.
    fn iterate(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let z = self.fresh("z");
        let inner = env.without_term("w").with_term(&z);
        let (step, f) = self.proof(&inner, d);
        let k = self.rng.gen_range(0..3);
        let a = self.fresh("a");
        let inv = Predicate::new(vec![(z.clone(), nat())], f.clone());
        let step = if self.rng.gen_bool(0.5) {
            let l = self.fresh("l");
            let r = self.fresh("r");
            ProofTerm::Case(Box::new(ProofTerm::Var(a.clone())), l, Box::new(step.clone()), r, Box::new(step))
        } else {
            step
        };
        let ty = f.subst_terms(&TermSubst::singleton(z.clone(), numeral(k)));
        (ProofTerm::iter(inv, nat_proof(k), vec![z], &a, step), ty)
    }

    /// `fst (unfold (ν N z. F ∧ N (s z)) [t] (coiter[λz. ⊤] unit (z a. pair π a)))`.
    fn coiterate(&mut self, env: &Env, d: u32) -> (ProofTerm, Formula) {
        let z = self.fresh("z");
        let inner = env.without_term("w").with_term(&z);
        let (pf, f) = self.proof(&inner, d);
        let op = PredOperator::new(
            "N",
            vec![(z.clone(), nat())],
            Formula::and(f.clone(), Formula::pvar("N", vec![s(Term::Var(z.clone()))])),
        );
        let t = self.term(env, 1);
        let a = self.fresh("a");
        let inv = Predicate::new(vec![(z.clone(), nat())], Formula::Top);
        let co = ProofTerm::coiter(inv, ProofTerm::Unit, vec![z.clone()], &a, ProofTerm::pair(pf, ProofTerm::Var(a.clone())));
        let ty = f.subst_terms(&TermSubst::singleton(z, t.clone()));
        (ProofTerm::fst(ProofTerm::unfold(op, vec![t], co)), ty)
    }

    /// Another proof of `f` from `pf`, built from redexes and expansions.
    pub fn wrap(&mut self, pf: ProofTerm, f: &Formula, depth: u32) -> ProofTerm {
        if depth == 0 {
            return pf;
        }
        let inner = self.wrap(pf, f, depth - 1);
        match (self.rng.gen_range(0..6), f) {
            (0, Formula::Imp(..)) => {
                let h = self.fresh("a");
                ProofTerm::lam(&h, ProofTerm::app(head(inner, f), ProofTerm::Var(h.clone())))
            }
            (1, Formula::Forall(..)) => {
                let z = self.fresh("z");
                ProofTerm::lamx(&z, ProofTerm::tapp(head(inner, f), Term::Var(z.clone())))
            }
            (2, _) => {
                let h = self.fresh("a");
                ProofTerm::app(ProofTerm::Lam(h.clone(), Some(f.clone()), Box::new(ProofTerm::Var(h))), inner)
            }
            (3, _) => ProofTerm::fst(ProofTerm::Ann(
                Box::new(ProofTerm::pair(inner, ProofTerm::Unit)),
                Formula::and(f.clone(), Formula::Top),
            )),
            (4, _) => {
                let l = self.fresh("l");
                let r = self.fresh("r");
                ProofTerm::Case(
                    Box::new(ProofTerm::Ann(Box::new(ProofTerm::inr(inner)), Formula::or(f.clone(), f.clone()))),
                    l.clone(),
                    Box::new(ProofTerm::Var(l)),
                    r.clone(),
                    Box::new(ProofTerm::Var(r)),
                )
            }
            _ => inner,
        }
    }
}

fn head(p: ProofTerm, f: &Formula) -> ProofTerm {
    if is_inferable(&p) {
        p
    } else {
        ProofTerm::Ann(Box::new(p), f.clone())
    }
}

/// Removes every ascription, including inside suspended branches.
pub fn erase(p: &ProofTerm) -> ProofTerm {
    use ProofTerm::*;
    let b = |q: &ProofTerm| Box::new(erase(q));
    match p {
        Var(_) | Unit | Refl(_) => p.clone(),
        Ann(q, _) => erase(q),
        Abort(q) => Abort(b(q)),
        Lam(a, ann, q) => Lam(a.clone(), ann.clone(), b(q)),
        App(f, x) => App(b(f), b(x)),
        Pair(x, y) => Pair(b(x), b(y)),
        Fst(q) => Fst(b(q)),
        Snd(q) => Snd(b(q)),
        Inl(q) => Inl(b(q)),
        Inr(q) => Inr(b(q)),
        Case(q, l, x, r, y) => Case(b(q), l.clone(), b(x), r.clone(), b(y)),
        LamX(x, q) => LamX(x.clone(), b(q)),
        TApp(q, t) => TApp(b(q), t.clone()),
        Wit(t, q) => Wit(t.clone(), b(q)),
        Dest(q, x, a, body) => Dest(b(q), x.clone(), a.clone(), b(body)),
        EqCase(e) => {
            let mut e = (**e).clone();
            e.major = erase(&e.major);
            e.sigma = ProofSubst::from_pairs(e.sigma.iter().map(|(h, q)| (h.clone(), erase(q))));
            for br in &mut e.branches {
                br.proof = erase(&br.proof);
            }
            EqCase(Box::new(e))
        }
        Fold(op, ts, q) => Fold(op.clone(), ts.clone(), b(q)),
        Unfold(op, ts, q) => Unfold(op.clone(), ts.clone(), b(q)),
        Iter(it) | Coiter(it) => {
            let mut it2 = (**it).clone();
            it2.arg = erase(&it.arg);
            it2.step = erase(&it.step);
            if matches!(p, Iter(_)) {
                Iter(Box::new(it2))
            } else {
                Coiter(Box::new(it2))
            }
        }
    }
}

/// A substitution of random terms for `x` and `y`, whose range mentions `w`.
pub fn random_term_subst(g: &mut Gen) -> (TermSubst, TermCtx) {
    let env = Env {
        terms: vec![(name("x"), nat()), (name("y"), nat()), (name("w"), nat())],
        hyps: vec![],
    };
    let theta = TermSubst::from_pairs([(name("x"), g.term(&env, 2)), (name("y"), g.term(&env, 2))]);
    (theta, env.term_ctx())
}

/// Every subterm outside suspended branches, preorder.
pub fn subterms(p: &ProofTerm) -> Vec<&ProofTerm> {
    use ProofTerm::*;
    let mut out = vec![p];
    let kids: Vec<&ProofTerm> = match p {
        Var(_) | Unit | Refl(_) => vec![],
        Ann(q, _) | Abort(q) | Lam(_, _, q) | Fst(q) | Snd(q) | Inl(q) | Inr(q) | LamX(_, q) | TApp(q, _) | Wit(_, q) => {
            vec![q]
        }
        Fold(_, _, q) | Unfold(_, _, q) => vec![q],
        App(a, b) | Pair(a, b) | Dest(a, _, _, b) => vec![a, b],
        Case(q, _, l, _, r) => vec![q, l, r],
        EqCase(e) => std::iter::once(&e.major).chain(e.sigma.iter().map(|(_, q)| q)).collect(),
        Iter(it) | Coiter(it) => vec![&it.arg, &it.step],
    };
    for k in kids {
        out.extend(subterms(k));
    }
    out
}
