//! Elaboration of `subst H in π`.
//!
//! `H` must prove an equation `u = v` whose unification problem has at most
//! one most general unifier. The sugar becomes an equality elimination whose
//! stored context is every hypothesis in scope, whose locals are every term
//! variable in scope, with identity `θ` and `σ`, and whose single branch is
//! `π` under that unifier. Without a unifier there are no branches and `in π`
//! may be left out.
//!
//! The parser marks sugar with an equality elimination on a reserved
//! constant; this pass walks the proof in checking mode to find the goal and
//! scope at each mark.

use std::collections::BTreeSet;

use munj_core::*;

pub(crate) const SUGAR_TAG: &str = "?subst";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElabError {
    /// Which `subst` occurrence, in parse order.
    pub index: usize,
    pub msg: String,
}

type R<T> = Result<T, ElabError>;

pub(crate) fn sugar(major: ProofTerm, body: Option<ProofTerm>, index: usize) -> ProofTerm {
    ProofTerm::EqCase(Box::new(EqElim {
        locals: Vec::new(),
        hyps: Context::new(),
        theta: TermSubst::new(),
        sigma: ProofSubst::new(),
        lhs: Term::cnst(SUGAR_TAG),
        rhs: Term::cnst(&index.to_string()),
        goal: Formula::Top,
        major,
        branches: body
            .map(|proof| Branch {
                fresh: Vec::new(),
                subst: TermSubst::new(),
                proof,
            })
            .into_iter()
            .collect(),
    }))
}

fn as_sugar(p: &ProofTerm) -> Option<(usize, &ProofTerm, Option<&ProofTerm>)> {
    match p {
        ProofTerm::EqCase(e) => match (&e.lhs, &e.rhs) {
            (Term::Const(t), Term::Const(i)) if &**t == SUGAR_TAG => {
                Some((i.parse().ok()?, &e.major, e.branches.first().map(|b| &b.proof)))
            }
            _ => None,
        },
        _ => None,
    }
}

fn children(p: &ProofTerm) -> Vec<&ProofTerm> {
    use ProofTerm::*;
    match p {
        Var(_) | Unit | Refl(_) => vec![],
        Abort(q) | Lam(_, _, q) | Fst(q) | Snd(q) | Inl(q) | Inr(q) | LamX(_, q) | TApp(q, _) | Wit(_, q)
        | Fold(_, _, q) | Unfold(_, _, q) | Ann(q, _) => vec![q],
        App(a, b) | Pair(a, b) | Dest(a, _, _, b) => vec![a, b],
        Case(q, _, l, _, r) => vec![q, l, r],
        Iter(it) | Coiter(it) => vec![&it.arg, &it.step],
        EqCase(e) => {
            let mut v: Vec<&ProofTerm> = vec![&e.major];
            v.extend(e.sigma.iter().map(|(_, q)| q));
            v.extend(e.branches.iter().map(|b| &b.proof));
            v
        }
    }
}

fn first_sugar(p: &ProofTerm) -> Option<usize> {
    if let Some((i, _, _)) = as_sugar(p) {
        return Some(i);
    }
    children(p).into_iter().find_map(first_sugar)
}

pub fn has_sugar(p: &ProofTerm) -> bool {
    first_sugar(p).is_some()
}

/// Keeps the last entry for each name, in order.
fn dedup_last<T: Clone>(entries: impl DoubleEndedIterator<Item = (Name, T)>) -> Vec<(Name, T)> {
    let mut seen = BTreeSet::new();
    let mut out: Vec<(Name, T)> = entries.rev().filter(|(x, _)| seen.insert(x.clone())).collect();
    out.reverse();
    out
}

pub struct Elaborator<'a> {
    checker: Checker<'a>,
    rs: &'a RewriteSystem,
}

impl<'a> Elaborator<'a> {
    pub fn new(sig: &'a Signature, rs: &'a RewriteSystem) -> Self {
        Elaborator {
            checker: Checker::new(sig, rs),
            rs,
        }
    }

    /// Replaces every `subst` in `p`, which is to prove `goal` in `scope`.
    pub fn elaborate(&self, scope: &Scope, p: &ProofTerm, goal: &Formula) -> R<ProofTerm> {
        self.go(scope, p, goal)
    }

    fn head(&self, at: usize, f: &Formula) -> R<Formula> {
        self.rs.head_normalize_formula(f).map_err(|e| ElabError {
            index: at,
            msg: e.to_string(),
        })
    }

    fn infer(&self, at: usize, sc: &Scope, q: &ProofTerm) -> R<Formula> {
        if has_sugar(q) {
            return Err(ElabError {
                index: at,
                msg: "`subst` cannot stand where a type must be inferred".into(),
            });
        }
        self.checker.infer_proof(sc, q).map_err(|e| ElabError {
            index: at,
            msg: e.to_string(),
        })
    }

    fn go(&self, sc: &Scope, p: &ProofTerm, goal: &Formula) -> R<ProofTerm> {
        use ProofTerm::*;
        let Some(at) = first_sugar(p) else {
            return Ok(p.clone());
        };
        if let Some((i, major, body)) = as_sugar(p) {
            return self.expand(sc, i, major, body, goal);
        }
        let fail = |msg: String| ElabError { index: at, msg };
        let shape = |what: &str, g: &Formula| fail(format!("goal {g} is not {what}"));
        let with_hyp = |a: &Name, f: Formula| {
            let mut s = sc.clone();
            s.proofs.push(a.clone(), f);
            s
        };
        Ok(match p {
            Lam(a, ann, b) => match self.head(at, goal)? {
                Formula::Imp(l, r) => {
                    let hyp = ann.clone().unwrap_or(*l);
                    Lam(a.clone(), ann.clone(), Box::new(self.go(&with_hyp(a, hyp), b, &r)?))
                }
                g => return Err(shape("an implication", &g)),
            },
            LamX(x, b) => match self.head(at, goal)? {
                Formula::Forall(y, ty, body) => {
                    fresh_binder(at, sc, x)?;
                    let body = body.subst_terms(&TermSubst::singleton(y, Term::Var(x.clone())));
                    let mut s = sc.clone();
                    s.terms.push(x.clone(), ty);
                    LamX(x.clone(), Box::new(self.go(&s, b, &body)?))
                }
                g => return Err(shape("a universal", &g)),
            },
            Pair(a, b) => match self.head(at, goal)? {
                Formula::And(l, r) => Pair(Box::new(self.go(sc, a, &l)?), Box::new(self.go(sc, b, &r)?)),
                g => return Err(shape("a conjunction", &g)),
            },
            Inl(q) | Inr(q) => match self.head(at, goal)? {
                Formula::Or(l, r) => {
                    if matches!(p, Inl(_)) {
                        Inl(Box::new(self.go(sc, q, &l)?))
                    } else {
                        Inr(Box::new(self.go(sc, q, &r)?))
                    }
                }
                g => return Err(shape("a disjunction", &g)),
            },
            Wit(t, q) => match self.head(at, goal)? {
                Formula::Exists(y, _, body) => {
                    let body = body.subst_terms(&TermSubst::singleton(y, t.clone()));
                    Wit(t.clone(), Box::new(self.go(sc, q, &body)?))
                }
                g => return Err(shape("an existential", &g)),
            },
            Abort(q) => Abort(Box::new(self.go(sc, q, &Formula::Bot)?)),
            Ann(q, f) => Ann(Box::new(self.go(sc, q, f)?), f.clone()),
            App(f, a) => {
                if let Lam(x, Some(ty), body) = &**f {
                    let arg = self.go(sc, a, ty)?;
                    let body = self.go(&with_hyp(x, ty.clone()), body, goal)?;
                    App(Box::new(Lam(x.clone(), Some(ty.clone()), Box::new(body))), Box::new(arg))
                } else {
                    match self.head(at, &self.infer(at, sc, f)?)? {
                        Formula::Imp(l, _) => App(f.clone(), Box::new(self.go(sc, a, &l)?)),
                        g => return Err(fail(format!("{f} proves {g}, not an implication"))),
                    }
                }
            }
            Case(q, a, l, b, r) => match self.head(at, &self.infer(at, sc, q)?)? {
                Formula::Or(x, y) => Case(
                    q.clone(),
                    a.clone(),
                    Box::new(self.go(&with_hyp(a, *x), l, goal)?),
                    b.clone(),
                    Box::new(self.go(&with_hyp(b, *y), r, goal)?),
                ),
                g => return Err(fail(format!("{q} proves {g}, not a disjunction"))),
            },
            Dest(q, x, a, b) => match self.head(at, &self.infer(at, sc, q)?)? {
                Formula::Exists(y, ty, body) => {
                    fresh_binder(at, sc, x)?;
                    let body = body.subst_terms(&TermSubst::singleton(y, Term::Var(x.clone())));
                    let mut s = with_hyp(a, body);
                    s.terms.push(x.clone(), ty);
                    Dest(q.clone(), x.clone(), a.clone(), Box::new(self.go(&s, b, goal)?))
                }
                g => return Err(fail(format!("{q} proves {g}, not an existential"))),
            },
            Fold(op, ts, q) => {
                let unfolded = op
                    .instantiate(&op.fixpoint_predicate(FixKind::Mu), ts)
                    .map_err(|e| fail(e.to_string()))?;
                Fold(op.clone(), ts.clone(), Box::new(self.go(sc, q, &unfolded)?))
            }
            Unfold(op, ts, q) => {
                let nu = Formula::nu((**op).clone(), ts.clone());
                Unfold(op.clone(), ts.clone(), Box::new(self.go(sc, q, &nu)?))
            }
            Iter(it) => match self.head(at, &self.infer(at, sc, &it.arg)?)? {
                Formula::Mu(op, _) => {
                    let mut it2 = (**it).clone();
                    it2.step = self.step(at, sc, it, &op, false)?;
                    Iter(Box::new(it2))
                }
                g => return Err(fail(format!("{} proves {g}, not a least fixed point", it.arg))),
            },
            Coiter(it) => match self.head(at, goal)? {
                Formula::Nu(op, ts) => {
                    let mut it2 = (**it).clone();
                    it2.arg = self.go(sc, &it.arg, &it.inv.apply(&ts))?;
                    it2.step = self.step(at, sc, it, &op, true)?;
                    Coiter(Box::new(it2))
                }
                g => return Err(shape("a greatest fixed point", &g)),
            },
            EqCase(e) => {
                if has_sugar(&e.major) || e.sigma.iter().any(|(_, q)| has_sugar(q)) {
                    return Err(fail("`subst` cannot stand in the premises of an eqcase".into()));
                }
                let mut e2 = (**e).clone();
                for b in &mut e2.branches {
                    let s = branch_scope(e, b);
                    b.proof = self.go(&s, &b.proof, &e.goal.subst_terms(&b.subst))?;
                }
                EqCase(Box::new(e2))
            }
            Var(_) | Unit | Refl(_) | Fst(_) | Snd(_) | TApp(..) => {
                return Err(fail("`subst` cannot stand where a type must be inferred".into()))
            }
        })
    }

    fn step(&self, at: usize, sc: &Scope, it: &Iteration, op: &PredOperator, co: bool) -> R<ProofTerm> {
        if it.params.len() != op.arity() {
            return Err(ElabError {
                index: at,
                msg: format!("step binds {} variables, operator has {}", it.params.len(), op.arity()),
            });
        }
        let mut s = sc.clone();
        for x in &it.params {
            fresh_binder(at, sc, x)?;
        }
        for (x, ty) in it.params.iter().zip(op.param_types()) {
            s.terms.push(x.clone(), ty);
        }
        let xs: Vec<Term> = it.params.iter().map(|x| Term::Var(x.clone())).collect();
        let b_s = op.instantiate(&it.inv, &xs).map_err(|e| ElabError {
            index: at,
            msg: e.to_string(),
        })?;
        let s_x = it.inv.apply(&xs);
        let (hyp, goal) = if co { (s_x, b_s) } else { (b_s, s_x) };
        s.proofs.push(it.hyp.clone(), hyp);
        self.go(&s, &it.step, &goal)
    }

    fn expand(&self, sc: &Scope, at: usize, major: &ProofTerm, body: Option<&ProofTerm>, goal: &Formula) -> R<ProofTerm> {
        let fail = |msg: String| ElabError { index: at, msg };
        let (u, v) = match self.head(at, &self.infer(at, sc, major)?)? {
            Formula::Eq(u, v) => (u, v),
            f => return Err(fail(format!("{major} proves {f}, not an equation"))),
        };
        let csu = match fo_unify(self.rs, &u, &v) {
            Ok(c) => c,
            Err(Error::DemandAnnotation { .. }) => {
                return Err(fail(format!(
                    "{u} = {v} is outside the constructor fragment; write the eqcase with its unifiers"
                )))
            }
            Err(e) => return Err(fail(e.to_string())),
        };
        if csu.unifiers.len() > 1 {
            return Err(fail(format!("{u} = {v} has {} most general unifiers", csu.unifiers.len())));
        }
        let locals = dedup_last(sc.terms.iter().cloned().collect::<Vec<_>>().into_iter());
        let hyps = Context::from_pairs(dedup_last(sc.proofs.iter().cloned().collect::<Vec<_>>().into_iter()));
        let theta = TermSubst::from_pairs(locals.iter().map(|(x, _)| (x.clone(), Term::Var(x.clone()))));
        let sigma = ProofSubst::from_pairs(hyps.names().map(|h| (h.clone(), ProofTerm::Var(h.clone()))));
        let mut e = EqElim {
            locals,
            hyps,
            theta,
            sigma,
            lhs: u,
            rhs: v,
            goal: goal.clone(),
            major: major.clone(),
            branches: Vec::new(),
        };
        if let Some(mgu) = csu.unifiers.into_iter().next() {
            let Some(body) = body else {
                return Err(fail(format!("{} = {} is unifiable; `subst` needs `in`", e.lhs, e.rhs)));
            };
            let mut b = Branch {
                fresh: Vec::new(),
                subst: mgu,
                proof: ProofTerm::Unit,
            };
            let s = branch_scope(&e, &b);
            b.proof = self.go(&s, body, &goal.subst_terms(&b.subst))?;
            e.branches.push(b);
        }
        trim(&mut e);
        Ok(ProofTerm::EqCase(Box::new(e)))
    }
}

/// Keeps only the hypotheses the branch uses and the variables they, the
/// equation or the goal mention.
fn trim(e: &mut EqElim) {
    let used: BTreeSet<Name> = e.branches.iter().flat_map(|b| b.proof.free_proof_vars()).collect();
    e.hyps = Context::from_pairs(e.hyps.iter().filter(|(h, _)| used.contains(h)).cloned());
    let mut needed = e.hyps.free_term_vars();
    needed.extend(e.lhs.free_vars());
    needed.extend(e.rhs.free_vars());
    needed.extend(e.goal.free_term_vars());
    for b in &e.branches {
        needed.extend(b.proof.free_term_vars());
    }
    e.locals.retain(|(x, _)| needed.contains(x));
    e.theta = TermSubst::from_pairs(e.locals.iter().map(|(x, _)| (x.clone(), Term::Var(x.clone()))));
    e.sigma = ProofSubst::from_pairs(e.hyps.names().map(|h| (h.clone(), ProofTerm::Var(h.clone()))));
}

/// The stored context of an elaborated `subst` names variables as they are
/// in scope, so a binder above it may not hide an outer variable.
fn fresh_binder(at: usize, sc: &Scope, x: &Name) -> R<()> {
    if sc.terms.contains(x) {
        return Err(ElabError {
            index: at,
            msg: format!("binder `{x}` hides a variable of the same name; rename it"),
        });
    }
    Ok(())
}

/// The closed scope a branch is checked in.
fn branch_scope(e: &EqElim, b: &Branch) -> Scope {
    let range = b.subst.range_vars();
    let mut terms = TermCtx::from_pairs(b.fresh.iter().cloned());
    for (x, ty) in &e.locals {
        if !b.subst.contains(x) || range.contains(x) {
            terms.push(x.clone(), ty.clone());
        }
    }
    Scope::new(terms, e.hyps.subst_terms(&b.subst))
}
