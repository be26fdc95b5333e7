//! Proof reduction: leftmost-outermost contraction of the cut rules,
//! never inside the branches of an equality elimination.
//!
//! Contracting a redex can move an introduction into a position where the
//! checker has to synthesize its type (`case α ...` with `α := inl π`). When
//! the type of the substituted variable is known, those occurrences receive
//! an ascription so every reduct stays checkable.

use std::collections::{BTreeMap, BTreeSet};

use crate::check::{check_proof, is_inferable, totalize};
use crate::formula::{FixKind, Formula};
use crate::functor::{operator_functoriality, Template};
use crate::names::{fresh_name, Fuel, Name};
use crate::proof::{Context, EqElim, Iteration, ProofSubst, ProofTerm};
use crate::rewrite::RewriteSystem;
use crate::term::{Signature, Term, TermCtx, TermSubst};
use crate::unify::factor_subst;
use crate::{Error, Result};

pub const DEFAULT_REDUCTION_FUEL: u64 = 100_000;

/// One contraction: the rule, where it happened and the size afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub rule: &'static str,
    pub path: String,
    pub size: usize,
}

impl std::fmt::Display for TraceStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} at {} (size {})", self.rule, self.path, self.size)
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub proof: ProofTerm,
    pub steps: u64,
    pub trace: Vec<TraceStep>,
}

/// Data for re-checking every intermediate reduct.
#[derive(Debug, Clone)]
pub struct SubjectCheck<'a> {
    pub sig: &'a Signature,
    pub terms: TermCtx,
    pub ctx: Context,
    pub goal: Formula,
}

pub struct Reducer<'a> {
    rs: &'a RewriteSystem,
    fuel: u64,
    trace: bool,
    subject: Option<SubjectCheck<'a>>,
}

impl<'a> Reducer<'a> {
    pub fn new(rs: &'a RewriteSystem) -> Self {
        Reducer {
            rs,
            fuel: DEFAULT_REDUCTION_FUEL,
            trace: false,
            subject: None,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn with_subject_check(mut self, sc: SubjectCheck<'a>) -> Self {
        self.subject = Some(sc);
        self
    }

    /// One leftmost-outermost step, or `None` on a normal form.
    pub fn step(&self, p: &ProofTerm) -> Result<Option<(ProofTerm, TraceStep)>> {
        let mut path = Vec::new();
        Ok(self.step_in(p, false, &mut path)?.map(|(q, rule, path)| {
            let size = q.size();
            (q, TraceStep { rule, path, size })
        }))
    }

    pub fn normalize(&self, p: &ProofTerm) -> Result<Outcome> {
        let mut fuel = Fuel::new(self.fuel, "proof reduction");
        let mut cur = p.clone();
        let mut trace = Vec::new();
        while let Some((next, st)) = self.step(&cur)? {
            fuel.tick()?;
            if let Some(sc) = &self.subject {
                check_proof(sc.sig, self.rs, &sc.terms, &sc.ctx, &next, &sc.goal).map_err(|e| Error::Check {
                    path: st.path.clone(),
                    rule: "subject-reduction",
                    detail: format!("reduct of step {} ({}) does not check: {e}", fuel.used(), st.rule),
                })?;
            }
            if self.trace {
                trace.push(st);
            }
            cur = next;
        }
        Ok(Outcome {
            proof: cur,
            steps: fuel.used(),
            trace,
        })
    }

    fn step_in(
        &self,
        p: &ProofTerm,
        inf: bool,
        path: &mut Vec<String>,
    ) -> Result<Option<(ProofTerm, &'static str, String)>> {
        if let Some(rule) = redex_rule(p) {
            let q = self.contract(p, inf, path)?;
            return Ok(Some((q, rule, render_path(path))));
        }
        for (label, child, cinf) in children(p, inf) {
            path.push(label.clone());
            let r = self.step_in(child, cinf, path)?;
            path.pop();
            if let Some((q, rule, at)) = r {
                return Ok(Some((replace_child(p, &label, q), rule, at)));
            }
        }
        Ok(None)
    }

    /// Contracts the redex `p`, which sits in an inference position iff `inf`.
    fn contract(&self, p: &ProofTerm, inf: bool, path: &[String]) -> Result<ProofTerm> {
        use ProofTerm::*;
        let (reduct, ty) = match p {
            App(f, arg) => {
                let (Lam(a, ann, body), asc) = peel(f) else { unreachable!() };
                let (dom, cod) = match asc {
                    Some(f) => match self.rs.head_normalize_formula(f)? {
                        Formula::Imp(l, r) => (Some(*l), Some(*r)),
                        _ => (None, None),
                    },
                    None => (None, None),
                };
                (subst_one(body, a, arg, ann.clone().or(dom), inf), cod)
            }
            Fst(q) | Snd(q) => {
                let (Pair(l, r), asc) = peel(q) else { unreachable!() };
                let first = matches!(p, Fst(_));
                let ty = match asc.map(|f| self.rs.head_normalize_formula(f)).transpose()? {
                    Some(Formula::And(a, b)) => Some(if first { *a } else { *b }),
                    _ => None,
                };
                ((if first { l } else { r }).as_ref().clone(), ty)
            }
            Case(q, a, l, b, r) => {
                let (inj, asc) = peel(q);
                let sides = match asc.map(|f| self.rs.head_normalize_formula(f)).transpose()? {
                    Some(Formula::Or(x, y)) => (Some(*x), Some(*y)),
                    _ => (None, None),
                };
                let reduct = match inj {
                    Inl(v) => subst_one(l, a, v, sides.0, inf),
                    Inr(v) => subst_one(r, b, v, sides.1, inf),
                    _ => unreachable!(),
                };
                (reduct, None)
            }
            TApp(q, t) => {
                let (LamX(x, body), asc) = peel(q) else { unreachable!() };
                let ty = match asc.map(|f| self.rs.head_normalize_formula(f)).transpose()? {
                    Some(Formula::Forall(y, _, b)) => Some(b.subst_terms(&TermSubst::singleton(y, t.clone()))),
                    _ => None,
                };
                (body.subst_terms(&TermSubst::singleton(x.clone(), t.clone())), ty)
            }
            Dest(q, x, a, body) => {
                let (Wit(t, v), asc) = peel(q) else { unreachable!() };
                let hyp = match asc.map(|f| self.rs.head_normalize_formula(f)).transpose()? {
                    Some(Formula::Exists(y, _, b)) => Some(b.subst_terms(&TermSubst::singleton(y, t.clone()))),
                    _ => None,
                };
                let body = body.subst_terms(&TermSubst::singleton(x.clone(), t.clone()));
                (subst_one(&body, a, v, hyp, inf), None)
            }
            Iter(it) => {
                let (Fold(op, ts, q), _) = peel(&it.arg) else { unreachable!() };
                let beta = fresh_proof_name(it);
                let tmpl = Template {
                    params: it.params.clone(),
                    hyp: beta.clone(),
                    body: Iter(Box::new(Iteration {
                        arg: Var(beta),
                        ..(**it).clone()
                    })),
                };
                let mu = op.fixpoint_predicate(FixKind::Mu);
                let f = operator_functoriality(op, ts, &mu, &it.inv, &tmpl)?;
                let value = ProofTerm::app(f, (**q).clone());
                let hyp_ty = op.instantiate(&it.inv, ts)?;
                let step = it.step.subst_terms(&params_to(&it.params, ts));
                (subst_one(&step, &it.hyp, &value, Some(hyp_ty), inf), Some(it.inv.apply(ts)))
            }
            Unfold(op, ts, q) => {
                let (Coiter(it), _) = peel(q) else { unreachable!() };
                let beta = fresh_proof_name(it);
                let tmpl = Template {
                    params: it.params.clone(),
                    hyp: beta.clone(),
                    body: Coiter(Box::new(Iteration {
                        arg: Var(beta),
                        ..(**it).clone()
                    })),
                };
                let nu = op.fixpoint_predicate(FixKind::Nu);
                let f = operator_functoriality(op, ts, &it.inv, &nu, &tmpl)?;
                let step = it.step.subst_terms(&params_to(&it.params, ts));
                let inner = subst_one(&step, &it.hyp, &it.arg, Some(it.inv.apply(ts)), false);
                (ProofTerm::app(f, inner), Some(op.instantiate(&nu, ts)?))
            }
            EqCase(e) => self.contract_eq(e, inf, path)?,
            _ => unreachable!("contract called on a non-redex"),
        };
        Ok(match ty {
            Some(ty) if inf && !is_inferable(&reduct) => Ann(Box::new(reduct), ty),
            _ => reduct,
        })
    }

    /// `eqcase` on `refl`: the first branch whose unifier factors `θ`.
    fn contract_eq(&self, e: &EqElim, inf: bool, path: &[String]) -> Result<(ProofTerm, Option<Formula>)> {
        let locals = TermCtx::from_pairs(e.locals.iter().cloned());
        let theta = totalize(&e.theta, &locals);
        for br in &e.branches {
            let Some(rest) = factor_subst(self.rs, &theta, &totalize(&br.subst, &locals))? else {
                continue;
            };
            let body = br.proof.subst_terms(&rest);
            let types: BTreeMap<Name, Formula> = e
                .hyps
                .iter()
                .filter(|(h, _)| e.sigma.get(h).is_some_and(|v| !is_inferable(v)))
                .map(|(h, f)| (h.clone(), f.subst_terms(&theta)))
                .collect();
            let body = annotate(&body, &types, inf).subst_proofs(&e.sigma);
            return Ok((body, Some(e.goal.subst_terms(&theta))));
        }
        Err(Error::StuckEqualityRedex {
            path: render_path(path),
            theta: theta.to_string(),
        })
    }
}

/// One leftmost-outermost step with the default settings.
pub fn reduce_step(rs: &RewriteSystem, p: &ProofTerm) -> Result<Option<(ProofTerm, TraceStep)>> {
    Reducer::new(rs).step(p)
}

/// Normal form of `p` within `fuel` contractions.
pub fn normalize(rs: &RewriteSystem, p: &ProofTerm, fuel: u64) -> Result<ProofTerm> {
    Ok(Reducer::new(rs).with_fuel(fuel).normalize(p)?.proof)
}

/// Contracts the redex at `path` (segments as in [`redexes`]).
pub fn contract_at(rs: &RewriteSystem, p: &ProofTerm, path: &[String]) -> Result<ProofTerm> {
    fn go(r: &Reducer, p: &ProofTerm, inf: bool, rest: &[String], seen: &mut Vec<String>) -> Result<ProofTerm> {
        let Some((seg, tail)) = rest.split_first() else {
            if redex_rule(p).is_none() {
                return Err(Error::ill_formed("redex path", format!("no redex at {}", render_path(seen))));
            }
            return r.contract(p, inf, seen);
        };
        let (child, cinf) = children(p, inf)
            .into_iter()
            .find(|(l, _, _)| l == seg)
            .map(|(_, c, i)| (c.clone(), i))
            .ok_or_else(|| Error::ill_formed("redex path", format!("no child `{seg}` at {}", render_path(seen))))?;
        seen.push(seg.clone());
        let q = go(r, &child, cinf, tail, seen)?;
        Ok(replace_child(p, seg, q))
    }
    go(&Reducer::new(rs), p, false, path, &mut Vec::new())
}

/// Paths of every redex outside `eqcase` branches, in leftmost-outermost
/// order.
pub fn redexes(p: &ProofTerm) -> Vec<Vec<String>> {
    fn go(p: &ProofTerm, inf: bool, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        if redex_rule(p).is_some() {
            out.push(path.clone());
        }
        for (label, child, cinf) in children(p, inf) {
            path.push(label);
            go(child, cinf, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(p, false, &mut Vec::new(), &mut out);
    out
}

pub fn is_normal(p: &ProofTerm) -> bool {
    redexes(p).is_empty()
}

pub fn render_path(path: &[String]) -> String {
    let mut s = String::from("root");
    for seg in path {
        s.push('/');
        s.push_str(seg);
    }
    s
}

/// Strips ascriptions, returning the outermost one.
fn peel(p: &ProofTerm) -> (&ProofTerm, Option<&Formula>) {
    let mut cur = p;
    let mut asc = None;
    while let ProofTerm::Ann(q, f) = cur {
        asc.get_or_insert(f);
        cur = q;
    }
    (cur, asc)
}

/// The rule that contracts `p`, if `p` is a redex.
pub fn redex_rule(p: &ProofTerm) -> Option<&'static str> {
    use ProofTerm::*;
    match p {
        App(f, _) if matches!(peel(f).0, Lam(..)) => Some("imp-beta"),
        Fst(q) | Snd(q) if matches!(peel(q).0, Pair(..)) => Some("and-proj"),
        Case(q, ..) if matches!(peel(q).0, Inl(_) | Inr(_)) => Some("or-case"),
        TApp(q, _) if matches!(peel(q).0, LamX(..)) => Some("forall-beta"),
        Dest(q, ..) if matches!(peel(q).0, Wit(..)) => Some("exists-dest"),
        Iter(it) if matches!(peel(&it.arg).0, Fold(..)) => Some("mu-iter"),
        Unfold(_, _, q) if matches!(peel(q).0, Coiter(_)) => Some("nu-unfold"),
        EqCase(e) if matches!(peel(&e.major).0, Refl(_)) => Some("eq-refl"),
        _ => None,
    }
}

/// Reducible subterms with their labels and whether the checker infers
/// them (given whether `p` itself is inferred).
fn children(p: &ProofTerm, inf: bool) -> Vec<(String, &ProofTerm, bool)> {
    use ProofTerm::*;
    let l = |s: &str| s.to_string();
    match p {
        Var(_) | Unit | Refl(_) => vec![],
        Abort(q) => vec![(l("abort"), q, false)],
        Lam(_, ann, b) => vec![(l("lam"), b, inf && ann.is_some())],
        App(f, a) => {
            let f_inf = inf || !matches!(**f, Lam(_, Some(_), _));
            vec![(l("app.fun"), f, f_inf), (l("app.arg"), a, false)]
        }
        Pair(a, b) => vec![(l("pair.left"), a, inf), (l("pair.right"), b, inf)],
        Fst(q) => vec![(l("fst"), q, true)],
        Snd(q) => vec![(l("snd"), q, true)],
        Inl(q) => vec![(l("inl"), q, false)],
        Inr(q) => vec![(l("inr"), q, false)],
        Case(q, _, a, _, b) => {
            let left_first = is_inferable(a) || !is_inferable(b);
            vec![
                (l("case.scrutinee"), q, true),
                (l("case.left"), a, inf && left_first),
                (l("case.right"), b, inf && !left_first),
            ]
        }
        LamX(_, b) => vec![(l("lamx"), b, false)],
        TApp(q, _) => vec![(l("tapp"), q, true)],
        Wit(_, q) => vec![(l("wit"), q, false)],
        Dest(q, _, _, b) => vec![(l("dest.major"), q, true), (l("dest.body"), b, false)],
        EqCase(e) => {
            let mut v = vec![(l("eqcase.major"), &e.major, false)];
            v.extend(e.sigma.iter().map(|(h, q)| (format!("eqcase.sigma.{h}"), q, false)));
            v
        }
        Fold(_, _, q) => vec![(l("fold"), q, false)],
        Unfold(_, _, q) => vec![(l("unfold"), q, false)],
        Iter(it) => vec![(l("iter.arg"), &it.arg, true), (l("iter.step"), &it.step, false)],
        Coiter(it) => vec![(l("coiter.arg"), &it.arg, false), (l("coiter.step"), &it.step, false)],
        Ann(q, _) => vec![(l("ann"), q, false)],
    }
}

fn replace_child(p: &ProofTerm, label: &str, new: ProofTerm) -> ProofTerm {
    use ProofTerm::*;
    let b = Box::new(new.clone());
    let mut out = p.clone();
    match (&mut out, label) {
        (Abort(q), "abort")
        | (Lam(_, _, q), "lam")
        | (App(q, _), "app.fun")
        | (App(_, q), "app.arg")
        | (Pair(q, _), "pair.left")
        | (Pair(_, q), "pair.right")
        | (Fst(q), "fst")
        | (Snd(q), "snd")
        | (Inl(q), "inl")
        | (Inr(q), "inr")
        | (Case(q, ..), "case.scrutinee")
        | (Case(_, _, q, _, _), "case.left")
        | (Case(_, _, _, _, q), "case.right")
        | (LamX(_, q), "lamx")
        | (TApp(q, _), "tapp")
        | (Wit(_, q), "wit")
        | (Dest(q, ..), "dest.major")
        | (Dest(_, _, _, q), "dest.body")
        | (Fold(_, _, q), "fold")
        | (Unfold(_, _, q), "unfold")
        | (Ann(q, _), "ann") => *q = b,
        (Iter(it) | Coiter(it), "iter.arg" | "coiter.arg") => it.arg = new,
        (Iter(it) | Coiter(it), "iter.step" | "coiter.step") => it.step = new,
        (EqCase(e), "eqcase.major") => e.major = new,
        (EqCase(e), seg) if seg.starts_with("eqcase.sigma.") => {
            let h = &seg["eqcase.sigma.".len()..];
            let key = e.sigma.domain().find(|k| &***k == h).cloned().expect("sigma entry");
            e.sigma.insert(key, new);
        }
        _ => unreachable!("no child {label}"),
    }
    out
}

fn params_to(params: &[Name], ts: &[Term]) -> TermSubst {
    TermSubst::from_pairs(params.iter().cloned().zip(ts.iter().cloned()))
}

fn fresh_proof_name(it: &Iteration) -> Name {
    let used = it.step.free_proof_vars();
    fresh_name("b", |c| used.contains(c) || *c == *it.hyp)
}

/// `body[v/a]`, ascribing `ty` to the occurrences of `a` whose type the
/// checker must infer when `v` does not allow that.
fn subst_one(body: &ProofTerm, a: &Name, v: &ProofTerm, ty: Option<Formula>, inf: bool) -> ProofTerm {
    let body = match ty {
        Some(ty) if !is_inferable(v) => annotate(body, &BTreeMap::from([(a.clone(), ty)]), inf),
        _ => body.clone(),
    };
    body.subst_proofs(&ProofSubst::singleton(a.clone(), v.clone()))
}

/// `πσ` for `Γ' ⊢ σ : Γ`, ascribing `Γ(α)` wherever `σ(α)` lands in a position
/// whose type is inferred and `σ(α)` alone does not determine it. The plain
/// substitution can leave such a proof uncheckable in the bidirectional system.
pub fn subst_proofs_typed(p: &ProofTerm, sigma: &ProofSubst, source: &Context) -> ProofTerm {
    let types: BTreeMap<Name, Formula> = sigma
        .iter()
        .filter(|(_, v)| !is_inferable(v))
        .filter_map(|(a, _)| source.lookup(a).map(|f| (a.clone(), f.clone())))
        .collect();
    annotate(p, &types, false).subst_proofs(sigma)
}

/// Wraps every inferred occurrence of a variable in `types` with its type.
fn annotate(p: &ProofTerm, types: &BTreeMap<Name, Formula>, inf: bool) -> ProofTerm {
    if types.is_empty() {
        return p.clone();
    }
    let avoid: BTreeSet<Name> = types.values().flat_map(|f| f.free_term_vars()).collect();
    Annotator { avoid }.go(p, types, inf)
}

struct Annotator {
    avoid: BTreeSet<Name>,
}

impl Annotator {
    /// Renames a term binder that would capture a variable of an ascription.
    fn open(&self, x: &Name, body: &ProofTerm) -> (Name, ProofTerm) {
        if !self.avoid.contains(x) {
            return (x.clone(), body.clone());
        }
        let fv = body.free_term_vars();
        let x2 = fresh_name(x, |c| self.avoid.contains(c) || fv.contains(c));
        (x2.clone(), body.subst_terms(&TermSubst::singleton(x.clone(), Term::Var(x2))))
    }

    fn go(&self, p: &ProofTerm, types: &BTreeMap<Name, Formula>, inf: bool) -> ProofTerm {
        use ProofTerm::*;
        if types.is_empty() {
            return p.clone();
        }
        let without = |a: &Name| {
            let mut m = types.clone();
            m.remove(a);
            m
        };
        let bx = |q: ProofTerm| Box::new(q);
        match p {
            Var(a) => match types.get(a) {
                Some(ty) if inf => Ann(bx(p.clone()), ty.clone()),
                _ => p.clone(),
            },
            Unit | Refl(_) => p.clone(),
            Abort(q) => Abort(bx(self.go(q, types, false))),
            Lam(a, ann, q) => Lam(a.clone(), ann.clone(), bx(self.go(q, &without(a), inf && ann.is_some()))),
            App(f, x) => {
                let f_inf = inf || !matches!(**f, Lam(_, Some(_), _));
                App(bx(self.go(f, types, f_inf)), bx(self.go(x, types, false)))
            }
            Pair(a, b) => Pair(bx(self.go(a, types, inf)), bx(self.go(b, types, inf))),
            Fst(q) => Fst(bx(self.go(q, types, true))),
            Snd(q) => Snd(bx(self.go(q, types, true))),
            Inl(q) => Inl(bx(self.go(q, types, false))),
            Inr(q) => Inr(bx(self.go(q, types, false))),
            Case(q, a, l, b, r) => {
                let left_first = is_inferable(l) || !is_inferable(r);
                Case(
                    bx(self.go(q, types, true)),
                    a.clone(),
                    bx(self.go(l, &without(a), inf && left_first)),
                    b.clone(),
                    bx(self.go(r, &without(b), inf && !left_first)),
                )
            }
            LamX(x, q) => {
                let (x, q) = self.open(x, q);
                LamX(x, bx(self.go(&q, types, false)))
            }
            TApp(q, t) => TApp(bx(self.go(q, types, true)), t.clone()),
            Wit(t, q) => Wit(t.clone(), bx(self.go(q, types, false))),
            Dest(q, x, a, body) => {
                let (x, body) = self.open(x, body);
                Dest(bx(self.go(q, types, true)), x, a.clone(), bx(self.go(&body, &without(a), false)))
            }
            EqCase(e) => {
                let mut e = (**e).clone();
                e.major = self.go(&e.major, types, false);
                e.sigma = ProofSubst::from_pairs(e.sigma.iter().map(|(h, q)| (h.clone(), self.go(q, types, false))));
                EqCase(Box::new(e))
            }
            Fold(op, ts, q) => Fold(op.clone(), ts.clone(), bx(self.go(q, types, false))),
            Unfold(op, ts, q) => Unfold(op.clone(), ts.clone(), bx(self.go(q, types, false))),
            Ann(q, f) => Ann(bx(self.go(q, types, false)), f.clone()),
            Iter(it) | Coiter(it) => {
                let co = matches!(p, Coiter(_));
                let mut it2 = (**it).clone();
                it2.arg = self.go(&it.arg, types, !co);
                let mut step = it.step.clone();
                for x in it2.params.iter_mut() {
                    let (x2, s2) = self.open(x, &step);
                    *x = x2;
                    step = s2;
                }
                it2.step = self.go(&step, &without(&it.hyp), false);
                if co {
                    Coiter(Box::new(it2))
                } else {
                    Iter(Box::new(it2))
                }
            }
        }
    }
}
