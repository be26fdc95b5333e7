//! Brute-force oracles that do not share code with the kernel: enumeration
//! of unifiers over a finite term universe, and ground instances of
//! recursive-definition rules checked against the declared order.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use munj_core::*;
use rand::seq::SliceRandom;
use rand::Rng;

/// All terms over `0`, `s` and the given variables with at most `depth`
/// nested constructors.
pub fn zero_succ_terms(vars: &[&str], depth: usize) -> Vec<Term> {
    let mut level: Vec<Term> = std::iter::once(Term::cnst("0")).chain(vars.iter().map(|x| Term::var(x))).collect();
    let mut all = level.clone();
    for _ in 0..depth {
        level = level.into_iter().map(|t| Term::app(Term::cnst("s"), t)).collect();
        all.extend(level.iter().cloned());
    }
    all
}

/// Syntactic equality on first-order terms.
fn same(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) | (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(f, x), Term::App(g, y)) => same(f, g) && same(x, y),
        _ => false,
    }
}

fn apply(t: &Term, m: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(x) => m.get(&**x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, a) => Term::app(apply(f, m), apply(a, m)),
        _ => t.clone(),
    }
}

fn match_into(pat: &Term, subj: &Term, m: &mut BTreeMap<String, Term>) -> bool {
    match pat {
        Term::Var(x) => match m.get(&**x) {
            Some(prev) => same(prev, subj),
            None => {
                m.insert(x.to_string(), subj.clone());
                true
            }
        },
        Term::Const(c) => matches!(subj, Term::Const(d) if c == d),
        Term::App(f, a) => match subj {
            Term::App(g, b) => match_into(f, g, m) && match_into(a, b, m),
            _ => false,
        },
        Term::Lam(..) => false,
    }
}

/// Whether `specific` is `general` followed by some substitution, on `vars`.
pub fn is_instance(general: &TermSubst, specific: &BTreeMap<String, Term>, vars: &[&str]) -> bool {
    let mut m = BTreeMap::new();
    vars.iter().all(|x| {
        let g = general.get(x).cloned().unwrap_or_else(|| Term::var(x));
        let s = specific.get(*x).cloned().unwrap_or_else(|| Term::var(x));
        match_into(&g, &s, &mut m)
    })
}

#[derive(Debug, Default)]
pub struct UnifyReport {
    pub pairs: usize,
    pub unifiers: usize,
    pub counterexamples: Vec<String>,
}

/// Every pair of terms of depth at most `depth` over `0`, `s`, `x`, `y`; for
/// each, every substitution of such terms for `x` and `y` that unifies the
/// pair must be an instance of a unifier returned by `fo_unify`, and every
/// returned unifier must unify.
pub fn unification_oracle(depth: usize) -> UnifyReport {
    let rs = RewriteSystem::new();
    let vars = ["x", "y"];
    let universe = zero_succ_terms(&vars, depth);
    let mut report = UnifyReport::default();
    for u in &universe {
        for v in &universe {
            report.pairs += 1;
            let csu = match fo_unify(&rs, u, v) {
                Ok(c) => c,
                Err(e) => {
                    report.counterexamples.push(format!("{u} = {v}: {e}"));
                    continue;
                }
            };
            for th in &csu.unifiers {
                let m: BTreeMap<String, Term> = th.iter().map(|(x, t)| (x.to_string(), t.clone())).collect();
                if !same(&apply(u, &m), &apply(v, &m)) {
                    report.counterexamples.push(format!("{u} = {v}: {th} does not unify"));
                }
            }
            for a in &universe {
                for b in &universe {
                    let m = BTreeMap::from([("x".to_string(), a.clone()), ("y".to_string(), b.clone())]);
                    if !same(&apply(u, &m), &apply(v, &m)) {
                        continue;
                    }
                    report.unifiers += 1;
                    if !csu.unifiers.iter().any(|th| is_instance(th, &m, &vars)) {
                        report.counterexamples.push(format!("{u} = {v}: [x := {a}, y := {b}] is not covered"));
                    }
                }
            }
        }
    }
    report
}

/// A random closed term of base sort `sort` built from first-order
/// constants of `sig`, with at most `depth` nested applications.
pub fn ground_term<R: Rng>(sig: &Signature, sort: &TermType, depth: usize, rng: &mut R) -> Option<Term> {
    let ctors: Vec<(Name, Vec<TermType>)> = sig
        .consts()
        .filter_map(|(c, ty)| {
            let (args, res) = ty.uncurry();
            (res == sort && args.iter().all(|a| matches!(a, TermType::Base(_))))
                .then(|| (c.clone(), args.into_iter().cloned().collect::<Vec<_>>()))
        })
        .filter(|(_, args)| depth > 0 || args.is_empty())
        .collect();
    let (c, args) = ctors.choose(rng)?;
    let mut t = Term::Const(c.clone());
    for a in args {
        t = Term::app(t, ground_term(sig, a, depth - 1, rng)?);
    }
    Some(t)
}

fn binder_types(f: &Formula, out: &mut BTreeMap<Name, TermType>) {
    use Formula::*;
    match f {
        Forall(x, ty, b) | Exists(x, ty, b) => {
            out.insert(x.clone(), ty.clone());
            binder_types(b, out);
        }
        Imp(a, b) | And(a, b) | Or(a, b) => {
            binder_types(a, out);
            binder_types(b, out);
        }
        Mu(op, _) | Nu(op, _) => {
            for (x, ty) in &op.params {
                out.insert(x.clone(), ty.clone());
            }
            binder_types(&op.body, out);
        }
        _ => {}
    }
}

fn proper_subterm(small: &Term, big: &Term) -> bool {
    let (_, args) = big.spine();
    args.iter().any(|a| same(small, a) || proper_subterm(small, a))
}

/// The declared order on closed atoms.
pub fn ground_below(order: &OrderSpec, occ: (&Name, &[Term]), head: (&Name, &[Term])) -> bool {
    for m in &order.measures {
        let (o, h) = (&occ.1[m.pos - 1], &head.1[m.pos - 1]);
        if same(o, h) {
            continue;
        }
        let smaller = proper_subterm(o, h);
        match (smaller, m.cmp) {
            (true, Comparison::Strict) => return true,
            (true, Comparison::NonStrict) => continue,
            (false, _) => return false,
        }
    }
    let rank = |p: &Name| order.precedence.iter().position(|q| q == p);
    matches!((rank(occ.0), rank(head.0)), (Some(a), Some(b)) if a < b)
}

/// Instantiates each rule and every atom that may occur in its body with
/// random closed terms, `trials` times per rule, and reports instances that
/// are not below the instantiated head.
pub fn shadow_condition_2<R: Rng>(
    sig: &Signature,
    rs: &RewriteSystem,
    rules: &[rewrite::AtomRule],
    order: &OrderSpec,
    trials: usize,
    rng: &mut R,
) -> Vec<String> {
    let defined: BTreeSet<Name> = rules.iter().map(|r| r.pred.clone()).collect();
    let mut failures = Vec::new();
    for r in rules {
        let mut bound = BTreeMap::new();
        binder_types(&r.rhs, &mut bound);
        let occs = collect_may_occur(&r.rhs, &defined);
        for _ in 0..trials {
            let depth = rng.gen_range(0..=3);
            let theta = TermSubst::from_pairs(
                r.vars.iter().map(|(x, ty)| (x.clone(), ground_term(sig, ty, depth, rng).expect("inhabited sort"))),
            );
            let head: Vec<Term> = r.args.iter().map(|t| rs.normalize_term(&theta.apply(t)).unwrap()).collect();
            for occ in &occs {
                let mut full = theta.clone();
                for x in &occ.arbitrary {
                    let ty = &bound[x];
                    let d = rng.gen_range(0..=3);
                    full.insert(x.clone(), ground_term(sig, ty, d, rng).expect("inhabited sort"));
                }
                let args: Vec<Term> = occ.args.iter().map(|t| rs.normalize_term(&full.apply(t)).unwrap()).collect();
                if !ground_below(order, (&occ.pred, &args), (&r.pred, &head)) {
                    let show = |ts: &[Term]| ts.iter().map(|t| format!("({t})")).collect::<Vec<_>>().join(" ");
                    failures.push(format!("{} {} is not below {} {}", occ.pred, show(&args), r.pred, show(&head)));
                }
            }
        }
    }
    failures
}

/// Sorts, constants and rules of the Ackermann relation and of the
/// reducibility predicate over simple types.
pub mod fixtures {
    use munj_core::rewrite::AtomRule;
    use munj_core::*;

    fn nat() -> TermType {
        TermType::base("nat")
    }
    fn v(x: &str) -> Term {
        Term::var(x)
    }
    fn s(t: Term) -> Term {
        Term::app(Term::cnst("s"), t)
    }
    fn rule(vars: &[(&str, TermType)], pred: &str, args: Vec<Term>, rhs: Formula) -> AtomRule {
        AtomRule {
            vars: vars.iter().map(|(x, t)| (name(x), t.clone())).collect(),
            pred: name(pred),
            args,
            rhs,
        }
    }

    pub fn ackermann() -> (Signature, Vec<AtomRule>, OrderSpec) {
        let mut sig = Signature::new();
        sig.add_sort("nat").unwrap();
        sig.add_const("0", nat()).unwrap();
        sig.add_const("s", TermType::arrow(nat(), nat())).unwrap();
        sig.add_pred("ack", &TermType::arrows([nat(), nat(), nat()], TermType::Prop)).unwrap();
        let ack = |a, b, c| Formula::atom("ack", vec![a, b, c]);
        let z = Term::cnst("0");
        let rules = vec![
            rule(&[("x", nat())], "ack", vec![z.clone(), v("x"), s(v("x"))], Formula::Top),
            rule(&[("x", nat()), ("y", nat())], "ack", vec![s(v("x")), z.clone(), v("y")], ack(v("x"), s(z.clone()), v("y"))),
            rule(
                &[("x", nat()), ("y", nat()), ("z", nat())],
                "ack",
                vec![s(v("x")), s(v("y")), v("z")],
                Formula::exists("r", nat(), Formula::and(ack(s(v("x")), v("y"), v("r")), ack(v("x"), v("r"), v("z")))),
            ),
        ];
        (sig, rules, OrderSpec::lex([(1, Comparison::Strict), (2, Comparison::Strict)]))
    }

    pub fn red() -> (Signature, Vec<AtomRule>, OrderSpec) {
        let tm = TermType::base("tm");
        let ty = TermType::base("ty");
        let mut sig = Signature::new();
        sig.add_sort("tm").unwrap();
        sig.add_sort("ty").unwrap();
        sig.add_const("iota", ty.clone()).unwrap();
        sig.add_const("arrow", TermType::arrows([ty.clone(), ty.clone()], ty.clone())).unwrap();
        sig.add_const("c", tm.clone()).unwrap();
        sig.add_const("app", TermType::arrows([tm.clone(), tm.clone()], tm.clone())).unwrap();
        sig.add_pred("sn", &TermType::arrow(tm.clone(), TermType::Prop)).unwrap();
        sig.add_pred("red", &TermType::arrows([tm.clone(), ty.clone()], TermType::Prop)).unwrap();
        let red = |m, t| Formula::atom("red", vec![m, t]);
        let rules = vec![
            rule(&[("m", tm.clone())], "red", vec![v("m"), Term::cnst("iota")], Formula::atom("sn", vec![v("m")])),
            rule(
                &[("m", tm.clone()), ("t", ty.clone()), ("u", ty.clone())],
                "red",
                vec![v("m"), Term::apps(Term::cnst("arrow"), [v("t"), v("u")])],
                Formula::forall(
                    "n",
                    tm.clone(),
                    Formula::imp(red(v("n"), v("t")), red(Term::apps(Term::cnst("app"), [v("m"), v("n")]), v("u"))),
                ),
            ),
        ];
        (sig, rules, OrderSpec::lex([(2, Comparison::Strict)]))
    }
}
