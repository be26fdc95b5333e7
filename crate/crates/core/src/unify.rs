//! First-order matching and unification on rewrite-normal terms.

use std::collections::{BTreeMap, BTreeSet};

use crate::names::Name;
use crate::rewrite::RewriteSystem;
use crate::term::{alpha_eq, alpha_eq_in, Term, TermSubst};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completeness {
    /// Computed by syntactic unification inside the constructor fragment.
    Complete,
    /// Supplied by the user and only checked for soundness.
    AssumedComplete,
}

/// A complete set of unifiers for one equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsuResult {
    pub unifiers: Vec<TermSubst>,
    pub completeness: Completeness,
}

/// `θ` with `pattern·θ` α-equal to `subject`; every free variable of the
/// pattern is a pattern variable.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<TermSubst> {
    let vars = pattern.free_vars();
    match_with(&[(pattern.clone(), subject.clone())], &vars)
}

/// Simultaneous matching of several pattern/subject pairs. Free variables of
/// the patterns outside `vars` are rigid.
pub fn match_with(pairs: &[(Term, Term)], vars: &BTreeSet<Name>) -> Option<TermSubst> {
    let mut out = BTreeMap::new();
    for (p, s) in pairs {
        if !match_in(p, s, vars, &mut Vec::new(), &mut out) {
            return None;
        }
    }
    Some(TermSubst::from_pairs(out))
}

fn match_in(
    p: &Term,
    s: &Term,
    vars: &BTreeSet<Name>,
    env: &mut Vec<(Name, Name)>,
    out: &mut BTreeMap<Name, Term>,
) -> bool {
    match (p, s) {
        (Term::Var(x), _) if vars.contains(x) && !env.iter().any(|(a, _)| a == x) => {
            // The image may not mention variables bound inside the subject.
            let fv = s.free_vars();
            if env.iter().any(|(_, b)| fv.contains(b)) {
                return false;
            }
            match out.get(x) {
                Some(prev) => alpha_eq(prev, s),
                None => {
                    out.insert(x.clone(), s.clone());
                    true
                }
            }
        }
        (Term::Var(_), Term::Var(_)) => alpha_eq_in(p, s, env),
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, a), Term::App(g, b)) => match_in(f, g, vars, env, out) && match_in(a, b, vars, env, out),
        (Term::Lam(x, tx, b1), Term::Lam(y, ty, b2)) => {
            if tx != ty {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let r = match_in(b1, b2, vars, env, out);
            env.pop();
            r
        }
        _ => false,
    }
}

/// True when `t` is built from variables and constructors only, with
/// variables in head position never applied.
pub fn in_constructor_fragment(rs: &RewriteSystem, t: &Term) -> bool {
    let (head, args) = t.spine();
    match head {
        Term::Var(_) => args.is_empty(),
        Term::Const(c) => rs.is_constructor(c) && args.iter().all(|a| in_constructor_fragment(rs, a)),
        _ => false,
    }
}

/// Complete set of unifiers of `u` and `v` after rewrite normalization.
///
/// Inside the constructor fragment the answer is the singleton MGU or the
/// empty set, both flagged complete. Elsewhere the caller has to supply a
/// set of unifiers, signalled by [`Error::DemandAnnotation`].
pub fn fo_unify(rs: &RewriteSystem, u: &Term, v: &Term) -> Result<CsuResult> {
    let u = rs.normalize_term(u)?;
    let v = rs.normalize_term(v)?;
    if !in_constructor_fragment(rs, &u) || !in_constructor_fragment(rs, &v) {
        return Err(Error::DemandAnnotation {
            lhs: u.to_string(),
            rhs: v.to_string(),
        });
    }
    Ok(CsuResult {
        unifiers: robinson(u, v).into_iter().collect(),
        completeness: Completeness::Complete,
    })
}

/// Syntactic most general unifier with occurs check. The result is
/// idempotent; a variable/variable equation `x = y` binds `x`.
pub fn robinson(u: Term, v: Term) -> Option<TermSubst> {
    let mut s = TermSubst::new();
    let mut todo = vec![(u, v)];
    while let Some((a, b)) = todo.pop() {
        let a = s.apply(&a);
        let b = s.apply(&b);
        match (a, b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                if t.occurs_free(&x) {
                    return None;
                }
                let single = TermSubst::singleton(x.clone(), t.clone());
                s = s.compose(&single);
                s.insert(x, t);
            }
            (Term::Const(c), Term::Const(d)) => {
                if c != d {
                    return None;
                }
            }
            (Term::App(f, x), Term::App(g, y)) => {
                // Pushed in reverse so heads are solved first.
                todo.push((*x, *y));
                todo.push((*f, *g));
            }
            _ => return None,
        }
    }
    Some(s)
}

/// Whether `uθ ≡ vθ`.
pub fn is_unifier(rs: &RewriteSystem, theta: &TermSubst, u: &Term, v: &Term) -> Result<bool> {
    rs.congruent_terms(&theta.apply(u), &theta.apply(v))
}

/// `θ''` with `x·θ'·θ'' ≡ x·θ` for every `x` bound by either substitution,
/// found by simultaneous matching of `x·θ'` against `x·θ`. The images are
/// matched as given first, so that the factor keeps the terms of `θ`, and
/// then as normal forms. Variables left unbound by a substitution map to
/// themselves.
pub fn factor_subst(rs: &RewriteSystem, theta: &TermSubst, theta_p: &TermSubst) -> Result<Option<TermSubst>> {
    let dom: BTreeSet<Name> = theta.domain().chain(theta_p.domain()).cloned().collect();
    let raw: Vec<(Term, Term)> = dom.iter().map(|x| (theta_p.image(x), theta.image(x))).collect();
    if let Some(found) = factor_pairs(rs, &raw)? {
        return Ok(Some(found));
    }
    let mut normal = Vec::with_capacity(raw.len());
    for (pat, subj) in &raw {
        normal.push((rs.normalize_term(pat)?, rs.normalize_term(subj)?));
    }
    factor_pairs(rs, &normal)
}

fn factor_pairs(rs: &RewriteSystem, pairs: &[(Term, Term)]) -> Result<Option<TermSubst>> {
    let vars: BTreeSet<Name> = pairs.iter().flat_map(|(pat, _)| pat.free_vars()).collect();
    let Some(found) = match_with(pairs, &vars) else {
        return Ok(None);
    };
    for (pat, subj) in pairs {
        if !rs.congruent_terms(&found.apply(pat), subj)? {
            return Ok(None);
        }
    }
    Ok(Some(found))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::name;
    use crate::rewrite::{RewriteRule, RewriteSystem};
    use crate::term::TermType;

    fn z() -> Term {
        Term::cnst("0")
    }
    fn s(t: Term) -> Term {
        Term::app(Term::cnst("s"), t)
    }
    fn v(x: &str) -> Term {
        Term::var(x)
    }
    fn plus(a: Term, b: Term) -> Term {
        Term::apps(Term::cnst("+"), [a, b])
    }

    fn plus_rs() -> RewriteSystem {
        let nat = TermType::base("nat");
        let mut rs = RewriteSystem::new();
        rs.add_rule(RewriteRule::term(vec![(name("y"), nat.clone())], plus(z(), v("y")), v("y")));
        rs.add_rule(RewriteRule::term(
            vec![(name("x"), nat.clone()), (name("y"), nat)],
            plus(s(v("x")), v("y")),
            s(plus(v("x"), v("y"))),
        ));
        rs
    }

    #[test]
    fn unify_examples() {
        let rs = RewriteSystem::new();
        let r = fo_unify(&rs, &z(), &s(v("y"))).unwrap();
        assert!(r.unifiers.is_empty());
        assert_eq!(r.completeness, Completeness::Complete);
        let r = fo_unify(&rs, &v("x"), &v("y")).unwrap();
        assert_eq!(r.unifiers, vec![TermSubst::singleton(name("x"), v("y"))]);
        let r = fo_unify(&rs, &s(v("x")), &s(z())).unwrap();
        assert_eq!(r.unifiers, vec![TermSubst::singleton(name("x"), z())]);
    }

    #[test]
    fn occurs_check() {
        let r = fo_unify(&RewriteSystem::new(), &v("x"), &s(v("x"))).unwrap();
        assert!(r.unifiers.is_empty());
    }

    #[test]
    fn defined_symbol_demands_annotation() {
        let rs = plus_rs();
        let e = fo_unify(&rs, &plus(v("x"), v("y")), &z()).unwrap_err();
        assert!(matches!(e, Error::DemandAnnotation { .. }));
        // Normalization first: 0 + x is x, which is in the fragment.
        assert!(fo_unify(&rs, &plus(z(), v("x")), &z()).is_ok());
    }

    #[test]
    fn match_examples() {
        assert_eq!(match_term(&s(v("x")), &s(z())), Some(TermSubst::singleton(name("x"), z())));
        assert_eq!(match_term(&s(v("x")), &z()), None);
        let m = match_term(&plus(v("x"), v("y")), &plus(z(), v("z"))).unwrap();
        assert_eq!(m, TermSubst::from_pairs([(name("x"), z()), (name("y"), v("z"))]));
        // Non-linear pattern.
        assert_eq!(match_term(&plus(v("x"), v("x")), &plus(z(), s(z()))), None);
    }

    #[test]
    fn factor_examples() {
        let rs = RewriteSystem::new();
        let th = TermSubst::singleton(name("x"), s(z()));
        let thp = TermSubst::singleton(name("x"), s(v("y")));
        assert_eq!(factor_subst(&rs, &th, &thp).unwrap(), Some(TermSubst::singleton(name("y"), z())));
        let th0 = TermSubst::singleton(name("x"), z());
        assert_eq!(factor_subst(&rs, &th0, &thp).unwrap(), None);
        let th = TermSubst::from_pairs([(name("x"), s(s(z()))), (name("z"), z())]);
        let thp = TermSubst::from_pairs([(name("x"), s(v("y"))), (name("z"), v("z"))]);
        assert_eq!(
            factor_subst(&rs, &th, &thp).unwrap(),
            Some(TermSubst::from_pairs([(name("y"), s(z())), (name("z"), z())]))
        );
    }

    #[test]
    fn factor_identities() {
        let rs = RewriteSystem::new();
        let th = TermSubst::from_pairs([(name("x"), s(v("a"))), (name("y"), z())]);
        assert_eq!(factor_subst(&rs, &th, &TermSubst::new()).unwrap(), Some(th.clone()));
        let id = factor_subst(&rs, &th, &th).unwrap().unwrap();
        assert!(id.iter().all(|(x, t)| *t == Term::Var(x.clone())));
    }

    #[test]
    fn factor_modulo_rewriting() {
        let rs = plus_rs();
        // x·θ = 0 + s 0 normalizes to s 0.
        let th = TermSubst::singleton(name("x"), plus(z(), s(z())));
        let thp = TermSubst::singleton(name("x"), s(v("y")));
        assert_eq!(factor_subst(&rs, &th, &thp).unwrap(), Some(TermSubst::singleton(name("y"), z())));
    }
}
