//! Simply-typed term language: sorts, signatures, λ-terms and substitutions.
//!
//! Binders are named; every public operation is defined up to renaming of
//! bound variables. Terms are compared up to β only. Full η-long forms are
//! never computed: no kernel judgment distinguishes η-equal terms, so
//! applied spines at base type are the canonical shape.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::names::{fresh_name, name, Fuel, Name};
use crate::{Error, Result};

/// Default β-step budget for term normalization.
pub const DEFAULT_BETA_FUEL: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermType {
    Base(Name),
    /// The sort `o` of propositions.
    Prop,
    Arrow(Box<TermType>, Box<TermType>),
}

impl TermType {
    pub fn base(s: &str) -> Self {
        TermType::Base(name(s))
    }

    pub fn arrow(a: TermType, b: TermType) -> Self {
        TermType::Arrow(Box::new(a), Box::new(b))
    }

    /// `a1 -> ... -> an -> result`
    pub fn arrows(args: impl IntoIterator<Item = TermType>, result: TermType) -> Self {
        let args: Vec<_> = args.into_iter().collect();
        args.into_iter()
            .rev()
            .fold(result, |acc, a| TermType::arrow(a, acc))
    }

    /// True when `o` does not occur anywhere in the type.
    pub fn is_term_type(&self) -> bool {
        match self {
            TermType::Base(_) => true,
            TermType::Prop => false,
            TermType::Arrow(a, b) => a.is_term_type() && b.is_term_type(),
        }
    }

    /// Splits `a1 -> ... -> an -> r` into `([a1..an], r)` with `r` not an arrow.
    pub fn uncurry(&self) -> (Vec<&TermType>, &TermType) {
        let mut args = Vec::new();
        let mut cur = self;
        while let TermType::Arrow(a, b) = cur {
            args.push(&**a);
            cur = b;
        }
        (args, cur)
    }
}

/// Sorts, term constants and predicate constants.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    sorts: BTreeSet<Name>,
    consts: BTreeMap<Name, TermType>,
    /// Argument types of each predicate constant; the result is always `o`.
    preds: BTreeMap<Name, Vec<TermType>>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn taken(&self, n: &str) -> bool {
        self.sorts.contains(n) || self.consts.contains_key(n) || self.preds.contains_key(n)
    }

    fn check_sorts_declared(&self, ty: &TermType) -> Result<()> {
        match ty {
            TermType::Base(s) if !self.sorts.contains(s) => Err(Error::Unbound(s.clone())),
            TermType::Base(_) | TermType::Prop => Ok(()),
            TermType::Arrow(a, b) => {
                self.check_sorts_declared(a)?;
                self.check_sorts_declared(b)
            }
        }
    }

    pub fn add_sort(&mut self, s: &str) -> Result<()> {
        if self.taken(s) {
            return Err(Error::ill_formed("signature", format!("name `{s}` already declared")));
        }
        self.sorts.insert(name(s));
        Ok(())
    }

    pub fn add_const(&mut self, c: &str, ty: TermType) -> Result<()> {
        if self.taken(c) {
            return Err(Error::ill_formed("signature", format!("name `{c}` already declared")));
        }
        self.check_sorts_declared(&ty)?;
        if !ty.is_term_type() {
            return Err(Error::ill_formed(
                "signature",
                format!("constant `{c}` has type {ty} mentioning o"),
            ));
        }
        self.consts.insert(name(c), ty);
        Ok(())
    }

    /// Declares a predicate constant from its full type `g1 -> ... -> gn -> o`.
    pub fn add_pred(&mut self, a: &str, ty: &TermType) -> Result<()> {
        if self.taken(a) {
            return Err(Error::ill_formed("signature", format!("name `{a}` already declared")));
        }
        self.check_sorts_declared(ty)?;
        let (args, res) = ty.uncurry();
        if *res != TermType::Prop || args.iter().any(|t| !t.is_term_type()) {
            return Err(Error::ill_formed(
                "signature",
                format!("predicate `{a}` must have type g1 -> ... -> gn -> o, got {ty}"),
            ));
        }
        self.preds
            .insert(name(a), args.into_iter().cloned().collect());
        Ok(())
    }

    pub fn has_sort(&self, s: &str) -> bool {
        self.sorts.contains(s)
    }

    pub fn const_type(&self, c: &str) -> Option<&TermType> {
        self.consts.get(c)
    }

    pub fn pred_args(&self, a: &str) -> Option<&[TermType]> {
        self.preds.get(a).map(Vec::as_slice)
    }

    pub fn consts(&self) -> impl Iterator<Item = (&Name, &TermType)> {
        self.consts.iter()
    }

    pub fn preds(&self) -> impl Iterator<Item = (&Name, &Vec<TermType>)> {
        self.preds.iter()
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Name> {
        self.sorts.iter()
    }

    /// Checks that a type only mentions declared sorts and no `o`.
    pub fn check_term_type(&self, ty: &TermType) -> Result<()> {
        self.check_sorts_declared(ty)?;
        if ty.is_term_type() {
            Ok(())
        } else {
            Err(Error::ill_formed("type", format!("{ty} is not a term type")))
        }
    }
}

/// Scoped typing of term variables; later entries shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermCtx {
    vars: Vec<(Name, TermType)>,
}

impl TermCtx {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, TermType)>) -> Self {
        TermCtx {
            vars: pairs.into_iter().collect(),
        }
    }

    pub fn push(&mut self, x: Name, ty: TermType) {
        self.vars.push((x, ty));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn with(&self, x: Name, ty: TermType) -> Self {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    pub fn lookup(&self, x: &str) -> Option<&TermType> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _)| &**y == x)
            .map(|(_, t)| t)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.lookup(x).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, TermType)> {
        self.vars.iter()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Const(Name),
    App(Box<Term>, Box<Term>),
    Lam(Name, TermType, Box<Term>),
}

impl Term {
    pub fn var(x: &str) -> Self {
        Term::Var(name(x))
    }

    pub fn cnst(c: &str) -> Self {
        Term::Const(name(c))
    }

    pub fn app(f: Term, a: Term) -> Self {
        Term::App(Box::new(f), Box::new(a))
    }

    pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Self {
        args.into_iter().fold(head, Term::app)
    }

    pub fn lam(x: &str, ty: TermType, body: Term) -> Self {
        Term::Lam(name(x), ty, Box::new(body))
    }

    /// Head and arguments of an application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut cur = self;
        while let Term::App(f, a) = cur {
            args.push(&**a);
            cur = f;
        }
        args.reverse();
        (cur, args)
    }

    pub fn head_const(&self) -> Option<&Name> {
        match self.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub(crate) fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Term::Lam(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => &**y == x,
            Term::Const(_) => false,
            Term::App(f, a) => f.occurs_free(x) || a.occurs_free(x),
            Term::Lam(y, _, b) => &**y != x && b.occurs_free(x),
        }
    }

    /// Constants occurring anywhere in the term.
    pub fn constants(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                out.insert(c.clone());
            }
            Term::App(f, a) => {
                f.constants(out);
                a.constants(out);
            }
            Term::Lam(_, _, b) => b.constants(out),
        }
    }

    pub fn contains_lambda(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::App(f, a) => f.contains_lambda() || a.contains_lambda(),
            Term::Lam(..) => true,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(_, _, b) => 1 + b.size(),
        }
    }

    /// Capture-avoiding simultaneous substitution without β-normalization.
    pub(crate) fn subst_raw(&self, map: &BTreeMap<Name, Term>, range_fv: &BTreeSet<Name>) -> Term {
        match self {
            Term::Var(x) => map.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, a) => Term::app(f.subst_raw(map, range_fv), a.subst_raw(map, range_fv)),
            Term::Lam(x, ty, b) => {
                if map.contains_key(x) {
                    let mut inner = map.clone();
                    inner.remove(x);
                    if inner.is_empty() {
                        return self.clone();
                    }
                    let fv = range_of(&inner);
                    return self.subst_raw(&inner, &fv);
                }
                if range_fv.contains(x) && b.free_vars().iter().any(|y| map.contains_key(y)) {
                    let body_fv = b.free_vars();
                    let x2 = fresh_name(x, |c| {
                        range_fv.contains(c) || body_fv.contains(c) || map.contains_key(c)
                    });
                    let mut inner = map.clone();
                    inner.insert(x.clone(), Term::Var(x2.clone()));
                    let mut fv = range_fv.clone();
                    fv.insert(x2.clone());
                    Term::Lam(x2, ty.clone(), Box::new(b.subst_raw(&inner, &fv)))
                } else {
                    Term::Lam(x.clone(), ty.clone(), Box::new(b.subst_raw(map, range_fv)))
                }
            }
        }
    }

    /// `self[u/x]`, capture-avoiding, β-normalized.
    pub fn subst1(&self, x: &Name, u: &Term) -> Term {
        TermSubst::singleton(x.clone(), u.clone()).apply(self)
    }
}

fn range_of(map: &BTreeMap<Name, Term>) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    for t in map.values() {
        t.collect_free(&mut Vec::new(), &mut out);
    }
    out
}

/// Unique simple type of `t`, or the reason there is none.
pub fn infer_term_type(sig: &Signature, ctx: &TermCtx, t: &Term) -> Result<TermType> {
    match t {
        Term::Var(x) => ctx.lookup(x).cloned().ok_or_else(|| Error::Unbound(x.clone())),
        Term::Const(c) => sig.const_type(c).cloned().ok_or_else(|| Error::Unbound(c.clone())),
        Term::App(f, a) => {
            let fty = infer_term_type(sig, ctx, f)?;
            match fty {
                TermType::Arrow(dom, cod) => {
                    let aty = infer_term_type(sig, ctx, a)?;
                    if aty != *dom {
                        return Err(Error::TypeMismatch {
                            context: format!("argument of {f}"),
                            expected: dom.to_string(),
                            found: aty.to_string(),
                        });
                    }
                    Ok(*cod)
                }
                _ => Err(Error::NotAFunction(f.to_string())),
            }
        }
        Term::Lam(x, ty, b) => {
            sig.check_term_type(ty)?;
            let bty = infer_term_type(sig, &ctx.with(x.clone(), ty.clone()), b)?;
            Ok(TermType::arrow(ty.clone(), bty))
        }
    }
}

/// Checks `t : expected` under `ctx`.
pub fn check_term_type(sig: &Signature, ctx: &TermCtx, t: &Term, expected: &TermType) -> Result<()> {
    let found = infer_term_type(sig, ctx, t)?;
    if found == *expected {
        Ok(())
    } else {
        Err(Error::TypeMismatch {
            context: format!("term {t}"),
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

/// β-normal form with the default step budget.
pub fn beta_normalize(t: &Term) -> Result<Term> {
    let mut fuel = Fuel::new(DEFAULT_BETA_FUEL, "beta normalization");
    beta_normalize_with(t, &mut fuel)
}

pub fn beta_normalize_with(t: &Term, fuel: &mut Fuel) -> Result<Term> {
    match t {
        Term::Var(_) | Term::Const(_) => Ok(t.clone()),
        Term::Lam(x, ty, b) => Ok(Term::Lam(x.clone(), ty.clone(), Box::new(beta_normalize_with(b, fuel)?))),
        Term::App(f, a) => {
            let f = beta_normalize_with(f, fuel)?;
            let a = beta_normalize_with(a, fuel)?;
            match f {
                Term::Lam(x, _, body) => {
                    fuel.tick()?;
                    let mut map = BTreeMap::new();
                    map.insert(x, a);
                    let fv = range_of(&map);
                    beta_normalize_with(&body.subst_raw(&map, &fv), fuel)
                }
                f => Ok(Term::app(f, a)),
            }
        }
    }
}

pub fn is_beta_normal(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const(_) => true,
        Term::Lam(_, _, b) => is_beta_normal(b),
        Term::App(f, a) => !matches!(**f, Term::Lam(..)) && is_beta_normal(f) && is_beta_normal(a),
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    alpha_eq_in(t, u, &mut Vec::new())
}

/// `env` pairs bound names of the left side with those of the right side.
pub(crate) fn alpha_eq_in(t: &Term, u: &Term, env: &mut Vec<(Name, Name)>) -> bool {
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => {
            let lx = env.iter().rposition(|(a, _)| a == x);
            let ly = env.iter().rposition(|(_, b)| b == y);
            match (lx, ly) {
                (None, None) => x == y,
                (Some(i), Some(j)) => i == j,
                _ => false,
            }
        }
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::App(f, a), Term::App(g, b)) => alpha_eq_in(f, g, env) && alpha_eq_in(a, b, env),
        (Term::Lam(x, tx, b1), Term::Lam(y, ty, b2)) => {
            if tx != ty {
                return false;
            }
            env.push((x.clone(), y.clone()));
            let r = alpha_eq_in(b1, b2, env);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Finite map from term variables to terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TermSubst {
    map: BTreeMap<Name, Term>,
}

impl TermSubst {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: Name, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x, t);
        s
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Term)>) -> Self {
        TermSubst {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn insert(&mut self, x: Name, t: Term) {
        self.map.insert(x, t);
    }

    pub fn remove(&mut self, x: &str) -> Option<Term> {
        self.map.remove(x)
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &str) -> bool {
        self.map.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Name> {
        self.map.keys()
    }

    pub(crate) fn as_map(&self) -> &BTreeMap<Name, Term> {
        &self.map
    }

    /// Free variables of the terms in the range.
    pub fn range_vars(&self) -> BTreeSet<Name> {
        range_of(&self.map)
    }

    /// `x` itself when unbound.
    pub fn image(&self, x: &Name) -> Term {
        self.map.get(x).cloned().unwrap_or_else(|| Term::Var(x.clone()))
    }

    /// Capture-avoiding application, re-normalized by β.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        let raw = t.subst_raw(&self.map, &self.range_vars());
        // Well-typed inputs always normalize; an ill-typed one keeps its raw form.
        beta_normalize(&raw).unwrap_or(raw)
    }

    /// The substitution `self` followed by `then`: `t.(s∘u) = (t.s).u`.
    pub fn compose(&self, then: &TermSubst) -> TermSubst {
        if then.is_empty() {
            return self.clone();
        }
        let mut out: BTreeMap<Name, Term> =
            self.map.iter().map(|(x, t)| (x.clone(), then.apply(t))).collect();
        for (x, t) in &then.map {
            out.entry(x.clone()).or_insert_with(|| t.clone());
        }
        TermSubst { map: out }
    }

    /// Restriction to the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Name>) -> TermSubst {
        let mut out = TermSubst::new();
        for x in vars {
            if let Some(t) = self.map.get(x) {
                out.insert(x.clone(), t.clone());
            }
        }
        out
    }

    /// Drops identity bindings `x ↦ x`.
    pub fn without_identities(&self) -> TermSubst {
        TermSubst {
            map: self
                .map
                .iter()
                .filter(|(x, t)| !matches!(t, Term::Var(y) if y == *x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        }
    }
}

/// Capture-avoiding substitution followed by β-normalization.
pub fn apply_term_subst(t: &Term, theta: &TermSubst) -> Term {
    theta.apply(t)
}

impl fmt::Display for TermSubst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x} := {t}")?;
        }
        write!(f, "]")
    }
}
