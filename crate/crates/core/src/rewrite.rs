//! The congruence: oriented rules on terms and atomic formulas, normal
//! forms, and the decision procedure comparing them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::formula::{alpha_eq_formula, check_formula, FixKind, Formula, PredOperator};
use crate::names::{name, Fuel, Name};
use crate::term::{alpha_eq, beta_normalize, infer_term_type, is_beta_normal, Signature, Term, TermCtx, TermSubst, TermType};
use crate::trust::{TrustEntry, TrustLog};
use crate::unify::{match_term, match_with};
use crate::{Error, Result};

pub const DEFAULT_REWRITE_FUEL: u64 = 100_000;

/// `lhs ⇝ rhs` on terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermRule {
    pub vars: Vec<(Name, TermType)>,
    pub lhs: Term,
    pub rhs: Term,
}

/// `pred args ⇝ rhs` on atomic formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomRule {
    pub vars: Vec<(Name, TermType)>,
    pub pred: Name,
    pub args: Vec<Term>,
    pub rhs: Formula,
}

impl AtomRule {
    pub fn lhs(&self) -> Formula {
        Formula::Atom(self.pred.clone(), self.args.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RewriteRule {
    Term(TermRule),
    Atom(AtomRule),
}

impl RewriteRule {
    pub fn term(vars: Vec<(Name, TermType)>, lhs: Term, rhs: Term) -> Self {
        RewriteRule::Term(TermRule { vars, lhs, rhs })
    }

    pub fn atom(vars: Vec<(Name, TermType)>, pred: &str, args: Vec<Term>, rhs: Formula) -> Self {
        RewriteRule::Atom(AtomRule {
            vars,
            pred: crate::names::name(pred),
            args,
            rhs,
        })
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewriteRule::Term(r) => write!(f, "{} ~> {}", r.lhs, r.rhs),
            RewriteRule::Atom(r) => write!(f, "{} ~> {}", r.lhs(), r.rhs),
        }
    }
}

/// Rules plus the user's assertions about them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteSystem {
    term_rules: Vec<TermRule>,
    atom_rules: Vec<AtomRule>,
    /// Predicates grouped by the recursive definition that introduced them.
    pub groups: Vec<Vec<Name>>,
    pub terminating: bool,
    pub confluent: bool,
    fuel: u64,
}

impl Default for RewriteSystem {
    fn default() -> Self {
        RewriteSystem {
            term_rules: Vec::new(),
            atom_rules: Vec::new(),
            groups: Vec::new(),
            terminating: true,
            confluent: true,
            fuel: DEFAULT_REWRITE_FUEL,
        }
    }
}

impl RewriteSystem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn set_fuel(&mut self, fuel: u64) {
        self.fuel = fuel;
    }

    pub fn fuel(&self) -> u64 {
        self.fuel
    }

    /// Appends a rule without validating it.
    pub fn add_rule(&mut self, rule: RewriteRule) {
        match rule {
            RewriteRule::Term(r) => self.term_rules.push(r),
            RewriteRule::Atom(r) => self.atom_rules.push(r),
        }
    }

    pub fn term_rules(&self) -> &[TermRule] {
        &self.term_rules
    }

    pub fn atom_rules(&self) -> &[AtomRule] {
        &self.atom_rules
    }

    pub fn rules(&self) -> impl Iterator<Item = RewriteRule> + '_ {
        self.term_rules
            .iter()
            .cloned()
            .map(RewriteRule::Term)
            .chain(self.atom_rules.iter().cloned().map(RewriteRule::Atom))
    }

    pub fn is_empty(&self) -> bool {
        self.term_rules.is_empty() && self.atom_rules.is_empty()
    }

    pub fn atom_rules_for<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a AtomRule> + 'a {
        self.atom_rules.iter().filter(move |r| &*r.pred == pred)
    }

    /// A constant is a constructor iff it heads no term-rule left side.
    pub fn is_constructor(&self, c: &str) -> bool {
        !self.term_rules.iter().any(|r| r.lhs.head_const().is_some_and(|h| &**h == c))
    }

    pub fn is_defined_pred(&self, a: &str) -> bool {
        self.atom_rules.iter().any(|r| &*r.pred == a)
    }

    /// The assumptions every congruence decision rests on.
    pub fn trust_log(&self) -> TrustLog {
        let mut log = TrustLog::new();
        if !self.is_empty() {
            if self.confluent {
                log.record(TrustEntry::AssumedConfluent);
            }
            if self.terminating {
                log.record(TrustEntry::AssumedTerminating);
            }
        }
        for r in &self.atom_rules {
            if !self.groups.iter().any(|g| g.contains(&r.pred)) {
                log.record(TrustEntry::UncheckedAtomRule {
                    rule: RewriteRule::Atom(r.clone()).to_string(),
                });
            }
        }
        log
    }

    fn new_fuel(&self) -> Fuel {
        Fuel::new(self.fuel, "rewriting")
    }

    pub fn normalize_term(&self, t: &Term) -> Result<Term> {
        let mut fuel = self.new_fuel();
        let t = beta_normalize(t)?;
        let r = self.norm_term(&t, &mut fuel)?;
        debug_assert!(self.is_normal_term(&r), "rewrite normal form still reducible: {r}");
        Ok(r)
    }

    pub fn normalize_formula(&self, p: &Formula) -> Result<Formula> {
        let mut fuel = self.new_fuel();
        self.norm_formula(p, &mut fuel)
    }

    pub fn congruent_terms(&self, a: &Term, b: &Term) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        Ok(alpha_eq(&self.normalize_term(a)?, &self.normalize_term(b)?))
    }

    pub fn congruent_formulas(&self, a: &Formula, b: &Formula) -> Result<bool> {
        if a == b {
            return Ok(true);
        }
        Ok(alpha_eq_formula(&self.normalize_formula(a)?, &self.normalize_formula(b)?))
    }

    // Innermost: arguments first, then the root, repeated until stable.
    fn norm_term(&self, t: &Term, fuel: &mut Fuel) -> Result<Term> {
        match t {
            Term::Var(_) | Term::Const(_) => self.root_term(t.clone(), fuel),
            Term::Lam(x, ty, b) => Ok(Term::Lam(x.clone(), ty.clone(), Box::new(self.norm_term(b, fuel)?))),
            Term::App(..) => {
                let (head, args) = t.spine();
                if matches!(head, Term::Lam(..)) {
                    let t = beta_normalize(t)?;
                    return self.norm_term(&t, fuel);
                }
                let mut out = head.clone();
                for a in args {
                    out = Term::app(out, self.norm_term(a, fuel)?);
                }
                self.root_term(out, fuel)
            }
        }
    }

    // Iterates at the root so that long rewrite chains use constant stack.
    fn root_term(&self, mut t: Term, fuel: &mut Fuel) -> Result<Term> {
        loop {
            let Some(h) = t.head_const().cloned() else {
                return Ok(t);
            };
            let mut fired = None;
            for r in self.term_rules.iter().filter(|r| r.lhs.head_const() == Some(&h)) {
                if first_order(&r.lhs) && first_order(&r.rhs) {
                    if let Some(paths) = match_paths(&r.lhs, &t) {
                        fired = Some((r, Step::Paths(paths)));
                        break;
                    }
                } else if let Some(theta) = match_term(&r.lhs, &t) {
                    fired = Some((r, Step::Subst(theta)));
                    break;
                }
            }
            let Some((r, step)) = fired else {
                return Ok(t);
            };
            fuel.tick()?;
            match step {
                Step::Subst(theta) => {
                    let next = beta_normalize(&theta.apply(&r.rhs))?;
                    return self.norm_term(&next, fuel);
                }
                Step::Paths(paths) => {
                    let mut uses = BTreeMap::new();
                    count_vars(&r.rhs, &mut uses);
                    let mut theta: BTreeMap<Name, (Term, usize)> = BTreeMap::new();
                    for (x, path) in paths {
                        let n = uses.get(&x).copied().unwrap_or(0);
                        theta.insert(x, (take_at(&mut t, &path), n));
                    }
                    t = self.instantiate(&r.rhs, &mut theta, fuel)?;
                }
            }
        }
    }

    /// `rhs` under `theta` with every proper subterm normalized. The range
    /// of `theta` is already normal, being made of subterms of a normal term.
    /// Each image is moved into its last use and cloned for the others.
    fn instantiate(&self, rhs: &Term, theta: &mut BTreeMap<Name, (Term, usize)>, fuel: &mut Fuel) -> Result<Term> {
        Ok(match rhs {
            Term::Var(x) => match theta.get_mut(x) {
                Some((img, n)) if *n > 1 => {
                    *n -= 1;
                    img.clone()
                }
                Some((img, _)) => std::mem::replace(img, Term::Const(name(""))),
                None => rhs.clone(),
            },
            Term::App(..) => {
                let (head, args) = rhs.spine();
                let mut out = self.instantiate(head, theta, fuel)?;
                for a in args {
                    let a = self.instantiate(a, theta, fuel)?;
                    out = Term::app(out, self.root_term(a, fuel)?);
                }
                out
            }
            _ => rhs.clone(),
        })
    }

    fn norm_formula(&self, p: &Formula, fuel: &mut Fuel) -> Result<Formula> {
        let terms = |ts: &[Term], fuel: &mut Fuel| -> Result<Vec<Term>> {
            ts.iter().map(|t| self.norm_term(&beta_normalize(t)?, fuel)).collect()
        };
        Ok(match p {
            Formula::Top | Formula::Bot => p.clone(),
            Formula::Imp(a, b) => Formula::imp(self.norm_formula(a, fuel)?, self.norm_formula(b, fuel)?),
            Formula::And(a, b) => Formula::and(self.norm_formula(a, fuel)?, self.norm_formula(b, fuel)?),
            Formula::Or(a, b) => Formula::or(self.norm_formula(a, fuel)?, self.norm_formula(b, fuel)?),
            Formula::Forall(x, ty, b) => Formula::Forall(x.clone(), ty.clone(), Box::new(self.norm_formula(b, fuel)?)),
            Formula::Exists(x, ty, b) => Formula::Exists(x.clone(), ty.clone(), Box::new(self.norm_formula(b, fuel)?)),
            Formula::Eq(t, u) => {
                let v = terms(&[t.clone(), u.clone()], fuel)?;
                let mut it = v.into_iter();
                Formula::Eq(it.next().expect("lhs"), it.next().expect("rhs"))
            }
            Formula::Mu(op, args) | Formula::Nu(op, args) => {
                let kind = if matches!(p, Formula::Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                let op = PredOperator {
                    pvar: op.pvar.clone(),
                    params: op.params.clone(),
                    body: self.norm_formula(&op.body, fuel)?,
                };
                Formula::fixpoint(kind, op, terms(args, fuel)?)
            }
            Formula::PVar(q, args) => Formula::PVar(q.clone(), terms(args, fuel)?),
            Formula::Atom(a, args) => {
                let (mut a, mut args) = (a.clone(), terms(args, fuel)?);
                while let Some(next) = self.atom_step(&a, &args) {
                    fuel.tick()?;
                    match next {
                        Formula::Atom(b, bargs) => {
                            args = terms(&bargs, fuel)?;
                            a = b;
                        }
                        other => return self.norm_formula(&other, fuel),
                    }
                }
                Formula::Atom(a, args)
            }
        })
    }

    /// The first atom rule instance applying to `a args`.
    fn atom_step(&self, a: &str, args: &[Term]) -> Option<Formula> {
        for r in self.atom_rules_for(a) {
            if r.args.len() != args.len() {
                continue;
            }
            let vars: BTreeSet<Name> = r.vars.iter().map(|(x, _)| x.clone()).collect();
            let pairs: Vec<(Term, Term)> = r.args.iter().cloned().zip(args.iter().cloned()).collect();
            if let Some(theta) = match_with(&pairs, &vars) {
                return Some(r.rhs.subst_terms(&theta));
            }
        }
        None
    }

    /// Rewrites the root atom until the formula exposes a connective or an
    /// irreducible atom. Subformulas are left alone.
    pub fn head_normalize_formula(&self, p: &Formula) -> Result<Formula> {
        let mut fuel = self.new_fuel();
        let mut cur = p.clone();
        loop {
            let Formula::Atom(a, args) = &cur else {
                return Ok(cur);
            };
            if !self.is_defined_pred(a) {
                return Ok(cur);
            }
            let args = args
                .iter()
                .map(|t| self.norm_term(&beta_normalize(t)?, &mut fuel))
                .collect::<Result<Vec<_>>>()?;
            match self.atom_step(a, &args) {
                Some(next) => {
                    fuel.tick()?;
                    cur = next;
                }
                None => return Ok(Formula::Atom(a.clone(), args)),
            }
        }
    }

    /// No term rule matches any subterm.
    pub fn is_normal_term(&self, t: &Term) -> bool {
        let here = self.term_rules.iter().any(|r| match_term(&r.lhs, t).is_some());
        !here
            && match t {
                Term::Var(_) | Term::Const(_) => true,
                Term::App(f, a) => self.is_normal_term(f) && self.is_normal_term(a),
                Term::Lam(_, _, b) => self.is_normal_term(b),
            }
    }

    /// No rule matches any embedded term or atom.
    pub fn is_normal_formula(&self, p: &Formula) -> bool {
        match p {
            Formula::Top | Formula::Bot => true,
            Formula::Imp(a, b) | Formula::And(a, b) | Formula::Or(a, b) => self.is_normal_formula(a) && self.is_normal_formula(b),
            Formula::Forall(_, _, b) | Formula::Exists(_, _, b) => self.is_normal_formula(b),
            Formula::Eq(t, u) => self.is_normal_term(t) && self.is_normal_term(u),
            Formula::Mu(op, args) | Formula::Nu(op, args) => {
                self.is_normal_formula(&op.body) && args.iter().all(|t| self.is_normal_term(t))
            }
            Formula::PVar(_, args) => args.iter().all(|t| self.is_normal_term(t)),
            Formula::Atom(a, args) => {
                args.iter().all(|t| self.is_normal_term(t))
                    && !self.atom_rules_for(a).any(|r| {
                        let vars: BTreeSet<Name> = r.vars.iter().map(|(x, _)| x.clone()).collect();
                        r.args.len() == args.len()
                            && match_with(&r.args.iter().cloned().zip(args.iter().cloned()).collect::<Vec<_>>(), &vars).is_some()
                    })
            }
        }
    }
}

fn first_order_pattern(t: &Term) -> std::result::Result<(), &'static str> {
    if t.contains_lambda() {
        return Err("left side contains a lambda-abstraction");
    }
    if !is_beta_normal(t) {
        return Err("left side is not beta-normal");
    }
    fn rec(t: &Term) -> bool {
        let (head, args) = t.spine();
        match head {
            Term::Var(_) => args.is_empty(),
            Term::Const(_) => args.iter().all(|a| rec(a)),
            _ => false,
        }
    }
    if rec(t) {
        Ok(())
    } else {
        Err("left side applies a variable")
    }
}

/// Typing, shape and variable condition for one rule.
pub fn validate_rule(sig: &Signature, rule: &RewriteRule) -> Result<()> {
    let bad = |reason: String| Error::InvalidRule {
        rule: rule.to_string(),
        reason,
    };
    match rule {
        RewriteRule::Term(r) => {
            let ctx = TermCtx::from_pairs(r.vars.iter().cloned());
            for (_, ty) in &r.vars {
                sig.check_term_type(ty).map_err(|e| bad(e.to_string()))?;
            }
            if r.lhs.is_var() {
                return Err(bad("variable left side".into()));
            }
            first_order_pattern(&r.lhs).map_err(|e| bad(e.into()))?;
            if r.lhs.head_const().is_none() {
                return Err(bad("left side must be headed by a constant".into()));
            }
            let lt = infer_term_type(sig, &ctx, &r.lhs).map_err(|e| bad(e.to_string()))?;
            let rt = infer_term_type(sig, &ctx, &r.rhs).map_err(|e| bad(e.to_string()))?;
            if lt != rt {
                return Err(bad(format!("sides have types {lt} and {rt}")));
            }
            if !lt.is_term_type() {
                return Err(bad(format!("type {lt} is not a term type")));
            }
            let lv = r.lhs.free_vars();
            if let Some(x) = r.rhs.free_vars().into_iter().find(|x| !lv.contains(x)) {
                return Err(bad(format!("variable condition: `{x}` occurs only on the right")));
            }
            Ok(())
        }
        RewriteRule::Atom(r) => {
            let ctx = TermCtx::from_pairs(r.vars.iter().cloned());
            let tys = sig.pred_args(&r.pred).ok_or_else(|| bad(format!("`{}` is not a predicate constant", r.pred)))?;
            if tys.len() != r.args.len() {
                return Err(bad(format!("`{}` expects {} arguments, found {}", r.pred, tys.len(), r.args.len())));
            }
            let mut lv = BTreeSet::new();
            for (a, ty) in r.args.iter().zip(tys) {
                first_order_pattern(a).map_err(|e| bad(e.into()))?;
                let at = infer_term_type(sig, &ctx, a).map_err(|e| bad(e.to_string()))?;
                if at != *ty {
                    return Err(bad(format!("argument {a} has type {at}, expected {ty}")));
                }
                lv.extend(a.free_vars());
            }
            check_formula(sig, &ctx, &r.rhs).map_err(|e| bad(e.to_string()))?;
            if let Some(x) = r.rhs.free_term_vars().into_iter().find(|x| !lv.contains(x)) {
                return Err(bad(format!("variable condition: `{x}` occurs only on the right")));
            }
            Ok(())
        }
    }
}

/// Every violation, one entry per rule.
pub fn validate_system(sig: &Signature, rs: &RewriteSystem) -> std::result::Result<(), Vec<Error>> {
    let errs: Vec<Error> = rs.rules().filter_map(|r| validate_rule(sig, &r).err()).collect();
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

pub fn rw_normalize_term(rs: &RewriteSystem, t: &Term, fuel: u64) -> Result<Term> {
    let mut f = Fuel::new(fuel, "rewriting");
    let t = beta_normalize(t)?;
    rs.norm_term(&t, &mut f)
}

pub fn rw_normalize_formula(rs: &RewriteSystem, p: &Formula, fuel: u64) -> Result<Formula> {
    let mut f = Fuel::new(fuel, "rewriting");
    rs.norm_formula(p, &mut f)
}

/// Objects the congruence applies to.
pub trait Congruence {
    fn congruent_in(&self, rs: &RewriteSystem, other: &Self) -> Result<bool>;
}

impl Congruence for Term {
    fn congruent_in(&self, rs: &RewriteSystem, other: &Self) -> Result<bool> {
        rs.congruent_terms(self, other)
    }
}

impl Congruence for Formula {
    fn congruent_in(&self, rs: &RewriteSystem, other: &Self) -> Result<bool> {
        rs.congruent_formulas(self, other)
    }
}

/// `a ≡ b`, decided by comparing normal forms.
pub fn congruent<T: Congruence>(rs: &RewriteSystem, a: &T, b: &T) -> Result<bool> {
    a.congruent_in(rs, b)
}

enum Step {
    Subst(TermSubst),
    Paths(Vec<(Name, Vec<bool>)>),
}

/// Matches a first-order pattern without copying the subject. Each variable
/// comes with the position of its first occurrence, as a path of
/// function (`false`) and argument (`true`) steps.
fn match_paths(pat: &Term, subject: &Term) -> Option<Vec<(Name, Vec<bool>)>> {
    fn go<'a>(
        p: &Term,
        s: &'a Term,
        path: &mut Vec<bool>,
        seen: &mut BTreeMap<Name, &'a Term>,
        out: &mut Vec<(Name, Vec<bool>)>,
    ) -> bool {
        match (p, s) {
            (Term::Var(x), _) => match seen.get(x) {
                Some(prev) => alpha_eq(prev, s),
                None => {
                    seen.insert(x.clone(), s);
                    out.push((x.clone(), path.clone()));
                    true
                }
            },
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, a), Term::App(g, b)) => {
                path.push(false);
                let ok = go(f, g, path, seen, out);
                path.pop();
                if !ok {
                    return false;
                }
                path.push(true);
                let ok = go(a, b, path, seen, out);
                path.pop();
                ok
            }
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(pat, subject, &mut Vec::new(), &mut BTreeMap::new(), &mut out).then_some(out)
}

fn take_at(t: &mut Term, path: &[bool]) -> Term {
    let mut cur = t;
    for &arg in path {
        let Term::App(f, a) = cur else {
            unreachable!("match paths follow applications")
        };
        cur = if arg { &mut **a } else { &mut **f };
    }
    std::mem::replace(cur, Term::Const(name("")))
}

fn count_vars(t: &Term, uses: &mut BTreeMap<Name, usize>) {
    match t {
        Term::Var(x) => *uses.entry(x.clone()).or_insert(0) += 1,
        Term::App(f, a) => {
            count_vars(f, uses);
            count_vars(a, uses);
        }
        _ => {}
    }
}

/// No abstraction and no variable in head position, so instantiation by
/// normal terms creates no β-redex.
fn first_order(t: &Term) -> bool {
    match t {
        Term::Var(_) | Term::Const(_) => true,
        Term::Lam(..) => false,
        Term::App(..) => {
            let (head, args) = t.spine();
            matches!(head, Term::Const(_)) && args.into_iter().all(first_order)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::names::name;

    fn nat() -> TermType {
        TermType::base("nat")
    }
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

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort("nat").unwrap();
        sig.add_const("0", nat()).unwrap();
        sig.add_const("s", TermType::arrow(nat(), nat())).unwrap();
        sig.add_const("+", TermType::arrows([nat(), nat()], nat())).unwrap();
        sig.add_pred("a", &TermType::arrow(nat(), TermType::Prop)).unwrap();
        sig.add_pred("b", &TermType::arrows([nat(), nat()], TermType::Prop)).unwrap();
        sig
    }

    fn plus_rules() -> RewriteSystem {
        let mut rs = RewriteSystem::new();
        rs.add_rule(RewriteRule::term(vec![(name("y"), nat())], plus(z(), v("y")), v("y")));
        rs.add_rule(RewriteRule::term(
            vec![(name("x"), nat()), (name("y"), nat())],
            plus(s(v("x")), v("y")),
            s(plus(v("x"), v("y"))),
        ));
        rs
    }

    #[test]
    fn validate_examples() {
        assert!(validate_system(&sig(), &plus_rules()).is_ok());
        let mut bad = RewriteSystem::new();
        bad.add_rule(RewriteRule::term(vec![(name("x"), nat())], v("x"), z()));
        let e = validate_system(&sig(), &bad).unwrap_err();
        assert!(e[0].to_string().contains("variable left side"));
        let mut bad = RewriteSystem::new();
        bad.add_rule(RewriteRule::atom(
            vec![(name("t"), nat()), (name("x"), nat())],
            "a",
            vec![v("t")],
            Formula::exists("y", nat(), Formula::atom("b", vec![v("y"), v("x")])),
        ));
        let e = validate_system(&sig(), &bad).unwrap_err();
        assert!(e[0].to_string().contains("variable condition"), "{}", e[0]);
    }

    #[test]
    fn normalize_examples() {
        let rs = plus_rules();
        assert_eq!(rs.normalize_term(&plus(s(z()), s(z()))).unwrap(), s(s(z())));
        assert_eq!(rs.normalize_term(&z()).unwrap(), z());
        assert_eq!(rs.normalize_term(&plus(s(s(z())), z())).unwrap(), s(s(z())));
        assert_eq!(rs.normalize_formula(&Formula::Top).unwrap(), Formula::Top);
    }

    #[test]
    fn congruence_examples() {
        let rs = plus_rules();
        assert!(congruent(&rs, &plus(s(z()), s(z())), &s(s(z()))).unwrap());
        assert!(!congruent(&rs, &z(), &s(z())).unwrap());
    }

    #[test]
    fn fuel_exhaustion_on_looping_system() {
        let mut rs = RewriteSystem::new().with_fuel(50);
        rs.add_rule(RewriteRule::term(vec![(name("x"), nat())], s(v("x")), s(s(v("x")))));
        let e = rs.normalize_term(&s(z())).unwrap_err();
        assert!(e.is_resource());
    }

    #[test]
    fn long_chains_run_in_constant_stack() {
        // A cycle through the root for the whole default budget.
        let mut rs = RewriteSystem::new();
        rs.add_rule(RewriteRule::term(vec![(name("x"), nat())], plus(v("x"), z()), plus(v("x"), z())));
        let e = rs.normalize_term(&plus(s(z()), z())).unwrap_err();
        assert!(e.is_resource());
        let mut rs = RewriteSystem::new();
        rs.add_rule(RewriteRule::atom(vec![(name("x"), nat())], "a", vec![v("x")], Formula::atom("a", vec![v("x")])));
        let e = rs.normalize_formula(&Formula::atom("a", vec![z()])).unwrap_err();
        assert!(e.is_resource());
    }

    #[test]
    fn nonlinear_right_sides_copy_their_images() {
        let mut rs = RewriteSystem::new();
        rs.add_rule(RewriteRule::term(vec![(name("x"), nat())], s(s(v("x"))), plus(v("x"), v("x"))));
        assert_eq!(rs.normalize_term(&s(s(s(z())))).unwrap(), s(plus(z(), z())));
        let zz = plus(z(), z());
        assert_eq!(rs.normalize_term(&s(s(s(s(z()))))).unwrap(), plus(zz.clone(), zz));
    }

    #[test]
    fn atom_rule_normalization() {
        let mut rs = plus_rules();
        rs.add_rule(RewriteRule::atom(
            vec![(name("x"), nat())],
            "a",
            vec![s(v("x"))],
            Formula::atom("a", vec![v("x")]),
        ));
        rs.add_rule(RewriteRule::atom(vec![], "a", vec![z()], Formula::Top));
        let f = Formula::atom("a", vec![plus(s(z()), s(z()))]);
        assert_eq!(rs.normalize_formula(&f).unwrap(), Formula::Top);
        assert!(rs.is_normal_formula(&Formula::atom("a", vec![v("y")])));
        assert!(!rs.is_normal_formula(&f));
    }

    #[test]
    fn constructors() {
        let rs = plus_rules();
        assert!(rs.is_constructor("s"));
        assert!(rs.is_constructor("0"));
        assert!(!rs.is_constructor("+"));
    }
}

