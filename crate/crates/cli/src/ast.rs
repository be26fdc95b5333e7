//! Declarations of a theory file, holding kernel objects with every
//! abbreviation already expanded.

use std::fmt::{self, Display, Formatter};

use munj_core::rewrite::AtomRule;
use munj_core::*;

use crate::lexer::Pos;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryFile {
    pub decls: Vec<Decl>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decl {
    pub pos: Pos,
    pub kind: DeclKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DeclKind {
    Sort(Name),
    Const(Name, TermType),
    Pred(Name, TermType),
    /// A rule added without the recursive-definition checks.
    Rewrite(RewriteRule),
    Define(Name, Definition),
    Recursive(Recursive),
    Theorem(Theorem),
}

/// Right-hand side of `define`.
#[derive(Debug, Clone, PartialEq)]
pub enum Definition {
    Formula(Formula),
    Predicate(Predicate),
    Operator(FixKind, PredOperator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recursive {
    pub preds: Vec<(Name, TermType)>,
    pub order: OrderSpec,
    pub rules: Vec<AtomRule>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem {
    pub name: Name,
    pub terms: Vec<(Name, TermType)>,
    pub hyps: Vec<(Name, Formula)>,
    pub goal: Formula,
    pub proof: ProofTerm,
}

impl Theorem {
    /// `∀x̄. A1 ⊃ .. ⊃ An ⊃ goal`, the type later theorems see.
    pub fn statement(&self) -> Formula {
        let body = self.hyps.iter().rev().fold(self.goal.clone(), |acc, (_, a)| Formula::imp(a.clone(), acc));
        self.terms
            .iter()
            .rev()
            .fold(body, |acc, (x, ty)| Formula::Forall(x.clone(), ty.clone(), Box::new(acc)))
    }

    pub fn term_ctx(&self) -> TermCtx {
        TermCtx::from_pairs(self.terms.iter().cloned())
    }
}

impl TheoryFile {
    pub fn theorems(&self) -> impl Iterator<Item = &Theorem> {
        self.decls.iter().filter_map(|d| match &d.kind {
            DeclKind::Theorem(t) => Some(t),
            _ => None,
        })
    }

    pub fn theorem(&self, name: &str) -> Option<&Theorem> {
        self.theorems().find(|t| &*t.name == name)
    }
}

fn kind_kw(k: FixKind) -> &'static str {
    match k {
        FixKind::Mu => "mu",
        FixKind::Nu => "nu",
    }
}

impl Display for Definition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Definition::Formula(p) => write!(f, "{p}"),
            Definition::Predicate(p) => write!(f, "{p}"),
            Definition::Operator(k, op) => {
                // The kernel prints operators as `mu` literals.
                let s = op.to_string();
                write!(f, "({}{}", kind_kw(*k), &s[3..])
            }
        }
    }
}

impl Display for Decl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DeclKind::Sort(s) => write!(f, "sort {s}"),
            DeclKind::Const(c, ty) => write!(f, "const {c} : {ty}"),
            DeclKind::Pred(a, ty) => write!(f, "pred {a} : {ty}"),
            DeclKind::Rewrite(r) => write!(f, "rewrite {r}"),
            DeclKind::Define(n, d) => write!(f, "define {n} := {d}"),
            DeclKind::Recursive(r) => {
                f.write_str("recursive ")?;
                for (i, (a, ty)) in r.preds.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a} : {ty}")?;
                }
                write!(f, " by {}", r.order)?;
                if !r.order.precedence.is_empty() {
                    let ps: Vec<&str> = r.order.precedence.iter().map(|p| &**p).collect();
                    write!(f, " precedence {}", ps.join(" < "))?;
                }
                f.write_str(" {\n")?;
                for rule in &r.rules {
                    writeln!(f, "  {} ~> {};", rule.lhs(), rule.rhs)?;
                }
                f.write_str("}")
            }
            DeclKind::Theorem(t) => {
                write!(f, "theorem {}", t.name)?;
                for (x, ty) in &t.terms {
                    write!(f, " ({x} : {ty})")?;
                }
                for (h, a) in &t.hyps {
                    write!(f, " ({h} : {a})")?;
                }
                write!(f, " : {}\nproof\n  {}\nend", t.goal, t.proof)
            }
        }
    }
}

impl Display for TheoryFile {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}\n")?;
        }
        Ok(())
    }
}

fn same_binders(a: &[(Name, TermType)], b: &[(Name, TermType)]) -> bool {
    a == b
}

/// Structural equality of declarations with kernel objects compared up to
/// renaming of bound variables.
pub fn alpha_eq_decl(a: &DeclKind, b: &DeclKind) -> bool {
    use DeclKind::*;
    match (a, b) {
        (Sort(x), Sort(y)) => x == y,
        (Const(x, s), Const(y, t)) | (Pred(x, s), Pred(y, t)) => x == y && s == t,
        (Rewrite(RewriteRule::Term(r)), Rewrite(RewriteRule::Term(s))) => {
            same_binders(&r.vars, &s.vars) && alpha_eq(&r.lhs, &s.lhs) && alpha_eq(&r.rhs, &s.rhs)
        }
        (Rewrite(RewriteRule::Atom(r)), Rewrite(RewriteRule::Atom(s))) => atom_rule_eq(r, s),
        (Define(x, d), Define(y, e)) => x == y && definition_eq(d, e),
        (Recursive(r), Recursive(s)) => {
            r.preds == s.preds
                && r.order == s.order
                && r.rules.len() == s.rules.len()
                && r.rules.iter().zip(&s.rules).all(|(a, b)| atom_rule_eq(a, b))
        }
        (Theorem(t), Theorem(u)) => {
            t.name == u.name
                && t.terms == u.terms
                && t.hyps.len() == u.hyps.len()
                && t.hyps.iter().zip(&u.hyps).all(|((h, a), (k, b))| h == k && alpha_eq_formula(a, b))
                && alpha_eq_formula(&t.goal, &u.goal)
                && alpha_eq_proof(&t.proof, &u.proof)
        }
        _ => false,
    }
}

fn atom_rule_eq(r: &AtomRule, s: &AtomRule) -> bool {
    r.pred == s.pred
        && same_binders(&r.vars, &s.vars)
        && r.args.len() == s.args.len()
        && r.args.iter().zip(&s.args).all(|(a, b)| alpha_eq(a, b))
        && alpha_eq_formula(&r.rhs, &s.rhs)
}

fn definition_eq(a: &Definition, b: &Definition) -> bool {
    match (a, b) {
        (Definition::Formula(p), Definition::Formula(q)) => alpha_eq_formula(p, q),
        (Definition::Predicate(p), Definition::Predicate(q)) => alpha_eq_predicate(p, q),
        (Definition::Operator(k, p), Definition::Operator(l, q)) => k == l && alpha_eq_operator(p, q),
        _ => false,
    }
}

/// Declaration-wise α-equivalence of two parsed files.
pub fn alpha_eq_file(a: &TheoryFile, b: &TheoryFile) -> bool {
    a.decls.len() == b.decls.len() && a.decls.iter().zip(&b.decls).all(|(x, y)| alpha_eq_decl(&x.kind, &y.kind))
}
