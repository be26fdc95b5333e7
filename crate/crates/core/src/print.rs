//! Concrete syntax for kernel objects. The output is accepted by the
//! theory-file parser, so printed terms, formulas and proofs round-trip.

use std::fmt::{self, Display, Formatter, Write};

use crate::formula::{Formula, PredOperator, Predicate};
use crate::proof::{Context, ProofSubst, ProofTerm};
use crate::term::{Term, TermType};

/// Constants written infix when applied to exactly two arguments,
/// with their binding strength.
pub const INFIX: [(&str, u8); 2] = [("+", 1), ("*", 2)];

fn infix_level(c: &str) -> Option<u8> {
    INFIX.iter().find(|(n, _)| *n == c).map(|(_, l)| *l)
}

impl Display for TermType {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            TermType::Base(s) => f.write_str(s),
            TermType::Prop => f.write_str("o"),
            TermType::Arrow(a, b) => {
                if matches!(**a, TermType::Arrow(..)) {
                    write!(f, "({a}) -> {b}")
                } else {
                    write!(f, "{a} -> {b}")
                }
            }
        }
    }
}

// Term levels: 0 lambda, 1 sum, 2 product, 3 application, 4 atom.
fn term(t: &Term, level: u8, out: &mut String) {
    match t {
        Term::Var(x) | Term::Const(x) => {
            if infix_level(x).is_some() {
                out.push('(');
                out.push_str(x);
                out.push(')');
            } else {
                out.push_str(x);
            }
        }
        Term::Lam(x, ty, b) => {
            let paren = level > 0;
            if paren {
                out.push('(');
            }
            let _ = write!(out, "fun ({x} : {ty}) => ");
            term(b, 0, out);
            if paren {
                out.push(')');
            }
        }
        Term::App(..) => {
            let (head, args) = t.spine();
            if let (Term::Const(c), [l, r]) = (head, args.as_slice()) {
                if let Some(op) = infix_level(c) {
                    let paren = level > op;
                    if paren {
                        out.push('(');
                    }
                    term(l, op, out);
                    let _ = write!(out, " {c} ");
                    term(r, op + 1, out);
                    if paren {
                        out.push(')');
                    }
                    return;
                }
            }
            let paren = level > 3;
            if paren {
                out.push('(');
            }
            term(head, 4, out);
            for a in args {
                out.push(' ');
                term(a, 4, out);
            }
            if paren {
                out.push(')');
            }
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term(self, 0, &mut s);
        f.write_str(&s)
    }
}

/// An argument position: atomic terms print bare, others in parentheses.
pub struct AtomicTerm<'a>(pub &'a Term);

impl Display for AtomicTerm<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term(self.0, 4, &mut s);
        f.write_str(&s)
    }
}

fn args(ts: &[Term], out: &mut String) {
    for t in ts {
        out.push(' ');
        term(t, 4, out);
    }
}

fn binders(ps: &[(crate::names::Name, TermType)], out: &mut String) {
    for (x, ty) in ps {
        let _ = write!(out, " ({x} : {ty})");
    }
}

fn operator(kw: &str, op: &PredOperator, out: &mut String) {
    let _ = write!(out, "({kw} {}", op.pvar);
    binders(&op.params, out);
    out.push_str(", ");
    formula(&op.body, 0, out);
    out.push(')');
}

// Formula levels: 0 implication and binders, 1 disjunction, 2 conjunction, 3 atomic.
fn formula(p: &Formula, level: u8, out: &mut String) {
    let open = |need: u8, out: &mut String| {
        let paren = level > need;
        if paren {
            out.push('(');
        }
        paren
    };
    match p {
        Formula::Top => out.push_str("top"),
        Formula::Bot => out.push_str("bot"),
        Formula::Imp(a, b) => {
            let paren = open(0, out);
            formula(a, 1, out);
            out.push_str(" => ");
            formula(b, 0, out);
            if paren {
                out.push(')');
            }
        }
        Formula::Or(a, b) => {
            let paren = open(1, out);
            formula(a, 2, out);
            out.push_str(" \\/ ");
            formula(b, 1, out);
            if paren {
                out.push(')');
            }
        }
        Formula::And(a, b) => {
            let paren = open(2, out);
            formula(a, 3, out);
            out.push_str(" /\\ ");
            formula(b, 2, out);
            if paren {
                out.push(')');
            }
        }
        Formula::Forall(x, ty, b) | Formula::Exists(x, ty, b) => {
            let paren = open(0, out);
            let kw = if matches!(p, Formula::Forall(..)) { "forall" } else { "exists" };
            let _ = write!(out, "{kw} {x} : {ty}, ");
            formula(b, 0, out);
            if paren {
                out.push(')');
            }
        }
        Formula::Eq(t, u) => {
            term(t, 1, out);
            out.push_str(" = ");
            term(u, 1, out);
        }
        Formula::Mu(op, ts) | Formula::Nu(op, ts) => {
            let kw = if matches!(p, Formula::Mu(..)) { "mu" } else { "nu" };
            operator(kw, op, out);
            args(ts, out);
        }
        Formula::PVar(a, ts) | Formula::Atom(a, ts) => {
            out.push_str(a);
            args(ts, out);
        }
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        formula(self, 0, &mut s);
        f.write_str(&s)
    }
}

fn predicate(p: &Predicate, out: &mut String) {
    out.push_str("fun");
    binders(&p.params, out);
    out.push_str(" => ");
    formula(&p.body, 0, out);
}

impl Display for Predicate {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        predicate(self, &mut s);
        f.write_str(&s)
    }
}

/// Printed as a `mu` literal; the surrounding syntax decides the fixpoint kind.
impl Display for PredOperator {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        operator("mu", self, &mut s);
        f.write_str(&s)
    }
}

fn proof_arg(p: &ProofTerm, out: &mut String) {
    match p {
        ProofTerm::Var(_) | ProofTerm::Unit | ProofTerm::Ann(..) => proof(p, out),
        _ => {
            out.push('(');
            proof(p, out);
            out.push(')');
        }
    }
}

fn term_list(ts: &[Term], out: &mut String) {
    out.push('[');
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        term(t, 0, out);
    }
    out.push(']');
}

fn proof(p: &ProofTerm, out: &mut String) {
    use ProofTerm::*;
    let unary = |kw: &str, q: &ProofTerm, out: &mut String| {
        out.push_str(kw);
        out.push(' ');
        proof_arg(q, out);
    };
    match p {
        Var(a) => out.push_str(a),
        Unit => out.push_str("unit"),
        Ann(q, f) => {
            out.push('(');
            proof(q, out);
            out.push_str(" : ");
            formula(f, 0, out);
            out.push(')');
        }
        Abort(q) => unary("abort", q, out),
        Lam(a, None, b) => {
            let _ = write!(out, "lam {a}. ");
            proof(b, out);
        }
        Lam(a, Some(ty), b) => {
            let _ = write!(out, "lam ({a} : ");
            formula(ty, 0, out);
            out.push_str("). ");
            proof(b, out);
        }
        App(f, a) => {
            out.push_str("app ");
            proof_arg(f, out);
            out.push(' ');
            proof_arg(a, out);
        }
        Pair(a, b) => {
            out.push_str("pair ");
            proof_arg(a, out);
            out.push(' ');
            proof_arg(b, out);
        }
        Fst(q) => unary("fst", q, out),
        Snd(q) => unary("snd", q, out),
        Inl(q) => unary("inl", q, out),
        Inr(q) => unary("inr", q, out),
        Case(q, a, l, b, r) => {
            unary("case", q, out);
            let _ = write!(out, " ({a}. ");
            proof(l, out);
            let _ = write!(out, ") ({b}. ");
            proof(r, out);
            out.push(')');
        }
        LamX(x, b) => {
            let _ = write!(out, "lamx {x}. ");
            proof(b, out);
        }
        TApp(q, t) => {
            unary("tapp", q, out);
            out.push(' ');
            term(t, 4, out);
        }
        Wit(t, q) => {
            out.push_str("wit ");
            term(t, 4, out);
            out.push(' ');
            proof_arg(q, out);
        }
        Dest(q, x, a, b) => {
            unary("dest", q, out);
            let _ = write!(out, " ({x} {a}. ");
            proof(b, out);
            out.push(')');
        }
        Refl(t) => {
            out.push_str("refl ");
            term(t, 4, out);
        }
        EqCase(e) => {
            out.push_str("eqcase { locals");
            binders(&e.locals, out);
            out.push_str("; ctx");
            for (a, f) in e.hyps.iter() {
                let _ = write!(out, " ({a} : ");
                formula(f, 0, out);
                out.push(')');
            }
            let _ = write!(out, "; theta {}", e.theta);
            out.push_str("; sigma ");
            subst(&e.sigma, out);
            out.push_str("; eq ");
            term(&e.lhs, 1, out);
            out.push_str(" = ");
            term(&e.rhs, 1, out);
            out.push_str("; goal ");
            formula(&e.goal, 0, out);
            out.push_str("; by ");
            proof(&e.major, out);
            for b in &e.branches {
                out.push_str("; branch");
                binders(&b.fresh, out);
                let _ = write!(out, " {} => ", b.subst);
                proof(&b.proof, out);
            }
            out.push_str(" }");
        }
        Fold(op, ts, q) | Unfold(op, ts, q) => {
            let (kw, fix) = if matches!(p, Fold(..)) { ("fold", "mu") } else { ("unfold", "nu") };
            let _ = write!(out, "{kw} ");
            operator(fix, op, out);
            out.push(' ');
            term_list(ts, out);
            out.push(' ');
            proof_arg(q, out);
        }
        Iter(it) | Coiter(it) => {
            let kw = if matches!(p, Iter(_)) { "iter" } else { "coiter" };
            let _ = write!(out, "{kw}[");
            predicate(&it.inv, out);
            out.push_str("] ");
            proof_arg(&it.arg, out);
            out.push_str(" (");
            for x in &it.params {
                let _ = write!(out, "{x} ");
            }
            let _ = write!(out, "{}. ", it.hyp);
            proof(&it.step, out);
            out.push(')');
        }
    }
}

fn subst(s: &ProofSubst, out: &mut String) {
    out.push('[');
    for (i, (a, q)) in s.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{a} := ");
        proof(q, out);
    }
    out.push(']');
}

impl Display for ProofTerm {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        proof(self, &mut s);
        f.write_str(&s)
    }
}

impl Display for ProofSubst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        subst(self, &mut s);
        f.write_str(&s)
    }
}

impl Display for Context {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for (i, (a, p)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a} : {p}")?;
        }
        Ok(())
    }
}
