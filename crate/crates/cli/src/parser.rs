//! Recursive-descent parser for theory files.
//!
//! Declarations are resolved in order: the parser keeps the signature and
//! rules seen so far, so identifiers resolve to constants, predicates and
//! abbreviations as they are declared, and `subst` sugar can be elaborated
//! against the types it needs.

use std::collections::BTreeMap;
use std::fmt;

use munj_core::rewrite::AtomRule;
use munj_core::*;

use crate::ast::*;
use crate::elab::Elaborator;
use crate::lexer::{lex, Pos, Tok, Token};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

/// Words that never name a term variable or constant.
const HARD: &[&str] = &[
    "fun", "forall", "exists", "top", "bot", "mu", "nu", "proof", "end", "in", "theorem", "sort", "const", "pred",
    "rewrite", "define", "recursive", "precedence",
];

const PROOF_KW: &[&str] = &[
    "unit", "abort", "lam", "lamx", "app", "pair", "fst", "snd", "inl", "inr", "case", "tapp", "wit", "dest", "refl",
    "eqcase", "fold", "unfold", "iter", "coiter", "subst",
];

pub fn parse_str(src: &str) -> PResult<TheoryFile> {
    let toks = lex(src).map_err(|e| ParseError { pos: e.pos, msg: e.msg })?;
    let mut p = Parser::new(toks);
    let mut decls = Vec::new();
    while !p.at(&Tok::Eof) {
        decls.push(p.decl()?);
    }
    Ok(TheoryFile { decls })
}

/// Collects the variables of a rewrite-rule left side in order of first
/// occurrence.
#[derive(Default)]
struct RuleVars {
    order: Vec<Name>,
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    sig: Signature,
    rs: RewriteSystem,
    defines: BTreeMap<Name, Definition>,
    lemmas: Context,
    terms: Vec<Name>,
    pvars: Vec<Name>,
    rule_vars: Option<RuleVars>,
    sugar: Vec<Pos>,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            i: 0,
            sig: Signature::new(),
            rs: RewriteSystem::new(),
            defines: BTreeMap::new(),
            lemmas: Context::new(),
            terms: Vec::new(),
            pvars: Vec::new(),
            rule_vars: None,
            sugar: Vec::new(),
        }
    }

    // ---- token helpers

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn at(&self, t: &Tok) -> bool {
        self.peek() == t
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.at(&t) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.at_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{kw}`, found {}", self.peek()))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.at(t) {
            self.bump();
            true
        } else {
            false
        }
    }

    /// A binder or declared name: any identifier that is not a hard keyword.
    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) if !HARD.contains(&s.as_str()) => {
                self.bump();
                Ok(name(&s))
            }
            t => self.err(format!("expected {what}, found {t}")),
        }
    }

    fn proof_ident(&mut self, what: &str) -> PResult<Name> {
        if let Tok::Ident(s) = self.peek() {
            if PROOF_KW.contains(&s.as_str()) {
                return self.err(format!("expected {what}, found keyword `{s}`"));
            }
        }
        self.ident(what)
    }

    /// Runs `f`, restoring the position if it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let save = (self.i, self.terms.len(), self.pvars.len());
        let order = self.rule_vars.as_ref().map(|r| r.order.len());
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.i = save.0;
                self.terms.truncate(save.1);
                self.pvars.truncate(save.2);
                if let (Some(rv), Some(n)) = (self.rule_vars.as_mut(), order) {
                    rv.order.truncate(n);
                }
                None
            }
        }
    }

    fn with_terms<T>(&mut self, xs: &[Name], f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let n = self.terms.len();
        self.terms.extend(xs.iter().cloned());
        let r = f(self);
        self.terms.truncate(n);
        r
    }

    // ---- types

    fn ty(&mut self) -> PResult<TermType> {
        let a = self.ty_atom()?;
        if self.eat(&Tok::Arrow) {
            Ok(TermType::arrow(a, self.ty()?))
        } else {
            Ok(a)
        }
    }

    fn ty_atom(&mut self) -> PResult<TermType> {
        if self.eat(&Tok::LParen) {
            let t = self.ty()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        if self.at_kw("o") {
            self.bump();
            return Ok(TermType::Prop);
        }
        let pos = self.pos();
        let s = self.ident("a type")?;
        if !self.sig.has_sort(&s) {
            return Err(ParseError {
                pos,
                msg: format!("unknown sort `{s}`"),
            });
        }
        Ok(TermType::Base(s))
    }

    /// `(x y : T)` groups, at least one.
    fn typed_binders(&mut self) -> PResult<Vec<(Name, TermType)>> {
        let mut out = Vec::new();
        while self.at(&Tok::LParen) {
            self.bump();
            let mut names = vec![self.ident("a variable")?];
            while !self.at(&Tok::Colon) {
                names.push(self.ident("a variable")?);
            }
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.expect(Tok::RParen)?;
            out.extend(names.into_iter().map(|x| (x, ty.clone())));
        }
        Ok(out)
    }

    // ---- terms

    fn term(&mut self) -> PResult<Term> {
        if self.at_kw("fun") {
            self.bump();
            let bs = self.typed_binders()?;
            if bs.is_empty() {
                return self.err("expected a binder `(x : T)`");
            }
            self.expect(Tok::FatArrow)?;
            let xs: Vec<Name> = bs.iter().map(|(x, _)| x.clone()).collect();
            let body = self.with_terms(&xs, |p| p.term())?;
            return Ok(bs
                .into_iter()
                .rev()
                .fold(body, |acc, (x, ty)| Term::Lam(x, ty, Box::new(acc))));
        }
        self.term_sum()
    }

    fn infix(&mut self, c: char, next: fn(&mut Self) -> PResult<Term>) -> PResult<Term> {
        let mut l = next(self)?;
        while self.at(&Tok::Infix(c)) {
            self.bump();
            let r = next(self)?;
            l = Term::apps(Term::cnst(&c.to_string()), [l, r]);
        }
        Ok(l)
    }

    fn term_sum(&mut self) -> PResult<Term> {
        self.infix('+', Self::term_prod)
    }

    fn term_prod(&mut self) -> PResult<Term> {
        self.infix('*', Self::term_app)
    }

    fn term_app(&mut self) -> PResult<Term> {
        let mut t = self.term_atom()?;
        while self.starts_term_atom() {
            let a = self.term_atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn starts_term_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => !HARD.contains(&s.as_str()),
            _ => false,
        }
    }

    fn term_atom(&mut self) -> PResult<Term> {
        if self.at(&Tok::LParen) {
            if let (Tok::Infix(c), Tok::RParen) = (self.peek_at(1).clone(), self.peek_at(2).clone()) {
                self.i += 3;
                return Ok(Term::cnst(&c.to_string()));
            }
            self.bump();
            let t = self.term()?;
            self.expect(Tok::RParen)?;
            return Ok(t);
        }
        let x = self.ident("a term")?;
        Ok(self.resolve_term(x))
    }

    fn resolve_term(&mut self, x: Name) -> Term {
        if self.terms.contains(&x) {
            return Term::Var(x);
        }
        if self.sig.const_type(&x).is_some() {
            return Term::Const(x);
        }
        if let Some(rv) = self.rule_vars.as_mut() {
            if !rv.order.contains(&x) {
                rv.order.push(x.clone());
            }
        }
        Term::Var(x)
    }

    fn term_list(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LBracket)?;
        let mut ts = Vec::new();
        if !self.at(&Tok::RBracket) {
            ts.push(self.term()?);
            while self.eat(&Tok::Comma) {
                ts.push(self.term()?);
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(ts)
    }

    fn term_args(&mut self) -> PResult<Vec<Term>> {
        let mut args = Vec::new();
        while self.starts_term_atom() {
            args.push(self.term_atom()?);
        }
        Ok(args)
    }

    // ---- formulas

    fn formula(&mut self) -> PResult<Formula> {
        for (kw, forall) in [("forall", true), ("exists", false)] {
            if self.at_kw(kw) {
                self.bump();
                let mut names = vec![self.ident("a variable")?];
                while !self.at(&Tok::Colon) {
                    names.push(self.ident("a variable")?);
                }
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Comma)?;
                let body = self.with_terms(&names, |p| p.formula())?;
                return Ok(names.into_iter().rev().fold(body, |acc, x| {
                    if forall {
                        Formula::Forall(x, ty.clone(), Box::new(acc))
                    } else {
                        Formula::Exists(x, ty.clone(), Box::new(acc))
                    }
                }));
            }
        }
        let a = self.formula_or()?;
        if self.eat(&Tok::FatArrow) {
            Ok(Formula::imp(a, self.formula()?))
        } else {
            Ok(a)
        }
    }

    fn formula_or(&mut self) -> PResult<Formula> {
        let a = self.formula_and()?;
        if self.eat(&Tok::Or) {
            Ok(Formula::or(a, self.formula_or()?))
        } else {
            Ok(a)
        }
    }

    fn formula_and(&mut self) -> PResult<Formula> {
        let a = self.formula_atom()?;
        if self.eat(&Tok::And) {
            Ok(Formula::and(a, self.formula_and()?))
        } else {
            Ok(a)
        }
    }

    fn at_operator(&self) -> Option<FixKind> {
        if !self.at(&Tok::LParen) {
            return None;
        }
        match self.peek_at(1) {
            Tok::Ident(s) if s == "mu" => Some(FixKind::Mu),
            Tok::Ident(s) if s == "nu" => Some(FixKind::Nu),
            _ => None,
        }
    }

    /// `(mu N (x : T).., F)`, or the same without parentheses.
    fn operator(&mut self) -> PResult<(FixKind, PredOperator)> {
        let paren = self.eat(&Tok::LParen);
        let kind = if self.at_kw("mu") {
            FixKind::Mu
        } else if self.at_kw("nu") {
            FixKind::Nu
        } else {
            return self.err(format!("expected `mu` or `nu`, found {}", self.peek()));
        };
        self.bump();
        let pvar = self.ident("a predicate variable")?;
        let params = self.typed_binders()?;
        self.expect(Tok::Comma)?;
        let xs: Vec<Name> = params.iter().map(|(x, _)| x.clone()).collect();
        self.pvars.push(pvar.clone());
        let body = self.with_terms(&xs, |p| p.formula());
        self.pvars.pop();
        let body = body?;
        if paren {
            self.expect(Tok::RParen)?;
        }
        Ok((kind, PredOperator { pvar, params, body }))
    }

    fn formula_atom(&mut self) -> PResult<Formula> {
        // A quantifier in operand position extends as far right as it can.
        if self.at_kw("forall") || self.at_kw("exists") {
            return self.formula();
        }
        if self.at_kw("top") {
            self.bump();
            return Ok(Formula::Top);
        }
        if self.at_kw("bot") {
            self.bump();
            return Ok(Formula::Bot);
        }
        if self.at_operator().is_some() {
            let (kind, op) = self.operator()?;
            let args = self.term_args()?;
            return Ok(Formula::fixpoint(kind, op, args));
        }
        if let Some(eq) = self.attempt(|p| {
            let l = p.term_sum()?;
            p.expect(Tok::Eq)?;
            let r = p.term_sum()?;
            Ok(Formula::eq(l, r))
        }) {
            return Ok(eq);
        }
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let pos = self.pos();
        let a = self.ident("a formula")?;
        let args = self.term_args()?;
        self.apply_name(pos, &a, args)
    }

    fn apply_name(&self, pos: Pos, a: &Name, args: Vec<Term>) -> PResult<Formula> {
        let fail = |msg: String| Err(ParseError { pos, msg });
        if self.pvars.contains(a) {
            return Ok(Formula::PVar(a.clone(), args));
        }
        if self.sig.pred_args(a).is_some() {
            return Ok(Formula::Atom(a.clone(), args));
        }
        match self.defines.get(a) {
            Some(Definition::Formula(f)) => {
                if args.is_empty() {
                    Ok(f.clone())
                } else {
                    fail(format!("`{a}` takes no arguments"))
                }
            }
            Some(Definition::Predicate(p)) => {
                if p.arity() != args.len() {
                    return fail(format!("`{a}` expects {} arguments, found {}", p.arity(), args.len()));
                }
                Ok(p.apply(&args))
            }
            Some(Definition::Operator(k, op)) => Ok(Formula::fixpoint(*k, op.clone(), args)),
            None => fail(format!("unknown predicate `{a}`")),
        }
    }

    /// `fun (x : T).. => F`, `fun => F`, or an abbreviation.
    fn predicate(&mut self) -> PResult<Predicate> {
        if self.at_kw("fun") {
            self.bump();
            let params = self.typed_binders()?;
            self.expect(Tok::FatArrow)?;
            let xs: Vec<Name> = params.iter().map(|(x, _)| x.clone()).collect();
            let body = self.with_terms(&xs, |p| p.formula())?;
            return Ok(Predicate::new(params, body));
        }
        let pos = self.pos();
        let a = self.ident("a predicate")?;
        match self.defines.get(&a) {
            Some(Definition::Predicate(p)) => Ok(p.clone()),
            Some(Definition::Operator(k, op)) => Ok(op.fixpoint_predicate(*k)),
            Some(Definition::Formula(f)) => Ok(Predicate::new(Vec::new(), f.clone())),
            None => match self.sig.pred_args(&a) {
                Some(tys) => Ok(Predicate::of_atom(&a, tys)),
                None => Err(ParseError {
                    pos,
                    msg: format!("unknown predicate `{a}`"),
                }),
            },
        }
    }

    fn operator_ref(&mut self, want: FixKind) -> PResult<PredOperator> {
        let pos = self.pos();
        let (kind, op) = if self.at_operator().is_some() {
            self.operator()?
        } else {
            let a = self.ident("an operator")?;
            match self.defines.get(&a) {
                Some(Definition::Operator(k, op)) => (*k, op.clone()),
                _ => {
                    return Err(ParseError {
                        pos,
                        msg: format!("`{a}` is not a fixed-point operator"),
                    })
                }
            }
        };
        if kind != want {
            return Err(ParseError {
                pos,
                msg: "wrong fixed-point kind for this rule".into(),
            });
        }
        Ok(op)
    }

    // ---- proofs

    fn proof(&mut self) -> PResult<ProofTerm> {
        let kw = match self.peek() {
            Tok::Ident(s) if PROOF_KW.contains(&s.as_str()) => s.clone(),
            _ => return self.proof_arg(),
        };
        if kw == "unit" {
            return self.proof_arg();
        }
        self.bump();
        use ProofTerm as P;
        Ok(match kw.as_str() {
            "lam" => {
                let (a, ann) = if self.eat(&Tok::LParen) {
                    let a = self.proof_ident("a hypothesis name")?;
                    self.expect(Tok::Colon)?;
                    let f = self.formula()?;
                    self.expect(Tok::RParen)?;
                    (a, Some(f))
                } else {
                    (self.proof_ident("a hypothesis name")?, None)
                };
                self.expect(Tok::Dot)?;
                P::Lam(a, ann, Box::new(self.proof()?))
            }
            "lamx" => {
                let x = self.ident("a variable")?;
                self.expect(Tok::Dot)?;
                let b = self.with_terms(&[x.clone()], |p| p.proof())?;
                P::LamX(x, Box::new(b))
            }
            "abort" => P::Abort(Box::new(self.proof_arg()?)),
            "app" => {
                let f = self.proof_arg()?;
                P::app(f, self.proof_arg()?)
            }
            "pair" => {
                let a = self.proof_arg()?;
                P::pair(a, self.proof_arg()?)
            }
            "fst" => P::fst(self.proof_arg()?),
            "snd" => P::snd(self.proof_arg()?),
            "inl" => P::inl(self.proof_arg()?),
            "inr" => P::inr(self.proof_arg()?),
            "case" => {
                let q = self.proof_arg()?;
                let (a, l) = self.proof_branch()?;
                let (b, r) = self.proof_branch()?;
                P::Case(Box::new(q), a, Box::new(l), b, Box::new(r))
            }
            "tapp" => {
                let q = self.proof_arg()?;
                P::tapp(q, self.term_atom()?)
            }
            "wit" => {
                let t = self.term_atom()?;
                P::Wit(t, Box::new(self.proof_arg()?))
            }
            "dest" => {
                let q = self.proof_arg()?;
                self.expect(Tok::LParen)?;
                let x = self.ident("a variable")?;
                let a = self.proof_ident("a hypothesis name")?;
                self.expect(Tok::Dot)?;
                let b = self.with_terms(&[x.clone()], |p| p.proof())?;
                self.expect(Tok::RParen)?;
                P::Dest(Box::new(q), x, a, Box::new(b))
            }
            "refl" => P::Refl(self.term_atom()?),
            "eqcase" => self.eqcase()?,
            "fold" | "unfold" => {
                let kind = if kw == "fold" { FixKind::Mu } else { FixKind::Nu };
                let op = self.operator_ref(kind)?;
                let ts = self.term_list()?;
                let q = self.proof_arg()?;
                if kind == FixKind::Mu {
                    P::Fold(Box::new(op), ts, Box::new(q))
                } else {
                    P::Unfold(Box::new(op), ts, Box::new(q))
                }
            }
            "iter" | "coiter" => {
                self.expect(Tok::LBracket)?;
                let inv = self.predicate()?;
                self.expect(Tok::RBracket)?;
                let arg = self.proof_arg()?;
                self.expect(Tok::LParen)?;
                let mut names = vec![self.proof_ident("a binder")?];
                while !self.at(&Tok::Dot) {
                    names.push(self.proof_ident("a binder")?);
                }
                self.bump();
                let hyp = names.pop().expect("nonempty");
                let step = self.with_terms(&names, |p| p.proof())?;
                self.expect(Tok::RParen)?;
                let it = Box::new(Iteration {
                    inv,
                    arg,
                    params: names,
                    hyp,
                    step,
                });
                if kw == "iter" {
                    P::Iter(it)
                } else {
                    P::Coiter(it)
                }
            }
            "subst" => {
                let pos = self.toks[self.i - 1].pos;
                // `subst eq:H` is accepted as a spelling of `subst H`.
                if self.at_kw("eq") && self.peek_at(1) == &Tok::Colon {
                    self.i += 2;
                }
                let major = self.proof_arg()?;
                let body = if self.at_kw("in") {
                    self.bump();
                    Some(self.proof()?)
                } else {
                    None
                };
                self.sugar.push(pos);
                crate::elab::sugar(major, body, self.sugar.len() - 1)
            }
            _ => unreachable!("proof keyword {kw}"),
        })
    }

    fn proof_branch(&mut self) -> PResult<(Name, ProofTerm)> {
        self.expect(Tok::LParen)?;
        let a = self.proof_ident("a hypothesis name")?;
        self.expect(Tok::Dot)?;
        let p = self.proof()?;
        self.expect(Tok::RParen)?;
        Ok((a, p))
    }

    fn proof_arg(&mut self) -> PResult<ProofTerm> {
        if self.at_kw("unit") {
            self.bump();
            return Ok(ProofTerm::Unit);
        }
        if self.eat(&Tok::LParen) {
            let p = self.proof()?;
            let p = if self.eat(&Tok::Colon) {
                ProofTerm::Ann(Box::new(p), self.formula()?)
            } else {
                p
            };
            self.expect(Tok::RParen)?;
            return Ok(p);
        }
        Ok(ProofTerm::Var(self.proof_ident("a proof")?))
    }

    fn section(&mut self, kw: &str) -> PResult<()> {
        self.expect_kw(kw)
    }

    /// Runs `f` with exactly `names` as the term variables in scope.
    fn in_scope<T>(&mut self, names: Vec<Name>, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let outer = std::mem::replace(&mut self.terms, names);
        let r = f(self);
        self.terms = outer;
        r
    }

    /// The stored context, equation and goal mention only the locals; `θ`,
    /// `σ` and the major premise live in the surrounding scope.
    fn eqcase(&mut self) -> PResult<ProofTerm> {
        self.expect(Tok::LBrace)?;
        self.section("locals")?;
        let locals = self.typed_binders()?;
        self.expect(Tok::Semi)?;
        let local_names: Vec<Name> = locals.iter().map(|(x, _)| x.clone()).collect();
        let hyps = self.in_scope(local_names.clone(), |p| {
            p.section("ctx")?;
            let mut hyps = Context::new();
            while p.eat(&Tok::LParen) {
                let a = p.proof_ident("a hypothesis name")?;
                p.expect(Tok::Colon)?;
                let f = p.formula()?;
                p.expect(Tok::RParen)?;
                hyps.push(a, f);
            }
            p.expect(Tok::Semi)?;
            Ok(hyps)
        })?;
        self.section("theta")?;
        let theta = self.term_subst()?;
        self.expect(Tok::Semi)?;
        self.section("sigma")?;
        self.expect(Tok::LBracket)?;
        let mut sigma = ProofSubst::new();
        if !self.at(&Tok::RBracket) {
            loop {
                let a = self.proof_ident("a hypothesis name")?;
                self.expect(Tok::Assign)?;
                sigma.insert(a, self.proof()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Semi)?;
        let (lhs, rhs, goal) = self.in_scope(local_names.clone(), |p| {
            p.section("eq")?;
            let lhs = p.term_sum()?;
            p.expect(Tok::Eq)?;
            let rhs = p.term_sum()?;
            p.expect(Tok::Semi)?;
            p.section("goal")?;
            let goal = p.formula()?;
            p.expect(Tok::Semi)?;
            Ok((lhs, rhs, goal))
        })?;
        self.expect_kw("by")?;
        let major = self.proof()?;
        let mut branches = Vec::new();
        while self.eat(&Tok::Semi) {
            if self.at(&Tok::RBrace) {
                break;
            }
            self.section("branch")?;
            let fresh = self.typed_binders()?;
            let mut names = local_names.clone();
            names.extend(fresh.iter().map(|(x, _)| x.clone()));
            let (subst, proof) = self.in_scope(names, |p| {
                let subst = p.term_subst()?;
                p.expect(Tok::FatArrow)?;
                Ok((subst, p.proof()?))
            })?;
            branches.push(Branch { fresh, subst, proof });
        }
        self.expect(Tok::RBrace)?;
        Ok(ProofTerm::EqCase(Box::new(EqElim {
            locals,
            hyps,
            theta,
            sigma,
            lhs,
            rhs,
            goal,
            major,
            branches,
        })))
    }

    fn term_subst(&mut self) -> PResult<TermSubst> {
        self.expect(Tok::LBracket)?;
        let mut s = TermSubst::new();
        if !self.at(&Tok::RBracket) {
            loop {
                let x = self.ident("a variable")?;
                self.expect(Tok::Assign)?;
                s.insert(x, self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(s)
    }

    // ---- declarations

    fn decl(&mut self) -> PResult<Decl> {
        let pos = self.pos();
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            t => return self.err(format!("expected a declaration, found {t}")),
        };
        self.bump();
        let fail = |msg: String| ParseError { pos, msg };
        let kind = match kw.as_str() {
            "sort" => {
                let s = self.ident("a sort name")?;
                self.sig.add_sort(&s).map_err(|e| fail(e.to_string()))?;
                DeclKind::Sort(s)
            }
            "const" => {
                let c = self.const_name()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.sig.add_const(&c, ty.clone()).map_err(|e| fail(e.to_string()))?;
                DeclKind::Const(c, ty)
            }
            "pred" => {
                let a = self.ident("a predicate name")?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.sig.add_pred(&a, &ty).map_err(|e| fail(e.to_string()))?;
                DeclKind::Pred(a, ty)
            }
            "rewrite" => {
                let r = self.rule(None)?;
                self.rs.add_rule(r.clone());
                DeclKind::Rewrite(r)
            }
            "define" => {
                let n = self.ident("a name")?;
                if self.defines.contains_key(&n) || self.sig.pred_args(&n).is_some() {
                    return Err(fail(format!("`{n}` is already defined")));
                }
                self.expect(Tok::Assign)?;
                let d = self.definition()?;
                self.defines.insert(n.clone(), d.clone());
                DeclKind::Define(n, d)
            }
            "recursive" => DeclKind::Recursive(self.recursive()?),
            "theorem" => DeclKind::Theorem(self.theorem()?),
            _ => return Err(fail(format!("unknown declaration `{kw}`"))),
        };
        Ok(Decl { pos, kind })
    }

    fn const_name(&mut self) -> PResult<Name> {
        if self.at(&Tok::LParen) {
            if let (Tok::Infix(c), Tok::RParen) = (self.peek_at(1).clone(), self.peek_at(2).clone()) {
                self.i += 3;
                return Ok(name(&c.to_string()));
            }
        }
        if let Tok::Infix(c) = self.peek().clone() {
            self.bump();
            return Ok(name(&c.to_string()));
        }
        self.ident("a constant name")
    }

    fn definition(&mut self) -> PResult<Definition> {
        if self.at_kw("fun") {
            return Ok(Definition::Predicate(self.predicate()?));
        }
        if self.at_kw("mu") || self.at_kw("nu") {
            let (k, op) = self.operator()?;
            return Ok(Definition::Operator(k, op));
        }
        if self.at_operator().is_some() {
            let (k, op) = self.operator()?;
            if !self.starts_term_atom() {
                return Ok(Definition::Operator(k, op));
            }
            let args = self.term_args()?;
            let f = Formula::fixpoint(k, op, args);
            return Ok(Definition::Formula(self.formula_rest(f)?));
        }
        Ok(Definition::Formula(self.formula()?))
    }

    /// Continues a formula whose first atomic part was already read.
    fn formula_rest(&mut self, first: Formula) -> PResult<Formula> {
        let a = if self.eat(&Tok::And) {
            Formula::and(first, self.formula_and()?)
        } else {
            first
        };
        let a = if self.eat(&Tok::Or) { Formula::or(a, self.formula_or()?) } else { a };
        if self.eat(&Tok::FatArrow) {
            Ok(Formula::imp(a, self.formula()?))
        } else {
            Ok(a)
        }
    }

    /// `l ~> r`; identifiers of `l` that are not constants become rule
    /// variables, typed from where they occur. With `defined`, the rule
    /// must be an atom rule for one of those predicates.
    fn rule(&mut self, defined: Option<&[Name]>) -> PResult<RewriteRule> {
        let pos = self.pos();
        let fail = |msg: String| ParseError { pos, msg };
        let head_pred = match self.peek() {
            Tok::Ident(s) if self.sig.pred_args(s).is_some() => Some(name(s)),
            _ => None,
        };
        self.rule_vars = Some(RuleVars::default());
        let lhs = match &head_pred {
            Some(a) => {
                self.bump();
                self.term_args().map(|args| (Some(a.clone()), args, None))
            }
            None => self.term().map(|t| (None, Vec::new(), Some(t))),
        };
        let vars = self.rule_vars.take().unwrap_or_default().order;
        let (pred, args, lhs_term) = lhs?;
        if let Some(ds) = defined {
            match &pred {
                Some(a) if ds.contains(a) => {}
                _ => return Err(fail("rule left side must be an atom of a predicate being defined".into())),
            }
        }
        let mut types: BTreeMap<Name, TermType> = BTreeMap::new();
        match (&pred, &lhs_term) {
            (Some(a), _) => {
                let tys = self.sig.pred_args(a).expect("predicate").to_vec();
                if tys.len() != args.len() {
                    return Err(fail(format!("`{a}` expects {} arguments, found {}", tys.len(), args.len())));
                }
                for (t, ty) in args.iter().zip(&tys) {
                    self.type_rule_vars(t, ty, &mut types).map_err(fail)?;
                }
            }
            (None, Some(t)) => {
                let (head, targs) = t.spine();
                let hty = match head {
                    Term::Const(c) => self.sig.const_type(c).cloned(),
                    _ => None,
                }
                .ok_or_else(|| fail("left side must be headed by a constant".into()))?;
                let (atys, _) = hty.uncurry();
                if atys.len() < targs.len() {
                    return Err(fail(format!("`{head}` is applied to too many arguments")));
                }
                let atys: Vec<TermType> = atys.into_iter().cloned().collect();
                for (a, ty) in targs.into_iter().zip(&atys) {
                    self.type_rule_vars(a, ty, &mut types).map_err(fail)?;
                }
            }
            _ => unreachable!(),
        }
        let typed: Vec<(Name, TermType)> = vars
            .iter()
            .map(|x| {
                types
                    .get(x)
                    .cloned()
                    .map(|ty| (x.clone(), ty))
                    .ok_or_else(|| fail(format!("cannot infer the type of `{x}`")))
            })
            .collect::<PResult<_>>()?;
        self.expect(Tok::Squiggle)?;
        let names: Vec<Name> = typed.iter().map(|(x, _)| x.clone()).collect();
        Ok(match pred {
            Some(a) => {
                let rhs = self.with_terms(&names, |p| p.formula())?;
                RewriteRule::Atom(AtomRule {
                    vars: typed,
                    pred: a,
                    args,
                    rhs,
                })
            }
            None => {
                let rhs = self.with_terms(&names, |p| p.term())?;
                RewriteRule::term(typed, lhs_term.expect("term rule"), rhs)
            }
        })
    }

    fn type_rule_vars(&self, t: &Term, ty: &TermType, out: &mut BTreeMap<Name, TermType>) -> Result<(), String> {
        let (head, args) = t.spine();
        match head {
            Term::Var(x) if args.is_empty() => match out.get(x) {
                Some(prev) if prev != ty => Err(format!("`{x}` is used at types {prev} and {ty}")),
                _ => {
                    out.insert(x.clone(), ty.clone());
                    Ok(())
                }
            },
            Term::Const(c) => {
                let cty = self.sig.const_type(c).expect("declared");
                let (atys, _) = cty.uncurry();
                for (a, aty) in args.into_iter().zip(atys) {
                    self.type_rule_vars(a, aty, out)?;
                }
                Ok(())
            }
            _ => Err(format!("left side {t} is not a first-order pattern")),
        }
    }

    fn recursive(&mut self) -> PResult<Recursive> {
        let mut preds = Vec::new();
        loop {
            let pos = self.pos();
            let a = self.ident("a predicate name")?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            self.sig.add_pred(&a, &ty).map_err(|e| ParseError { pos, msg: e.to_string() })?;
            preds.push((a, ty));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect_kw("by")?;
        let order = self.order()?;
        self.expect(Tok::LBrace)?;
        let names: Vec<Name> = preds.iter().map(|(a, _)| a.clone()).collect();
        let mut rules = Vec::new();
        while !self.at(&Tok::RBrace) {
            match self.rule(Some(&names))? {
                RewriteRule::Atom(r) => rules.push(r),
                RewriteRule::Term(_) => unreachable!("checked by rule"),
            }
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        for r in &rules {
            self.rs.add_rule(RewriteRule::Atom(r.clone()));
        }
        self.rs.groups.push(names);
        Ok(Recursive { preds, order, rules })
    }

    /// `lex(subterm 1, subterm_eq 2) [precedence a < b]`
    fn order(&mut self) -> PResult<OrderSpec> {
        self.expect_kw("lex")?;
        self.expect(Tok::LParen)?;
        let mut measures = Vec::new();
        while !self.at(&Tok::RParen) {
            let cmp = if self.at_kw("subterm") {
                Comparison::Strict
            } else if self.at_kw("subterm_eq") {
                Comparison::NonStrict
            } else {
                return self.err(format!("expected `subterm` or `subterm_eq`, found {}", self.peek()));
            };
            self.bump();
            let pos = match self.bump() {
                Tok::Ident(s) => s.parse::<usize>().ok().filter(|n| *n > 0),
                _ => None,
            };
            let Some(pos) = pos else {
                return self.err("expected an argument position");
            };
            measures.push((pos, cmp));
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RParen)?;
        let mut order = OrderSpec::lex(measures);
        if self.at_kw("precedence") {
            self.bump();
            order.precedence.push(self.ident("a predicate name")?);
            while self.eat(&Tok::Lt) {
                order.precedence.push(self.ident("a predicate name")?);
            }
        }
        Ok(order)
    }

    fn theorem(&mut self) -> PResult<Theorem> {
        let thm_name = self.ident("a theorem name")?;
        let mut terms = Vec::new();
        let mut hyps = Vec::new();
        while self.at(&Tok::LParen) {
            let save = self.i;
            self.bump();
            let mut names = vec![self.ident("a binder")?];
            while !self.at(&Tok::Colon) {
                names.push(self.ident("a binder")?);
            }
            self.bump();
            let xs: Vec<Name> = terms.iter().map(|(x, _): &(Name, TermType)| x.clone()).collect();
            let before = self.terms.len();
            self.terms.extend(xs);
            let as_type = self.attempt(|p| {
                let ty = p.ty()?;
                p.expect(Tok::RParen)?;
                Ok(ty)
            });
            let r = match as_type {
                Some(ty) => {
                    terms.extend(names.into_iter().map(|x| (x, ty.clone())));
                    Ok(())
                }
                None => {
                    if names.len() != 1 {
                        self.i = save;
                        self.terms.truncate(before);
                        return self.err("only one hypothesis may be named per binder");
                    }
                    let f = self.formula();
                    f.and_then(|f| {
                        self.expect(Tok::RParen)?;
                        hyps.push((names.pop().expect("one"), f));
                        Ok(())
                    })
                }
            };
            self.terms.truncate(before);
            r?;
        }
        self.expect(Tok::Colon)?;
        let xs: Vec<Name> = terms.iter().map(|(x, _)| x.clone()).collect();
        let (goal, proof) = self.with_terms(&xs, |p| {
            let goal = p.formula()?;
            p.expect_kw("proof")?;
            let proof = p.proof()?;
            p.expect_kw("end")?;
            Ok((goal, proof))
        })?;
        let mut thm = Theorem {
            name: thm_name,
            terms,
            hyps,
            goal,
            proof,
        };
        if crate::elab::has_sugar(&thm.proof) {
            let mut ctx = self.lemmas.clone();
            for (h, a) in &thm.hyps {
                ctx.push(h.clone(), a.clone());
            }
            let el = Elaborator::new(&self.sig, &self.rs);
            let scope = Scope::new(thm.term_ctx(), ctx);
            thm.proof = el.elaborate(&scope, &thm.proof, &thm.goal).map_err(|e| ParseError {
                pos: self.sugar.get(e.index).copied().unwrap_or_default(),
                msg: format!("cannot elaborate `subst`: {}", e.msg),
            })?;
        }
        self.lemmas.push(thm.name.clone(), thm.statement());
        Ok(thm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT: &str = "sort nat\nconst 0 : nat\nconst s : nat -> nat\nconst + : nat -> nat -> nat\n\
                       rewrite 0 + y ~> y\nrewrite s x + y ~> s (x + y)\npred p : nat -> o\n";

    fn parse(src: &str) -> TheoryFile {
        parse_str(&format!("{NAT}{src}")).unwrap_or_else(|e| panic!("{e}"))
    }

    #[test]
    fn rule_variables_are_typed() {
        let f = parse("");
        let DeclKind::Rewrite(RewriteRule::Term(r)) = &f.decls[5].kind else { panic!() };
        assert_eq!(r.vars, vec![(name("x"), TermType::base("nat")), (name("y"), TermType::base("nat"))]);
        assert_eq!(r.lhs.to_string(), "s x + y");
    }

    #[test]
    fn formulas_and_definitions() {
        let f = parse(
            "define N := mu N (x : nat), x = 0 \\/ exists y : nat, x = s y /\\ N y\n\
             theorem t (x : nat) (h : N x) : N x proof h end",
        );
        let t = f.theorem("t").unwrap();
        assert!(matches!(&t.goal, Formula::Mu(op, args) if args.len() == 1 && op.pvar.as_ref() == "N"));
        assert_eq!(t.hyps.len(), 1);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_str("sort nat\nconst 0 : nat\ntheorem t : 0 = 0 proof refl 0 en").unwrap_err();
        assert_eq!(e.pos.line, 3);
        let e = parse_str("sort nat\n  const z : natt").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 13));
        assert!(e.msg.contains("unknown sort"));
    }

    #[test]
    fn proofs_parse() {
        let f = parse(
            "theorem t (x : nat) (h : p x) : p x /\\ top proof pair h unit end\n\
             theorem u : forall x : nat, p x => p x proof lamx x. lam (h : p x). (h : p x) end",
        );
        assert_eq!(f.theorem("t").unwrap().proof.to_string(), "pair h unit");
        assert_eq!(f.theorem("u").unwrap().proof.to_string(), "lamx x. lam (h : p x). (h : p x)");
    }
}
