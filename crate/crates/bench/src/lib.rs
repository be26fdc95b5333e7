//! Inputs shared by the kernel benchmarks.

use munj_cli::{parse_str, process, Mode, Options, Session, TheoryFile};
use munj_core::*;

pub const NAT: &str = include_str!("../../cli/corpus/nat.mnj");
pub const RECURSOR: &str = include_str!("../../cli/corpus/recursor.mnj");
pub const ACKERMANN: &str = include_str!("../../cli/corpus/ackermann.mnj");

pub fn parse(src: &str) -> TheoryFile {
    parse_str(src).expect("bench input parses")
}

pub fn checked(src: &str) -> (TheoryFile, Session) {
    let file = parse(src);
    let s = process(&file, "bench", &Options::new(), Mode::Check);
    assert_eq!(s.failed, 0, "{:?}", s.diags);
    (file, s)
}

pub fn numeral(n: usize) -> Term {
    (0..n).fold(Term::cnst("0"), |t, _| Term::app(Term::cnst("s"), t))
}

/// `n + n` under the two addition rules.
pub fn sum(n: usize) -> Term {
    Term::apps(Term::cnst("+"), [numeral(n), numeral(n)])
}

/// The canonical proof of `nat n`.
pub fn nat_proof(n: usize) -> ProofTerm {
    let op = nat_operator();
    let mut pf = ProofTerm::fold(op.clone(), vec![numeral(0)], ProofTerm::inl(ProofTerm::Refl(numeral(0))));
    for k in 0..n {
        let t = numeral(k + 1);
        pf = ProofTerm::fold(
            op.clone(),
            vec![t.clone()],
            ProofTerm::inr(ProofTerm::wit(numeral(k), ProofTerm::pair(ProofTerm::Refl(t), pf))),
        );
    }
    pf
}

/// `iter[nat] π (z a. fold nat [z] a)`: rebuilds the numeral of `π`.
pub fn rebuild(n: usize) -> ProofTerm {
    let op = nat_operator();
    let inv = Predicate::new(vec![(name("z"), nat_type())], nat(Term::var("z")));
    let step = ProofTerm::fold(op, vec![Term::var("z")], ProofTerm::var("a"));
    ProofTerm::iter(inv, nat_proof(n), vec![name("z")], "a", step)
}
