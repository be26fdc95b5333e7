use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use munj_bench::*;
use munj_core::*;

fn rewriting(c: &mut Criterion) {
    let (_, s) = checked(NAT);
    let mut g = c.benchmark_group("rewrite");
    for n in [10, 100, 1000] {
        let t = sum(n);
        g.bench_with_input(BenchmarkId::new("normalize n+n", n), &t, |b, t| {
            b.iter(|| s.rs.normalize_term(black_box(t)).unwrap())
        });
    }
    g.finish();
}

fn checking(c: &mut Criterion) {
    let mut g = c.benchmark_group("check");
    g.bench_function("parse and check nat", |b| b.iter(|| checked(black_box(NAT))));
    g.bench_function("admit ackermann", |b| b.iter(|| checked(black_box(ACKERMANN))));
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let (_, s) = checked(NAT);
    let mut g = c.benchmark_group("reduce");
    for n in [2, 8, 16] {
        let p = rebuild(n);
        g.bench_with_input(BenchmarkId::new("rebuild numeral", n), &p, |b, p| {
            b.iter(|| normalize(&s.rs, black_box(p), DEFAULT_REDUCTION_FUEL).unwrap())
        });
    }
    g.finish();
}

fn unification(c: &mut Criterion) {
    let rs = RewriteSystem::new();
    let s = |t: Term| Term::app(Term::cnst("s"), t);
    let u = s(s(Term::var("x")));
    let v = s(Term::var("y"));
    c.bench_function("fo_unify s (s x) = s y", |b| b.iter(|| fo_unify(&rs, black_box(&u), black_box(&v)).unwrap()));
}

criterion_group!(benches, rewriting, checking, reduction, unification);
criterion_main!(benches);
