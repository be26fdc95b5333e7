//! Substitution properties over generated proofs, as trial loops that
//! collect failures instead of panicking. Shared with the acceptance suite.

#![allow(dead_code)]

use munj_core::*;
use rand::seq::SliceRandom;
use rand::Rng;

use super::gen::*;

pub fn generated(g: &mut Gen) -> (ProofTerm, Formula) {
    let depth = g.rng.gen_range(2..5);
    g.proof(&Env::base(), depth)
}

/// `Γ' ⊢ σ : Γ` where each `σ(h)` is a detour through redexes or
/// expansions around a hypothesis of `Γ'` with the type of `h`.
pub fn random_proof_subst(g: &mut Gen) -> (ProofSubst, Context) {
    let base = base_hyps();
    let mut target = Vec::new();
    let mut sigma = ProofSubst::new();
    for (h, f) in base.iter() {
        let h2 = name(&format!("{h}'"));
        target.push((h2.clone(), f.clone()));
        let depth = g.rng.gen_range(0..3);
        sigma.insert(h.clone(), g.wrap(ProofTerm::Var(h2), f, depth));
    }
    (sigma, Context::from_pairs(target))
}

pub fn same_modulo_ascriptions(a: &ProofTerm, b: &ProofTerm) -> bool {
    alpha_eq_proof(&erase(a), &erase(b))
}

/// Checked proofs stay checked under a random term substitution.
pub fn term_substitution(trials: u64) -> Vec<String> {
    let (sig, rs) = theory();
    let mut failures = Vec::new();
    for seed in 0..trials {
        let mut g = Gen::new(seed);
        let (pf, ty) = generated(&mut g);
        let (theta, ctx) = random_term_subst(&mut g);
        let res = check_proof(
            &sig,
            &rs,
            &ctx,
            &base_hyps().subst_terms(&theta),
            &pf.subst_terms(&theta),
            &ty.subst_terms(&theta),
        );
        if let Err(e) = res {
            failures.push(format!("seed {seed}: {e}\n{pf}\nunder {theta}"));
        }
    }
    failures
}

/// Checked proofs stay checked when a well-typed proof substitution
/// replaces their hypotheses.
pub fn proof_substitution(trials: u64) -> Vec<String> {
    let (sig, rs) = theory();
    let mut failures = Vec::new();
    for seed in 0..trials {
        let mut g = Gen::new(seed);
        let (pf, ty) = generated(&mut g);
        let (sigma, target) = random_proof_subst(&mut g);
        if let Err(e) = check_subst_typing(&sig, &rs, &base_terms(), &target, &sigma, &base_hyps()) {
            failures.push(format!("seed {seed}: substitution ill-typed: {e}"));
            continue;
        }
        let out = subst_proofs_typed(&pf, &sigma, &base_hyps());
        if let Err(e) = check_proof(&sig, &rs, &base_terms(), &target, &out, &ty) {
            failures.push(format!("seed {seed}: {e}\n{pf}\nbecame\n{out}"));
        }
    }
    failures
}

/// Contracting a redex commutes with term and with proof substitution,
/// up to ascriptions. Seeds without a redex do not count as trials.
pub fn reduction_commutes(trials: u64) -> Vec<String> {
    let (_, rs) = theory();
    let mut failures = Vec::new();
    let mut exercised = 0;
    let mut seed = 0;
    while exercised < trials {
        seed += 1;
        let mut g = Gen::new(10_000 + seed);
        let (pf, _) = generated(&mut g);
        let paths = redexes(&pf);
        let Some(path) = paths.choose(&mut g.rng).cloned() else { continue };
        exercised += 1;
        let reduct = match contract_at(&rs, &pf, &path) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("seed {seed}: {e}"));
                continue;
            }
        };

        let (theta, _) = random_term_subst(&mut g);
        match contract_at(&rs, &pf.subst_terms(&theta), &path) {
            Ok(lhs) => {
                let rhs = reduct.subst_terms(&theta);
                if !same_modulo_ascriptions(&lhs, &rhs) {
                    failures.push(format!("seed {seed}: term substitution {theta} at {path:?}\n{pf}\n{lhs}\n{rhs}"));
                }
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }

        let (sigma, _) = random_proof_subst(&mut g);
        let pairs: Vec<_> = sigma.iter().map(|(h, r)| (h.clone(), r.clone())).collect();
        let (h, rho) = pairs.choose(&mut g.rng).cloned().expect("nonempty substitution");
        let one = ProofSubst::singleton(h.clone(), rho.clone());
        match contract_at(&rs, &subst_proofs_typed(&pf, &one, &base_hyps()), &path) {
            Ok(lhs) => {
                let rhs = subst_proofs_typed(&reduct, &one, &base_hyps());
                if !same_modulo_ascriptions(&lhs, &rhs) {
                    failures.push(format!("seed {seed}: [{h} := {rho}] at {path:?}\n{pf}\n{lhs}\n{rhs}"));
                }
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    failures
}
