mod support;

use munj_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use support::oracles::fixtures;
use support::oracles::*;

#[test]
fn admitted_definitions_decrease_on_ground_instances() {
    for (label, (sig, rules, order)) in [("ackermann", fixtures::ackermann()), ("red", fixtures::red())] {
        let mut rs = RewriteSystem::new();
        admit(&sig, &mut rs, rules.clone(), &order).unwrap_or_else(|e| panic!("{label}: {e}"));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let failures = shadow_condition_2(&sig, &RewriteSystem::new(), &rules, &order, 300, &mut rng);
        assert!(failures.is_empty(), "{label}: {failures:#?}");
    }
}

#[test]
fn ground_shadow_catches_a_bad_order() {
    let (sig, rules, _) = fixtures::ackermann();
    let order = OrderSpec::lex([(2, Comparison::Strict)]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert!(!shadow_condition_2(&sig, &RewriteSystem::new(), &rules, &order, 50, &mut rng).is_empty());
    let mut rs = RewriteSystem::new();
    assert!(admit(&sig, &mut rs, rules, &order).is_err());
}

#[test]
fn admission_survives_dropping_a_rule() {
    for (sig, rules, order) in [fixtures::ackermann(), fixtures::red()] {
        for i in 0..rules.len() {
            let mut fewer = rules.clone();
            fewer.remove(i);
            let mut rs = RewriteSystem::new();
            admit(&sig, &mut rs, fewer, &order).unwrap();
        }
    }
}
