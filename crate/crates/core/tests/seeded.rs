mod common;

use common::*;
use svcg::generator::{generate, GeneratorConfig};
use svcg::solver::{counterfactual, solve_stage1_bruteforce, solve_stage1_dp};
use svcg::verify::{check_efficiency, check_lemmas, run_checks, CheckKind, DeviationGrid};

#[test]
fn seed_42_dp_equals_enumeration() {
    let inst = generate(&GeneratorConfig::new(42, 12, 8)).unwrap();
    let dp = solve_stage1_dp(&inst);
    assert_eq!(dp, solve_stage1_bruteforce(&inst).unwrap());
    assert_eq!(
        expected_welfare(dp.members(), &inst),
        best_value(&all_subset_values(&inst), None)
    );
    assert!(check_efficiency(&inst).unwrap().passed);
}

#[test]
fn seed_7_full_suite() {
    let inst = generate(&GeneratorConfig::new(7, 8, 5)).unwrap();
    let verdicts = run_checks(&inst, &CheckKind::ALL, &DeviationGrid::default()).unwrap();
    for v in verdicts {
        assert!(v.passed, "{}: {:?}", v.check, v.witness);
    }
}

/// With a member whose gamma is negative, leaving it unserved raises
/// welfare, and dropping another member can make room for more than one
/// outsider. The single-replacement counterfactual is then not optimal.
#[test]
fn negative_gamma_defeats_single_replacement() {
    let mut config = GeneratorConfig::new(48, 9, 3);
    config.allow_negative_gamma = true;
    let inst = generate(&config).unwrap();
    assert!(inst.bids().iter().any(|b| b.gamma_hat().is_negative()));

    let sel = solve_stage1_dp(&inst);
    let values = all_subset_values(&inst);
    let gaps: Vec<_> = sel
        .members()
        .iter()
        .enumerate()
        .filter_map(|(k, id)| {
            let cf = counterfactual(k + 1, &sel, &inst).unwrap();
            let best = best_value(&values, Some(*id));
            (cf.value != best).then_some((*id, cf.value, best))
        })
        .collect();
    assert!(
        !gaps.is_empty(),
        "expected the closed form to miss the constrained optimum"
    );
    for (_, closed, best) in &gaps {
        assert!(closed < best);
    }
    assert!(!check_lemmas(&inst).unwrap().passed);
}
