//! Witness searches are reproducible: the committed iterations are the first
//! hits, sequential and parallel searches agree, and the robust methods
//! survive a full budget.

use fri_core::analysis::evaluate_method;
use fri_core::bench::{search_sample, search_witness_with, suite_targets, SearchBudget, SearchOutcome, Target};
use fri_core::par::Execution;
use fri_core::{InterpolationConfig, MethodId};

fn committed() -> Vec<(u8, Target, u64, u64)> {
    let text = include_str!("data/witness_seeds.txt");
    let targets = suite_targets();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            let ex: u8 = f[0].parse().unwrap();
            let (_, target) = *targets.iter().find(|(e, t)| *e == ex && t.slug() == f[1]).unwrap_or_else(|| panic!("{l}"));
            (ex, target, f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect()
}

fn found_at(outcome: &SearchOutcome) -> Option<u64> {
    match outcome.witness()?.provenance {
        fri_core::bench::Provenance::Searched { iteration, .. } => Some(iteration),
        _ => None,
    }
}

#[test]
fn every_suite_target_has_a_committed_iteration() {
    let c = committed();
    assert_eq!(c.len(), suite_targets().len());
    for (ex, t) in suite_targets() {
        assert!(c.iter().any(|(e, ct, ..)| *e == ex && *ct == t), "example{ex} {t}");
    }
}

#[test]
fn searches_return_the_committed_iterations() {
    let cfg = InterpolationConfig::default();
    for (ex, target, seed, iteration) in committed() {
        let budget = SearchBudget { max_samples: 100_000, seed };
        for exec in [Execution::Sequential, Execution::Parallel] {
            let out = search_witness_with(exec, ex, target, &budget, &cfg).unwrap();
            assert_eq!(found_at(&out), Some(iteration), "example{ex} {target} ({exec:?})");
        }
        // the witness really shows the pathology, and no earlier sample does
        let row = |i| {
            let inst = search_sample(ex, seed, i).unwrap();
            evaluate_method(target.method(), &inst.rb, &inst.obs, &cfg)
        };
        assert!(target.fires(&row(iteration)));
        for i in 0..iteration {
            assert!(!target.fires(&row(i)), "example{ex} {target} fires earlier at {i}");
        }
    }
}

#[test]
fn maci_is_never_abnormal_in_a_full_budget() {
    let budget = SearchBudget::default();
    let out = search_witness_with(Execution::default(), 1, Target::Abnormal(MethodId::Maci), &budget, &InterpolationConfig::default())
        .unwrap();
    let SearchOutcome::NotFound(log) = out else { panic!("MACI witness found") };
    assert_eq!(log.samples, 100_000);
    assert_eq!(log.ok, 100_000, "{log}");
}

#[test]
fn a_small_budget_is_a_prefix_of_a_large_one() {
    let cfg = InterpolationConfig::default();
    let small = SearchBudget { max_samples: 5, seed: 42 };
    let out = search_witness_with(Execution::Sequential, 6, Target::Abnormal(MethodId::Kh), &small, &cfg).unwrap();
    let SearchOutcome::NotFound(log) = out else { panic!("found before iteration 7") };
    assert_eq!(log.samples, 5);
}
