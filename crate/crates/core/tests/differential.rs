mod common;

use common::{check_case, check_presburger_bounded, random_params, Gen};
use oag_core::Signature;

fn run(sig: Signature, cases: usize, seed: u64) -> Vec<String> {
    let mut g = Gen::new(sig, seed);
    let mut failures = Vec::new();
    for i in 0..cases {
        let case = g.case();
        for j in 0..3 {
            let params = random_params(sig, seed * 1000 + (i * 3 + j) as u64);
            let r = if sig == Signature::Presburger {
                check_presburger_bounded(&case, &params, 8).and_then(|_| check_case(&case, sig, &params, 60, i as u64))
            } else {
                check_case(&case, sig, &params, 60, i as u64)
            };
            if let Err(e) = r {
                failures.push(e);
                break;
            }
        }
    }
    failures
}

fn report(sig: Signature, cases: usize) {
    let n: usize = std::env::var("DIFF_N").ok().and_then(|s| s.parse().ok()).unwrap_or(cases);
    let seed: u64 = std::env::var("DIFF_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(11);
    let f = run(sig, n, seed);
    for e in f.iter().take(5) {
        eprintln!("{sig}: {e}");
    }
    assert!(f.is_empty(), "{} of {cases} {sig} cases disagree", f.len());
}

#[test]
fn doag_agrees_with_model() {
    report(Signature::Doag, 60);
}

#[test]
fn presburger_agrees_with_brute_force() {
    report(Signature::Presburger, 60);
}

#[test]
fn mixed_agrees_with_model() {
    report(Signature::T0Mixed, 60);
}

#[test]
fn coset_agrees_with_model() {
    report(Signature::T1Coset, 60);
}

#[test]
fn full_theory_agrees_with_model() {
    report(Signature::TFull, 60);
}

#[test]
fn hamel_agrees_with_model() {
    report(Signature::TnHamel(2), 60);
}
