//! The fifteen acceptance criteria, one PASS/FAIL line each.
//!
//! Criterion 10 is expected to fail: the witness containments hold on every
//! run but the five sets fall short of the eps1^(1/9) 1500/t size bound (see
//! the decisions ledger). The test pins the failing set so that a regression
//! elsewhere, or an unexpected pass, is noticed.

use std::collections::BTreeSet;

use hyperreg::cli::suite::{run_criterion, CRITERIA};

const EXPECTED_FAILURES: [u8; 1] = [10];

#[test]
fn acceptance_criteria() {
    let mut failing = BTreeSet::new();
    for c in &CRITERIA {
        let out = run_criterion(c);
        println!("{}", out.line());
        if !out.passed {
            failing.insert(out.id);
        }
    }
    let passed = CRITERIA.len() - failing.len();
    println!("{passed}/{} criteria passed", CRITERIA.len());
    assert_eq!(failing, EXPECTED_FAILURES.into_iter().collect::<BTreeSet<_>>());
}
