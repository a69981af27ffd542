//! The full acceptance battery at its stated sizes, tolerances and budgets.
//! Prints one PASS/FAIL line per criterion.

use exotic_core::suite::{run_suite, SuiteOptions, CRITERIA};

#[test]
fn acceptance_battery() {
    let opts = SuiteOptions {
        workers: 4,
        ..SuiteOptions::new(0)
    };
    let summary = run_suite(&opts, &[]);
    for outcome in &summary.criteria {
        println!("{}", outcome.line());
    }
    assert_eq!(summary.criteria.len(), CRITERIA.len());
    let failed: Vec<&str> = summary
        .criteria
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
