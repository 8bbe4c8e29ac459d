//! Acceptance suite. Runs without the libtest harness so that the one
//! PASS/FAIL line per criterion is always printed; exits nonzero if any
//! criterion fails.

use std::process::ExitCode;

use monopole_core::tolerances::Tolerances;
use monopole_core::verify::{verify_all, CRITERIA};

fn main() -> ExitCode {
    let report = verify_all(&Tolerances::default(), &[]);
    for c in &report.criteria {
        println!("{}", c.summary_line());
    }
    println!("suite runtime {:.2}s", report.runtime_s);
    if report.criteria.len() != CRITERIA.len() {
        println!("FAIL expected {} criteria, ran {}", CRITERIA.len(), report.criteria.len());
        return ExitCode::FAILURE;
    }
    let failed: Vec<_> = report.failures().iter().map(|c| c.id).collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
