//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//!
//! Criterion 4 fails on the rewriting systems as printed: each misses one
//! critical pair (the report names it). The test pins that outcome so a
//! change in either direction is noticed.

use std::process::ExitCode;

use pbw_core::catalog::Catalog;
use pbw_core::reproduce::{run_criterion, Status, CRITERIA};

const SEED: u64 = 7;
const EXPECTED_FAILURES: [u8; 1] = [4];

fn main() -> ExitCode {
    let cat = Catalog::embedded();
    let mut unexpected = Vec::new();
    for n in CRITERIA {
        let c = match run_criterion(&cat, n, SEED) {
            Ok(c) => c,
            Err(e) => {
                println!("criterion {n}: FAIL error: {e}");
                unexpected.push(n);
                continue;
            }
        };
        println!("{}", c.summary());
        for check in c.checks.iter().filter(|c| !c.passed) {
            println!("    {}: {}", check.name, check.detail);
        }
        let expected = if EXPECTED_FAILURES.contains(&n) { Status::Fail } else { Status::Pass };
        if c.status != expected {
            unexpected.push(n);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: outcomes as expected (known failures {EXPECTED_FAILURES:?})");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
