//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Exits non-zero when any criterion fails.

use std::panic;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (i, criterion) in gpp_suite::all().into_iter().enumerate() {
        let number = i + 1;
        match panic::catch_unwind(criterion) {
            Ok(outcome) => {
                let status = if outcome.passed { "PASS" } else { "FAIL" };
                let budget = outcome.budget.map_or(String::new(), |b| format!(" / {}s budget", b.as_secs()));
                println!(
                    "criterion {number}: {status} ({:.2}s{budget}) {}",
                    outcome.elapsed.as_secs_f64(),
                    outcome.detail
                );
                if !outcome.passed {
                    failed.push(number);
                }
            }
            Err(_) => {
                println!("criterion {number}: FAIL (panicked)");
                failed.push(number);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
