//! Runs every acceptance criterion and prints one PASS/FAIL line per
//! criterion. Plain `main` so the lines are visible under `cargo test`.

use hermlab_core::checks::{run_criterion, title};
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for id in 1..=11u8 {
        let r = run_criterion(id);
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict} ({} cases, {:.2}s) {}", r.cases.len(), r.seconds, title(id));
        for c in r.failures().take(5) {
            println!("    {}: {} vs {}", c.name, c.lhs, c.rhs);
        }
        if !r.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
