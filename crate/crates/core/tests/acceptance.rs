//! Acceptance suite: one PASS/FAIL line per criterion, on the default rig.
//!
//! Runs without the libtest harness so the lines are never captured.

use std::process::ExitCode;

use qtomo_core::acceptance::{run_all, Rig};

fn main() -> ExitCode {
    let reports = run_all(&Rig::default());
    for r in &reports {
        println!("{r}");
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("    failed: {} {}", c.label, c.detail);
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("acceptance: {} of {} criteria passed", reports.len() - failed, reports.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
