//! Runs every reproduction criterion and prints one `[PASS]`/`[FAIL]` line
//! for each. Without the default harness the lines are never captured.
//! Each criterion is then rerun with its built-in constant corrupted and
//! must fail.

use std::process::ExitCode;

use conetensor::repro::{run_criterion, ReproConfig, CRITERIA};

fn main() -> ExitCode {
    let config = ReproConfig::default();
    let mut failed = Vec::new();
    for name in CRITERIA {
        let report = run_criterion(name, &config).expect("known criterion");
        println!("{}", report.line());
        if !report.passed {
            println!("    {}", report.detail);
            failed.push(name);
        }
    }
    for name in CRITERIA {
        let corrupted = ReproConfig { corrupt: Some(name.to_string()), ..config.clone() };
        if run_criterion(name, &corrupted).expect("known criterion").passed {
            println!("[FAIL] {name} still passes with a corrupted constant");
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("corruption hook: every criterion fails when its constant is corrupted");
        ExitCode::SUCCESS
    } else {
        println!("failing: {failed:?}");
        ExitCode::FAILURE
    }
}
