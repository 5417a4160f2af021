//! Runs a verification suite in a worker pool and prints the report.
//!
//! `cargo run --example run_suite -- omega 4`

use witt_omega::suite::{run, SuiteOptions};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "witt".into());
    let jobs = args.next().and_then(|j| j.parse().ok()).unwrap_or(2);
    let report = match run(&name, &SuiteOptions { jobs, ..Default::default() }) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    for c in &report.checks {
        println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.check);
    }
    println!("{}/{} passed", report.checks.iter().filter(|c| c.passed).count(), report.checks.len());
}
