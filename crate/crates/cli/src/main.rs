mod artifacts;
mod config;
mod report;
mod suites;
mod svg;

use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::Parser;

use config::{Args, RunConfig};
use report::Report;

fn run(args: Args) -> Result<bool> {
    let seed = std::env::var("RIGIDITY_SEED").ok();
    let cfg = RunConfig::from_args(args, seed.as_deref())?;
    let start = Instant::now();
    let tasks = suites::tasks(&cfg);
    let checks = suites::run_tasks(&tasks, cfg.parallel)?;
    let report = Report::new(
        cfg.command.name(),
        cfg.settings_json(),
        cfg.settings_hash(),
        checks,
        start.elapsed().as_secs_f64(),
    );
    artifacts::write_all(&cfg.out, &report)?;
    for c in &report.checks {
        println!(
            "{} {}: measured {:.6e}, expected {:.6e} {} ({:?}, tol {:.1e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.expected,
            serde_json::to_value(c.provenance)?
                .as_str()
                .unwrap_or_default(),
            c.comparison,
            c.tolerance
        );
    }
    println!(
        "{}: {} passed, {} failed; report in {}",
        report.command,
        report.passed,
        report.failed,
        cfg.out.join("report.json").display()
    );
    Ok(report.all_pass)
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
