//! Run the built-in validation suite: every analytic reference the crate
//! is calibrated against, checked with the current (default) grid and
//! stepper, written to `pairwave_out/validation/validation_report.txt`.

use std::path::Path;

use pairwave::harness::{run_validation, Settings};
use pairwave::Result;

fn main() -> Result<()> {
    let settings = Settings::default();
    let cfg = settings.resolve()?;
    let report = run_validation(&cfg, &settings, Path::new("pairwave_out/validation"))?;

    for c in &report.checks {
        println!(
            "{} {:<32} measured {:+.3e}  tolerance {:.1e}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    match report.all_pass() {
        true => println!("\nall {} checks passed", report.checks.len()),
        false => println!("\n{} checks FAILED", report.failures().len()),
    }
    Ok(())
}
