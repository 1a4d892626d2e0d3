use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pairwave::harness::{
    run_dissociation, run_fidelity_surface, run_fringe_scan, run_validation, RunConfig, Settings,
};
use pairwave::units::gauss_per_s_to_per_ms;
use pairwave::{Error, Result};

/// Molecule dissociation into a path-entangled atom pair: sweep
/// simulation, fidelity maps, fringe scans, and self-validation.
#[derive(Parser)]
#[command(name = "pairwave", version)]
struct Cli {
    /// Key=value settings file; omitted means the built-in benchmark run.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Directory the CSV and manifest files go to.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,

    /// Threads for scans that parallelize (one sweep per thread).
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate one field sweep and export snapshot CSVs.
    Simulate,
    /// Map dissociation fidelity over sweep rate and packet width.
    FidelitySurface,
    /// Scan interferometer coincidence fringes, entangled vs. dephased.
    FringeScan,
    /// Check this build against its analytic reference values.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if cli.workers == 0 {
        return Err(Error::InvalidParameter("--workers must be at least 1".into()));
    }
    let settings = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
            Settings::parse(&text)?
        }
        None => Settings::default(),
    };
    let cfg = settings.resolve()?;
    match cli.command {
        Command::Simulate => simulate(&cfg, &settings, cli),
        Command::FidelitySurface => fidelity_surface(&cfg, &settings, cli),
        Command::FringeScan => fringe_scan(&cfg, &settings, cli),
        Command::Validate => validate(&cfg, &settings, cli),
    }
}

fn simulate(cfg: &RunConfig, settings: &Settings, cli: &Cli) -> Result<ExitCode> {
    let outcome = run_dissociation(cfg, settings, &cli.out)?;
    println!(
        "final norm {:.9}; fraction beyond 2 a_1d: {:.4}; wrote {} files to {}",
        outcome.final_state.norm(),
        outcome.final_state.density_outside(2.0 * cfg.initial.a_1d),
        outcome.files.len(),
        cli.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn fidelity_surface(cfg: &RunConfig, settings: &Settings, cli: &Cli) -> Result<ExitCode> {
    let outcome = run_fidelity_surface(cfg, settings, &cli.out, cli.workers)?;
    let best = outcome
        .cells
        .iter()
        .filter_map(|c| c.fidelity.map(|f| (f, c)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    match best {
        Some((f, cell)) => println!(
            "{} cells from {} sweeps; best F = {:.4} at {} G/ms, R = {:.3}",
            outcome.cells.len(),
            outcome.propagations,
            f,
            gauss_per_s_to_per_ms(cell.b_dot_gauss_per_s),
            cell.r_ratio
        ),
        None => println!(
            "{} cells from {} sweeps; every cell errored",
            outcome.cells.len(),
            outcome.propagations
        ),
    }
    println!("wrote {}", outcome.csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn fringe_scan(cfg: &RunConfig, settings: &Settings, cli: &Cli) -> Result<ExitCode> {
    let scan = run_fringe_scan(cfg, settings, &cli.out)?;
    println!(
        "visibility: entangled {:.6}, dephased {:.6}; wrote {} files to {}",
        scan.entangled_visibility,
        scan.dephased_visibility,
        scan.files.len(),
        cli.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn validate(cfg: &RunConfig, settings: &Settings, cli: &Cli) -> Result<ExitCode> {
    let report = run_validation(cfg, settings, &cli.out)?;
    for c in &report.checks {
        println!(
            "{} {:<32} measured {:+.3e}  tolerance {:.1e}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance
        );
    }
    if report.all_pass() {
        println!("all {} checks passed", report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{} of {} checks FAILED", report.failures().len(), report.checks.len());
        Ok(ExitCode::FAILURE)
    }
}
