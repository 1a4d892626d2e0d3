//! Deterministic text output: the run manifest and the CSV exports.
//!
//! Every float is printed with Rust's shortest round-trip formatting, so
//! a file's bytes depend only on the computed values — two runs with the
//! same resolved config produce identical files no matter how the work
//! was scheduled.
//!
//! CSV unit conventions (also spelled out in the README): positions in
//! um with densities per um, wavenumbers in rad/um with densities per
//! (rad/um), so each exported density integrates to 1 against its own
//! axis column.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{MomentumDistribution, WaveFunction};
use crate::propagate::Scheme;
use crate::units;

use super::config::{RunConfig, Settings};
use super::runners::{FringeRow, SurfaceCell};
use super::validation::ValidationReport;

pub(crate) fn scheme_name(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::CrankNicolson => "crank-nicolson",
        Scheme::SplitStep => "split-step",
    }
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn join_floats(values: impl IntoIterator<Item = f64>) -> String {
    let mut out = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// Time label for snapshot filenames: milliseconds rounded to the
/// nanosecond, shortest form — clean names like `pos_t6.5.csv` instead
/// of unit-conversion noise in the last bits.
pub fn snapshot_label_ms(t_seconds: f64) -> String {
    let ms = (units::s_to_ms(t_seconds) * 1e9).round() / 1e9;
    format!("{ms}")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Every resolved setting in config syntax — the manifest alone is
/// enough to rerun the scenario — plus derived quantities as comments.
pub fn manifest_text(settings: &Settings, cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str("# resolved run settings; usable as a config file\n");
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    kv("species", cfg.species.name().to_string());
    kv("a_bg_nm", format!("{}", settings.a_bg_nm));
    kv("b0_gauss", format!("{}", settings.b0_gauss));
    kv("delta_b_gauss", format!("{}", settings.delta_b_gauss));
    kv("omega_perp_khz", format!("{}", settings.omega_perp_khz));
    kv("b_start_gauss", format!("{}", cfg.b_start_gauss));
    kv("b_span_gauss", format!("{}", cfg.b_span_gauss));
    // time and length keys echo the settings values rather than
    // unit-round-tripping the resolved SI numbers, so the file shows the
    // exact literals a rerun would parse
    kv("b_dot_gauss_per_ms", format!("{}", settings.b_dot_gauss_per_ms));
    kv("b_dot_list_gauss_per_ms", join_floats(sorted(&settings.b_dot_list_gauss_per_ms)));
    kv("t_final_ms", format!("{}", settings.t_final_ms));
    kv("dt_us", format!("{}", settings.dt_us));
    kv("scheme", scheme_name(cfg.propagator.scheme).to_string());
    kv("renorm_check_interval", format!("{}", cfg.propagator.renorm_check_interval));
    kv("leak_tolerance", format!("{}", cfg.propagator.leak_tolerance));
    kv("grid_half_width_um", format!("{}", settings.grid_half_width_um));
    kv("grid_points", format!("{}", cfg.grid.n_points));
    kv("snapshot_times_ms", join_floats(sorted(&settings.snapshot_times_ms)));
    match settings.delta_x0_um {
        Some(dx0) => kv("delta_x0_um", format!("{dx0}")),
        None => kv("r_list", join_floats(cfg.cm_widths.iter().map(|w| w.r_ratio))),
    }
    kv("phi_count", format!("{}", cfg.phi_count));
    let _ = writeln!(out, "# derived, for reference:");
    let _ = writeln!(out, "#   a_start_nm = {}", units::m_to_nm(cfg.initial.a));
    let _ = writeln!(out, "#   a_1d_start_um = {}", units::m_to_um(cfg.initial.a_1d));
    let _ = writeln!(out, "#   g_start_joule_m = {:e}", cfg.initial.g);
    let _ = writeln!(out, "#   a_perp_nm = {}", units::m_to_nm(cfg.feshbach.transverse_length()));
    let _ = writeln!(out, "#   zero_crossing_gauss = {}", cfg.feshbach.zero_crossing_gauss());
    out
}

/// Position-space snapshot. One row per physical sample (the periodic
/// image point is omitted); amplitudes per sqrt(um), density per um.
pub fn position_csv(state: &WaveFunction) -> String {
    let mut out = String::with_capacity(64 * state.grid.n_points);
    out.push_str("x_um,re_psi,im_psi,density\n");
    for j in 0..state.grid.period_points() {
        let x = units::m_to_um(state.grid.x(j));
        let v = state.values[j];
        let _ = writeln!(out, "{x},{},{},{}", v.re * 1e-3, v.im * 1e-3, v.norm_sqr() * 1e-6);
    }
    out
}

/// Momentum-space snapshot; k ascending in rad/um, density per (rad/um).
pub fn momentum_csv(dist: &MomentumDistribution) -> String {
    let mut out = String::with_capacity(40 * dist.k_values.len());
    out.push_str("k_per_um,density\n");
    for (k, d) in dist.k_values.iter().zip(&dist.density) {
        let _ = writeln!(out, "{},{}", units::per_m_to_per_um(*k), d * 1e6);
    }
    out
}

/// Fidelity table, one row per (sweep rate, CM width) cell. Failed
/// cells leave kappa/fidelity empty and carry the error text instead.
pub fn surface_csv(cells: &[SurfaceCell]) -> String {
    let mut out = String::with_capacity(48 * (cells.len() + 1));
    out.push_str("b_dot_G_per_ms,r_ratio,kappa,fidelity,error\n");
    for cell in cells {
        let rate = units::gauss_per_s_to_per_ms(cell.b_dot_gauss_per_s);
        let kappa = cell.kappa.map(|v| format!("{v}")).unwrap_or_default();
        let fidelity = cell.fidelity.map(|v| format!("{v}")).unwrap_or_default();
        let error = cell.error.as_deref().map(|e| e.replace([',', '\n'], ";")).unwrap_or_default();
        let _ = writeln!(out, "{rate},{},{kappa},{fidelity},{error}", cell.r_ratio);
    }
    out
}

/// Coincidence fringe table for one input state; the visibility column
/// repeats the scan-level first-harmonic value on every row.
pub fn fringe_csv(rows: &[FringeRow], visibility: f64) -> String {
    let mut out = String::with_capacity(56 * (rows.len() + 1));
    out.push_str("phi_rad,c_a1a2,c_b1b2,c_a1b2,c_b1a2,visibility\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{},{visibility}", r.phi, r.c_aa, r.c_bb, r.c_ab, r.c_ba);
    }
    out
}

/// One line per oracle check: name, measured deviation, tolerance,
/// pass/fail.
pub fn report_csv(report: &ValidationReport) -> String {
    let mut out = String::from("name,measured,tolerance,status\n");
    for c in &report.checks {
        let status = if c.pass { "pass" } else { "fail" };
        let _ = writeln!(out, "{},{},{},{status}", c.name, c.measured, c.tolerance);
    }
    out
}
