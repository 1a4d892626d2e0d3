//! Scenario drivers: single dissociation, fidelity surface, fringe scan.
//!
//! Each runner computes everything first and touches the filesystem only
//! once the result is in hand, so a failed run leaves no partial files.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::correlations::{fidelity_from_quadrants, kappa_from_quadrants, quadrant_probabilities};
use crate::error::{Error, Result};
use crate::grid::{init_bound_state, WaveFunction};
use crate::optics::{beam_splitter, dephased_pair, entangled_pair, fringe_visibility, Particle};
use crate::propagate::{propagate, EvolutionRecord};

use super::config::{RunConfig, Settings};
use super::output;
use super::workers;

/// Result of one dissociation run, plus the files it wrote.
#[derive(Debug)]
pub struct DissociationOutcome {
    pub final_state: WaveFunction,
    pub record: EvolutionRecord,
    pub files: Vec<PathBuf>,
}

/// Propagates the benchmark sweep once and exports position/momentum
/// snapshots with the run manifest.
pub fn run_dissociation(
    cfg: &RunConfig,
    settings: &Settings,
    out_dir: &Path,
) -> Result<DissociationOutcome> {
    let sched = cfg.schedule(cfg.rate_gauss_per_s)?;
    let psi0 = init_bound_state(cfg.grid, cfg.initial.a_1d)?;
    let (final_state, record) =
        propagate(&psi0, &cfg.feshbach, &sched, cfg.t_final, &cfg.propagator)?;

    let snap_dir = out_dir.join("snapshots");
    output::ensure_dir(&snap_dir)?;
    let mut files = Vec::new();
    for (t, state) in &record.snapshots {
        let label = output::snapshot_label_ms(*t);
        let pos = snap_dir.join(format!("pos_t{label}.csv"));
        output::write_text(&pos, &output::position_csv(state))?;
        files.push(pos);
        let mom = snap_dir.join(format!("mom_t{label}.csv"));
        output::write_text(&mom, &output::momentum_csv(&state.momentum_distribution()))?;
        files.push(mom);
    }
    let manifest = out_dir.join("manifest.txt");
    output::write_text(&manifest, &output::manifest_text(settings, cfg))?;
    files.push(manifest);
    Ok(DissociationOutcome { final_state, record, files })
}

/// One (sweep rate, CM width) cell of the fidelity surface.
#[derive(Debug, Clone)]
pub struct SurfaceCell {
    /// Ramp rate [G/s].
    pub b_dot_gauss_per_s: f64,
    /// CM width over the bound-state radius.
    pub r_ratio: f64,
    /// CM width [m].
    pub delta_x0: f64,
    pub kappa: Option<f64>,
    pub fidelity: Option<f64>,
    /// Why this cell has no value, when it does not.
    pub error: Option<String>,
}

/// The full scan, row-major in (rate, ratio) ascending.
#[derive(Debug)]
pub struct SurfaceOutcome {
    pub cells: Vec<SurfaceCell>,
    /// How many sweep propagations actually ran — one per rate, never
    /// one per cell.
    pub propagations: usize,
    pub csv_path: PathBuf,
}

/// Evaluates dissociation fidelity over every configured sweep rate and
/// CM width. The relative motion is independent of the CM packet, so
/// each rate is propagated once and all widths reuse that final state;
/// rates are distributed over `workers` threads.
///
/// A cell that fails (degenerate quadrants, bad schedule) records its
/// error and the scan carries on.
pub fn run_fidelity_surface(
    cfg: &RunConfig,
    settings: &Settings,
    out_dir: &Path,
    workers: usize,
) -> Result<SurfaceOutcome> {
    let psi0 = init_bound_state(cfg.grid, cfg.initial.a_1d)?;
    let propagations = AtomicUsize::new(0);
    let per_rate: Vec<Vec<SurfaceCell>> =
        workers::run_indexed(cfg.b_dot_list_gauss_per_s.len(), workers, |i| {
            cells_for_rate(cfg, &psi0, cfg.b_dot_list_gauss_per_s[i], &propagations)
        });
    let cells: Vec<SurfaceCell> = per_rate.into_iter().flatten().collect();

    output::ensure_dir(out_dir)?;
    let csv_path = out_dir.join("fidelity_surface.csv");
    output::write_text(&csv_path, &output::surface_csv(&cells))?;
    output::write_text(&out_dir.join("manifest.txt"), &output::manifest_text(settings, cfg))?;
    Ok(SurfaceOutcome { cells, propagations: propagations.load(Ordering::SeqCst), csv_path })
}

fn cells_for_rate(
    cfg: &RunConfig,
    psi0: &WaveFunction,
    rate: f64,
    propagations: &AtomicUsize,
) -> Vec<SurfaceCell> {
    let blank = |message: String| -> Vec<SurfaceCell> {
        cfg.cm_widths
            .iter()
            .map(|w| SurfaceCell {
                b_dot_gauss_per_s: rate,
                r_ratio: w.r_ratio,
                delta_x0: w.delta_x0,
                kappa: None,
                fidelity: None,
                error: Some(message.clone()),
            })
            .collect()
    };
    let sched = match cfg.schedule(rate) {
        Ok(s) => s,
        Err(e) => return blank(e.to_string()),
    };
    propagations.fetch_add(1, Ordering::SeqCst);
    let final_state = match propagate(psi0, &cfg.feshbach, &sched, cfg.t_final, &cfg.propagator) {
        Ok((state, _)) => state,
        Err(e) => return blank(e.to_string()),
    };
    cfg.cm_widths
        .iter()
        .map(|w| {
            let evaluated = (|| {
                let packet = cfg.packet_at_release(w.delta_x0)?.at_time(cfg.t_final)?;
                let q = quadrant_probabilities(&final_state, cfg.t_final, &packet)?;
                Ok::<_, Error>((kappa_from_quadrants(&q)?, fidelity_from_quadrants(&q)?))
            })();
            match evaluated {
                Ok((kappa, fidelity)) => SurfaceCell {
                    b_dot_gauss_per_s: rate,
                    r_ratio: w.r_ratio,
                    delta_x0: w.delta_x0,
                    kappa: Some(kappa),
                    fidelity: Some(fidelity),
                    error: None,
                },
                Err(e) => SurfaceCell {
                    b_dot_gauss_per_s: rate,
                    r_ratio: w.r_ratio,
                    delta_x0: w.delta_x0,
                    kappa: None,
                    fidelity: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Coincidence probabilities at one phase: rows of the fringe CSV.
#[derive(Debug, Clone, Copy)]
pub struct FringeRow {
    pub phi: f64,
    /// Both atoms at port a'.
    pub c_aa: f64,
    /// Both at b'.
    pub c_bb: f64,
    /// Atom 1 at a', atom 2 at b'.
    pub c_ab: f64,
    /// Atom 1 at b', atom 2 at a'.
    pub c_ba: f64,
}

/// Fringes for the entangled pair and its dephased counterpart.
#[derive(Debug)]
pub struct FringeScan {
    pub entangled: Vec<FringeRow>,
    pub dephased: Vec<FringeRow>,
    pub entangled_visibility: f64,
    pub dephased_visibility: f64,
    pub files: Vec<PathBuf>,
}

/// Scans phi over [0, 2pi) in `cfg.phi_count` uniform steps and writes
/// `fringes.csv` (entangled input) and `fringes_dephased.csv` (even
/// mixture input) with identical columns.
///
/// The visibility column holds the scan's first-harmonic estimate of
/// the a'a' channel. Two samples cannot resolve a harmonic, so for
/// phi_count = 2 the estimate is taken over the four quarter-period
/// phases instead of the emitted rows.
pub fn run_fringe_scan(cfg: &RunConfig, settings: &Settings, out_dir: &Path) -> Result<FringeScan> {
    if cfg.phi_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "fringe scan needs at least 2 phases, got {}",
            cfg.phi_count
        )));
    }
    let phases: Vec<f64> = (0..cfg.phi_count)
        .map(|k| std::f64::consts::TAU * k as f64 / cfg.phi_count as f64)
        .collect();
    let entangled: Vec<FringeRow> =
        phases.iter().map(|&p| fringe_row(p, false)).collect::<Result<_>>()?;
    let dephased: Vec<FringeRow> =
        phases.iter().map(|&p| fringe_row(p, true)).collect::<Result<_>>()?;

    let vis = |rows: &[FringeRow], mixed: bool| -> Result<f64> {
        if rows.len() >= 3 {
            let phis: Vec<f64> = rows.iter().map(|r| r.phi).collect();
            let caa: Vec<f64> = rows.iter().map(|r| r.c_aa).collect();
            fringe_visibility(&phis, &caa)
        } else {
            let quarter: Vec<f64> =
                (0..4).map(|k| std::f64::consts::TAU * k as f64 / 4.0).collect();
            let caa = quarter
                .iter()
                .map(|&p| Ok(fringe_row(p, mixed)?.c_aa))
                .collect::<Result<Vec<f64>>>()?;
            fringe_visibility(&quarter, &caa)
        }
    };
    let entangled_visibility = vis(&entangled, false)?;
    let dephased_visibility = vis(&dephased, true)?;

    output::ensure_dir(out_dir)?;
    let mut files = Vec::new();
    let fringes = out_dir.join("fringes.csv");
    output::write_text(&fringes, &output::fringe_csv(&entangled, entangled_visibility))?;
    files.push(fringes);
    let dephased_path = out_dir.join("fringes_dephased.csv");
    output::write_text(&dephased_path, &output::fringe_csv(&dephased, dephased_visibility))?;
    files.push(dephased_path);
    let manifest = out_dir.join("manifest.txt");
    output::write_text(&manifest, &output::manifest_text(settings, cfg))?;
    files.push(manifest);
    Ok(FringeScan { entangled, dephased, entangled_visibility, dephased_visibility, files })
}

/// Phase in branch a of atom 1, then the 50-50 splitter on both sides.
pub(crate) fn fringe_row(phi: f64, mixed: bool) -> Result<FringeRow> {
    let bs = beam_splitter(("a", "b"), ("a'", "b'"));
    let probabilities = if mixed {
        dephased_pair().phase_shift(Particle::First, &"a", phi)?.apply_both(&bs)?.probabilities()
    } else {
        entangled_pair().phase_shift(Particle::First, &"a", phi)?.apply_both(&bs)?.probabilities()
    };
    let pick = |k: (&'static str, &'static str)| probabilities.get(&k).copied().unwrap_or(0.0);
    Ok(FringeRow {
        phi,
        c_aa: pick(("a'", "a'")),
        c_bb: pick(("b'", "b'")),
        c_ab: pick(("a'", "b'")),
        c_ba: pick(("b'", "a'")),
    })
}
