//! Flat `key = value` run settings and their resolution into module types.
//!
//! Every key carries its unit in its name (`dt_us`, `b_start_gauss`, ...)
//! so a config file reads unambiguously, and any key the parser does not
//! recognize is a hard error — a mistyped physics parameter must never
//! fall back to a default silently.

use crate::constants::Species;
use crate::correlations::CmPacket;
use crate::error::{Error, Result};
use crate::feshbach::{self, FeshbachParams, SweepSchedule};
use crate::grid::Grid1D;
use crate::propagate::{PropagatorConfig, Scheme};
use crate::units;

/// Raw settings in the units the config file uses. [`Settings::default`]
/// is the built-in benchmark scenario; a config file overrides fields.
#[derive(Debug, Clone)]
pub struct Settings {
    pub species: Species,
    /// Background 3D scattering length [nm].
    pub a_bg_nm: f64,
    /// Resonance pole position [G].
    pub b0_gauss: f64,
    /// Resonance width [G].
    pub delta_b_gauss: f64,
    /// Transverse trap frequency nu = omega/2pi [kHz].
    pub omega_perp_khz: f64,
    /// Field at t = 0 [G].
    pub b_start_gauss: f64,
    /// Total ramp span [G].
    pub b_span_gauss: f64,
    /// Ramp rate for single runs [G/ms].
    pub b_dot_gauss_per_ms: f64,
    /// Ramp rates scanned by the fidelity surface [G/ms].
    pub b_dot_list_gauss_per_ms: Vec<f64>,
    /// End of the propagation [ms].
    pub t_final_ms: f64,
    /// Propagator step [us].
    pub dt_us: f64,
    pub scheme: Scheme,
    /// Steps between norm/leak audits.
    pub renorm_check_interval: usize,
    /// Edge-probability abort threshold.
    pub leak_tolerance: f64,
    /// Half width of the relative-coordinate box [um].
    pub grid_half_width_um: f64,
    /// Grid samples (odd; one point is the periodic image).
    pub grid_points: usize,
    /// Times at which to export state snapshots [ms].
    pub snapshot_times_ms: Vec<f64>,
    /// CM width ratios ΔX0/a_1d(0) to scan; `None` means the built-in
    /// log-spaced scan. Mutually exclusive with `delta_x0_um`.
    pub r_list: Option<Vec<f64>>,
    /// Explicit CM width ΔX0 [um], instead of a ratio scan.
    pub delta_x0_um: Option<f64>,
    /// Phase samples per fringe scan.
    pub phi_count: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            species: Species::K40,
            a_bg_nm: 9.2,
            b0_gauss: 202.1,
            delta_b_gauss: 7.8,
            omega_perp_khz: 69.0,
            b_start_gauss: 208.6,
            b_span_gauss: 10.0,
            b_dot_gauss_per_ms: 2.0,
            // factor 16 in rate, all crossing the resonance within the
            // first 5% of the hold — slower ramps cross so late that the
            // pair cannot separate by t_final and the fidelity collapses
            b_dot_list_gauss_per_ms: vec![2.0, 4.0, 8.0, 16.0, 32.0],
            t_final_ms: 13.0,
            dt_us: 1.0,
            scheme: Scheme::CrankNicolson,
            renorm_check_interval: 100,
            leak_tolerance: 0.01,
            grid_half_width_um: 120.0,
            grid_points: 8193,
            snapshot_times_ms: vec![0.0, 6.5, 13.0],
            r_list: None,
            delta_x0_um: None,
            phi_count: 100,
        }
    }
}

/// The built-in CM-width scan: 16 ratios log-spaced over [0.05, 5],
/// bracketing both the narrow-packet and broad-packet limits.
pub fn default_r_list() -> Vec<f64> {
    (0..16).map(|i| 0.05 * 100.0_f64.powf(i as f64 / 15.0)).collect()
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value.parse::<f64>().map_err(|_| config_err(line, format!("{key}: `{value}` is not a number")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| config_err(line, format!("{key}: `{value}` is not a whole number")))
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = value.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(config_err(line, format!("{key}: empty entry in list `{value}`")));
    }
    items.iter().map(|s| parse_f64(line, key, s)).collect()
}

impl Settings {
    /// Parses `key = value` text over the defaults. Blank lines and lines
    /// starting with `#` are skipped; unknown and repeated keys are errors.
    pub fn parse(text: &str) -> Result<Settings> {
        let mut s = Settings::default();
        let mut seen = std::collections::BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                config_err(line, format!("expected `key = value`, got `{trimmed}`"))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(config_err(line, format!("key `{key}` set twice")));
            }
            match key {
                "species" => {
                    s.species = Species::parse(value)
                        .ok_or_else(|| config_err(line, format!("unknown species `{value}`")))?;
                }
                "a_bg_nm" => s.a_bg_nm = parse_f64(line, key, value)?,
                "b0_gauss" => s.b0_gauss = parse_f64(line, key, value)?,
                "delta_b_gauss" => s.delta_b_gauss = parse_f64(line, key, value)?,
                "omega_perp_khz" => s.omega_perp_khz = parse_f64(line, key, value)?,
                "b_start_gauss" => s.b_start_gauss = parse_f64(line, key, value)?,
                "b_span_gauss" => s.b_span_gauss = parse_f64(line, key, value)?,
                "b_dot_gauss_per_ms" => s.b_dot_gauss_per_ms = parse_f64(line, key, value)?,
                "b_dot_list_gauss_per_ms" => {
                    s.b_dot_list_gauss_per_ms = parse_list(line, key, value)?;
                }
                "t_final_ms" => s.t_final_ms = parse_f64(line, key, value)?,
                "dt_us" => s.dt_us = parse_f64(line, key, value)?,
                "scheme" => {
                    s.scheme = match value {
                        "crank-nicolson" => Scheme::CrankNicolson,
                        "split-step" => Scheme::SplitStep,
                        other => {
                            return Err(config_err(
                                line,
                                format!(
                                    "scheme must be crank-nicolson or split-step, got `{other}`"
                                ),
                            ))
                        }
                    };
                }
                "renorm_check_interval" => s.renorm_check_interval = parse_usize(line, key, value)?,
                "leak_tolerance" => s.leak_tolerance = parse_f64(line, key, value)?,
                "grid_half_width_um" => s.grid_half_width_um = parse_f64(line, key, value)?,
                "grid_points" => s.grid_points = parse_usize(line, key, value)?,
                "snapshot_times_ms" => s.snapshot_times_ms = parse_list(line, key, value)?,
                "r_list" => {
                    if s.delta_x0_um.is_some() {
                        return Err(config_err(line, "r_list conflicts with delta_x0_um"));
                    }
                    s.r_list = Some(parse_list(line, key, value)?);
                }
                "delta_x0_um" => {
                    if s.r_list.is_some() {
                        return Err(config_err(line, "delta_x0_um conflicts with r_list"));
                    }
                    s.delta_x0_um = Some(parse_f64(line, key, value)?);
                }
                "phi_count" => s.phi_count = parse_usize(line, key, value)?,
                other => return Err(config_err(line, format!("unknown key `{other}`"))),
            }
        }
        Ok(s)
    }

    /// Builds the validated module-level configuration, resolving the
    /// initial coupling chain and the CM width list.
    pub fn resolve(&self) -> Result<RunConfig> {
        let feshbach = FeshbachParams::new(
            units::nm_to_m(self.a_bg_nm),
            self.b0_gauss,
            self.delta_b_gauss,
            units::khz_to_angular(self.omega_perp_khz),
            self.species.mass(),
        )?;
        let grid = Grid1D::new(units::um_to_m(self.grid_half_width_um), self.grid_points)?;
        let t_final = units::ms_to_s(self.t_final_ms);
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_final must be positive, got {} ms",
                self.t_final_ms
            )));
        }
        let dt = units::us_to_s(self.dt_us);
        if !(dt.is_finite() && dt > 0.0 && dt <= t_final) {
            return Err(Error::InvalidParameter(format!(
                "dt must lie in (0, t_final], got {} us",
                self.dt_us
            )));
        }
        if self.phi_count < 2 {
            return Err(Error::InvalidParameter(format!(
                "phi_count must be at least 2, got {}",
                self.phi_count
            )));
        }
        let mut snapshot_times: Vec<f64> =
            self.snapshot_times_ms.iter().map(|&t| units::ms_to_s(t)).collect();
        snapshot_times.sort_by(f64::total_cmp);
        let propagator = PropagatorConfig {
            dt,
            scheme: self.scheme,
            renorm_check_interval: self.renorm_check_interval,
            leak_tolerance: self.leak_tolerance,
            snapshot_times,
        };

        let rate_gauss_per_s = units::gauss_per_ms_to_per_s(self.b_dot_gauss_per_ms);
        let mut b_dot_list_gauss_per_s: Vec<f64> =
            self.b_dot_list_gauss_per_ms.iter().map(|&r| units::gauss_per_ms_to_per_s(r)).collect();
        if b_dot_list_gauss_per_s.is_empty() {
            return Err(Error::InvalidParameter("b_dot_list must not be empty".into()));
        }
        if b_dot_list_gauss_per_s.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("sweep rates must be positive".into()));
        }
        b_dot_list_gauss_per_s.sort_by(f64::total_cmp);
        if b_dot_list_gauss_per_s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("b_dot_list has a repeated rate".into()));
        }

        let mut cfg = RunConfig {
            species: self.species,
            feshbach,
            grid,
            propagator,
            b_start_gauss: self.b_start_gauss,
            b_span_gauss: self.b_span_gauss,
            rate_gauss_per_s,
            b_dot_list_gauss_per_s,
            cm_widths: Vec::new(),
            t_final,
            phi_count: self.phi_count,
            initial: InitialChain { a: 0.0, a_1d: 0.0, g: 0.0 },
        };
        // the default-rate schedule doubles as an early validity check
        let sched = cfg.schedule(rate_gauss_per_s)?;
        let (a, a_1d, g) = feshbach::initial_chain(&cfg.feshbach, &sched)?;
        cfg.initial = InitialChain { a, a_1d, g };

        let ratios: Vec<f64> = match (&self.r_list, self.delta_x0_um) {
            (Some(_), Some(_)) => unreachable!("parse rejects the combination"),
            (Some(list), None) => list.clone(),
            (None, Some(dx0_um)) => vec![units::um_to_m(dx0_um) / a_1d],
            (None, None) => default_r_list(),
        };
        if ratios.is_empty() {
            return Err(Error::InvalidParameter("r_list must not be empty".into()));
        }
        if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("CM width ratios must be positive".into()));
        }
        let mut widths: Vec<CmWidth> =
            ratios.iter().map(|&r| CmWidth { r_ratio: r, delta_x0: r * a_1d }).collect();
        widths.sort_by(|a, b| a.r_ratio.total_cmp(&b.r_ratio));
        if widths.windows(2).any(|w| w[0].r_ratio == w[1].r_ratio) {
            return Err(Error::InvalidParameter("r_list has a repeated ratio".into()));
        }
        cfg.cm_widths = widths;
        Ok(cfg)
    }
}

/// One CM packet width to evaluate, in both scan parameterizations.
#[derive(Debug, Clone, Copy)]
pub struct CmWidth {
    /// ΔX0 over the initial bound-state radius.
    pub r_ratio: f64,
    /// ΔX0 [m].
    pub delta_x0: f64,
}

/// The t = 0 coupling chain, resolved once per run.
#[derive(Debug, Clone, Copy)]
pub struct InitialChain {
    /// 3D scattering length [m].
    pub a: f64,
    /// Effective 1D scattering length, the bound-state radius [m].
    pub a_1d: f64,
    /// Contact coupling [J m].
    pub g: f64,
}

/// Fully resolved run parameters in SI units (fields stay in gauss).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub species: Species,
    pub feshbach: FeshbachParams,
    pub grid: Grid1D,
    pub propagator: PropagatorConfig,
    pub b_start_gauss: f64,
    pub b_span_gauss: f64,
    /// Single-run ramp rate [G/s].
    pub rate_gauss_per_s: f64,
    /// Surface-scan ramp rates [G/s], strictly ascending.
    pub b_dot_list_gauss_per_s: Vec<f64>,
    /// CM packet widths, ascending in ratio.
    pub cm_widths: Vec<CmWidth>,
    /// Propagation end time [s].
    pub t_final: f64,
    pub phi_count: usize,
    pub initial: InitialChain,
}

impl RunConfig {
    /// Ramp schedule at the given rate. The schedule stays defined until
    /// the later of t_final and the ramp end, so slow sweeps that are
    /// still ramping at t_final are legal.
    pub fn schedule(&self, rate_gauss_per_s: f64) -> Result<SweepSchedule> {
        let ramp = self.b_span_gauss / rate_gauss_per_s;
        SweepSchedule::new(
            self.b_start_gauss,
            self.b_span_gauss,
            rate_gauss_per_s,
            self.t_final.max(ramp),
        )
    }

    /// CM packet released at t = 0 with the given width.
    pub fn packet_at_release(&self, delta_x0: f64) -> Result<CmPacket> {
        CmPacket::new(delta_x0, 2.0 * self.feshbach.atom_mass, 0.0)
    }
}
