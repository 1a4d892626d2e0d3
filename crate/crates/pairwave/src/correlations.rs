//! Which side does each atom end up on?
//!
//! The pair state factorizes into the simulated relative coordinate
//! x = x1 - x2 and a free Gaussian center-of-mass packet X = (x1 + x2)/2.
//! Atom positions are x1 = X + x/2, x2 = X - x/2, so for a CM density
//! rho(X) that is even in X:
//!
//! * both atoms right of the trap center (and, by symmetry, both left):
//!   X > |x|/2, weight erfc(|x| / (2 sqrt2 dX)) / 2 per unit |psi|^2,
//! * atoms on opposite sides: |X| < |x|/2, weight erf(|x| / (2 sqrt2 dX)),
//!
//! with dX the CM width at the measurement time. Integrating |psi(x)|^2
//! against these weights replaces the full 2D (x1, x2) integral — the
//! brute-force quadrature `quadrant_probabilities_by_quadrature` is kept
//! around precisely to check that reduction.
//!
//! The pair fidelity is the chance that the two atoms separated:
//! kappa = pp/pn, F = 1/(1 + kappa) = pn/(pn + pp).

use statrs::function::erf::{erf, erfc};

use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::grid::WaveFunction;

/// Free center-of-mass Gaussian, pinned down by its width at release and
/// ballistically spread to `time`.
#[derive(Debug, Clone, Copy)]
pub struct CmPacket {
    /// RMS position width at t = 0 [m].
    pub delta_x0: f64,
    /// Total mass of the pair [kg].
    pub total_mass: f64,
    /// Flight time since release [s].
    pub time: f64,
}

impl CmPacket {
    pub fn new(delta_x0: f64, total_mass: f64, time: f64) -> Result<Self> {
        if !(delta_x0.is_finite() && delta_x0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "CM width must be positive, got {delta_x0}"
            )));
        }
        if !(total_mass.is_finite() && total_mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "total mass must be positive, got {total_mass}"
            )));
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "flight time must be non-negative, got {time}"
            )));
        }
        Ok(CmPacket { delta_x0, total_mass, time })
    }

    /// Minimum-uncertainty velocity spread hbar/(2 M dX0) [m/s].
    pub fn velocity_spread(&self) -> f64 {
        HBAR / (2.0 * self.total_mass * self.delta_x0)
    }

    /// RMS width after ballistic spreading,
    /// sqrt(dX0^2 + (t dV0)^2) [m].
    pub fn width_at_time(&self) -> f64 {
        let drift = self.time * self.velocity_spread();
        (self.delta_x0 * self.delta_x0 + drift * drift).sqrt()
    }

    /// Same packet at a different flight time.
    pub fn at_time(&self, time: f64) -> Result<Self> {
        CmPacket::new(self.delta_x0, self.total_mass, time)
    }
}

/// Joint side-of-trap probabilities for the two atoms. `pp` means both on
/// the positive side, `pn` means atom 1 positive and atom 2 negative, and
/// so on. They add up to the norm of the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantProbabilities {
    pub pp: f64,
    pub pn: f64,
    pub np: f64,
    pub nn: f64,
}

impl QuadrantProbabilities {
    pub fn sum(&self) -> f64 {
        self.pp + self.pn + self.np + self.nn
    }

    /// Probability the atoms ended up on opposite sides.
    pub fn separated(&self) -> f64 {
        self.pn + self.np
    }
}

/// Reject opposite-side probabilities below this as degenerate — the
/// same-to-opposite ratio stops meaning anything there.
pub const DEGENERATE_PN_FLOOR: f64 = 1e-12;

/// Largest |psi time - packet time| treated as "the same instant" [s].
pub const TIME_MATCH_TOLERANCE: f64 = 1e-12;

/// Fold the CM packet over the relative-coordinate density.
///
/// `psi_time` is the evolution time of `psi`; it must agree with the
/// packet's flight time — mixing a 13 ms state with a 5 ms packet is a
/// bug in the caller, not a number to be computed.
pub fn quadrant_probabilities(
    psi: &WaveFunction,
    psi_time: f64,
    packet: &CmPacket,
) -> Result<QuadrantProbabilities> {
    if (psi_time - packet.time).abs() > TIME_MATCH_TOLERANCE {
        return Err(Error::TimeMismatch { psi_time_s: psi_time, packet_time_s: packet.time });
    }
    let s = 2.0 * std::f64::consts::SQRT_2 * packet.width_at_time();
    let dx = psi.grid.spacing();
    let c = psi.grid.center_index();

    let mut same = 0.0; // X beyond |x|/2 on one chosen side
    let mut pn = 0.0;
    let mut np = 0.0;
    for j in 0..psi.grid.period_points() {
        let w = psi.values[j].norm_sqr();
        let r = psi.grid.x(j).abs();
        same += w * 0.5 * erfc(r / s);
        // x = 0 contributes erf(0) = 0, so the center sample needs no
        // special-casing here
        if j > c {
            pn += w * erf(r / s);
        } else if j < c {
            np += w * erf(r / s);
        }
    }
    // pp = nn holds for any psi because the CM density is even in X
    Ok(QuadrantProbabilities { pp: same * dx, pn: pn * dx, np: np * dx, nn: same * dx })
}

/// F = 1/(1 + pp/pn): the probability the pair separated, given the
/// convention that a perfectly anti-correlated pair scores 1.
pub fn fidelity_from_quadrants(q: &QuadrantProbabilities) -> Result<f64> {
    if q.pn < DEGENERATE_PN_FLOOR {
        return Err(Error::DegenerateQuadrants { opposite_pn: q.pn });
    }
    Ok(q.pn / (q.pn + q.pp))
}

/// pp/pn, the same-side to opposite-side ratio.
pub fn kappa_from_quadrants(q: &QuadrantProbabilities) -> Result<f64> {
    if q.pn < DEGENERATE_PN_FLOOR {
        return Err(Error::DegenerateQuadrants { opposite_pn: q.pn });
    }
    Ok(q.pp / q.pn)
}

/// One cell of a dissociation fidelity scan.
#[derive(Debug, Clone, Copy)]
pub struct FidelityRecord {
    /// Sweep rate [G/ms].
    pub b_dot_gauss_per_ms: f64,
    /// CM width at release over the initial bound-state radius.
    pub r_ratio: f64,
    pub kappa: f64,
    pub fidelity: f64,
}

/// Brute-force check of the erf reduction. For every sample of the
/// relative-coordinate density, the quadrant windows in the CM coordinate
/// are rebuilt from the raw sign constraints on x1 = X + x/2 and
/// x2 = X - x/2, and the Gaussian mass in each window is integrated by
/// composite Simpson — no error function anywhere. Sampling `density` on
/// the same lattice the fast path uses isolates exactly the part under
/// test: the erf/erfc weights and their 2 sqrt2 dX scale.
///
/// (A naive square lattice over the (x1, x2) plane cannot do this job: the
/// quadrant indicator is discontinuous along the axes and such a rule
/// stalls near 1e-5 at any affordable resolution. The test suite keeps one
/// around to check the coordinate-change Jacobian, nothing more.)
pub fn quadrant_probabilities_by_quadrature(
    density: impl Fn(f64) -> f64,
    half_width: f64,
    samples_per_axis: usize,
    packet: &CmPacket,
) -> QuadrantProbabilities {
    let n = samples_per_axis;
    let h = 2.0 * half_width / n as f64;
    let sigma = packet.width_at_time();

    let (mut pp, mut pn, mut np, mut nn) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        let x = -half_width + i as f64 * h;
        let w = density(x) * h;
        if w == 0.0 {
            continue;
        }
        let above_1 = -x / 2.0; // x1 > 0  <=>  X > -x/2
        let above_2 = x / 2.0; //  x2 > 0  <=>  X > +x/2
        pp += w * gauss_window(above_1.max(above_2), f64::INFINITY, sigma);
        nn += w * gauss_window(f64::NEG_INFINITY, above_1.min(above_2), sigma);
        pn += w * gauss_window(above_1, above_2, sigma);
        np += w * gauss_window(above_2, above_1, sigma);
    }
    QuadrantProbabilities { pp, pn, np, nn }
}

/// Mass of the N(0, sigma^2) density in (lo, hi), by composite Simpson on
/// intervals no wider than sigma/32, clipped at 9 sigma where the density
/// is below 1e-18 of its peak. Deliberately not erf: this backs the oracle
/// that cross-checks erf.
fn gauss_window(lo: f64, hi: f64, sigma: f64) -> f64 {
    const RANGE_SIGMAS: f64 = 9.0;
    let a = lo.max(-RANGE_SIGMAS * sigma);
    let b = hi.min(RANGE_SIGMAS * sigma);
    if b <= a {
        return 0.0;
    }
    let mut intervals = ((b - a) / (sigma / 32.0)).ceil() as usize;
    intervals = intervals.max(2);
    if intervals % 2 == 1 {
        intervals += 1;
    }
    let step = (b - a) / intervals as f64;
    let rho = |x: f64| (-0.5 * (x / sigma).powi(2)).exp();
    let mut acc = rho(a) + rho(b);
    for i in 1..intervals {
        acc += rho(a + i as f64 * step) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * step / (3.0 * sigma * std::f64::consts::TAU.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Species;
    use crate::grid::{init_bound_state, Grid1D};
    use num_complex::Complex64;

    const A1D: f64 = 2.04e-6;

    fn pair_mass() -> f64 {
        2.0 * Species::K40.mass()
    }

    fn packet(delta_x0: f64, t: f64) -> CmPacket {
        CmPacket::new(delta_x0, pair_mass(), t).unwrap()
    }

    #[test]
    fn packet_spreading_matches_ballistics() {
        let p = packet(A1D, 13e-3);
        assert!((p.velocity_spread() - 1.9474574197797298e-4).abs() / 1.9e-4 < 1e-12);
        assert!((p.width_at_time() - 3.2513193905144352e-6).abs() / 3.25e-6 < 1e-12);
        let frozen = packet(A1D, 0.0);
        assert_eq!(frozen.width_at_time(), A1D);
    }

    #[test]
    fn packet_validation() {
        assert!(CmPacket::new(0.0, 1.0, 0.0).is_err());
        assert!(CmPacket::new(1e-6, -1.0, 0.0).is_err());
        assert!(CmPacket::new(1e-6, 1.0, -1.0).is_err());
        assert!(CmPacket::new(f64::NAN, 1.0, 0.0).is_err());
    }

    #[test]
    fn quadrants_add_up_to_the_norm() {
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let q = quadrant_probabilities(&psi, 0.0, &packet(3e-6, 0.0)).unwrap();
        assert!((q.sum() - 1.0).abs() < 1e-12, "sum = {}", q.sum());
        assert_eq!(q.pp, q.nn);
        assert!((q.pn - q.np).abs() < 1e-14, "pn = {}, np = {}", q.pn, q.np);
    }

    #[test]
    fn narrow_cm_packet_means_opposite_sides() {
        // CM pinned at the origin: x1 = -x2 away from the overlap point.
        // The x = 0 sample carries dx/a1d of the mass and splits evenly
        // between the same-side quadrants, which caps the limit.
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let q = quadrant_probabilities(&psi, 0.0, &packet(A1D / 2000.0, 0.0)).unwrap();
        assert!(q.separated() > 0.98, "separated = {}", q.separated());
        let f = fidelity_from_quadrants(&q).unwrap();
        assert!(f > 0.98, "F = {f}");
        // a density with a hole at the origin has no such cap
        let g = Grid1D::default();
        let lump = |x: f64, x0: f64| (-((x - x0) / 5e-6).powi(2)).exp();
        let mut split =
            WaveFunction::from_fn(g, |x| Complex64::new(lump(x, 15e-6) + lump(x, -15e-6), 0.0));
        split.normalize().unwrap();
        let q2 = quadrant_probabilities(&split, 0.0, &packet(A1D / 2000.0, 0.0)).unwrap();
        assert!(q2.separated() > 0.9999, "separated = {}", q2.separated());
    }

    #[test]
    fn broad_cm_packet_means_same_side() {
        // CM wanders far beyond the pair separation: both atoms ride it
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let q = quadrant_probabilities(&psi, 0.0, &packet(500.0 * A1D, 0.0)).unwrap();
        assert!(q.pp + q.nn > 0.999);
        let f = fidelity_from_quadrants(&q).unwrap();
        assert!(f < 0.001, "F = {f}");
    }

    #[test]
    fn fidelity_falls_as_the_packet_spreads() {
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let mut last = f64::INFINITY;
        for sigma in [0.3e-6, 1e-6, 3e-6, 10e-6, 30e-6] {
            let q = quadrant_probabilities(&psi, 0.0, &packet(sigma, 0.0)).unwrap();
            let f = fidelity_from_quadrants(&q).unwrap();
            assert!(f < last, "F not decreasing at sigma = {sigma}");
            last = f;
        }
    }

    #[test]
    fn fidelity_ignores_overall_normalization() {
        let mut psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let p = packet(3e-6, 0.0);
        let f1 = fidelity_from_quadrants(&quadrant_probabilities(&psi, 0.0, &p).unwrap()).unwrap();
        for v in &mut psi.values {
            *v *= 1.7;
        }
        let f2 = fidelity_from_quadrants(&quadrant_probabilities(&psi, 0.0, &p).unwrap()).unwrap();
        assert!((f1 - f2).abs() < 1e-13);
    }

    #[test]
    fn asymmetric_states_split_pn_from_np() {
        let g = Grid1D::default();
        // lump on the positive side only: atom 1 tends positive
        let mut psi = WaveFunction::from_fn(g, |x| {
            Complex64::new((-((x - 20e-6) / 4e-6).powi(2)).exp(), 0.0)
        });
        psi.normalize().unwrap();
        let q = quadrant_probabilities(&psi, 0.0, &packet(2e-6, 0.0)).unwrap();
        assert!(q.pn > 0.9);
        assert!(q.np < 1e-6);
        assert_eq!(q.pp, q.nn); // still exact: the CM density is even
        assert!((q.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_mismatch_is_rejected() {
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        match quadrant_probabilities(&psi, 13e-3, &packet(3e-6, 5e-3)) {
            Err(Error::TimeMismatch { .. }) => {}
            other => panic!("{other:?}"),
        }
        // within the tolerance is fine
        assert!(quadrant_probabilities(&psi, 5e-3 + 1e-13, &packet(3e-6, 5e-3)).is_ok());
    }

    #[test]
    fn degenerate_opposite_probability_is_rejected() {
        let q = QuadrantProbabilities { pp: 0.5, pn: 1e-13, np: 1e-13, nn: 0.5 };
        match fidelity_from_quadrants(&q) {
            Err(Error::DegenerateQuadrants { .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(kappa_from_quadrants(&q).is_err());
    }

    #[test]
    fn kappa_and_fidelity_are_consistent() {
        let psi = init_bound_state(Grid1D::default(), A1D).unwrap();
        let q = quadrant_probabilities(&psi, 0.0, &packet(2.5e-6, 0.0)).unwrap();
        let kappa = kappa_from_quadrants(&q).unwrap();
        let f = fidelity_from_quadrants(&q).unwrap();
        assert!((f - 1.0 / (1.0 + kappa)).abs() < 1e-14);
    }

    /// Grid-sample lookup closure over a wavefunction's density, exact on
    /// lattice-aligned arguments.
    fn density_lookup(psi: &WaveFunction) -> impl Fn(f64) -> f64 {
        let dx = psi.grid.spacing();
        let c = psi.grid.center_index();
        let values = psi.values.clone();
        move |x: f64| {
            let idx = (x / dx).round() as i64 + c as i64;
            if idx < 0 || idx >= values.len() as i64 {
                0.0
            } else {
                values[idx as usize].norm_sqr()
            }
        }
    }

    #[test]
    fn quadrature_oracle_agrees_on_a_smooth_case() {
        // dissociated-style density: two lumps at +-15 um
        let g = Grid1D::default();
        let lump = |x: f64, x0: f64| (-((x - x0) / 5e-6).powi(2)).exp();
        let mut psi =
            WaveFunction::from_fn(g, |x| Complex64::new(lump(x, 15e-6) + lump(x, -15e-6), 0.0));
        psi.normalize().unwrap();
        let p = packet(3e-6, 0.0);
        let fast = quadrant_probabilities(&psi, 0.0, &p).unwrap();
        // oracle on the same 8192-point lattice: the only difference left
        // is erf versus Simpson
        let slow = quadrant_probabilities_by_quadrature(
            density_lookup(&psi),
            g.half_width,
            g.period_points(),
            &p,
        );
        for (a, b, name) in [
            (fast.pp, slow.pp, "pp"),
            (fast.pn, slow.pn, "pn"),
            (fast.np, slow.np, "np"),
            (fast.nn, slow.nn, "nn"),
        ] {
            assert!((a - b).abs() < 1e-9, "{name}: reduction {a} vs quadrature {b}");
        }
    }

    #[test]
    fn quadrature_oracle_total_mass_is_one() {
        let w = 4e-6;
        let norm = 1.0 / (w * (std::f64::consts::PI / 2.0).sqrt());
        let density = move |x: f64| norm * (-2.0 * (x / w).powi(2)).exp();
        let q = quadrant_probabilities_by_quadrature(density, 60e-6, 1500, &packet(5e-6, 0.0));
        assert!((q.sum() - 1.0).abs() < 1e-9, "sum = {}", q.sum());
    }

    /// The textbook double integral over the (x1, x2) plane on a square
    /// lattice, with samples on the axes split between quadrants. Only
    /// O(h^2) accurate across the quadrant edges — kept to pin down the
    /// coordinate-change Jacobian, not as a precision oracle.
    fn plane_lattice_quadrants(
        density: impl Fn(f64) -> f64,
        half_width: f64,
        n: usize,
        packet: &CmPacket,
    ) -> QuadrantProbabilities {
        let h = 2.0 * half_width / n as f64;
        let sigma = packet.width_at_time();
        let rho_norm = 1.0 / (sigma * std::f64::consts::TAU.sqrt());
        let mut dens_diff = vec![0.0; 2 * n - 1];
        for (d, slot) in dens_diff.iter_mut().enumerate() {
            *slot = density((d as isize - (n as isize - 1)) as f64 * h);
        }
        let mut rho_sum = vec![0.0; 2 * n - 1];
        for (s, slot) in rho_sum.iter_mut().enumerate() {
            let x_cm = s as f64 * h / 2.0 - half_width;
            *slot = rho_norm * (-0.5 * (x_cm / sigma).powi(2)).exp();
        }
        let sign_weights = |x: f64| -> (f64, f64) {
            if x > 0.0 {
                (1.0, 0.0)
            } else if x < 0.0 {
                (0.0, 1.0)
            } else {
                (0.5, 0.5)
            }
        };
        let (mut pp, mut pn, mut np, mut nn) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let (p1, n1) = sign_weights(-half_width + i as f64 * h);
            for j in 0..n {
                let mass = dens_diff[i + n - 1 - j] * rho_sum[i + j];
                let (p2, n2) = sign_weights(-half_width + j as f64 * h);
                pp += mass * p1 * p2;
                pn += mass * p1 * n2;
                np += mass * n1 * p2;
                nn += mass * n1 * n2;
            }
        }
        let w = h * h;
        QuadrantProbabilities { pp: pp * w, pn: pn * w, np: np * w, nn: nn * w }
    }

    #[test]
    fn plane_integral_reproduces_the_reduction_to_its_own_accuracy() {
        let g = Grid1D::default();
        let lump = |x: f64, x0: f64| (-((x - x0) / 5e-6).powi(2)).exp();
        let mut psi =
            WaveFunction::from_fn(g, |x| Complex64::new(lump(x, 15e-6) + lump(x, -15e-6), 0.0));
        psi.normalize().unwrap();
        let p = packet(3e-6, 0.0);
        let fast = quadrant_probabilities(&psi, 0.0, &p).unwrap();
        let plane = plane_lattice_quadrants(density_lookup(&psi), g.half_width, 2048, &p);
        // Jacobian of (x1, x2) -> (x, X) is 1: totals agree tightly
        assert!((plane.sum() - 1.0).abs() < 1e-9, "plane sum = {}", plane.sum());
        // quadrant masses only to the plane rule's honest O(h^2) accuracy
        for (a, b) in
            [(fast.pp, plane.pp), (fast.pn, plane.pn), (fast.np, plane.np), (fast.nn, plane.nn)]
        {
            assert!((a - b).abs() < 5e-5, "reduction {a} vs plane {b}");
        }
    }
}
