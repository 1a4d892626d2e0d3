//! Uniform 1D grid, wavefunctions on it, and their momentum-space view.
//!
//! Conventions that everything downstream relies on:
//!
//! * The grid holds an odd number of points `x_j = -L + j dx`,
//!   `dx = 2L/(N-1)`, so `x = 0` is exactly the middle sample and the two
//!   endpoints are `-L` and `+L`.
//! * The domain is treated as periodic with the *last* point the image of
//!   the first. All integrals (norm, overlaps, side sums) run over
//!   `j = 0 .. N-2`, i.e. over the `M = N-1` independent samples, and the
//!   FFT length is `M` — a power of two for the default grid.
//! * Momentum bins are `k_m = m dk` with `dk = 2 pi / (2L) = pi/L`, listed
//!   in ascending order (`m = -M/2 .. M/2-1`). With the density defined as
//!   `dx^2/(2 pi) |FFT|^2`, the momentum-space total equals the position
//!   norm exactly (discrete Parseval), not just up to quadrature error.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default half-width L = 120 um: ~60 bound-state radii, enough that the
/// pair barely reaches the edge after 13 ms of flight.
pub const DEFAULT_HALF_WIDTH: f64 = 120e-6;
/// Default point count; odd, with N-1 = 8192 a power of two for the FFT.
pub const DEFAULT_N_POINTS: usize = 8193;
/// Spacing of the default grid [m] (~29.3 nm, a1d/70 at the sweep start).
pub const DEFAULT_SPACING: f64 = 2.0 * DEFAULT_HALF_WIDTH / (DEFAULT_N_POINTS as f64 - 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    /// Half-width L [m]; the domain is [-L, L].
    pub half_width: f64,
    /// Number of samples including both endpoints. Odd.
    pub n_points: usize,
}

impl Default for Grid1D {
    fn default() -> Self {
        Grid1D { half_width: DEFAULT_HALF_WIDTH, n_points: DEFAULT_N_POINTS }
    }
}

impl Grid1D {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "grid half-width must be positive, got {half_width}"
            )));
        }
        if n_points < 5 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "grid needs an odd number of points >= 5, got {n_points}"
            )));
        }
        Ok(Grid1D { half_width, n_points })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points as f64 - 1.0)
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Index of x = 0.
    pub fn center_index(&self) -> usize {
        (self.n_points - 1) / 2
    }

    /// Number of independent samples (FFT length): n_points - 1.
    pub fn period_points(&self) -> usize {
        self.n_points - 1
    }

    /// Momentum bin width pi/L [1/m].
    pub fn k_spacing(&self) -> f64 {
        std::f64::consts::PI / self.half_width
    }
}

#[derive(Debug, Clone)]
pub struct WaveFunction {
    pub grid: Grid1D,
    /// Complex samples, length `grid.n_points`. The last entry is the
    /// periodic image of the first and carries no independent weight.
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    /// Sample an arbitrary complex-valued function on the grid.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n_points).map(|j| f(grid.x(j))).collect();
        WaveFunction { grid, values }
    }

    /// Sample a real radial profile f(|x|), built by index mirroring so the
    /// result is even to the last bit (floating-point grid coordinates are
    /// not exactly sign-symmetric; indices are).
    pub fn from_even_profile(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let c = grid.center_index() as i64;
        let dx = grid.spacing();
        let values = (0..grid.n_points)
            .map(|j| Complex64::new(f((j as i64 - c).unsigned_abs() as f64 * dx), 0.0))
            .collect();
        WaveFunction { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        WaveFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points] }
    }

    /// Total probability, integral of |psi|^2 over one period.
    pub fn norm(&self) -> f64 {
        let dx = self.grid.spacing();
        self.values[..self.grid.period_points()].iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
    }

    /// Rescale to unit total probability.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        for v in &mut self.values {
            *v *= s;
        }
        Ok(())
    }

    /// <self|other> with the same quadrature weights as `norm`.
    pub fn overlap(&self, other: &WaveFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::InvalidParameter(
                "overlap of wavefunctions on different grids".into(),
            ));
        }
        let dx = self.grid.spacing();
        let m = self.grid.period_points();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.values[..m].iter().zip(&other.values[..m]) {
            acc += a.conj() * b;
        }
        Ok(acc * dx)
    }

    /// Probability of |x| > radius. A sample exactly on the boundary
    /// contributes half its weight.
    pub fn density_outside(&self, radius: f64) -> f64 {
        let dx = self.grid.spacing();
        let mut acc = 0.0;
        for j in 0..self.grid.period_points() {
            let r = self.grid.x(j).abs();
            if r > radius {
                acc += self.values[j].norm_sqr();
            } else if r == radius {
                acc += 0.5 * self.values[j].norm_sqr();
            }
        }
        acc * dx
    }

    /// RMS spread sqrt(<x^2> - <x>^2) of the position density.
    pub fn position_spread(&self) -> f64 {
        let mut p = 0.0;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for j in 0..self.grid.period_points() {
            let w = self.values[j].norm_sqr();
            let x = self.grid.x(j);
            p += w;
            m1 += w * x;
            m2 += w * x * x;
        }
        let mean = m1 / p;
        (m2 / p - mean * mean).max(0.0).sqrt()
    }

    /// Momentum-space probability density on the reciprocal grid.
    pub fn momentum_distribution(&self) -> MomentumDistribution {
        let m = self.grid.period_points();
        let dx = self.grid.spacing();
        let dk = self.grid.k_spacing();

        let mut buf: Vec<Complex64> = self.values[..m].to_vec();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);

        let scale = dx * dx / std::f64::consts::TAU;
        let half = m / 2;
        let mut k_values = Vec::with_capacity(m);
        let mut density = Vec::with_capacity(m);
        for i in 0..m {
            // ascending k: bin i holds mode m_i = i - M/2
            let mode = i as i64 - half as i64;
            k_values.push(mode as f64 * dk);
            let src = (i + half) % m;
            density.push(scale * buf[src].norm_sqr());
        }
        MomentumDistribution { k_values, density }
    }
}

/// |psi(k)|^2 / 2pi on ascending momentum bins; integrates (rectangle rule,
/// which is exact here by Parseval) to the position-space norm.
#[derive(Debug, Clone)]
pub struct MomentumDistribution {
    /// Bin centers [1/m], ascending, zero included.
    pub k_values: Vec<f64>,
    /// Probability density per unit k [m].
    pub density: Vec<f64>,
}

impl MomentumDistribution {
    pub fn spacing(&self) -> f64 {
        self.k_values[1] - self.k_values[0]
    }

    /// Total probability carried by the distribution.
    pub fn total(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.spacing()
    }

    /// Density at k = 0.
    pub fn at_zero(&self) -> f64 {
        let i = self.k_values.len() / 2;
        debug_assert_eq!(self.k_values[i], 0.0);
        self.density[i]
    }

    /// Largest density and the k where it sits.
    pub fn peak(&self) -> (f64, f64) {
        let mut best = (0.0, 0.0);
        for (k, d) in self.k_values.iter().zip(&self.density) {
            if *d > best.1 {
                best = (*k, *d);
            }
        }
        best
    }
}

/// Relative-coordinate bound state psi(x) = exp(-|x|/a1d)/sqrt(a1d),
/// normalized on the grid. Rejects grids too coarse (dx > a1d/50) or too
/// small (L < 10 a1d) to hold it faithfully.
pub fn init_bound_state(grid: Grid1D, a_1d: f64) -> Result<WaveFunction> {
    if !(a_1d.is_finite() && a_1d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bound state needs a positive 1D scattering length, got {a_1d}"
        )));
    }
    let dx = grid.spacing();
    if dx > a_1d / 50.0 {
        return Err(Error::GridTooCoarse { spacing_m: dx, required_m: a_1d / 50.0 });
    }
    if grid.half_width < 10.0 * a_1d {
        return Err(Error::GridTooSmall { half_width_m: grid.half_width, required_m: 10.0 * a_1d });
    }
    let inv_sqrt = 1.0 / a_1d.sqrt();
    let mut psi = WaveFunction::from_even_profile(grid, |r| inv_sqrt * (-r / a_1d).exp());
    psi.normalize()?;
    Ok(psi)
}
