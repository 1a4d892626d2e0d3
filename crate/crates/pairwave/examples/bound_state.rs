//! Build the initial two-atom bound state and compare it against the
//! analytic delta-well solution: energy, profile, and the
//! Lorentzian-squared momentum distribution.

use pairwave::constants::HBAR;
use pairwave::feshbach::{a1d_from_a, g1d, FeshbachParams};
use pairwave::grid::{init_bound_state, Grid1D};
use pairwave::propagate::{energy_expectation, ground_state_refine};
use pairwave::units::{m_to_um, per_m_to_per_um, um_to_m};
use pairwave::Result;

fn main() -> Result<()> {
    let params = FeshbachParams::potassium40();
    let mu = params.reduced_mass();
    let a = params.scattering_length(208.6)?;
    let a1d = a1d_from_a(a, params.transverse_length())?;
    let g = g1d(a1d, mu)?;

    let grid = Grid1D::new(um_to_m(120.0), 8193)?;
    let psi = init_bound_state(grid, a1d)?;

    let e_measured = energy_expectation(&psi, g, mu);
    let e_exact = -HBAR * HBAR / (2.0 * mu * a1d * a1d);
    println!("bound-state size a_1D   = {:.4} um", m_to_um(a1d));
    println!("coupling g              = {:.4e} J m", g);
    println!("energy on the grid      = {:.6e} J", e_measured);
    println!("analytic binding energy = {:.6e} J", e_exact);
    println!("relative deviation      = {:+.2e}", e_measured / e_exact - 1.0);

    // polish to the exact ground state of the discrete operator
    let (ground, e0) = ground_state_refine(&psi, g, mu, 1e-10)?;
    println!(
        "refined energy          = {:.6e} J  (overlap with seed {:.12})",
        e0,
        ground.overlap(&psi)?.norm()
    );

    // momentum side: rho(k) = (2 a / pi) / (1 + (k a)^2)^2
    let dist = psi.momentum_distribution();
    let rho0 = 2.0 * a1d / std::f64::consts::PI;
    println!("\nmomentum distribution (total = {:.9}):", dist.total());
    println!("{:>12} {:>14} {:>14}", "k [1/um]", "rho(k) [m]", "analytic [m]");
    for target in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        let k = target / a1d;
        let i = dist.k_values.iter().position(|&kv| kv >= k).unwrap_or(dist.k_values.len() - 1);
        let k_bin = dist.k_values[i];
        let analytic = rho0 / (1.0 + (k_bin * a1d).powi(2)).powi(2);
        println!("{:>12.4} {:>14.6e} {:>14.6e}", per_m_to_per_um(k_bin), dist.density[i], analytic);
    }

    Ok(())
}
