//! Walk the default magnetic-field ramp and print the interaction chain
//! B → a → a_1D → g_1D at each step.
//!
//! The ramp starts below the zero crossing of the coupling (attractive
//! g, a bound pair exists) and ends above it (repulsive g, no bound
//! state). Right at the crossing the effective 1D length diverges — the
//! table marks that row instead of printing a number.

use pairwave::feshbach::{a1d_from_a, coupling_at_time, FeshbachParams, SweepSchedule};
use pairwave::units::{m_to_nm, m_to_um, ms_to_s, s_to_ms};
use pairwave::Result;

fn main() -> Result<()> {
    let params = FeshbachParams::potassium40();
    let rate = 2000.0; // G/s, i.e. 2 G/ms
    let t_final = ms_to_s(13.0);
    let sched = SweepSchedule::new(208.6, 10.0, rate, t_final)?;

    println!(
        "transverse confinement length a_perp = {:.2} nm",
        m_to_nm(params.transverse_length())
    );
    println!("coupling zero crossing at B = {} G", params.zero_crossing_gauss());
    println!("ramp: 208.6 G + 10 G at 2 G/ms, then hold\n");

    println!(
        "{:>7} {:>9} {:>9} {:>11} {:>13}",
        "t [ms]", "B [G]", "a [nm]", "a_1D [um]", "g [J m]"
    );
    for step in 0..=26 {
        let t = t_final * step as f64 / 26.0;
        let b = sched.field_at(t);
        let a = params.scattering_length(b)?;
        let g = coupling_at_time(&params, &sched, t)?;
        // a_1D is only meaningful away from the crossing; the coupling
        // itself stays finite (and passes through zero) everywhere
        let a1d = a1d_from_a(a, params.transverse_length())
            .map(|v| format!("{:>11.3}", m_to_um(v)))
            .unwrap_or_else(|_| format!("{:>11}", "(diverges)"));
        println!("{:>7.1} {:>9.2} {:>9.3} {} {:>13.3e}", s_to_ms(t), b, m_to_nm(a), a1d, g);
    }

    Ok(())
}
