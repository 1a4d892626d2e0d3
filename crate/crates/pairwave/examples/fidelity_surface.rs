//! Map the path-entanglement fidelity over sweep rate and initial
//! center-of-mass width, reusing one propagation per rate.
//!
//! R is the CM width over the bound-state size; the fidelity peaks near
//! R = 1 and the ridge barely moves with the sweep rate.

use std::path::Path;

use pairwave::harness::{run_fidelity_surface, Settings};
use pairwave::units::gauss_per_s_to_per_ms;
use pairwave::Result;

fn main() -> Result<()> {
    let settings = Settings {
        b_dot_list_gauss_per_ms: vec![2.0, 8.0, 32.0],
        r_list: Some(vec![0.1, 0.2, 0.4, 0.7, 1.0, 1.4, 2.0, 4.0]),
        ..Settings::default()
    };
    let cfg = settings.resolve()?;
    let out = Path::new("pairwave_out/fidelity_surface");

    let surface = run_fidelity_surface(&cfg, &settings, out, 3)?;
    println!(
        "{} cells from {} propagations (widths reuse the sweep)\n",
        surface.cells.len(),
        surface.propagations
    );

    print!("{:>10}", "R \\ G/ms");
    for w in &cfg.cm_widths {
        print!("{:>8.2}", w.r_ratio);
    }
    println!();
    for &rate in &cfg.b_dot_list_gauss_per_s {
        print!("{:>10}", gauss_per_s_to_per_ms(rate));
        for cell in surface.cells.iter().filter(|c| c.b_dot_gauss_per_s == rate) {
            match cell.fidelity {
                Some(f) => print!("{:>8.4}", f),
                None => print!("{:>8}", "-"),
            }
        }
        println!();
    }

    let best = surface
        .cells
        .iter()
        .filter_map(|c| c.fidelity.map(|f| (f, c)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one cell evaluated");
    println!(
        "\nbest F = {:.4} at {} G/ms, R = {}",
        best.0,
        gauss_per_s_to_per_ms(best.1.b_dot_gauss_per_s),
        best.1.r_ratio
    );
    println!("full CSV: {}", surface.csv_path.display());
    Ok(())
}
