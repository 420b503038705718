//! Energies of a few Poschl-Teller configurations and the first eigenfunctions
//! sampled on a coarse grid.

use ptcs::params::{energy, potential, PtParams};
use ptcs::susy::eigenstate;

fn main() -> ptcs::Result<()> {
    for &(nu, beta) in &[(0.0, 0.0), (1.0, 2.0), (2.5, 1.3)] {
        let params = PtParams::new(nu, beta)?;
        let levels: Vec<String> = (0..5).map(|n| format!("{:.6}", energy(&params, n).value / params.e0())).collect();
        println!("nu = {nu}, beta = {beta}: E_n / e0 = [{}]", levels.join(", "));
    }

    let params = PtParams::new(1.0, 2.0)?;
    println!("\n   x      V(x)/e0      phi_0        phi_1        phi_2");
    let states: Vec<_> = (0..3).map(|n| eigenstate(&params, n)).collect::<ptcs::Result<_>>()?;
    for i in 1..10 {
        let x = i as f64 / 10.0;
        let v = potential(&params, x)? / params.e0();
        let row: Vec<String> = states
            .iter()
            .map(|s| s.evaluate(x).map(|z| format!("{:+.6e}", z.re)))
            .collect::<ptcs::Result<_>>()?;
        println!("  {x:.1}  {v:+11.5}  {}", row.join("  "));
    }
    Ok(())
}
