//! Large-L behavior: fidelity of the Gaussian read off the small-x expansion,
//! the superpotential linearization constant, and the plane-wave overlap.

use ptcs::asymptotics::{limit_sweep, linearization_fit, plane_wave_fidelity, sweep_csv};
use ptcs::coherent::PhasePoint;
use ptcs::params::Units;

fn main() -> ptcs::Result<()> {
    let lengths = [10.0, 30.0, 100.0, 300.0, 1000.0];
    for nu in [0.0, 1.0] {
        for q in [0.0, 2.0] {
            let rows = limit_sweep(nu, &lengths, PhasePoint::new(q, 0.5), 1.0, 1.0)?;
            print!("{}", sweep_csv(&rows).render());
        }
    }
    for nu in [0.0, 1.0] {
        let fit = linearization_fit(nu, &Units::with_length(100.0)?, 100)?;
        println!("nu = {nu}: C fit {:.4}, leading (nu+1) hbar pi^4/3 = {:.4}", fit.c_fit, fit.c_leading);
    }
    let pw = plane_wave_fidelity(0.0, &Units::with_length(1000.0)?, PhasePoint::new(0.0, 1.0))?;
    println!("plane-wave overlap at L = 1000: {pw:.6}");
    Ok(())
}
