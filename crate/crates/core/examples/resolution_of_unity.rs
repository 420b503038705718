//! Resolution of unity checked two ways: with the momentum integral done by
//! Plancherel, and by plain two-dimensional quadrature over a truncated window.

use ptcs::frames::{kernel_reproducing_check, verify_resolution, Strategy};
use ptcs::params::{ground_state, PtParams, Units};
use ptcs::coherent::PhasePoint;
use ptcs::sgp::random_state;
use ptcs::susy::eigenstate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ptcs::Result<()> {
    let units = Units::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let states = vec![
        ("ground state nu=0", 0.0, ground_state(&PtParams::new(0.0, 0.0)?)?),
        ("phi_3 of nu=1, beta=2", 1.0, eigenstate(&PtParams::new(1.0, 2.0)?, 3)?),
        ("random state, nu=-0.5", -0.5, random_state(&mut rng, 1.6, 1, 1.0, 2.0)?),
    ];
    for (label, nu, psi) in &states {
        let p = verify_resolution(*nu, units, psi, Strategy::Parseval, 1e-8)?;
        let d = verify_resolution(*nu, units, psi, Strategy::Direct2d, 1e-4)?;
        println!("{label}:");
        println!("  parseval  {:.12}  residual {:.1e}", p.lhs.unwrap_or_default().re, p.residual);
        println!(
            "  direct2d  {:.12}  residual {:.1e}  P_max {:.1}",
            d.lhs.unwrap_or_default().re,
            d.residual,
            d.inputs["p_max"].as_f64().unwrap_or(f64::NAN)
        );
    }

    let pts = [PhasePoint::new(0.5, 0.0), PhasePoint::new(0.5, 1.0), PhasePoint::new(0.2, -5.0)];
    let k = kernel_reproducing_check(0.0, units, &pts, 1e-6)?;
    println!("\nreproducing kernel over {} pairs: max residual {:.1e}", k.inputs["pairs"], k.residual);
    Ok(())
}
