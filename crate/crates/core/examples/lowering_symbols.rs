//! Lower symbols <eta, O eta> over a phase-space grid: closed forms against
//! quadrature expectations.

use ptcs::coherent::{check_symbols, lowering_symbol_h, PhasePoint};
use ptcs::params::PtParams;

fn main() -> ptcs::Result<()> {
    let params = PtParams::new(1.0, 0.5)?;
    println!("H symbol / e0 on a (q, p) grid, nu = 1, beta = 0.5");
    let ps = [-10.0, -3.0, 0.0, 3.0, 10.0];
    println!("   q \\ p {}", ps.iter().map(|p| format!("{p:>10}")).collect::<String>());
    for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let row: String = ps
            .iter()
            .map(|&p| lowering_symbol_h(&params, PhasePoint::new(q, p)).map(|h| format!("{:10.4}", h / params.e0())))
            .collect::<ptcs::Result<_>>()?;
        println!("  {q:5.2}  {row}");
    }
    let mut worst: f64 = 0.0;
    for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for p in ps {
            for r in check_symbols(&params, PhasePoint::new(q, p), 1e-9)? {
                worst = worst.max(r.residual);
            }
        }
    }
    println!("largest closed-form vs quadrature residual: {worst:.2e}");
    Ok(())
}
