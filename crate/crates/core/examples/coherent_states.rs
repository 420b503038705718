//! Coherent states: closed-form normalization and overlaps against quadrature,
//! and the lowering-operator eigenvalue equation.

use ptcs::coherent::{check_eigenvector, coherent_state, normalization, overlap, overlap_quadrature, PhasePoint};
use ptcs::params::{PtParams, Units};

fn main() -> ptcs::Result<()> {
    let units = Units::default();
    println!("N_nu(q) for nu = 0 and 1:");
    for q in [0.1, 0.25, 0.5, 0.75, 0.9] {
        println!("  q = {q:.2}: {:.12}  {:.12}", normalization(0.0, 1.0, q)?, normalization(1.0, 1.0, q)?);
    }

    println!("\n<eta_a, eta_b>, closed form vs quadrature:");
    let points = [(0.5, 0.0), (0.5, 3.0), (0.3, -2.0), (0.8, 10.0)];
    for &(qa, pa) in &points {
        for &(qb, pb) in &points {
            let a = coherent_state(0.5, &units, PhasePoint::new(qa, pa))?;
            let b = coherent_state(0.5, &units, PhasePoint::new(qb, pb))?;
            let c = overlap(&a, &b)?;
            let d = overlap_quadrature(&a, &b)?;
            println!("  ({qa}, {pa}) ({qb}, {pb}): {c:.10}   |diff| = {:.1e}", (c - d).norm());
        }
    }

    let params = PtParams::new(1.0, 0.7)?;
    let r = check_eigenvector(&params, PhasePoint::new(0.35, 4.0), 1e-10)?;
    println!("\nA eta = z eta at (0.35, 4): residual {:.2e}, pass = {}", r.residual, r.pass);
    Ok(())
}
