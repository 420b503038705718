//! Builds excited states from partner ground states and checks the
//! factorization, shape invariance and intertwining relations.

use ptcs::params::PtParams;
use ptcs::susy::{check_eigenvalue, check_factorization, check_intertwining, check_shape_invariance, eigenstate, eigenstate_with_drift};

fn main() -> ptcs::Result<()> {
    let params = PtParams::new(2.5, 1.3)?;
    println!("nu = 2.5, beta = 1.3");
    println!(" n   eigen-res    factor-res   shape-res    intertw-res  norm drift");
    for n in 0..=5 {
        let chain = eigenstate_with_drift(&params, n)?;
        let phi = eigenstate(&params, n)?;
        let e = check_eigenvalue(&params, n, 1e-10)?;
        let f = check_factorization(&params, &phi, 1e-10)?;
        let s = check_shape_invariance(&params, &phi, 1e-10)?;
        let i = if n < 5 {
            format!("{:.3e}", check_intertwining(&params, n, 1e-10)?.residual)
        } else {
            "-".into()
        };
        println!(
            "{n:2}   {:.3e}    {:.3e}    {:.3e}    {i:>9}    {:.2e}",
            e.residual, f.residual, s.residual, chain.drift
        );
    }
    Ok(())
}
