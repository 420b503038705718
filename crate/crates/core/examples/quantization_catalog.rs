//! Coherent-state quantization of the classical observables in the catalog,
//! compared with the operators they should reproduce.

use ptcs::params::PtParams;
use ptcs::quantization::{check_identity, identity_test_pairs, IdentityCase};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> ptcs::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(nu, beta) in &[(0.0, 0.0), (0.25, 0.8), (1.5, 2.0)] {
        let params = PtParams::new(nu, beta)?;
        let pairs = identity_test_pairs(&params, &mut rng)?;
        println!("nu = {nu}, beta = {beta}");
        for case in IdentityCase::ALL {
            let r = check_identity(case, &params, &pairs, 1e-8)?;
            println!("  {:9} {:42} residual {:.2e}  {}", case.name(), case.operator_side(), r.residual, if r.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
