//! Complex log-Gamma, the closed form of int_0^1 sin^{2nu+2}(pi x) e^{z x} dx,
//! and the Fourier integral giving 1/sin^{2nu+2}(pi x).

use num_complex::Complex64;
use ptcs::coherent::big_f;
use ptcs::frames::{big_f_quadrature, check_fourier_identity};
use ptcs::numerics::{integrate_interval, log_gamma};

fn main() -> ptcs::Result<()> {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(3.0, 4.0), Complex64::new(-2.5, 0.1)] {
        println!("ln Gamma({z}) = {:.15}", log_gamma(z)?);
    }
    let half = integrate_interval(|x| Complex64::new((std::f64::consts::PI * x).sin().powi(2), 0.0), 1e-12)?;
    println!("int sin^2(pi x) = {:.15}", half.value.re);
    for (nu, z) in [(0.0, Complex64::new(2.0, 0.0)), (1.5, Complex64::new(-4.0, 9.0))] {
        println!("F_{nu}({z}): closed {:.14}, quadrature {:.14}", big_f(nu, z)?, big_f_quadrature(nu, z)?);
    }
    for (x, nu) in [(0.5, 0.0), (0.25, 0.0), (0.1, 1.0)] {
        let r = check_fourier_identity(nu, x, 1e-8)?;
        println!("x = {x}, nu = {nu}: integral {:.12}, 1/sin^(2nu+2) = {:.12}", r.lhs.unwrap_or_default().re, r.rhs.unwrap_or_default().re);
    }
    Ok(())
}
