//! Complex log-Gamma via upward recurrence and the Stirling series.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_{2k} / (2k (2k - 1))` for k = 1..=10.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Real part threshold above which the Stirling series is summed directly.
const SHIFT_TARGET: f64 = 12.0;

/// Below this real part, non-real arguments go through the reflection formula
/// instead of a long upward recurrence.
const REFLECT_BELOW: f64 = -40.0;

const POLE_RADIUS: f64 = 1e-12;

fn stirling(w: Complex64) -> Complex64 {
    let half_ln_2pi = 0.5 * (2.0 * PI).ln();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(STIRLING[9], 0.0);
    for &c in STIRLING[..9].iter().rev() {
        series = series * inv2 + c;
    }
    (w - 0.5) * w.ln() - w + half_ln_2pi + series * inv
}

/// `ln sin(pi z)` for `Im z >= 0`, stable when the imaginary part is large.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if PI * z.im < 20.0 {
        return (z * PI).sin().ln();
    }
    let i = Complex64::i();
    let e2 = (i * 2.0 * PI * z).exp();
    -i * PI * z + Complex64::new(0.5f64.ln(), PI / 2.0) + (Complex64::new(1.0, 0.0) - e2).ln()
}

fn near_pole(z: Complex64) -> bool {
    z.im.abs() < POLE_RADIUS && z.re < POLE_RADIUS && (z.re - z.re.round()).abs() < POLE_RADIUS
}

/// Principal-branch `ln Gamma(z)`.
///
/// Non-real arguments use the recurrence `ln Gamma(z) = ln Gamma(z + m) - sum ln(z + k)`
/// with principal logarithms, which keeps the result continuous off the negative
/// real axis. Arguments in the lower half plane are obtained by conjugation, so
/// `log_gamma(conj z) == conj(log_gamma(z))` holds exactly.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::param(format!("log_gamma argument not finite: {z}")));
    }
    if near_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.im < 0.0 {
        return log_gamma(z.conj()).map(|v| v.conj());
    }
    if z.im == 0.0 && z.re < 0.5 {
        // Gamma(x) = pi / (sin(pi x) Gamma(1 - x)) on the real axis.
        let s = (PI * z.re).sin();
        let rest = log_gamma(Complex64::new(1.0 - z.re, 0.0))?.re;
        let im = if s < 0.0 { PI } else { 0.0 };
        return Ok(Complex64::new((PI / s.abs()).ln() - rest, im));
    }
    if z.re < REFLECT_BELOW {
        let one = Complex64::new(1.0, 0.0);
        let reflected = log_gamma(one - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }

    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_TARGET {
        shift += w.ln();
        w += 1.0;
    }
    Ok(stirling(w) - shift)
}

/// `ln |Gamma(b + i y)| + pi |y| / 2` for `b > 0`.
///
/// The exponential decay of `|Gamma|` along vertical lines is removed
/// analytically, so the result stays accurate for `|y|` far beyond the range
/// where `log_gamma(z).re + pi |y| / 2` would cancel.
pub fn ln_gamma_modulus_scaled(b: f64, y: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite() && y.is_finite()) {
        return Err(Error::param(format!("ln_gamma_modulus_scaled needs b > 0, got b = {b}, y = {y}")));
    }
    let y = y.abs();
    let mut w = b;
    let mut shift = 0.0;
    while w < SHIFT_TARGET {
        shift += w.hypot(y).ln();
        w += 1.0;
    }
    let z = Complex64::new(w, y);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(STIRLING[9], 0.0);
    for &c in STIRLING[..9].iter().rev() {
        series = series * inv2 + c;
    }
    // Re[(z - 1/2) ln z] = (w - 1/2) ln|z| - y arg z, and arg z = pi/2 - atan2(w, y).
    let head = (w - 0.5) * z.norm().ln() + y * w.atan2(y) - w + 0.5 * (2.0 * PI).ln();
    Ok(head + (series * inv).re - shift)
}

/// `Gamma(z)` as `exp(ln Gamma(z))`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|v| v.exp())
}

/// `ln |Gamma(x)|` for real `x`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    log_gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}
