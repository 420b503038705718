//! The large-`L` harmonic limit at `beta = 0`, in coordinates centered on the
//! interval: `x in (-L/2, L/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coherent::{coherent_state, PhasePoint};
use crate::error::{Error, Result};
use crate::numerics::{integrate, ln_gamma_real, Endpoints, QuadOptions};
use crate::output::CsvTable;
use crate::params::Units;

/// Points with `|q| > DEGRADED_FRACTION * L` are outside the `|q| << L` regime.
pub const DEGRADED_FRACTION: f64 = 0.1;

/// Maps centered coordinates to the original interval `(0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centered {
    pub length: f64,
}

impl Centered {
    pub fn to_original(&self, x: f64) -> f64 {
        x + 0.5 * self.length
    }

    pub fn from_original(&self, x: f64) -> f64 {
        x - 0.5 * self.length
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() < 0.5 * self.length
    }
}

/// `amplitude * exp(-x^2/(2 w^2) + center x / w^2 + i momentum x / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianApprox {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub amplitude: f64,
    pub hbar: f64,
}

impl GaussianApprox {
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let w2 = self.width * self.width;
        let re = -x * x / (2.0 * w2) + self.center * x / w2;
        Complex64::from_polar(self.amplitude * re.exp(), self.momentum * x / self.hbar)
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > -1.0 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("the harmonic limit needs nu > -1, got {nu}")))
    }
}

fn check_centered(units: &Units, point: PhasePoint) -> Result<()> {
    if (Centered { length: units.length }).contains(point.q) && point.p.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            x: point.q,
            length: units.length,
        })
    }
}

/// `2^{nu+1} Gamma(nu+2) / (sqrt(L) sqrt(Gamma(2nu+3)))`, the large-`L` value of `N_nu(q)`.
pub fn limit_amplitude(nu: f64, length: f64) -> Result<f64> {
    check_nu(nu)?;
    let ln = (nu + 1.0) * 2f64.ln() + ln_gamma_real(nu + 2.0)? - 0.5 * length.ln() - 0.5 * ln_gamma_real(2.0 * nu + 3.0)?;
    Ok(ln.exp())
}

/// Gaussian read off the quadratic expansion of `ln eta_{q,p}` in centered
/// coordinates: `width^2 = L^2/((nu+1) pi^2)`, centered at `q`.
pub fn harmonic_approx(nu: f64, units: &Units, point: PhasePoint) -> Result<GaussianApprox> {
    check_centered(units, point)?;
    Ok(GaussianApprox {
        center: point.q,
        width: units.length / (PI * (nu + 1.0).sqrt()),
        momentum: point.p,
        amplitude: limit_amplitude(nu, units.length)?,
        hbar: units.hbar,
    })
}

/// `W_nu(x) = (hbar pi/L)(nu+1) tan(pi x/L)` in centered coordinates.
pub fn superpotential_centered(nu: f64, units: &Units, x: f64) -> f64 {
    units.hbar * PI / units.length * (nu + 1.0) * (PI * x / units.length).tan()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitFidelity {
    #[serde(rename = "L")]
    pub length: f64,
    pub nu: f64,
    pub q: f64,
    pub p: f64,
    pub fidelity: f64,
    /// Set when `|q| > L / 10`, where the Gaussian is not expected to fit.
    pub degraded: bool,
}

/// `int (-L/2, L/2) conj(a) b` over the unit cell `u = x/L + 1/2` with the
/// common plane wave `e^{i p x/hbar}` already cancelled.
fn centered_integral<F>(length: f64, f: F) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    let opts = QuadOptions::new(0.0, 1e-13, Endpoints::Singular.rule());
    let r = integrate(|u| Complex64::new(f((u - 0.5) * length, u.min(1.0 - u)), 0.0), 0.0, 1.0, &opts)?;
    Ok(r.value.re * length)
}

/// `|<eta_{q,p}, g>|^2 / (||eta||^2 ||g||^2)` with `g` the harmonic
/// approximation restricted to the interval.
///
/// Both states carry the same factor `e^{i p x/hbar}`, so the fidelity does
/// not depend on `p`.
pub fn limit_fidelity(nu: f64, units: &Units, point: PhasePoint) -> Result<LimitFidelity> {
    check_nu(nu)?;
    check_centered(units, point)?;
    let l = units.length;
    let frame = Centered { length: l };
    let eta = coherent_state(nu, units, PhasePoint::new(frame.to_original(point.q), 0.0))?;
    let g = harmonic_approx(nu, units, PhasePoint::new(point.q, 0.0))?;
    let rate = eta.rate().re;
    // ln |eta| relative to its value at x = 0, sin measured from the nearer end
    let ln_eta = |x: f64, d: f64| (nu + 1.0) * (PI * d).sin().ln() + rate * x;
    let ln_g = |x: f64| {
        let w2 = g.width * g.width;
        -x * x / (2.0 * w2) + g.center * x / w2
    };
    let shift_eta = ln_eta(point.q, 0.5 - point.q.abs() / l);
    let shift_g = ln_g(point.q);
    let cross = centered_integral(l, |x, d| (ln_eta(x, d) - shift_eta + ln_g(x) - shift_g).exp())?;
    let n_eta = centered_integral(l, |x, d| (2.0 * (ln_eta(x, d) - shift_eta)).exp())?;
    let n_g = centered_integral(l, |x, _| (2.0 * (ln_g(x) - shift_g)).exp())?;
    let fidelity = (cross * cross / (n_eta * n_g)).min(1.0);
    Ok(LimitFidelity {
        length: l,
        nu,
        q: point.q,
        p: point.p,
        fidelity,
        degraded: point.q.abs() > DEGRADED_FRACTION * l,
    })
}

/// `|<eta_{q,p}, e^{i p x/hbar}>|^2 / (||eta||^2 L)`, the far-field comparison
/// with a plane wave on the interval. Reported, not asserted.
pub fn plane_wave_fidelity(nu: f64, units: &Units, point: PhasePoint) -> Result<f64> {
    check_nu(nu)?;
    check_centered(units, point)?;
    let l = units.length;
    let eta = coherent_state(nu, units, PhasePoint::new(Centered { length: l }.to_original(point.q), 0.0))?;
    let rate = eta.rate().re;
    let ln_eta = |x: f64, d: f64| (nu + 1.0) * (PI * d).sin().ln() + rate * x;
    let shift = ln_eta(point.q, 0.5 - point.q.abs() / l);
    let cross = centered_integral(l, |x, d| (ln_eta(x, d) - shift).exp())?;
    let norm = centered_integral(l, |x, d| (2.0 * (ln_eta(x, d) - shift)).exp())?;
    Ok((cross * cross / (norm * l)).min(1.0))
}

/// Fidelity for each `L` of a strictly ascending list, in list order.
pub fn limit_sweep(nu: f64, lengths: &[f64], point: PhasePoint, mass: f64, hbar: f64) -> Result<Vec<LimitFidelity>> {
    if lengths.is_empty() {
        return Err(Error::param("the length list is empty"));
    }
    if lengths.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("lengths must be strictly ascending"));
    }
    lengths
        .par_iter()
        .map(|&l| limit_fidelity(nu, &Units::new(l, mass, hbar)?, point))
        .collect()
}

pub fn sweep_csv(rows: &[LimitFidelity]) -> CsvTable {
    let mut t = CsvTable::new(&["L", "nu", "q", "p", "fidelity"]);
    for r in rows {
        t.push(&[r.length, r.nu, r.q, r.p, r.fidelity]);
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearizationFit {
    /// Largest `|W_nu(x) - (nu+1) hbar pi^2 x/L^2| L^4 / |x|^3` over the samples.
    pub c_fit: f64,
    /// Leading Taylor coefficient `(nu+1) hbar pi^4 / 3`.
    pub c_leading: f64,
    pub samples: usize,
}

/// Fits `C` in `|W_nu(x) - (nu+1) hbar pi^2 x / L^2| <= C |x|^3 / L^4` on `0 < |x| <= L/10`.
pub fn linearization_fit(nu: f64, units: &Units, samples: usize) -> Result<LinearizationFit> {
    check_nu(nu)?;
    if samples == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let l = units.length;
    let slope = (nu + 1.0) * units.hbar * PI * PI / (l * l);
    let c_fit = (1..=samples)
        .flat_map(|i| {
            let x = DEGRADED_FRACTION * l * i as f64 / samples as f64;
            [x, -x]
        })
        .map(|x| (superpotential_centered(nu, units, x) - slope * x).abs() * l.powi(4) / x.abs().powi(3))
        .fold(0.0, f64::max);
    Ok(LinearizationFit {
        c_fit,
        c_leading: (nu + 1.0) * units.hbar * PI.powi(4) / 3.0,
        samples: 2 * samples,
    })
}
