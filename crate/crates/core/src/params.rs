//! Physical parameters, potential, superpotential, spectrum and the closed-form
//! reference eigenfunctions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sgp::SgpState;

/// Length, mass and action scale of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Units {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "m")]
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            length: 1.0,
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

impl Units {
    pub fn new(length: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("length", length), ("mass", mass), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self { length, mass, hbar })
    }

    pub fn with_length(length: f64) -> Result<Self> {
        Self::new(length, 1.0, 1.0)
    }

    /// Zero-point energy of the infinite well, `hbar^2 pi^2 / (2 m L^2)`.
    pub fn e0(&self) -> f64 {
        self.hbar * self.hbar * PI * PI / (2.0 * self.mass * self.length * self.length)
    }

    /// `pi / L`.
    pub fn wavenumber(&self) -> f64 {
        PI / self.length
    }

    pub(crate) fn check_interior(&self, x: f64) -> Result<()> {
        if x > 0.0 && x < self.length {
            Ok(())
        } else {
            Err(Error::Domain { x, length: self.length })
        }
    }
}

/// Poschl-Teller configuration `(nu, beta)` together with its unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtParams {
    nu: f64,
    beta: f64,
    #[serde(flatten)]
    units: Units,
}

impl PtParams {
    /// Repulsive configuration with `nu >= 0`, `beta >= 0` in units `hbar = m = L = 1`.
    pub fn new(nu: f64, beta: f64) -> Result<Self> {
        Self::with_units(nu, beta, Units::default())
    }

    pub fn with_units(nu: f64, beta: f64, units: Units) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::param(format!("nu must be >= 0, got {nu}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be >= 0, got {beta}")));
        }
        Ok(Self { nu, beta, units })
    }

    /// Extended construction: `nu > -1` and any real `beta`.
    pub fn extended(nu: f64, beta: f64, units: Units) -> Result<Self> {
        if !(nu > -1.0 && nu.is_finite() && beta.is_finite()) {
            return Err(Error::param(format!("extended parameters need nu > -1, got nu = {nu}, beta = {beta}")));
        }
        Ok(Self { nu, beta, units })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn length(&self) -> f64 {
        self.units.length
    }

    pub fn mass(&self) -> f64 {
        self.units.mass
    }

    pub fn hbar(&self) -> f64 {
        self.units.hbar
    }

    pub fn e0(&self) -> f64 {
        self.units.e0()
    }

    /// Same configuration with `nu` replaced; no range check beyond `nu > -1`.
    pub(crate) fn with_nu(&self, nu: f64) -> Self {
        debug_assert!(nu > -1.0);
        Self { nu, ..*self }
    }

    /// Coefficients of `W` as a polynomial in `cot(pi x / L)`, ascending.
    pub(crate) fn superpotential_poly(&self) -> [f64; 2] {
        let k = self.hbar() * self.units.wavenumber();
        let a = self.nu + 1.0;
        [k * self.beta / a, -k * a]
    }

    /// Coefficients of `V` as a polynomial in `cot(pi x / L)`, ascending;
    /// uses `1 / sin^2 = 1 + cot^2`.
    pub(crate) fn potential_poly(&self) -> [f64; 3] {
        let e0 = self.e0();
        let c = e0 * self.nu * (self.nu + 1.0);
        [c, -2.0 * e0 * self.beta, c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub value: f64,
}

/// Poschl-Teller potential `e0 nu (nu+1) / sin^2(pi x/L) - 2 e0 beta cot(pi x/L)`.
pub fn potential(params: &PtParams, x: f64) -> Result<f64> {
    params.units.check_interior(x)?;
    let theta = params.units.wavenumber() * x;
    let e0 = params.e0();
    let s = theta.sin();
    Ok(e0 * params.nu * (params.nu + 1.0) / (s * s) - 2.0 * e0 * params.beta * theta.cos() / s)
}

/// Superpotential `-(hbar pi / L) ((nu+1) cot(pi x/L) - beta/(nu+1))`.
pub fn superpotential(params: &PtParams, x: f64) -> Result<f64> {
    params.units.check_interior(x)?;
    let theta = params.units.wavenumber() * x;
    Ok(superpotential_at(params.nu, params.beta, &params.units, 1.0 / theta.tan()))
}

/// `W_{nu,beta}` evaluated from a precomputed `cot(pi x / L)`.
pub(crate) fn superpotential_at(nu: f64, beta: f64, units: &Units, cot: f64) -> f64 {
    -units.hbar * units.wavenumber() * ((nu + 1.0) * cot - beta / (nu + 1.0))
}

fn level_index(nu: f64, n: usize) -> f64 {
    (nu + n as f64) + 1.0
}

/// `E_n = e0 ((n+nu+1)^2 - beta^2 / (n+nu+1)^2)`.
pub fn energy(params: &PtParams, n: usize) -> EnergyLevel {
    let k = level_index(params.nu, n);
    let k2 = k * k;
    EnergyLevel {
        n,
        value: params.e0() * (k2 - params.beta * params.beta / k2),
    }
}

/// `f_n = (E_n - E_0) / e0`.
pub fn f_seq(params: &PtParams, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let reduced = |k: f64| k * k - params.beta * params.beta / (k * k);
    reduced(level_index(params.nu, n)) - reduced(level_index(params.nu, 0))
}

/// Unit-norm ground state `sin^{nu+1}(pi x/L) exp(-beta pi x / (L (nu+1)))`, the
/// solution of `hbar phi' + W phi = 0`.
pub fn ground_state(params: &PtParams) -> Result<SgpState> {
    let a = params.nu + 1.0;
    let gamma = -params.beta * params.units.wavenumber() / a;
    SgpState::new(a, gamma.into(), vec![1.0.into()], params.length())?.normalized()
}

/// Gegenbauer polynomial `C_n^alpha(t)` by the three-term recurrence.
pub fn gegenbauer(n: usize, alpha: f64, t: f64) -> f64 {
    let mut c0 = 1.0;
    if n == 0 {
        return c0;
    }
    let mut c1 = 2.0 * alpha * t;
    for k in 2..=n {
        let kf = k as f64;
        let c2 = (2.0 * t * (kf + alpha - 1.0) * c1 - (kf + 2.0 * alpha - 2.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// Monomial coefficients of `C_n^alpha`, ascending, by the same recurrence on polynomials.
fn gegenbauer_coeffs(n: usize, alpha: f64) -> Vec<f64> {
    let mut c0 = vec![1.0];
    if n == 0 {
        return c0;
    }
    let mut c1 = vec![0.0, 2.0 * alpha];
    for k in 2..=n {
        let kf = k as f64;
        let mut c2 = vec![0.0; k + 1];
        for (j, &c) in c1.iter().enumerate() {
            c2[j + 1] += 2.0 * (kf + alpha - 1.0) * c / kf;
        }
        for (j, &c) in c0.iter().enumerate() {
            c2[j] -= (kf + 2.0 * alpha - 2.0) * c / kf;
        }
        c0 = c1;
        c1 = c2;
    }
    c1
}

fn binomial_row(m: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..m {
        let mut next = vec![1.0; row.len() + 1];
        for j in 1..row.len() {
            next[j] = row[j - 1] + row[j];
        }
        row = next;
    }
    row
}

/// Largest `n` accepted by [`gegenbauer_state`].
pub const GEGENBAUER_MAX_N: usize = 30;

/// Unit-norm `sin^{nu+1}(pi x/L) C_n^{nu+1}(cos(pi x/L))`, the `beta = 0` eigenfunctions.
///
/// `cos^j sin^{nu+1} = cot^j (1 + cot^2)^{(n-j)/2} sin^{nu+n+1}` and `n - j` is even
/// for every non-zero coefficient, so the result is an exact [`SgpState`].
pub fn gegenbauer_state(nu: f64, n: usize, length: f64) -> Result<SgpState> {
    if n > GEGENBAUER_MAX_N {
        return Err(Error::param(format!("gegenbauer_state supports n <= {GEGENBAUER_MAX_N}, got {n}")));
    }
    if !(nu > -1.0) {
        return Err(Error::param(format!("gegenbauer_state needs nu > -1, got {nu}")));
    }
    let mono = gegenbauer_coeffs(n, nu + 1.0);
    let mut coeffs = vec![0.0; n + 1];
    for (j, &a) in mono.iter().enumerate() {
        if (n - j) % 2 == 1 {
            debug_assert!(a == 0.0);
            continue;
        }
        for (i, b) in binomial_row((n - j) / 2).into_iter().enumerate() {
            coeffs[j + 2 * i] += a * b;
        }
    }
    let coeffs = coeffs.into_iter().map(Into::into).collect();
    SgpState::new(nu + n as f64 + 1.0, 0.0.into(), coeffs, length)?.normalized()
}
