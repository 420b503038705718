//! Exact sin-power x exponential x cot-polynomial states.
//!
//! A state is `sin^s(pi x/L) e^{gamma x} P(cot(pi x/L))` on `(0, L)`. The family is
//! closed under `d/dx`, multiplication by `W`, `V`, `1/sin^2` and `cot`, so the
//! ladder operators and the Hamiltonian act exactly on the coefficient list.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{integrate, Endpoints, QuadOptions};
use crate::params::PtParams;

/// Coefficients below this fraction of the largest contribution are dropped.
const TRIM_REL: f64 = 1e-14;

/// States closer than this (relative to `L`) to an endpoint overflow when `s < degree`.
const ENDPOINT_GUARD: f64 = 1e-12;

const INNER_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SgpState {
    s: f64,
    gamma: Complex64,
    coeffs: Vec<Complex64>,
    #[serde(rename = "L")]
    length: f64,
}

/// Accumulates polynomial coefficients together with the magnitude of every
/// contribution, so trimming is relative to the pre-cancellation scale.
struct PolyBuilder {
    val: Vec<Complex64>,
    mag: Vec<f64>,
}

impl PolyBuilder {
    fn new() -> Self {
        Self {
            val: Vec::new(),
            mag: Vec::new(),
        }
    }

    fn add(&mut self, j: usize, c: Complex64) {
        if j >= self.val.len() {
            self.val.resize(j + 1, Complex64::new(0.0, 0.0));
            self.mag.resize(j + 1, 0.0);
        }
        self.val[j] += c;
        self.mag[j] += c.norm();
    }

    fn finish(self) -> Vec<Complex64> {
        let scale = self.mag.iter().cloned().fold(0.0, f64::max);
        trim(self.val, scale)
    }
}

fn trim(mut coeffs: Vec<Complex64>, scale: f64) -> Vec<Complex64> {
    let cut = TRIM_REL * scale;
    for c in coeffs.iter_mut() {
        if c.norm() <= cut {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    if coeffs.is_empty() {
        coeffs.push(Complex64::new(0.0, 0.0));
    }
    coeffs
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() < 1e-12
}

impl SgpState {
    pub fn new(s: f64, gamma: Complex64, coeffs: Vec<Complex64>, length: f64) -> Result<Self> {
        if !(s > -0.5 && s.is_finite()) {
            return Err(Error::param(format!("sin exponent must exceed -1/2, got {s}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::param(format!("length must be positive, got {length}")));
        }
        if !(gamma.re.is_finite() && gamma.im.is_finite()) || coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::param("state coefficients must be finite"));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        Ok(Self {
            s,
            gamma,
            coeffs: trim(coeffs, scale),
            length,
        })
    }

    fn with_coeffs(&self, coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs,
            ..self.clone()
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].norm() == 0.0
    }

    /// Sine exponent of the most singular term, `s - degree`.
    pub fn min_exponent(&self) -> f64 {
        self.s - self.degree() as f64
    }

    fn k(&self) -> f64 {
        PI / self.length
    }

    fn sin_cos(&self, x: f64) -> (f64, f64) {
        if x <= 0.5 * self.length {
            let th = self.k() * x;
            (th.sin(), th.cos())
        } else {
            let th = self.k() * (self.length - x);
            (th.sin(), -th.cos())
        }
    }

    /// Unchecked evaluation in the mixed form `sum c_j cos^j sin^{s-j} e^{gamma x}`.
    pub(crate) fn eval_raw(&self, x: f64) -> Complex64 {
        let (sn, cs) = self.sin_cos(x);
        let d = self.degree();
        let mut r = self.coeffs[d];
        let mut snp = 1.0;
        for j in (0..d).rev() {
            snp *= sn;
            r = r * cs + self.coeffs[j] * snp;
        }
        let log_pref = self.gamma * x + (self.s - d as f64) * sn.ln();
        r * log_pref.exp()
    }

    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        if !(x > 0.0 && x < self.length) {
            return Err(Error::Domain { x, length: self.length });
        }
        if self.min_exponent() < 0.0 && x.min(self.length - x) < ENDPOINT_GUARD * self.length && !self.is_zero() {
            return Err(Error::Overflow { x });
        }
        let v = self.eval_raw(x);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow { x })
        }
    }

    /// Adds `factor * d/dx` of the polynomial part into `out`.
    fn push_derivative(&self, out: &mut PolyBuilder, factor: Complex64) {
        let k = self.k();
        for (j, &c) in self.coeffs.iter().enumerate() {
            let c = c * factor;
            out.add(j + 1, c * (self.s * k));
            out.add(j, c * self.gamma);
            if j > 0 {
                let jk = -(j as f64) * k;
                out.add(j - 1, c * jk);
                out.add(j + 1, c * jk);
            }
        }
    }

    fn push_product(&self, out: &mut PolyBuilder, poly: &[f64]) {
        for (j, &c) in self.coeffs.iter().enumerate() {
            for (i, &p) in poly.iter().enumerate() {
                out.add(i + j, c * p);
            }
        }
    }

    /// Exact derivative; `s` and `gamma` are unchanged, the degree rises by at most one.
    pub fn differentiate(&self) -> Self {
        let mut out = PolyBuilder::new();
        self.push_derivative(&mut out, Complex64::new(1.0, 0.0));
        self.with_coeffs(out.finish())
    }

    /// Multiply by a real polynomial in `cot(pi x / L)`.
    pub fn mul_cot_poly(&self, poly: &[f64]) -> Self {
        let mut out = PolyBuilder::new();
        self.push_product(&mut out, poly);
        self.with_coeffs(out.finish())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.with_coeffs(trim(self.coeffs.iter().map(|c| c * factor).collect(), 0.0))
    }

    fn same_family(&self, other: &Self) -> Result<()> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if close(self.s, other.s)
            && close(self.gamma.re, other.gamma.re)
            && close(self.gamma.im, other.gamma.im)
            && close(self.length, other.length)
        {
            Ok(())
        } else {
            Err(Error::param("states differ in sin exponent, exponential rate or length"))
        }
    }

    /// `a * self + b * other` for states sharing `s`, `gamma` and `L`.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Result<Self> {
        self.same_family(other)?;
        let mut out = PolyBuilder::new();
        for (j, &c) in self.coeffs.iter().enumerate() {
            out.add(j, c * a);
        }
        for (j, &c) in other.coeffs.iter().enumerate() {
            out.add(j, c * b);
        }
        Ok(self.with_coeffs(out.finish()))
    }

    /// Multiply by `sin^ds(pi x/L) e^{dgamma x}`.
    pub fn shifted(&self, ds: f64, dgamma: Complex64) -> Result<Self> {
        Self::new(self.s + ds, self.gamma + dgamma, self.coeffs.clone(), self.length)
    }

    pub fn norm(&self) -> Result<f64> {
        Ok(inner_product(self, self)?.re.max(0.0).sqrt())
    }

    /// Rescaled to unit L2 norm by quadrature.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm()?;
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param("cannot normalize a zero or non-normalizable state"));
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }

    /// Multiply by the global phase that makes the leading `cot` coefficient
    /// real and positive, i.e. the state positive just right of `x = 0`.
    pub fn phase_fixed(&self) -> Self {
        let lead = self.coeffs[self.degree()];
        if lead.norm() == 0.0 {
            return self.clone();
        }
        self.scale(lead.conj() / lead.norm())
    }

    /// `L2` norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_length(params: &PtParams, state: &SgpState) -> Result<()> {
    let l = params.length();
    if (l - state.length).abs() <= 1e-12 * l {
        Ok(())
    } else {
        Err(Error::param(format!("state length {} does not match parameter length {l}", state.length)))
    }
}

fn ladder(params: &PtParams, state: &SgpState, sign: f64) -> Result<SgpState> {
    check_length(params, state)?;
    let mut out = PolyBuilder::new();
    state.push_product(&mut out, &params.superpotential_poly());
    state.push_derivative(&mut out, Complex64::new(sign * params.hbar(), 0.0));
    Ok(state.with_coeffs(out.finish()))
}

/// `A = W + hbar d/dx`.
pub fn apply_lowering(params: &PtParams, state: &SgpState) -> Result<SgpState> {
    ladder(params, state, 1.0)
}

/// `A^dagger = W - hbar d/dx`.
pub fn apply_raising(params: &PtParams, state: &SgpState) -> Result<SgpState> {
    ladder(params, state, -1.0)
}

/// `tau = -hbar^2/(2m) d^2/dx^2 + V`.
pub fn apply_hamiltonian(params: &PtParams, state: &SgpState) -> Result<SgpState> {
    check_length(params, state)?;
    let mut first = PolyBuilder::new();
    state.push_derivative(&mut first, Complex64::new(1.0, 0.0));
    let d1 = state.with_coeffs(first.val);
    let mut out = PolyBuilder::new();
    let kinetic = -params.hbar() * params.hbar() / (2.0 * params.mass());
    d1.push_derivative(&mut out, Complex64::new(kinetic, 0.0));
    state.push_product(&mut out, &params.potential_poly());
    Ok(state.with_coeffs(out.finish()))
}

fn pair_endpoints(a: &SgpState, b: &SgpState) -> Result<Endpoints> {
    if (a.length - b.length).abs() > 1e-12 * a.length {
        return Err(Error::param("inner product of states on different intervals"));
    }
    let min_exp = a.min_exponent() + b.min_exponent();
    if min_exp <= -1.0 {
        return Err(Error::Integrability { exponent: min_exp });
    }
    let regular = is_integer(a.s + b.s) && min_exp >= 0.0;
    Ok(if regular { Endpoints::Regular } else { Endpoints::Singular })
}

/// `int_0^L conj(a) b dx` by quadrature.
pub fn inner_product(a: &SgpState, b: &SgpState) -> Result<Complex64> {
    let endpoints = pair_endpoints(a, b)?;
    let opts = QuadOptions::new(0.0, INNER_REL_TOL, endpoints.rule());
    let r = integrate(|x| a.eval_raw(x).conj() * b.eval_raw(x), 0.0, a.length, &opts)?;
    Ok(r.value)
}

/// `|| a - b ||`. States of one family are subtracted exactly first; otherwise
/// the pointwise difference is integrated with an absolute floor set by the
/// two norms.
pub fn distance(a: &SgpState, b: &SgpState) -> Result<f64> {
    if a.same_family(b).is_ok() {
        return a.combine(Complex64::new(1.0, 0.0), b, Complex64::new(-1.0, 0.0))?.norm();
    }
    let endpoints = pair_endpoints(a, b)?;
    let scale = a.norm()?.powi(2) + b.norm()?.powi(2);
    let opts = QuadOptions::new(1e-26 * scale, 1e-10, endpoints.rule());
    let r = integrate(
        |x| Complex64::new((a.eval_raw(x) - b.eval_raw(x)).norm_sqr(), 0.0),
        0.0,
        a.length,
        &opts,
    )?;
    Ok(r.value.re.max(0.0).sqrt())
}

/// `min over unit phases c of || a - c b ||` together with the optimal phase.
pub fn distance_up_to_phase(a: &SgpState, b: &SgpState) -> Result<(f64, Complex64)> {
    let overlap = inner_product(b, a)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok((distance(a, &b.scale(phase))?, phase))
}

/// Random state with the given exponent and degree; coefficients and the
/// exponential rate are drawn uniformly. Square-integrable draws are returned
/// with unit norm, the others as drawn.
pub fn random_state<R: Rng + ?Sized>(
    rng: &mut R,
    s: f64,
    degree: usize,
    length: f64,
    max_rate: f64,
) -> Result<SgpState> {
    let mut coeffs: Vec<Complex64> = (0..=degree)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    if let Some(lead) = coeffs.last_mut() {
        if lead.norm() < 0.1 {
            *lead += Complex64::new(0.5, 0.0);
        }
    }
    let gamma = Complex64::new(rng.gen_range(-max_rate..max_rate), rng.gen_range(-max_rate..max_rate)) / length;
    let st = SgpState::new(s, gamma, coeffs, length)?;
    if 2.0 * st.min_exponent() > -1.0 {
        st.normalized()
    } else {
        Ok(st)
    }
}
