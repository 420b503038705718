//! Coherent states `eta_{q,p}`, their closed-form normalization, overlaps and
//! lowering symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma_modulus_scaled, ln_gamma_real, log_gamma};
use crate::params::{energy, superpotential_at, PtParams, Units};
use crate::report::VerificationReport;
use crate::sgp::{apply_hamiltonian, apply_lowering, inner_product, SgpState};

/// A point of the phase strip `(0, L) x R`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    fn check(&self, length: f64) -> Result<()> {
        if self.q > 0.0 && self.q < length && self.p.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { x: self.q, length })
        }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if nu > -1.5 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("nu must exceed -3/2, got {nu}")))
    }
}

/// `ln F_nu(z)`, or `None` where `F_nu` vanishes (a Gamma pole in the denominator).
pub fn ln_big_f(nu: f64, z: Complex64) -> Result<Option<Complex64>> {
    check_nu(nu)?;
    let shift = Complex64::new(0.0, 1.0) * z / (2.0 * PI);
    let denom = |w: Complex64| match log_gamma(w) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Pole { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let (Some(g1), Some(g2)) = (denom(nu + 2.0 + shift)?, denom(nu + 2.0 - shift)?) else {
        return Ok(None);
    };
    let num = ln_gamma_real(2.0 * nu + 3.0)? - (nu + 1.0) * 4f64.ln();
    Ok(Some(z / 2.0 + num - g1 - g2))
}

/// `F_nu(z) = int_0^1 sin^{2nu+2}(pi x) e^{z x} dx` in closed form.
pub fn big_f(nu: f64, z: Complex64) -> Result<Complex64> {
    Ok(ln_big_f(nu, z)?.map_or(Complex64::new(0.0, 0.0), |v| v.exp()))
}

/// `lambda_q = -cot(pi q / L)`.
pub fn lambda_q(length: f64, q: f64) -> f64 {
    if q <= 0.5 * length {
        -1.0 / (PI * q / length).tan()
    } else {
        1.0 / (PI * (length - q) / length).tan()
    }
}

/// `ln N_nu(q)`.
pub fn ln_normalization(nu: f64, length: f64, q: f64) -> Result<f64> {
    check_nu(nu)?;
    PhasePoint::new(q, 0.0).check(length)?;
    let a = (nu + 1.0) * lambda_q(length, q);
    // ln|Gamma| - pi a / 2 = scaled - pi (|a| + a) / 2, exact zero cancellation for a < 0
    let scaled = ln_gamma_modulus_scaled(nu + 2.0, a)?;
    let decay = if a > 0.0 { PI * a } else { 0.0 };
    Ok((nu + 1.0) * 2f64.ln() + scaled - decay - 0.5 * length.ln() - 0.5 * ln_gamma_real(2.0 * nu + 3.0)?)
}

/// `N_nu(q) = 2^{nu+1} |Gamma(nu+2+i(nu+1)lambda_q)| e^{-pi(nu+1)lambda_q/2} / (sqrt(L) sqrt(Gamma(2nu+3)))`.
pub fn normalization(nu: f64, length: f64, q: f64) -> Result<f64> {
    ln_normalization(nu, length, q).map(f64::exp)
}

/// `1 / sqrt(L F_nu(2 W_{nu,0}(q) L / hbar))`, the second closed form of `N_nu(q)`.
pub fn normalization_via_f(nu: f64, length: f64, q: f64) -> Result<f64> {
    PhasePoint::new(q, 0.0).check(length)?;
    let z = Complex64::new(2.0 * PI * (nu + 1.0) * lambda_q(length, q), 0.0);
    let lf = ln_big_f(nu, z)?.ok_or_else(|| Error::param("F vanishes on the real axis"))?;
    Ok((-0.5 * (lf.re + length.ln())).exp())
}

/// `W_{nu,0}(q)`, which fixes the exponential rate of `eta_{q,p}`.
pub fn w0(nu: f64, units: &Units, q: f64) -> f64 {
    superpotential_at(nu, 0.0, units, 1.0 / (PI * q / units.length).tan())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentState {
    pub nu: f64,
    #[serde(rename = "L")]
    pub length: f64,
    pub hbar: f64,
    pub point: PhasePoint,
    pub norm_const: f64,
    pub body: SgpState,
}

impl CoherentState {
    /// `(W_{nu,0}(q) + i p) / hbar`.
    pub fn rate(&self) -> Complex64 {
        self.body.gamma()
    }

    /// Pointwise value evaluated in log space, which stays finite where the
    /// stored body would over- or underflow.
    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        if !(x > 0.0 && x < self.length) {
            return Err(Error::Domain { x, length: self.length });
        }
        let th = PI * x.min(self.length - x) / self.length;
        let log = self.rate() * x + self.norm_const.ln() + (self.nu + 1.0) * th.sin().ln();
        Ok(log.exp())
    }
}

/// `eta_{q,p} = N_nu(q) sin^{nu+1}(pi x/L) exp((W_{nu,0}(q) + i p) x / hbar)`.
pub fn coherent_state(nu: f64, units: &Units, point: PhasePoint) -> Result<CoherentState> {
    check_nu(nu)?;
    point.check(units.length)?;
    let ln_n = ln_normalization(nu, units.length, point.q)?;
    let norm_const = ln_n.exp();
    if !(norm_const.is_finite() && norm_const > 0.0) {
        return Err(Error::Overflow { x: point.q });
    }
    let rate = Complex64::new(w0(nu, units, point.q), point.p) / units.hbar;
    let body = SgpState::new(nu + 1.0, rate, vec![Complex64::new(norm_const, 0.0)], units.length)?;
    Ok(CoherentState {
        nu,
        length: units.length,
        hbar: units.hbar,
        point,
        norm_const,
        body,
    })
}

fn same_frame(a: &CoherentState, b: &CoherentState) -> Result<()> {
    if (a.length - b.length).abs() > 1e-12 * a.length || (a.hbar - b.hbar).abs() > 1e-12 * a.hbar {
        return Err(Error::param("coherent states live in different unit systems"));
    }
    Ok(())
}

/// `<a, b> = L N_nu(q) N_nu'(q') F_{(nu+nu')/2}(L alpha / hbar)` with
/// `alpha = W_{nu,0}(q) + W_{nu',0}(q') + i (p' - p)`.
pub fn overlap(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    same_frame(a, b)?;
    let alpha = a.rate().conj() + b.rate();
    let mu = 0.5 * (a.nu + b.nu);
    match ln_big_f(mu, alpha * a.length)? {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(lf) => Ok((lf + a.norm_const.ln() + b.norm_const.ln() + a.length.ln()).exp()),
    }
}

/// Overlap by direct quadrature of the two bodies, the oracle for [`overlap`].
pub fn overlap_quadrature(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    same_frame(a, b)?;
    inner_product(&a.body, &b.body)
}

pub fn check_overlap(a: &CoherentState, b: &CoherentState, tol: f64) -> Result<VerificationReport> {
    let closed = overlap(a, b)?;
    let quad = overlap_quadrature(a, b)?;
    Ok(VerificationReport::compare("overlap", closed, quad, tol)
        .input("nu", a.nu)
        .input("nu_prime", b.nu)
        .input("q", a.point.q)
        .input("p", a.point.p)
        .input("q_prime", b.point.q)
        .input("p_prime", b.point.p)
        .note("lhs: closed form, rhs: quadrature"))
}

/// `|| A_{nu,beta} eta - (W_{nu,beta}(q) + i p) eta ||`.
pub fn check_eigenvector(params: &PtParams, point: PhasePoint, tol: f64) -> Result<VerificationReport> {
    let cs = coherent_state(params.nu(), &params.units(), point)?;
    let z = lowering_symbol_a(params, point)?;
    let image = apply_lowering(params, &cs.body)?;
    let diff = image.combine(Complex64::new(1.0, 0.0), &cs.body, -z)?;
    Ok(VerificationReport::new("cs_eigenvector", diff.norm()?, tol)
        .with_params(*params)
        .input("q", point.q)
        .input("p", point.p))
}

/// `W_{nu,beta}(q) + i p`.
pub fn lowering_symbol_a(params: &PtParams, point: PhasePoint) -> Result<Complex64> {
    point.check(params.length())?;
    let cot = 1.0 / (PI * point.q / params.length()).tan();
    Ok(Complex64::new(superpotential_at(params.nu(), params.beta(), &params.units(), cot), point.p))
}

fn sin_q(length: f64, q: f64) -> f64 {
    (PI * q.min(length - q) / length).sin()
}

/// `p^2/2m + e0 (nu+1)^2 / sin^2(pi q/L) - 2 e0 beta cot(pi q/L)`.
pub fn lowering_symbol_h(params: &PtParams, point: PhasePoint) -> Result<f64> {
    point.check(params.length())?;
    let s = sin_q(params.length(), point.q);
    let cot = 1.0 / (PI * point.q / params.length()).tan();
    let e0 = params.e0();
    let a = params.nu() + 1.0;
    Ok(point.p * point.p / (2.0 * params.mass()) + e0 * a * a / (s * s) - 2.0 * e0 * params.beta() * cot)
}

fn check_low_range(nu: f64) -> Result<()> {
    if nu > -0.5 && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("the 1/sin^2 lowering symbols need nu > -1/2, got {nu}")))
    }
}

/// `(2nu+2)/(2nu+1) / sin^2(pi q/L)`.
pub fn lowering_symbol_invsin2(nu: f64, length: f64, point: PhasePoint) -> Result<f64> {
    check_low_range(nu)?;
    point.check(length)?;
    let s = sin_q(length, point.q);
    Ok((2.0 * nu + 2.0) / (2.0 * nu + 1.0) / (s * s))
}

/// `p^2/2m + e0 (nu+1)^2 / ((2nu+1) sin^2(pi q/L))`.
pub fn lowering_symbol_kinetic(params: &PtParams, point: PhasePoint) -> Result<f64> {
    let nu = params.nu();
    check_low_range(nu)?;
    point.check(params.length())?;
    let s = sin_q(params.length(), point.q);
    let a = nu + 1.0;
    Ok(point.p * point.p / (2.0 * params.mass()) + params.e0() * a * a / ((2.0 * nu + 1.0) * s * s))
}

/// Quadrature expectations `<eta, O eta>` for the four symbol operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolExpectations {
    pub lowering: Complex64,
    pub hamiltonian: f64,
    pub invsin2: f64,
    pub kinetic: f64,
}

pub fn symbol_expectations(params: &PtParams, point: PhasePoint) -> Result<SymbolExpectations> {
    let cs = coherent_state(params.nu(), &params.units(), point)?;
    let eta = &cs.body;
    let lowering = inner_product(eta, &apply_lowering(params, eta)?)?;
    let hamiltonian = inner_product(eta, &apply_hamiltonian(params, eta)?)?.re;
    let invsin2 = inner_product(eta, &eta.mul_cot_poly(&[1.0, 0.0, 1.0]))?.re;
    let d = eta.differentiate();
    let kinetic = params.hbar() * params.hbar() / (2.0 * params.mass()) * inner_product(&d, &d)?.re;
    Ok(SymbolExpectations {
        lowering,
        hamiltonian,
        invsin2,
        kinetic,
    })
}

/// Compares the four closed-form lowering symbols with quadrature expectations,
/// relative to the larger magnitude (absolute below magnitude 1).
pub fn check_symbols(params: &PtParams, point: PhasePoint, tol: f64) -> Result<Vec<VerificationReport>> {
    let ex = symbol_expectations(params, point)?;
    let rel = |name: &str, closed: Complex64, quad: Complex64| {
        let scale = closed.norm().max(quad.norm()).max(1.0);
        VerificationReport::new(name, (closed - quad).norm() / scale, tol)
            .with_sides(closed, quad)
            .with_params(*params)
            .input("q", point.q)
            .input("p", point.p)
            .note("lhs: closed-form symbol, rhs: <eta, O eta> by quadrature; residual relative to max(|lhs|, |rhs|, 1)")
    };
    let mut out = vec![
        rel("low1_A", lowering_symbol_a(params, point)?, ex.lowering),
        rel("low1_H", lowering_symbol_h(params, point)?.into(), ex.hamiltonian.into()),
    ];
    if params.nu() > -0.5 {
        let inv = lowering_symbol_invsin2(params.nu(), params.length(), point)?;
        out.push(rel("low2_invsin2", inv.into(), ex.invsin2.into()));
        let kin = lowering_symbol_kinetic(params, point)?;
        out.push(rel("low3_kinetic", kin.into(), ex.kinetic.into()));
    }
    Ok(out)
}

/// `E0` is a lower bound of the H symbol (variational bound).
pub fn ground_energy(params: &PtParams) -> f64 {
    energy(params, 0).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate, Endpoints, QuadOptions};
    use crate::params::ground_state;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit(nu: f64, beta: f64) -> PtParams {
        PtParams::new(nu, beta).unwrap()
    }

    fn f_quadrature(nu: f64, z: Complex64) -> Complex64 {
        let opts = QuadOptions::new(0.0, 1e-14, Endpoints::Singular.rule());
        integrate(|x| (z * x).exp() * (PI * x.min(1.0 - x)).sin().powf(2.0 * nu + 2.0), 0.0, 1.0, &opts)
            .unwrap()
            .value
    }

    #[test]
    fn big_f_examples() {
        assert!((big_f(0.0, c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
        assert!((big_f(1.0, c(0.0, 0.0)).unwrap() - c(0.375, 0.0)).norm() < 1e-14);
        let e2 = 2f64.exp();
        let expect = (e2 - 1.0) * PI * PI / (4.0 * (1.0 + PI * PI));
        assert!((big_f(0.0, c(2.0, 0.0)).unwrap().re - expect).abs() < 1e-13);
        assert!((big_f(0.0, c(0.0, 2.0 * PI)).unwrap() - c(-0.25, 0.0)).norm() < 1e-14);
        assert!(big_f(-1.5, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn big_f_matches_quadrature_on_grid() {
        for &nu in &[0.0, 0.5, 1.0, 2.5] {
            for &re in &[-20.0, -9.5, 0.0, 7.25, 20.0] {
                for &im in &[-20.0, -6.5, 0.0, 3.7, 17.0] {
                    let z = c(re, im);
                    let closed = big_f(nu, z).unwrap();
                    let quad = f_quadrature(nu, z);
                    assert!((closed - quad).norm() <= 1e-11 * quad.norm(), "nu = {nu}, z = {z}: {closed} vs {quad}");
                }
            }
        }
    }

    #[test]
    fn big_f_zeros_are_exact() {
        // sin^2 against e^{4 pi i x} integrates to zero
        assert_eq!(big_f(0.0, c(0.0, 4.0 * PI)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization(0.0, 1.0, 0.5).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        assert!((normalization(1.0, 1.0, 0.5).unwrap() - 8.0 / 24f64.sqrt()).abs() < 1e-14);
        assert!(normalization(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalization_forms_agree() {
        for &nu in &[0.0, 0.5, 1.0, 2.5] {
            for i in 1..20 {
                let q = 0.05 * i as f64;
                let a = normalization(nu, 1.0, q).unwrap();
                let b = normalization_via_f(nu, 1.0, q).unwrap();
                assert!((a - b).abs() < 1e-11 * a, "nu = {nu}, q = {q}: {a} vs {b}");
            }
        }
        // quadrature oracle at q = 1/4
        let n = normalization(0.0, 1.0, 0.25).unwrap();
        let z = c(2.0 * PI * lambda_q(1.0, 0.25), 0.0);
        let oracle = 1.0 / f_quadrature(0.0, z).re.sqrt();
        assert!((n - oracle).abs() < 1e-11 * n);
    }

    #[test]
    fn midpoint_state_is_infinite_well_ground_state() {
        let cs = coherent_state(0.0, &Units::default(), PhasePoint::new(0.5, 0.0)).unwrap();
        let g = ground_state(&unit(0.0, 0.0)).unwrap();
        for i in 1..20 {
            let x = i as f64 / 20.0;
            assert!((cs.evaluate(x).unwrap() - g.evaluate(x).unwrap()).norm() < 1e-12);
            assert!((cs.body.evaluate(x).unwrap() - g.evaluate(x).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_states_have_unit_norm() {
        for &nu in &[-0.5, 0.0, 1.0, 2.5] {
            for &(q, p) in &[(0.1, 0.0), (0.5, 3.0), (0.8, -7.0)] {
                let cs = coherent_state(nu, &Units::default(), PhasePoint::new(q, p)).unwrap();
                let n = cs.body.norm().unwrap();
                assert!((n - 1.0).abs() < 1e-12, "nu = {nu}, q = {q}: {n}");
            }
        }
    }

    #[test]
    fn eigenvector_property_is_beta_independent() {
        let point = PhasePoint::new(0.3, 1.7);
        for &beta in &[0.0, 2.0] {
            let r = check_eigenvector(&unit(0.0, beta), point, 1e-10).unwrap();
            assert!(r.pass, "{}", r.residual);
        }
    }

    #[test]
    fn overlap_examples() {
        let u = Units::default();
        let a = coherent_state(0.0, &u, PhasePoint::new(0.5, 0.0)).unwrap();
        let b = coherent_state(0.0, &u, PhasePoint::new(0.5, 2.0 * PI)).unwrap();
        assert!((overlap(&a, &a).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
        let v = overlap(&a, &b).unwrap();
        assert!((v - c(-0.5, 0.0)).norm() < 1e-13, "{v}");
        assert!((v - overlap_quadrature(&a, &b).unwrap()).norm() < 1e-12);
        let b2 = coherent_state(2.0, &u, PhasePoint::new(0.5, 0.0)).unwrap();
        let v = overlap(&a, &b2).unwrap();
        let expect = normalization(0.0, 1.0, 0.5).unwrap() * normalization(2.0, 1.0, 0.5).unwrap() * 0.375;
        assert!((v.re - expect).abs() < 1e-13 && (v.re - 0.948_683_298_050_513_8).abs() < 1e-12, "{v}");
    }

    #[test]
    fn overlap_convention_matches_quadrature() {
        let u = Units::default();
        let pts = [(0.2, 1.0, 0.0), (0.7, -3.0, 1.0), (0.45, 0.5, 2.5), (0.9, 4.0, 0.25)];
        for &(q, p, nu) in &pts {
            for &(q2, p2, nu2) in &pts {
                let a = coherent_state(nu, &u, PhasePoint::new(q, p)).unwrap();
                let b = coherent_state(nu2, &u, PhasePoint::new(q2, p2)).unwrap();
                let r = check_overlap(&a, &b, 1e-11).unwrap();
                assert!(r.pass, "{r:?}");
                let ab = overlap(&a, &b).unwrap();
                let ba = overlap(&b, &a).unwrap();
                assert!((ab - ba.conj()).norm() < 1e-14);
                if nu == nu2 {
                    assert!(ab.norm() <= 1.0 + 1e-13);
                }
            }
        }
    }

    #[test]
    fn lowering_symbol_examples() {
        let e0 = unit(0.0, 0.0).e0();
        assert!((lowering_symbol_a(&unit(0.0, 0.0), PhasePoint::new(0.5, 3.0)).unwrap() - c(0.0, 3.0)).norm() < 1e-15);
        assert!((lowering_symbol_a(&unit(1.0, 2.0), PhasePoint::new(0.5, 0.0)).unwrap() - c(PI, 0.0)).norm() < 1e-14);
        let pa = lowering_symbol_a(&unit(0.4, 0.3), PhasePoint::new(0.3, 2.0)).unwrap();
        let pb = lowering_symbol_a(&unit(0.4, 0.3), PhasePoint::new(0.3, -2.0)).unwrap();
        assert_eq!(pa, pb.conj());
        assert!((lowering_symbol_h(&unit(0.0, 0.0), PhasePoint::new(0.5, 0.0)).unwrap() - e0).abs() < 1e-13);
        assert!((lowering_symbol_h(&unit(0.0, 0.0), PhasePoint::new(0.5, PI)).unwrap() - 2.0 * e0).abs() < 1e-13);
        assert_eq!(lowering_symbol_invsin2(0.0, 1.0, PhasePoint::new(0.5, 0.0)).unwrap(), 2.0);
        assert!((lowering_symbol_invsin2(1.0, 1.0, PhasePoint::new(0.5, 0.0)).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert!((lowering_symbol_invsin2(0.0, 1.0, PhasePoint::new(0.25, 0.0)).unwrap() - 4.0).abs() < 1e-14);
        assert!(lowering_symbol_invsin2(-0.5, 1.0, PhasePoint::new(0.25, 0.0)).is_err());
        assert_eq!(lowering_symbol_kinetic(&unit(0.0, 0.0), PhasePoint::new(0.5, 0.0)).unwrap(), e0);
        assert!((lowering_symbol_kinetic(&unit(1.0, 0.0), PhasePoint::new(0.5, 0.0)).unwrap() - 4.0 / 3.0 * e0).abs() < 1e-13);
        let p = unit(0.7, 0.0);
        let k0 = lowering_symbol_kinetic(&p, PhasePoint::new(0.3, 0.0)).unwrap();
        let k1 = lowering_symbol_kinetic(&p, PhasePoint::new(0.3, 2.5)).unwrap();
        assert!((k1 - k0 - 2.5 * 2.5 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn symbols_match_quadrature() {
        for &nu in &[0.0, 1.0] {
            for &beta in &[0.0, 1.5] {
                let p = unit(nu, beta);
                for &q in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                    for &mom in &[-6.0, -1.0, 0.0, 2.0, 5.0] {
                        for r in check_symbols(&p, PhasePoint::new(q, mom), 1e-9).unwrap() {
                            assert!(r.pass, "{r:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn symbol_composition() {
        // H symbol at beta = 0 splits into kinetic plus e0 nu (nu+1) times <1/sin^2>
        let p = unit(1.5, 0.0);
        let point = PhasePoint::new(0.35, 1.2);
        let h = lowering_symbol_h(&p, point).unwrap();
        let k = lowering_symbol_kinetic(&p, point).unwrap();
        let inv = lowering_symbol_invsin2(p.nu(), 1.0, point).unwrap();
        assert!((h - (k + p.e0() * p.nu() * (p.nu() + 1.0) * inv)).abs() < 1e-10 * h);
    }

    #[test]
    fn h_symbol_bounds_ground_energy() {
        let p = unit(0.8, 0.0);
        for i in 1..20 {
            for &mom in &[0.0, 1.0, 10.0] {
                assert!(lowering_symbol_h(&p, PhasePoint::new(i as f64 / 20.0, mom)).unwrap() >= ground_energy(&p));
            }
        }
    }
}
