//! Supersymmetric partner structure: the eigenstate chain built from ground
//! states with raising operators, and the intertwining, factorization and
//! shape-invariance checks.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{energy, f_seq, gegenbauer_state, ground_state, PtParams};
use crate::report::VerificationReport;
use crate::sgp::{apply_hamiltonian, apply_lowering, apply_raising, distance_up_to_phase, inner_product, SgpState};

/// Largest index accepted by [`eigenstate`].
pub const MAX_CHAIN: usize = 30;

/// Superpartner configuration: `nu -> nu + 1`.
pub fn partner_shift(params: &PtParams) -> PtParams {
    params.with_nu(params.nu() + 1.0)
}

/// An eigenstate together with its chain drift `| ||chain|| - 1 |` before the
/// final quadrature renormalization.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub state: SgpState,
    pub drift: f64,
}

/// `phi_n` from `A^dagger_{nu} ... A^dagger_{nu+n-1} phi_0^{(nu+n)}` with the
/// `1/sqrt(2 m e0 f)` factors, renormalized, phase fixed positive near `x = 0`.
pub fn eigenstate_with_drift(params: &PtParams, n: usize) -> Result<ChainState> {
    if n > MAX_CHAIN {
        return Err(Error::param(format!("eigenstate index {n} exceeds {MAX_CHAIN}")));
    }
    let nu = params.nu();
    let mut state = ground_state(&params.with_nu(nu + n as f64))?;
    for k in (0..n).rev() {
        let p = params.with_nu(nu + k as f64);
        let f = f_seq(&p, n - k);
        let c = 1.0 / (2.0 * p.mass() * p.e0() * f).sqrt();
        state = apply_raising(&p, &state)?.scale(Complex64::new(c, 0.0));
    }
    let norm = state.norm()?;
    let state = state.scale(Complex64::new(1.0 / norm, 0.0)).phase_fixed();
    Ok(ChainState {
        state,
        drift: (norm - 1.0).abs(),
    })
}

pub fn eigenstate(params: &PtParams, n: usize) -> Result<SgpState> {
    eigenstate_with_drift(params, n).map(|c| c.state)
}

/// `|| A phi_{n+1} - c sqrt(2 m e0 f_{n+1}) phi~_n ||` minimized over unit
/// phases `c`; the phase found is reported in `notes`.
pub fn check_intertwining(params: &PtParams, n: usize, tol: f64) -> Result<VerificationReport> {
    let partner = partner_shift(params);
    let upper = eigenstate(params, n + 1)?;
    let lower = eigenstate(&partner, n)?;
    let coefficient = (2.0 * params.mass() * params.e0() * f_seq(params, n + 1)).sqrt();
    let image = apply_lowering(params, &upper)?;
    let overlap = inner_product(&lower, &image)?;
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let diff = image.combine(Complex64::new(1.0, 0.0), &lower, -phase * coefficient)?;
    let residual = diff.norm()?;
    Ok(VerificationReport::new("intertwining", residual, tol)
        .with_params(*params)
        .with_n(n)
        .with_sides(overlap, Complex64::new(coefficient, 0.0))
        .note(format!("relative phase of A phi_(n+1) against phi~_n: {:.6} + {:.6}i", phase.re, phase.im)))
}

fn operator_residual(name: &str, params: &PtParams, lhs: &SgpState, rhs: &SgpState, tol: f64) -> Result<VerificationReport> {
    let diff = lhs.combine(Complex64::new(1.0, 0.0), rhs, Complex64::new(-1.0, 0.0))?;
    let scale = lhs.coeff_norm().max(rhs.coeff_norm());
    let residual = if scale > 0.0 { diff.coeff_norm() / scale } else { 0.0 };
    Ok(VerificationReport::new(name, residual, tol)
        .with_params(*params)
        .note("relative l2 norm of the cot-coefficient difference; both sides share s and gamma"))
}

fn check_state(state: &SgpState, params: &PtParams) -> Result<()> {
    if state.s() < 1.0 {
        return Err(Error::param(format!("operator checks need s >= 1, got {}", state.s())));
    }
    if (state.length() - params.length()).abs() > 1e-12 * params.length() {
        return Err(Error::param("state length does not match parameters"));
    }
    Ok(())
}

/// `H psi` against `(1/2m) A^dagger A psi + E0 psi`.
pub fn check_factorization(params: &PtParams, state: &SgpState, tol: f64) -> Result<VerificationReport> {
    check_state(state, params)?;
    let h = apply_hamiltonian(params, state)?;
    let aa = apply_raising(params, &apply_lowering(params, state)?)?;
    let e0 = energy(params, 0).value;
    let rhs = aa.combine(Complex64::new(0.5 / params.mass(), 0.0), state, Complex64::new(e0, 0.0))?;
    operator_residual("factorization", params, &h, &rhs, tol)
}

/// `(1/2m) A A^dagger psi + E0 psi` against `H_{nu+1} psi`.
pub fn check_shape_invariance(params: &PtParams, state: &SgpState, tol: f64) -> Result<VerificationReport> {
    check_state(state, params)?;
    let partner = partner_shift(params);
    let h = apply_hamiltonian(&partner, state)?;
    let aa = apply_lowering(params, &apply_raising(params, state)?)?;
    let e0 = energy(params, 0).value;
    let lhs = aa.combine(Complex64::new(0.5 / params.mass(), 0.0), state, Complex64::new(e0, 0.0))?;
    operator_residual("shape_invariance", params, &lhs, &h, tol)
}

/// `|| H phi_n - E_n phi_n ||`.
pub fn check_eigenvalue(params: &PtParams, n: usize, tol: f64) -> Result<VerificationReport> {
    let phi = eigenstate(params, n)?;
    let en = energy(params, n).value;
    let diff = apply_hamiltonian(params, &phi)?.combine(Complex64::new(1.0, 0.0), &phi, Complex64::new(-en, 0.0))?;
    let residual = diff.norm()? / en.abs().max(f64::MIN_POSITIVE);
    Ok(VerificationReport::new("eigenvalue", residual, tol)
        .with_params(*params)
        .with_n(n)
        .note("residual relative to |E_n|"))
}

/// Chain eigenstate against the closed Gegenbauer form, which exists at `beta = 0`;
/// the residual is the phase-aligned distance of the two unit vectors.
pub fn check_gegenbauer(params: &PtParams, n: usize, tol: f64) -> Result<VerificationReport> {
    if params.beta() != 0.0 {
        return Err(Error::param("the Gegenbauer form needs beta = 0"));
    }
    let phi = eigenstate(params, n)?;
    let g = gegenbauer_state(params.nu(), n, params.length())?;
    let (d, phase) = distance_up_to_phase(&g, &phi)?;
    Ok(VerificationReport::new("gegenbauer", d, tol)
        .with_params(*params)
        .with_n(n)
        .input("phase", [phase.re, phase.im]))
}

/// Gram matrix `<phi_i, phi_j>` for `i, j < count`.
pub fn gram_matrix(params: &PtParams, count: usize) -> Result<Vec<Vec<Complex64>>> {
    let states = (0..count).map(|n| eigenstate(params, n)).collect::<Result<Vec<_>>>()?;
    states
        .iter()
        .map(|a| states.iter().map(|b| inner_product(a, b)).collect())
        .collect()
}
