//! Coherent-state quantization: the forms `B_f(phi, psi)` for symbols polynomial
//! in `p`, the identity catalog relating them to operator matrix elements, and
//! upper-symbol matrices.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{QuadOptions, Rule};
use crate::params::{superpotential_at, PtParams};
use crate::phase_space::{PhaseSpace, QPoint, Sampled};
use crate::report::VerificationReport;
use crate::sgp::{apply_hamiltonian, inner_product, random_state, SgpState};
use crate::susy::{eigenstate, partner_shift};

/// `q`-dependence of one symbol term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum QProfile {
    Constant,
    Cot,
    InvSin2,
    /// `W_{nu,beta}(q)` with the `nu` of the coherent states.
    W { beta: f64 },
    /// `W_{nu,beta}(q)^2`.
    W2 { beta: f64 },
    /// `cot(pi q/L)` clipped to `[-c, c]`. The kinks slow the `q` quadrature,
    /// so ask for modest tolerances.
    ClippedCot { c: f64 },
}

impl QProfile {
    fn eval(&self, ps: &PhaseSpace, qp: &QPoint) -> f64 {
        match *self {
            QProfile::Constant => 1.0,
            QProfile::Cot => qp.cot,
            QProfile::InvSin2 => 1.0 / (qp.sin * qp.sin),
            QProfile::W { beta } => superpotential_at(ps.nu(), beta, &ps.units(), qp.cot),
            QProfile::W2 { beta } => superpotential_at(ps.nu(), beta, &ps.units(), qp.cot).powi(2),
            QProfile::ClippedCot { c } => qp.cot.clamp(-c, c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolTerm {
    /// Power of `p`, at most 2.
    pub k: u8,
    #[serde(flatten)]
    pub profile: QProfile,
    pub coefficient: f64,
}

/// `f(q, p) = sum coefficient * profile(q) * p^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSymbol {
    terms: Vec<SymbolTerm>,
}

impl PSymbol {
    pub fn new(terms: Vec<SymbolTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.k > 2) {
            return Err(Error::param(format!("symbol terms need p-degree <= 2, got {}", t.k)));
        }
        if terms.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(Error::param("symbol coefficients must be finite"));
        }
        Ok(Self { terms })
    }

    pub fn single(k: u8, profile: QProfile, coefficient: f64) -> Result<Self> {
        Self::new(vec![SymbolTerm { k, profile, coefficient }])
    }

    pub fn terms(&self) -> &[SymbolTerm] {
        &self.terms
    }

    fn moments(&self, ps: &PhaseSpace, qp: &QPoint) -> [f64; 3] {
        let mut g = [0.0; 3];
        for t in &self.terms {
            g[t.k as usize] += t.coefficient * t.profile.eval(ps, qp);
        }
        g
    }
}

fn form_options(tol: f64, scale: f64) -> QuadOptions {
    QuadOptions::new(1e-3 * tol * scale, 1e-3 * tol, Rule::TanhSinh)
}

/// `B_f(phi, psi)` on pre-sampled states, relative accuracy about `tol / 1000`
/// with an absolute floor `tol * scale / 1000`.
pub fn quadratic_form_sampled(ps: &PhaseSpace, symbol: &PSymbol, phi: &Sampled, psi: &Sampled, tol: f64, scale: f64) -> Result<Complex64> {
    let r = ps.form(phi, psi, |qp| symbol.moments(ps, qp), &form_options(tol, scale))?;
    Ok(r.value)
}

/// `B_f(phi, psi) = int dq dp/(2 pi hbar) f(q,p) <phi, eta_{q,p}><eta_{q,p}, psi>`.
pub fn quadratic_form(ps: &PhaseSpace, symbol: &PSymbol, phi: &SgpState, psi: &SgpState, tol: f64) -> Result<Complex64> {
    let scale = phi.norm()? * psi.norm()?;
    quadratic_form_sampled(ps, symbol, &ps.sample(phi)?, &ps.sample(psi)?, tol, scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum IdentityCase {
    CotQ,
    Moment,
    Hamil1,
    Hamil2,
    Hamil3,
    Hamil4,
    GeneralH,
    P2m,
}

pub const GENERAL_H_NOTE: &str =
    "the printed q-profile denominator 'sin^2(pi q/L) q' is read as sin^2(pi q/L); the extra factor q is dimensionally inconsistent";

pub const DOMAIN_NOTE: &str =
    "checked on smooth test states with sine exponent >= nu + 2 above the cot-degree, a surrogate for the operator domains";

impl IdentityCase {
    pub const ALL: [IdentityCase; 8] = [
        IdentityCase::CotQ,
        IdentityCase::Moment,
        IdentityCase::Hamil1,
        IdentityCase::Hamil2,
        IdentityCase::Hamil3,
        IdentityCase::Hamil4,
        IdentityCase::GeneralH,
        IdentityCase::P2m,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityCase::CotQ => "cotQ",
            IdentityCase::Moment => "moment",
            IdentityCase::Hamil1 => "hamil1",
            IdentityCase::Hamil2 => "hamil2",
            IdentityCase::Hamil3 => "hamil3",
            IdentityCase::Hamil4 => "hamil4",
            IdentityCase::GeneralH => "generalH",
            IdentityCase::P2m => "p2m",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == name)
    }

    /// Operator whose matrix elements the form reproduces.
    pub fn operator_side(&self) -> &'static str {
        match self {
            IdentityCase::CotQ => "cot(pi Q/L)",
            IdentityCase::Moment => "P = -i hbar d/dx",
            IdentityCase::Hamil1 => "H_{nu+1,beta}",
            IdentityCase::Hamil2 => "P^2/2m - e0 (nu+1)^2 / sin^2(pi Q/L)",
            IdentityCase::Hamil3 => "1 / sin^2(pi Q/L)",
            IdentityCase::Hamil4 => "P^2/2m",
            IdentityCase::GeneralH => "H_{nu,beta}",
            IdentityCase::P2m => "P^2/2m + (nu+1)/2 e0 / sin^2(pi Q/L)",
        }
    }

    /// Classical symbol of the form side for the configuration `params`
    /// (coherent states `eta^{[nu]}` with `nu = params.nu()`).
    pub fn symbol(&self, params: &PtParams) -> PSymbol {
        let nu = params.nu();
        let e0 = params.e0();
        let beta = params.beta();
        let a2 = (nu + 1.0) * (nu + 1.0);
        let kinetic = SymbolTerm {
            k: 2,
            profile: QProfile::Constant,
            coefficient: 0.5 / params.mass(),
        };
        let inv = |c: f64| SymbolTerm {
            k: 0,
            profile: QProfile::InvSin2,
            coefficient: c,
        };
        let cot = |c: f64| SymbolTerm {
            k: 0,
            profile: QProfile::Cot,
            coefficient: c,
        };
        let terms = match self {
            IdentityCase::CotQ => vec![cot(1.0)],
            IdentityCase::Moment => vec![SymbolTerm {
                k: 1,
                profile: QProfile::Constant,
                coefficient: 1.0,
            }],
            IdentityCase::Hamil1 => vec![kinetic, inv(e0 * a2), cot(-2.0 * e0 * beta)],
            IdentityCase::Hamil2 => vec![kinetic, inv(-e0 * a2)],
            IdentityCase::Hamil3 => vec![inv((2.0 * nu + 2.0) / (2.0 * nu + 3.0))],
            IdentityCase::Hamil4 => vec![kinetic, inv(-a2 / (2.0 * nu + 3.0) * e0)],
            IdentityCase::GeneralH => vec![
                kinetic,
                inv((2.0 * nu - 1.0) / (2.0 * nu + 3.0) * e0 * a2),
                cot(-2.0 * e0 * beta),
            ],
            IdentityCase::P2m => vec![kinetic],
        };
        PSymbol { terms }
    }

    /// Natural magnitude of the operator, used as an absolute floor when both
    /// sides vanish.
    pub fn scale(&self, params: &PtParams) -> f64 {
        match self {
            IdentityCase::CotQ | IdentityCase::Hamil3 => 1.0,
            IdentityCase::Moment => params.hbar() * params.units().wavenumber(),
            _ => params.e0(),
        }
    }

    /// `O psi` for the operator side, exact in the state algebra.
    pub fn apply_operator(&self, params: &PtParams, psi: &SgpState) -> Result<SgpState> {
        let nu = params.nu();
        let e0 = params.e0();
        let a2 = (nu + 1.0) * (nu + 1.0);
        let kinetic = |st: &SgpState| {
            let h2m = params.hbar() * params.hbar() / (2.0 * params.mass());
            st.differentiate().differentiate().scale(Complex64::new(-h2m, 0.0))
        };
        let inv_sin2 = |st: &SgpState, c: f64| st.mul_cot_poly(&[c, 0.0, c]);
        let one = Complex64::new(1.0, 0.0);
        match self {
            IdentityCase::CotQ => Ok(psi.mul_cot_poly(&[0.0, 1.0])),
            IdentityCase::Moment => Ok(psi.differentiate().scale(Complex64::new(0.0, -params.hbar()))),
            IdentityCase::Hamil1 => apply_hamiltonian(&partner_shift(params), psi),
            IdentityCase::Hamil2 => kinetic(psi).combine(one, &inv_sin2(psi, -e0 * a2), one),
            IdentityCase::Hamil3 => Ok(inv_sin2(psi, 1.0)),
            IdentityCase::Hamil4 => Ok(kinetic(psi)),
            IdentityCase::GeneralH => apply_hamiltonian(params, psi),
            IdentityCase::P2m => kinetic(psi).combine(one, &inv_sin2(psi, 0.5 * (nu + 1.0) * e0), one),
        }
    }

    /// `<phi, O psi>` by quadrature.
    pub fn operator_element(&self, params: &PtParams, phi: &SgpState, psi: &SgpState) -> Result<Complex64> {
        inner_product(phi, &self.apply_operator(params, psi)?)
    }
}

/// Three test pairs in the smooth class for configuration `params`:
/// a partner ground state with itself, a partner excited state against a random
/// state, and two random states.
pub fn identity_test_pairs<R: Rng + ?Sized>(params: &PtParams, rng: &mut R) -> Result<Vec<(SgpState, SgpState)>> {
    let partner = partner_shift(params);
    let l = params.length();
    let nu = params.nu();
    let rand_state = |rng: &mut R| -> Result<SgpState> {
        let degree = rng.gen_range(0..=2usize);
        let s = nu + 2.0 + degree as f64 + rng.gen_range(0.0..1.0);
        random_state(rng, s, degree, l, 2.0)
    };
    let g = eigenstate(&partner, 0)?;
    let e1 = eigenstate(&partner, 1)?;
    let r1 = rand_state(rng)?;
    let r2 = rand_state(rng)?;
    let r3 = rand_state(rng)?;
    Ok(vec![(g.clone(), g), (e1, r1), (r2, r3)])
}

/// Compares `B_f(phi, psi)` with `<phi, O psi>` on every pair; the residual is
/// the largest `|lhs - rhs| / max(|lhs|, |rhs|, scale)`.
pub fn check_identity(case: IdentityCase, params: &PtParams, pairs: &[(SgpState, SgpState)], tol: f64) -> Result<VerificationReport> {
    let ps = PhaseSpace::new(params.nu(), params.units())?;
    let symbol = case.symbol(params);
    let scale = case.scale(params);
    let mut worst = (f64::NEG_INFINITY, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (phi, psi) in pairs {
        let norms = phi.norm()? * psi.norm()?;
        let lhs = quadratic_form_sampled(&ps, &symbol, &ps.sample(phi)?, &ps.sample(psi)?, tol, scale * norms)?;
        let rhs = case.operator_element(params, phi, psi)?;
        let denom = lhs.norm().max(rhs.norm()).max(scale * norms);
        let r = (lhs - rhs).norm() / denom;
        if r > worst.0 {
            worst = (r, lhs, rhs);
        }
    }
    let mut report = VerificationReport::new(case.name(), worst.0, tol)
        .with_params(*params)
        .with_sides(worst.1, worst.2)
        .input("pairs", pairs.len())
        .input("operator_side", case.operator_side())
        .input("symbol", serde_json::to_value(&symbol).unwrap_or_default())
        .note("lhs: B_f by phase-space quadrature, rhs: <phi, O psi>; residual relative to max(|lhs|, |rhs|, natural scale)")
        .note(DOMAIN_NOTE);
    if case == IdentityCase::GeneralH {
        report = report.note(GENERAL_H_NOTE);
    }
    if pairs.is_empty() {
        report = report.fail("no test pairs supplied");
    }
    Ok(report)
}

/// Matrix of `B_f(b_i, b_j)` over an orthonormal basis.
pub fn upper_symbol_matrix(ps: &PhaseSpace, symbol: &PSymbol, basis: &[SgpState], tol: f64) -> Result<Vec<Vec<Complex64>>> {
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = inner_product(a, b)?;
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - expect).norm() > 1e-9 {
                return Err(Error::param(format!("basis is not orthonormal: <{i},{j}> = {g}")));
            }
        }
    }
    let samples = basis.iter().map(|b| ps.sample(b)).collect::<Result<Vec<_>>>()?;
    samples
        .iter()
        .map(|a| {
            samples
                .iter()
                .map(|b| quadratic_form_sampled(ps, symbol, a, b, tol, 1.0))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{energy, ground_state, Units};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit(nu: f64, beta: f64) -> PtParams {
        PtParams::new(nu, beta).unwrap()
    }

    fn ps(nu: f64) -> PhaseSpace {
        PhaseSpace::new(nu, Units::default()).unwrap()
    }

    #[test]
    fn form_examples() {
        let p = unit(0.0, 0.0);
        let g = ground_state(&p).unwrap();
        let ps = ps(0.0);
        let moment = PSymbol::single(1, QProfile::Constant, 1.0).unwrap();
        assert!(quadratic_form(&ps, &moment, &g, &g, 1e-10).unwrap().norm() < 1e-10);
        let cot = PSymbol::single(0, QProfile::Cot, 1.0).unwrap();
        assert!(quadratic_form(&ps, &cot, &g, &g, 1e-10).unwrap().norm() < 1e-10);
        let p2m = PSymbol::single(2, QProfile::Constant, 0.5).unwrap();
        let v = quadratic_form(&ps, &p2m, &g, &g, 1e-10).unwrap();
        assert!((v.re - 2.0 * p.e0()).abs() < 1e-8, "{v}");
    }

    #[test]
    fn symbol_validation() {
        assert!(PSymbol::single(3, QProfile::Constant, 1.0).is_err());
        assert_eq!(IdentityCase::from_name("generalH"), Some(IdentityCase::GeneralH));
        assert_eq!(IdentityCase::from_name("nope"), None);
    }

    #[test]
    fn hamil1_on_partner_ground_state() {
        let p = unit(0.0, 0.0);
        let g = eigenstate(&partner_shift(&p), 0).unwrap();
        let rhs = IdentityCase::Hamil1.operator_element(&p, &g, &g).unwrap();
        assert!((rhs.re - 4.0 * p.e0()).abs() < 1e-10);
        assert!((rhs.re - energy(&partner_shift(&p), 0).value).abs() < 1e-10);
        let r = check_identity(IdentityCase::Hamil1, &p, &[(g.clone(), g)], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn hamil3_operator_side_on_ground_state() {
        let p = unit(0.0, 0.0);
        let g = ground_state(&p).unwrap();
        let rhs = IdentityCase::Hamil3.operator_element(&p, &g, &g).unwrap();
        assert!((rhs.re - 2.0).abs() < 1e-12);
        let r = check_identity(IdentityCase::Hamil3, &p, &[(g.clone(), g)], 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn full_catalog() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for &(nu, beta) in &[(0.0, 0.0), (0.25, 0.7), (1.0, 2.0)] {
            let p = unit(nu, beta);
            let pairs = identity_test_pairs(&p, &mut rng).unwrap();
            for case in IdentityCase::ALL {
                let r = check_identity(case, &p, &pairs, 1e-8).unwrap();
                assert!(r.pass, "nu = {nu}, {}: {r:?}", case.name());
                assert_eq!(r.notes.iter().any(|n| n == GENERAL_H_NOTE), case == IdentityCase::GeneralH);
            }
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = unit(0.5, 1.0);
        let ps = ps(0.5);
        let pairs = identity_test_pairs(&p, &mut rng).unwrap();
        let symbol = IdentityCase::Hamil1.symbol(&p);
        let (a, b) = &pairs[2];
        let ab = quadratic_form(&ps, &symbol, a, b, 1e-10).unwrap();
        let ba = quadratic_form(&ps, &symbol, b, a, 1e-10).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-10 * ab.norm().max(1.0));
    }

    #[test]
    fn catalog_consistency() {
        // hamil1 at beta = 0 minus hamil2 is 2 e0 (nu+1)^2 B_{1/sin^2}
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = unit(0.6, 0.0);
        let ps = ps(0.6);
        let pairs = identity_test_pairs(&p, &mut rng).unwrap();
        let (a, b) = &pairs[1];
        let h1 = quadratic_form(&ps, &IdentityCase::Hamil1.symbol(&p), a, b, 1e-10).unwrap();
        let h2 = quadratic_form(&ps, &IdentityCase::Hamil2.symbol(&p), a, b, 1e-10).unwrap();
        let inv = IdentityCase::Hamil3.operator_element(&p, a, b).unwrap();
        let a2 = 1.6 * 1.6;
        let expect = 2.0 * p.e0() * a2 * inv * (2.0 * 0.6 + 3.0) / (2.0 * 0.6 + 2.0);
        assert!((h1 - h2 - expect).norm() < 1e-8 * expect.norm());
    }

    #[test]
    fn p2m_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = unit(0.25, 0.0);
        let ps = ps(0.25);
        let symbol = IdentityCase::P2m.symbol(&p);
        for _ in 0..4 {
            let st = random_state(&mut rng, 2.8, 1, 1.0, 3.0).unwrap();
            assert!(quadratic_form(&ps, &symbol, &st, &st, 1e-9).unwrap().re >= 0.0);
        }
    }

    #[test]
    fn clipped_cot_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ps = ps(0.0);
        let c = 1.5;
        let symbol = PSymbol::single(0, QProfile::ClippedCot { c }, 1.0).unwrap();
        for _ in 0..4 {
            let a = random_state(&mut rng, 2.2, 1, 1.0, 3.0).unwrap();
            let b = random_state(&mut rng, 2.7, 0, 1.0, 3.0).unwrap();
            let v = quadratic_form(&ps, &symbol, &a, &b, 1e-5).unwrap();
            assert!(v.norm() <= c * (1.0 + 1e-6));
        }
    }

    #[test]
    fn upper_symbol_matrices() {
        let p = unit(0.0, 0.0);
        let partner = partner_shift(&p);
        let basis: Vec<_> = (0..4).map(|n| eigenstate(&partner, n).unwrap()).collect();
        let ps = ps(0.0);
        let one = PSymbol::single(0, QProfile::Constant, 1.0).unwrap();
        let m = upper_symbol_matrix(&ps, &one, &basis, 1e-9).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-8);
            }
        }
        let mom = PSymbol::single(1, QProfile::Constant, 1.0).unwrap();
        let m = upper_symbol_matrix(&ps, &mom, &basis, 1e-9).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!(m[i][j].re.abs() < 1e-9);
                assert!((m[i][j] + m[j][i]).norm() < 1e-9);
            }
        }
        let h = upper_symbol_matrix(&ps, &IdentityCase::Hamil1.symbol(&p), &basis, 1e-9).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { energy(&partner, i).value } else { 0.0 };
                assert!((h[i][j] - expect).norm() < 1e-7, "({i},{j}) = {}", h[i][j]);
            }
        }
        let bad = vec![basis[0].clone(), basis[0].clone()];
        assert!(upper_symbol_matrix(&ps, &one, &bad, 1e-9).is_err());
    }
}
