//! Cross-checks against oracles that do not share code paths with the
//! quantities they test: pointwise finite differences, the Gegenbauer
//! recurrence, closed-form overlaps and spectral properties of Gram matrices.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use ptcs::coherent::{big_f, coherent_state, normalization, PhasePoint};
use ptcs::frames::frame_function;
use ptcs::params::{energy, gegenbauer, ground_state, potential, PtParams, Units};
use ptcs::susy::eigenstate;

/// `(H phi)(x)` with a fourth-order central difference for `phi''`.
fn h_by_differences(params: &PtParams, phi: &ptcs::sgp::SgpState, x: f64) -> Complex64 {
    let h = 1e-3;
    let f = |t: f64| phi.evaluate(t).unwrap();
    let d2 = (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h)) / (12.0 * h * h);
    let kin = -params.hbar() * params.hbar() / (2.0 * params.mass());
    d2 * kin + f(x) * potential(params, x).unwrap()
}

#[test]
fn eigenstates_satisfy_the_equation_pointwise() {
    for &(nu, beta) in &[(0.0, 0.0), (1.0, 2.0), (2.5, 1.3), (0.25, 0.4)] {
        let params = PtParams::new(nu, beta).unwrap();
        for n in 0..=4 {
            let phi = eigenstate(&params, n).unwrap();
            let en = energy(&params, n).value;
            let scale = phi.evaluate(0.5).unwrap().norm().max(1.0);
            for x in [0.2, 0.37, 0.5, 0.61, 0.8] {
                let lhs = h_by_differences(&params, &phi, x);
                let rhs = phi.evaluate(x).unwrap() * en;
                assert!((lhs - rhs).norm() < 1e-6 * en * scale, "nu {nu}, beta {beta}, n {n}, x {x}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn beta_zero_eigenstates_follow_the_gegenbauer_recurrence() {
    for nu in [0.0, 0.25, 1.0] {
        let params = PtParams::new(nu, 0.0).unwrap();
        for n in 0..=5 {
            let phi = eigenstate(&params, n).unwrap();
            let raw = |x: f64| (PI * x).sin().powf(nu + 1.0) * gegenbauer(n, nu + 1.0, (PI * x).cos());
            // fix the scale at one point, compare everywhere else
            let x0 = 0.123;
            let c = phi.evaluate(x0).unwrap() / raw(x0);
            for x in [0.05, 0.3, 0.5, 0.71, 0.95] {
                let v = phi.evaluate(x).unwrap();
                assert!((v - c * raw(x)).norm() < 1e-10 * c.norm().max(1.0), "nu {nu}, n {n}, x {x}");
            }
        }
    }
}

#[test]
fn frame_function_of_the_ground_state_has_a_closed_form() {
    // <eta, c sin^{nu+1} e^{g x}> = N c L F_nu(L (conj(rate) + g))
    let units = Units::default();
    for &(nu, beta) in &[(0.0, 0.0), (1.0, 1.2)] {
        let params = PtParams::new(nu, beta).unwrap();
        let g0 = ground_state(&params).unwrap();
        for &(q, p) in &[(0.5, 0.0), (0.2, 3.0), (0.85, -7.5)] {
            let eta = coherent_state(nu, &units, PhasePoint::new(q, p)).unwrap();
            let expect = normalization(nu, 1.0, q).unwrap() * g0.coeffs()[0] * big_f(nu, eta.rate().conj() + g0.gamma()).unwrap();
            let got = frame_function(nu, &params, 0, PhasePoint::new(q, p)).unwrap();
            assert!((got - expect).norm() < 1e-10, "({q}, {p}): {got} vs {expect}");
        }
    }
}

#[test]
fn coherent_state_gram_matrix_is_positive_semidefinite() {
    let units = Units::default();
    let pts = [(0.5, 0.0), (0.5, 0.5), (0.45, 0.2), (0.2, -3.0), (0.8, 6.0), (0.52, -0.1)];
    for nu in [0.0, 1.5] {
        let states: Vec<_> = pts.iter().map(|&(q, p)| coherent_state(nu, &units, PhasePoint::new(q, p)).unwrap()).collect();
        let gram = DMatrix::from_fn(states.len(), states.len(), |i, j| ptcs::coherent::overlap(&states[i], &states[j]).unwrap());
        assert!((gram.adjoint() - &gram).norm() < 1e-12);
        let eig = gram.symmetric_eigenvalues();
        assert!(eig.iter().all(|&l| l > -1e-12), "{eig}");
        assert!((eig.sum() - states.len() as f64).abs() < 1e-10);
    }
}

#[test]
fn eigenstate_gram_matrix_is_the_identity() {
    let params = PtParams::new(0.7, 1.1).unwrap();
    let g = ptcs::susy::gram_matrix(&params, 6).unwrap();
    let m = DMatrix::from_fn(6, 6, |i, j| g[i][j]);
    assert!((m - DMatrix::<Complex64>::identity(6, 6)).norm() < 1e-10);
}
