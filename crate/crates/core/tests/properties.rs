//! Randomized properties of the numerical core and the state algebra.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptcs::coherent::{coherent_state, normalization, normalization_via_f, overlap, PhasePoint};
use ptcs::numerics::{integrate_interval, log_gamma};
use ptcs::params::Units;
use ptcs::phase_space::PhaseSpace;
use ptcs::quantization::{quadratic_form, IdentityCase};
use ptcs::sgp::{inner_product, random_state};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gamma_recurrence(re in 0.1f64..25.0, im in -20.0f64..20.0) {
        let z = Complex64::new(re, im);
        let lhs = log_gamma(z + 1.0).unwrap().exp();
        let rhs = z * log_gamma(z).unwrap().exp();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn gamma_conjugate_symmetry(re in -8.3f64..25.0, im in 0.05f64..20.0) {
        let z = Complex64::new(re, im);
        let a = log_gamma(z.conj()).unwrap();
        let b = log_gamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 4.0 * f64::EPSILON * a.norm().max(1.0));
    }

    #[test]
    fn interval_quadrature_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0.5f64..6.0) {
        let tol = 1e-12;
        let f = |x: f64| Complex64::new((k * x).sin(), x * x);
        let g = |x: f64| Complex64::new((-x).exp(), (k * x).cos());
        let sum = integrate_interval(|x| f(x) * a + g(x) * b, tol).unwrap().value;
        let parts = integrate_interval(f, tol).unwrap().value * a + integrate_interval(g, tol).unwrap().value * b;
        prop_assert!((sum - parts).norm() <= 2.0 * tol * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn normalization_forms_agree(nu in -0.9f64..3.0, q in 0.02f64..0.98) {
        let a = normalization(nu, 1.0, q).unwrap();
        let b = normalization_via_f(nu, 1.0, q).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn overlaps_are_hermitian_and_bounded(nu in -0.5f64..2.5, qa in 0.05f64..0.95, qb in 0.05f64..0.95, pa in -20.0f64..20.0, pb in -20.0f64..20.0) {
        let u = Units::default();
        let a = coherent_state(nu, &u, PhasePoint::new(qa, pa)).unwrap();
        let b = coherent_state(nu, &u, PhasePoint::new(qb, pb)).unwrap();
        let ab = overlap(&a, &b).unwrap();
        let ba = overlap(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        prop_assert!(ab.norm() <= 1.0 + 1e-12);
        prop_assert!((overlap(&a, &a).unwrap() - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn state_inner_product_is_sesquilinear(seed in any::<u64>(), cr in -2.0f64..2.0, ci in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, 3.5, 2, 1.0, 2.0).unwrap();
        let b = random_state(&mut rng, 3.5, 2, 1.0, 2.0).unwrap();
        let c = Complex64::new(cr, ci);
        let lhs = inner_product(&a, &b.scale(c)).unwrap();
        let rhs = inner_product(&a, &b).unwrap() * c;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + c.norm()));
        let lhs = inner_product(&a.scale(c), &b).unwrap();
        prop_assert!((lhs - inner_product(&a, &b).unwrap() * c.conj()).norm() <= 1e-12 * (1.0 + c.norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn quadratic_forms_are_hermitian(seed in any::<u64>(), nu in 0.0f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_state(&mut rng, nu + 2.5, 1, 1.0, 2.0).unwrap();
        let b = random_state(&mut rng, nu + 3.2, 2, 1.0, 2.0).unwrap();
        let params = ptcs::params::PtParams::new(nu, 0.8).unwrap();
        let ps = PhaseSpace::new(nu, Units::default()).unwrap();
        let symbol = IdentityCase::GeneralH.symbol(&params);
        let ab = quadratic_form(&ps, &symbol, &a, &b, 1e-10).unwrap();
        let ba = quadratic_form(&ps, &symbol, &b, &a, 1e-10).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-10 * ab.norm().max(1.0));
    }
}
