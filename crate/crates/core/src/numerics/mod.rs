//! Complex arithmetic, complex log-Gamma and deterministic quadrature.

pub mod gamma;
pub mod quadrature;
pub mod sum;

pub use num_complex::Complex64 as Complex;

pub use gamma::{gamma, ln_gamma_modulus_scaled, ln_gamma_real, log_gamma, log_gamma as log_gamma_complex};
pub use quadrature::{
    integrate, integrate_interval, integrate_interval_with, integrate_line, Endpoints, LineQuadrature,
    QuadOptions, QuadratureResult, Rule,
};
