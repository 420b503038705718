//! Deterministic quadrature on (0, 1), finite intervals and the real line.
//!
//! Two rules are provided: composite Gauss-Legendre with panel doubling for
//! integrands that are smooth up to the endpoints, and tanh-sinh (double
//! exponential) for integrands with algebraic endpoint behaviour. Both sum
//! nodes in a fixed order with compensation, so identical inputs give
//! bit-identical outputs.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use super::sum::{ComplexSum, NeumaierSum};
use crate::error::{Error, Result};

const GL_ORDER: usize = 20;
const GL_MAX_DOUBLINGS: u32 = 13;

const TS_H0: f64 = 0.5;
const TS_T_MAX: f64 = 5.4;
const TS_MAX_LEVEL: usize = 10;
/// Nodes closer than this to an endpoint are dropped.
const TS_EDGE: f64 = 1e-150;

/// Multiple of machine epsilon times `sum |w f|` treated as the rounding floor.
const NOISE_FACTOR: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: Complex64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rule {
    GaussLegendre,
    TanhSinh,
}

/// How the integrand behaves at the interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    /// Smooth (analytic) up to and including the endpoints.
    Regular,
    /// Possibly singular derivatives or integrable blow-up at an endpoint.
    Singular,
}

impl Endpoints {
    pub fn rule(self) -> Rule {
        match self {
            Endpoints::Regular => Rule::GaussLegendre,
            Endpoints::Singular => Rule::TanhSinh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub rule: Rule,
}

impl QuadOptions {
    pub fn new(abs_tol: f64, rel_tol: f64, rule: Rule) -> Self {
        Self {
            abs_tol,
            rel_tol,
            rule,
        }
    }

    pub(crate) fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

struct GaussLegendre {
    nodes: [f64; GL_ORDER],
    weights: [f64; GL_ORDER],
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

impl GaussLegendre {
    fn build() -> Self {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    fn global() -> &'static Self {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(Self::build)
    }
}

/// Nodes and weights of the fixed-order Gauss-Legendre rule on `[-1, 1]`.
pub(crate) fn gl_rule() -> (&'static [f64], &'static [f64]) {
    let r = GaussLegendre::global();
    (&r.nodes, &r.weights)
}

/// Single tanh-sinh node on (0, 1).
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    pub x: f64,
    /// `1 - x`, computed without cancellation.
    pub comp: f64,
    /// Weight before multiplication by the level step.
    pub weight: f64,
}

/// Nested tanh-sinh node sets. Level 0 has step `TS_H0`; level `l` adds the
/// odd multiples of `TS_H0 / 2^l`.
pub struct TanhSinhRule {
    levels: Vec<Vec<TsNode>>,
}

impl TanhSinhRule {
    fn node(t: f64) -> Option<TsNode> {
        let u = 0.5 * PI * t.sinh();
        let x = 1.0 / (1.0 + (-2.0 * u).exp());
        let comp = 1.0 / (1.0 + (2.0 * u).exp());
        if x.min(comp) < TS_EDGE || x <= 0.0 || x >= 1.0 {
            return None;
        }
        let weight = PI * t.cosh() * x * comp;
        (weight > 0.0).then_some(TsNode { x, comp, weight })
    }

    fn build() -> Self {
        let mut levels = Vec::with_capacity(TS_MAX_LEVEL + 1);
        let k0 = (TS_T_MAX / TS_H0).floor() as i64;
        levels.push((-k0..=k0).filter_map(|k| Self::node(k as f64 * TS_H0)).collect());
        for level in 1..=TS_MAX_LEVEL {
            let h = TS_H0 / (1u64 << level) as f64;
            let kmax = (TS_T_MAX / h).floor() as i64;
            let nodes = (-kmax..=kmax)
                .filter(|k| k.rem_euclid(2) == 1)
                .filter_map(|k| Self::node(k as f64 * h))
                .collect();
            levels.push(nodes);
        }
        Self { levels }
    }

    pub fn global() -> &'static Self {
        static RULE: OnceLock<TanhSinhRule> = OnceLock::new();
        RULE.get_or_init(Self::build)
    }

    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, level: usize) -> &[TsNode] {
        &self.levels[level]
    }

    pub fn step(&self, level: usize) -> f64 {
        TS_H0 / (1u64 << level) as f64
    }
}

fn finite_or_err(v: Complex64, x: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { x })
    }
}

/// Convergence bookkeeping shared by the nested rules.
pub(crate) struct Refinement {
    prev: Option<Complex64>,
    pub evaluations: usize,
}

impl Refinement {
    pub(crate) fn new() -> Self {
        Self {
            prev: None,
            evaluations: 0,
        }
    }

    /// Feed a new estimate. Once two levels exist, returns the error estimate
    /// and whether it meets `target` (or has reached the rounding floor).
    pub(crate) fn push(&mut self, estimate: Complex64, abs_mass: f64, target: f64) -> Option<(f64, bool)> {
        let floor = NOISE_FACTOR * f64::EPSILON * abs_mass;
        let out = self.prev.map(|p| {
            let err = (estimate - p).norm().max(floor);
            (err, err <= target.max(floor))
        });
        self.prev = Some(estimate);
        out
    }
}

fn gauss_legendre_panels<F>(f: &F, a: f64, b: f64, panels: usize) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Complex64,
{
    let rule = GaussLegendre::global();
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut acc = ComplexSum::new();
    let mut mass = NeumaierSum::new();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        for (xi, wi) in rule.nodes.iter().zip(rule.weights.iter()) {
            let x = mid + half * xi;
            let v = finite_or_err(f(x), x)? * (wi * half);
            mass.add(v.norm());
            acc.add(v);
        }
    }
    Ok((acc.value(), mass.value()))
}

/// Composite Gauss-Legendre on `[a, b]` with panel doubling from `initial_panels`.
pub fn gauss_legendre<F>(f: F, a: f64, b: f64, initial_panels: usize, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    let mut refine = Refinement::new();
    let mut panels = initial_panels.max(1);
    let mut last_err = f64::INFINITY;
    for _ in 0..=GL_MAX_DOUBLINGS {
        let (value, mass) = gauss_legendre_panels(&f, a, b, panels)?;
        refine.evaluations += panels * GL_ORDER;
        if let Some((err, done)) = refine.push(value, mass, opts.target(value)) {
            last_err = err;
            if done {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: err,
                    evaluations: refine.evaluations,
                });
            }
        }
        panels *= 2;
    }
    Err(Error::NonConvergence {
        estimate: last_err,
        tolerance: opts.abs_tol,
        evaluations: refine.evaluations,
    })
}

/// Tanh-sinh on `[a, b]`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    let rule = TanhSinhRule::global();
    let width = b - a;
    let mut refine = Refinement::new();
    let mut acc = ComplexSum::new();
    let mut mass = NeumaierSum::new();
    let mut last_err = f64::INFINITY;
    for level in 0..=rule.max_level() {
        for node in rule.level(level) {
            let x = a + width * node.x;
            let v = finite_or_err(f(x), x)? * node.weight;
            mass.add(v.norm());
            acc.add(v);
        }
        refine.evaluations += rule.level(level).len();
        let h = rule.step(level) * width;
        let value = acc.value() * h;
        if let Some((err, done)) = refine.push(value, mass.value() * h, opts.target(value)) {
            last_err = err;
            if level >= 3 && done {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: err,
                    evaluations: refine.evaluations,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        estimate: last_err,
        tolerance: opts.abs_tol,
        evaluations: refine.evaluations,
    })
}

/// Integrate over `[a, b]` with the rule selected in `opts`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    match opts.rule {
        Rule::GaussLegendre => gauss_legendre(f, a, b, 2, opts),
        Rule::TanhSinh => tanh_sinh(f, a, b, opts),
    }
}

/// Integrate a smooth integrand over (0, 1) to absolute tolerance `tol`.
pub fn integrate_interval<F>(f: F, tol: f64) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    integrate_interval_with(f, tol, Endpoints::Regular)
}

/// Integrate over (0, 1), choosing the rule from the endpoint behaviour.
pub fn integrate_interval_with<F>(f: F, tol: f64, endpoints: Endpoints) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {tol}")));
    }
    integrate(f, 0.0, 1.0, &QuadOptions::new(tol, 0.0, endpoints.rule()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineQuadrature {
    pub result: QuadratureResult,
    /// Symmetric truncation point: the integral is taken over `[-cutoff, cutoff]`.
    pub cutoff: f64,
    /// Estimated magnitude of the discarded tails.
    pub tail_bound: f64,
    /// Set when the tail bound could not be pushed below `tol / 10`.
    pub tail_warning: bool,
}

const LINE_MAX_RATE_MULTIPLE: f64 = 4000.0;

/// Integrate over the real line for integrands decaying at least like
/// `exp(-decay_scale |k|)`.
///
/// The cutoff grows until the exponential tail bound `|f(+-K)| / decay_scale`
/// drops below `tol / 10`.
pub fn integrate_line<F>(f: F, tol: f64, decay_scale: f64) -> Result<LineQuadrature>
where
    F: Fn(f64) -> Complex64,
{
    if !(tol > 0.0) || !(decay_scale > 0.0) {
        return Err(Error::param("integrate_line needs positive tol and decay_scale"));
    }
    let tail_at = |k: f64| -> f64 {
        [1.0, 0.95, 0.9]
            .iter()
            .map(|s| f(s * k).norm() + f(-s * k).norm())
            .fold(0.0, f64::max)
            / decay_scale
    };
    let mut cutoff = 8.0 / decay_scale;
    let mut tail = tail_at(cutoff);
    let max_cutoff = LINE_MAX_RATE_MULTIPLE / decay_scale;
    while tail > 0.1 * tol && cutoff < max_cutoff {
        cutoff = (cutoff * 1.5).min(max_cutoff);
        tail = tail_at(cutoff);
    }
    if !tail.is_finite() {
        return Err(Error::NonFiniteIntegrand { x: cutoff });
    }
    let panels = ((2.0 * cutoff * decay_scale).ceil() as usize).max(8);
    let opts = QuadOptions::new(0.9 * tol, 0.0, Rule::GaussLegendre);
    let result = gauss_legendre(&f, -cutoff, cutoff, panels, &opts)?;
    Ok(LineQuadrature {
        result,
        cutoff,
        tail_bound: tail,
        tail_warning: tail > 0.1 * tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let rule = GaussLegendre::global();
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn constant_and_sine_squared() {
        let r = integrate_interval(real(|_| 1.0), 1e-14).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-15);
        let r = integrate_interval(real(|x| (PI * x).sin().powi(2)), 1e-14).unwrap();
        assert!((r.value.re - 0.5).abs() < 1e-15);
        assert!(r.error_estimate >= 0.0 && r.evaluations > 0);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let r = integrate_interval_with(real(|x| x.powf(-0.5)), 1e-12, Endpoints::Singular).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-12, "{:?}", r);
        // int_0^1 sqrt(x (1-x)) dx = pi / 8
        let r = integrate_interval_with(real(|x| (x * (1.0 - x)).sqrt()), 1e-13, Endpoints::Singular).unwrap();
        assert!((r.value.re - PI / 8.0).abs() < 1e-13);
    }

    #[test]
    fn deterministic_bits() {
        let f = |x: f64| Complex64::new((3.0 * x).exp() * (PI * x).sin(), x.cos());
        let a = integrate_interval(f, 1e-13).unwrap();
        let b = integrate_interval(f, 1e-13).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }

    #[test]
    fn nonfinite_integrand_is_reported() {
        let r = integrate_interval(real(|x| if x > 0.5 { f64::NAN } else { 1.0 }), 1e-10);
        assert!(matches!(r, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn gaussian_on_the_line() {
        let r = integrate_line(real(|k| (-k * k).exp()), 1e-13, 1.0).unwrap();
        assert!((r.result.value.re - PI.sqrt()).abs() < 1e-13);
        assert!(!r.tail_warning);
    }

    #[test]
    fn impossible_tolerance_does_not_converge() {
        let f = real(|x| (200.0 * x).sin().abs());
        let opts = QuadOptions::new(1e-15, 0.0, Rule::GaussLegendre);
        assert!(matches!(
            gauss_legendre(f, 0.0, 1.0, 1, &opts),
            Err(Error::NonConvergence { .. })
        ));
    }
}
