//! Resolution of unity by two independent strategies, frame functions on
//! phase space, reproducing-kernel checks, and the two integral identities the
//! resolution rests on.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherent::{big_f, coherent_state, overlap, CoherentState, PhasePoint};
use crate::error::{Error, Result};
use crate::numerics::quadrature::{gl_rule, TanhSinhRule};
use crate::numerics::sum::NeumaierSum;
use crate::numerics::{integrate, integrate_line, ln_gamma_modulus_scaled, ln_gamma_real, Endpoints, QuadOptions, Rule};
use crate::params::{PtParams, Units};
use crate::phase_space::PhaseSpace;
use crate::report::VerificationReport;
use crate::sgp::{inner_product, SgpState};
use crate::susy::eigenstate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// The `p`-integral is done exactly by Plancherel; only `x` and `q` are quadratures.
    Parseval,
    /// Truncated `p`-range and plain two-dimensional quadrature of `|<eta, psi>|^2`.
    Direct2d,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Parseval => "parseval",
            Strategy::Direct2d => "direct2d",
        }
    }
}

/// Geometric grading towards each end of the `x` interval: panels shrink by 4
/// down to `L 4^-15 / 2`.
const GRADING_LEVELS: i32 = 15;
const P_DOUBLINGS: usize = 6;
const Q_MIN_LEVEL: usize = 3;

/// `x` nodes of a composite Gauss-Legendre grid graded towards both ends,
/// with no panel wider than `h_max`. Each node carries its distance to `L`.
fn graded_grid(length: f64, h_max: f64) -> Vec<(f64, f64, f64)> {
    let (gx, gw) = gl_rule();
    let half = 0.5 * length;
    let mut breaks = vec![0.0];
    breaks.extend((1..=GRADING_LEVELS).rev().map(|j| half * 4f64.powi(-j)));
    breaks.push(half);
    let mut left = Vec::new();
    for win in breaks.windows(2) {
        let panels = ((win[1] - win[0]) / h_max).ceil().max(1.0) as usize;
        let width = (win[1] - win[0]) / panels as f64;
        for i in 0..panels {
            let a = win[0] + i as f64 * width;
            for (t, w) in gx.iter().zip(gw) {
                left.push((a + 0.5 * width * (t + 1.0), 0.5 * width * w));
            }
        }
    }
    let mut nodes: Vec<_> = left.iter().map(|&(d, w)| (d, length - d, w)).collect();
    nodes.extend(left.iter().rev().map(|&(d, w)| (length - d, d, w)));
    nodes
}

struct DirectQ {
    marginal: f64,
    tail: f64,
    p_max: f64,
    capped: bool,
    evaluations: usize,
}

/// `int dp/(2 pi hbar) |<eta_{q,p}, psi>|^2` over a truncated momentum window,
/// with the algebraic tail estimate of what lies outside it.
fn direct_q_marginal(nu: f64, units: &Units, psi: &SgpState, q: f64, lq: f64, tail_target: f64) -> Result<DirectQ> {
    let l = units.length;
    let hbar = units.hbar;
    let th = PI * q.min(lq) / l;
    let cot = if q <= lq { 1.0 / th.tan() } else { -1.0 / th.tan() };
    let a = -(nu + 1.0) * cot;
    // ln N_nu(q) with the e^{-pi a} factor of a > 0 folded into the exponent below
    let ln_n = (nu + 1.0) * 2f64.ln() + ln_gamma_modulus_scaled(nu + 2.0, a)? - 0.5 * l.ln() - 0.5 * ln_gamma_real(2.0 * nu + 3.0)?;
    let exponent = nu + 1.0 + psi.min_exponent();
    let (gx, gw) = gl_rule();
    let pc = hbar * psi.gamma().im;
    let dp = 4.0 * PI * hbar / l;
    let mut panels = 8usize;
    let mut evaluations = 0;
    for doubling in 0..=P_DOUBLINGS {
        let p_max = panels as f64 * dp;
        let grid = graded_grid(l, (2.0 * PI * hbar / p_max).min(l / 16.0));
        let p_start = pc - p_max;
        let np = 2 * panels;
        let mut g = vec![Complex64::new(0.0, 0.0); np * gx.len()];
        let offsets: Vec<f64> = gx.iter().map(|t| 0.5 * dp * (t + 1.0)).collect();
        for &(x, lc, w) in &grid {
            let d = x.min(lc);
            let lin = if a < 0.0 { a * PI * x / l } else { -a * PI * lc / l };
            let amp = (ln_n + lin + (nu + 1.0) * (PI * d / l).sin().ln()).exp();
            let f = psi.eval_raw(x) * (amp * w);
            if f.norm() == 0.0 {
                continue;
            }
            let step = Complex64::from_polar(1.0, -dp * x / hbar);
            let mut base: Vec<Complex64> = offsets
                .iter()
                .map(|o| f * Complex64::from_polar(1.0, -(p_start + o) * x / hbar))
                .collect();
            for panel in g.chunks_mut(gx.len()) {
                for (acc, b) in panel.iter_mut().zip(base.iter_mut()) {
                    *acc += *b;
                    *b *= step;
                }
            }
        }
        evaluations += grid.len() * (1 + np * gx.len());
        let mut sum = NeumaierSum::new();
        for panel in g.chunks(gx.len()) {
            for (v, w) in panel.iter().zip(gw) {
                sum.add(v.norm_sqr() * 0.5 * dp * w);
            }
        }
        let edge = |panel: &[Complex64]| panel.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        let first = edge(&g[..gx.len()]);
        let last = edge(&g[g.len() - gx.len()..]);
        let norm = 1.0 / (2.0 * PI * hbar);
        let tail = (first + last) * p_max / (2.0 * exponent + 1.0) * norm;
        let marginal = sum.value() * norm;
        if tail <= tail_target || doubling == P_DOUBLINGS {
            return Ok(DirectQ {
                marginal,
                tail,
                p_max,
                capped: tail > tail_target,
                evaluations,
            });
        }
        panels *= 2;
    }
    unreachable!("the last doubling always returns")
}

struct Direct2d {
    value: f64,
    tail: f64,
    p_max: f64,
    capped: usize,
    evaluations: usize,
}

fn direct2d(nu: f64, units: &Units, psi: &SgpState, norm2: f64, tol: f64) -> Result<Direct2d> {
    let l = units.length;
    let rule = TanhSinhRule::global();
    let tail_target = 0.1 * tol * norm2 / l;
    let mut acc = NeumaierSum::new();
    let mut tail = NeumaierSum::new();
    let mut p_max: f64 = 0.0;
    let mut capped = 0;
    let mut evaluations = 0;
    let mut previous = f64::NAN;
    for lvl in 0..=rule.max_level() {
        let parts = rule
            .level(lvl)
            .par_iter()
            .map(|n| {
                let d = direct_q_marginal(nu, units, psi, l * n.x, l * n.comp, tail_target)?;
                Ok((d, n.weight))
            })
            .collect::<Result<Vec<_>>>()?;
        for (d, w) in parts {
            acc.add(d.marginal * w);
            tail.add(d.tail * w);
            p_max = p_max.max(d.p_max);
            capped += d.capped as usize;
            evaluations += d.evaluations;
        }
        let h = rule.step(lvl) * l;
        let value = acc.value() * h;
        if lvl >= Q_MIN_LEVEL && (value - previous).abs() <= 0.1 * tol * norm2 {
            return Ok(Direct2d {
                value,
                tail: tail.value() * h,
                p_max,
                capped,
                evaluations,
            });
        }
        previous = value;
    }
    Err(Error::NonConvergence {
        estimate: f64::NAN,
        tolerance: tol,
        evaluations,
    })
}

/// Checks `int |<eta_{q,p}, psi>|^2 dq dp/(2 pi hbar) = ||psi||^2` for the
/// coherent states of index `nu` (any `nu > -1`).
///
/// The residual is relative to `||psi||^2`.
pub fn verify_resolution(nu: f64, units: Units, psi: &SgpState, strategy: Strategy, tol: f64) -> Result<VerificationReport> {
    if !(tol > 0.0) {
        return Err(Error::param("tolerance must be positive"));
    }
    let ps = PhaseSpace::new(nu, units)?;
    let norm2 = inner_product(psi, psi)?.re;
    let report = match strategy {
        Strategy::Parseval => {
            let s = ps.sample(psi)?;
            let r = ps.projector(&s, &s, &QuadOptions::new(0.0, 1e-3 * tol, Rule::TanhSinh))?;
            VerificationReport::new("resolution_of_unity", (r.value.re - norm2).abs() / norm2, tol)
                .with_sides(r.value, Complex64::new(norm2, 0.0))
                .input("error_estimate", r.error_estimate)
                .input("evaluations", r.evaluations)
        }
        Strategy::Direct2d => {
            let d = direct2d(nu, &units, psi, norm2, tol)?;
            let mut r = VerificationReport::new("resolution_of_unity", (d.value - norm2).abs() / norm2, tol)
                .with_sides(Complex64::new(d.value, 0.0), Complex64::new(norm2, 0.0))
                .input("p_max", d.p_max)
                .input("tail_bound", d.tail)
                .input("evaluations", d.evaluations)
                .note("momentum window |p - p_c| <= P chosen per q until the algebraic tail estimate |g(P)|^2 P/(2a+1) drops below tol/10");
            if d.capped > 0 {
                r = r.note(format!("truncation warning: the tail target was not met at {} q nodes", d.capped));
            }
            r
        }
    };
    Ok(report
        .with_strategy(strategy.name())
        .input("nu", nu)
        .input("L", units.length)
        .input("hbar", units.hbar))
}

/// `psi_n(q, p) = <eta^{[nu]}_{q,p}, phi_n>` with `phi_n` the eigenstates of `params`.
pub fn frame_function(nu: f64, params: &PtParams, n: usize, point: PhasePoint) -> Result<Complex64> {
    let eta = coherent_state(nu, &params.units(), point)?;
    inner_product(&eta.body, &eigenstate(params, n)?)
}

/// `int conj(psi_n) psi_m dq dp/(2 pi hbar)` by the Parseval reduction.
pub fn frame_gram(nu: f64, params: &PtParams, n: usize, m: usize, tol: f64) -> Result<Complex64> {
    let ps = PhaseSpace::new(nu, params.units())?;
    let a = ps.sample(&eigenstate(params, n)?)?;
    let b = ps.sample(&eigenstate(params, m)?)?;
    Ok(ps.projector(&a, &b, &QuadOptions::new(1e-3 * tol, 1e-3 * tol, Rule::TanhSinh))?.value)
}

/// Checks `K(a; c) = int K(a; b) K(b; c) db/(2 pi hbar)` for every pair of
/// sample points, with `K(a; b) = <eta_a, eta_b>` from the closed form.
pub fn kernel_reproducing_check(nu: f64, units: Units, points: &[PhasePoint], tol: f64) -> Result<VerificationReport> {
    if points.len() < 2 {
        return Err(Error::param("the kernel check needs at least two sample points"));
    }
    let ps = PhaseSpace::new(nu, units)?;
    let states = points.iter().map(|&p| coherent_state(nu, &units, p)).collect::<Result<Vec<CoherentState>>>()?;
    let samples = states.iter().map(|s| ps.sample(&s.body)).collect::<Result<Vec<_>>>()?;
    let opts = QuadOptions::new(1e-3 * tol, 1e-3 * tol, Rule::TanhSinh);
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in i..points.len() {
            pairs.push((i, j));
        }
    }
    let mut worst = (f64::NEG_INFINITY, Complex64::default(), Complex64::default());
    for (i, j) in pairs.iter().copied() {
        let reproduced = ps.projector(&samples[i], &samples[j], &opts)?.value;
        let closed = overlap(&states[i], &states[j])?;
        let r = (reproduced - closed).norm();
        if r > worst.0 {
            worst = (r, reproduced, closed);
        }
    }
    Ok(VerificationReport::new("reproducing_kernel", worst.0, tol)
        .with_strategy("parseval")
        .with_sides(worst.1, worst.2)
        .input("nu", nu)
        .input("L", units.length)
        .input("pairs", pairs.len())
        .input("points", serde_json::to_value(points).unwrap_or_default())
        .note("lhs: int K(a;b) K(b;c) db/(2 pi hbar), rhs: closed-form K(a;c); residual is the largest absolute difference"))
}

/// `int_0^1 sin^{2nu+2}(pi x) e^{z x} dx` by quadrature, the oracle for `F_nu`.
pub fn big_f_quadrature(nu: f64, z: Complex64) -> Result<Complex64> {
    let opts = QuadOptions::new(0.0, 1e-14, Endpoints::Singular.rule());
    Ok(integrate(|x| (z * x).exp() * (PI * x.min(1.0 - x)).sin().powf(2.0 * nu + 2.0), 0.0, 1.0, &opts)?.value)
}

/// Closed form of `F_nu(z)` against quadrature; residual relative to the larger
/// side, floored at `1e-3 F_nu(Re z)` so that zeros of `F_nu` stay checkable.
pub fn check_big_f(nu: f64, z: Complex64, tol: f64) -> Result<VerificationReport> {
    let closed = big_f(nu, z)?;
    let quad = big_f_quadrature(nu, z)?;
    let mass = big_f(nu, Complex64::new(z.re, 0.0))?.re;
    let residual = (closed - quad).norm() / closed.norm().max(quad.norm()).max(1e-3 * mass);
    Ok(VerificationReport::new("big_f", residual, tol)
        .with_sides(closed, quad)
        .input("nu", nu)
        .input("z", [z.re, z.im]))
}

/// The `nu x z` grid for the `F_nu` identity: four indices times 25 points with
/// `|Re z|, |Im z| <= 20`.
pub fn big_f_grid() -> Vec<(f64, Complex64)> {
    let mut out = Vec::new();
    for &nu in &[0.0, 0.5, 1.0, 2.5] {
        for &re in &[-20.0, -9.5, 0.0, 7.25, 20.0] {
            for &im in &[-20.0, -6.5, 0.0, 3.7, 17.0] {
                out.push((nu, Complex64::new(re, im)));
            }
        }
    }
    out
}

/// Integrand of the inverse Fourier identity behind the resolution of unity:
/// `4^nu |Gamma(nu+1 - i k/2pi)|^2 e^{-k/2} e^{k x} / (pi^2 Gamma(2nu+2))`.
pub fn fourier_integrand(nu: f64, x: f64, k: f64) -> Result<f64> {
    let ln_gamma_abs = ln_gamma_modulus_scaled(nu + 1.0, k / (2.0 * PI))? - 0.25 * k.abs();
    let ln = nu * 4f64.ln() + 2.0 * ln_gamma_abs - 0.5 * k + k * x - 2.0 * PI.ln() - ln_gamma_real(2.0 * nu + 2.0)?;
    Ok(ln.exp())
}

/// `int dk fourier_integrand(nu, x, k) = 1 / sin^{2nu+2}(pi x)` for `0 < x < 1`,
/// `nu > -1`; residual relative to the right side.
pub fn check_fourier_identity(nu: f64, x: f64, tol: f64) -> Result<VerificationReport> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain { x, length: 1.0 });
    }
    if !(nu > -1.0) {
        return Err(Error::param(format!("the Fourier identity needs nu > -1, got {nu}")));
    }
    let rhs = (PI * x.min(1.0 - x)).sin().powf(-(2.0 * nu + 2.0));
    let decay = x.min(1.0 - x);
    let line = integrate_line(|k| Complex64::new(fourier_integrand(nu, x, k).unwrap_or(f64::NAN), 0.0), 1e-3 * tol * rhs, decay)?;
    let lhs = line.result.value.re;
    let mut r = VerificationReport::new("fourier_identity", (lhs - rhs).abs() / rhs, tol)
        .with_sides(Complex64::new(lhs, 0.0), Complex64::new(rhs, 0.0))
        .input("nu", nu)
        .input("x", x)
        .input("cutoff", line.cutoff)
        .input("tail_bound", line.tail_bound);
    if line.tail_warning {
        r = r.note("truncation tail dominates the tolerance");
    }
    Ok(r)
}

/// The six `(x, nu)` points of the Fourier identity check.
pub fn fourier_grid() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &nu in &[0.0, 1.0] {
        for &x in &[0.1, 0.25, 0.5] {
            out.push((x, nu));
        }
    }
    out
}

/// Both integral identities on their grids, reports in grid order.
pub fn appendix_suite(big_f_tol: f64, fourier_tol: f64) -> Result<Vec<VerificationReport>> {
    let mut reports = big_f_grid()
        .par_iter()
        .map(|&(nu, z)| check_big_f(nu, z, big_f_tol))
        .collect::<Result<Vec<_>>>()?;
    reports.extend(
        fourier_grid()
            .par_iter()
            .map(|&(x, nu)| check_fourier_identity(nu, x, fourier_tol))
            .collect::<Result<Vec<_>>>()?,
    );
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ground_state;
    use crate::sgp::random_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parseval_on_examples() {
        let g = ground_state(&PtParams::new(0.0, 0.0).unwrap()).unwrap();
        let r = verify_resolution(0.0, Units::default(), &g, Strategy::Parseval, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let e3 = eigenstate(&PtParams::new(1.0, 2.0).unwrap(), 3).unwrap();
        let r = verify_resolution(1.0, Units::default(), &e3, Strategy::Parseval, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn direct2d_on_ground_state() {
        let g = ground_state(&PtParams::new(0.0, 0.0).unwrap()).unwrap();
        let r = verify_resolution(0.0, Units::default(), &g, Strategy::Direct2d, 1e-4).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.inputs["p_max"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn direct2d_extended_range_and_complex_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(&mut rng, 1.7, 1, 2.0, 2.0).unwrap();
        let units = Units::with_length(2.0).unwrap();
        for nu in [-0.5, 0.7] {
            let p = verify_resolution(nu, units, &psi, Strategy::Parseval, 1e-8).unwrap();
            let d = verify_resolution(nu, units, &psi, Strategy::Direct2d, 1e-4).unwrap();
            assert!(p.pass && d.pass, "{p:?} {d:?}");
            assert!((p.lhs.unwrap() - d.lhs.unwrap()).norm() < 1e-4);
        }
    }

    #[test]
    fn graded_grid_integrates_powers() {
        let grid = graded_grid(3.0, 0.1);
        let s: f64 = grid.iter().map(|&(x, _, w)| w * x.sqrt()).sum();
        assert!((s - 2.0 / 3.0 * 3f64.powf(1.5)).abs() < 1e-9);
        assert!(grid.iter().all(|&(x, lc, _)| (x + lc - 3.0).abs() < 1e-15));
    }

    #[test]
    fn frame_function_examples() {
        let p = PtParams::new(0.0, 0.0).unwrap();
        let v = frame_function(0.0, &p, 0, PhasePoint::new(0.5, 0.0)).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
        for &(q, pp) in &[(0.1, 3.0), (0.8, -20.0), (0.5, 1.0)] {
            for n in 0..3 {
                assert!(frame_function(0.0, &p, n, PhasePoint::new(q, pp)).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
        assert!((frame_gram(0.0, &p, 0, 0, 1e-6).unwrap() - 1.0).norm() < 1e-6);
        assert!(frame_gram(0.0, &p, 0, 1, 1e-6).unwrap().norm() < 1e-6);
    }

    #[test]
    fn reproducing_kernel() {
        let pts = [PhasePoint::new(0.5, 0.0), PhasePoint::new(0.5, 1.0), PhasePoint::new(0.3, -4.0)];
        let r = kernel_reproducing_check(0.0, Units::default(), &pts, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.inputs["pairs"], 6);
        assert!(kernel_reproducing_check(0.0, Units::default(), &pts[..1], 1e-6).is_err());
    }

    #[test]
    fn fourier_identity_examples() {
        assert!((fourier_integrand(0.0, 0.5, 0.0).unwrap() * PI * PI - 1.0).abs() < 1e-14);
        for (x, nu) in fourier_grid() {
            let r = check_fourier_identity(nu, x, 1e-8).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let r = check_fourier_identity(-0.5, 0.3, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
        let r = check_fourier_identity(0.0, 0.25, 1e-8).unwrap();
        assert!((r.lhs.unwrap().re - 2.0).abs() < 1e-8);
    }

    #[test]
    fn big_f_reports() {
        assert_eq!(big_f_grid().len(), 100);
        let r = check_big_f(0.0, Complex64::new(0.0, 4.0 * PI), 1e-11).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
