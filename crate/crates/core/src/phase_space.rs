//! Phase-space integrals `int dq dp/(2 pi hbar) f(q,p) <phi,eta_{q,p}><eta_{q,p},psi>`
//! with the `p`-integral done exactly.
//!
//! For `f = sum_k g_k(q) p^k`, `k <= 2`, Parseval turns the `p`-integral into
//! `int dx rho_q(x) M_k(x, q)` with `rho_q = N^2 sin^{2nu+2}(pi x/L) e^{2 W_{nu,0}(q) x/hbar}`,
//! `M_0 = conj(phi) psi`, `M_1 = -i hbar conj(phi) D psi`, `M_2 = hbar^2 conj(D phi) D psi`
//! and `D = d/dx + (nu+1)(pi/L) cot(pi x/L) + W_{nu,0}(q)/hbar`. The remaining
//! `q`-integral is tanh-sinh, evaluated level by level in parallel and reduced
//! in node order.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{QuadOptions, QuadratureResult, Refinement, TanhSinhRule};
use crate::numerics::sum::{ComplexSum, NeumaierSum};
use crate::numerics::{ln_gamma_modulus_scaled, ln_gamma_real};
use crate::params::Units;
use crate::sgp::SgpState;

/// Deepest inner tanh-sinh level sampled in `x`.
const X_MAX_LEVEL: usize = 9;
const MIN_LEVEL: usize = 3;

/// Outer quadrature point with the trigonometric data the symbol profiles need.
#[derive(Debug, Clone, Copy)]
pub struct QPoint {
    pub q: f64,
    /// `sin(pi q / L)`, computed from the nearer endpoint.
    pub sin: f64,
    /// `cot(pi q / L)`.
    pub cot: f64,
}

#[derive(Debug, Clone, Copy)]
struct XNode {
    x: f64,
    lc: f64,
    weight: f64,
    sin: f64,
    ln_sin: f64,
}

/// A state and its derivative sampled on the shared `x` nodes.
#[derive(Debug, Clone)]
pub struct Sampled {
    values: Vec<Vec<[Complex64; 2]>>,
}

/// Per-`q` data: `a = (nu+1) lambda_q` and the `x`-independent part of `ln rho_q`.
struct QData {
    point: QPoint,
    lc: f64,
    a: f64,
    ln_base: f64,
}

pub struct PhaseSpace {
    nu: f64,
    units: Units,
    ln_const: f64,
    xnodes: Vec<Vec<XNode>>,
}

impl PhaseSpace {
    /// Valid for `nu > -1`, the range where the coherent states resolve unity.
    pub fn new(nu: f64, units: Units) -> Result<Self> {
        if !(nu > -1.0 && nu.is_finite()) {
            return Err(Error::param(format!("phase-space integrals need nu > -1, got {nu}")));
        }
        let l = units.length;
        let rule = TanhSinhRule::global();
        let xnodes = (0..=X_MAX_LEVEL.min(rule.max_level()))
            .map(|lvl| {
                rule.level(lvl)
                    .iter()
                    .map(|n| {
                        let (x, lc) = (l * n.x, l * n.comp);
                        let sin = (PI * x.min(lc) / l).sin();
                        XNode {
                            x,
                            lc,
                            weight: n.weight,
                            sin,
                            ln_sin: sin.ln(),
                        }
                    })
                    .collect()
            })
            .collect();
        let ln_const = 2.0 * (nu + 1.0) * 2f64.ln() - l.ln() - ln_gamma_real(2.0 * nu + 3.0)?;
        Ok(Self {
            nu,
            units,
            ln_const,
            xnodes,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn units(&self) -> Units {
        self.units
    }

    /// Sample `state` and its derivative on every `x` node.
    pub fn sample(&self, state: &SgpState) -> Result<Sampled> {
        if (state.length() - self.units.length).abs() > 1e-12 * self.units.length {
            return Err(Error::param("state length does not match the phase-space frame"));
        }
        let d = state.differentiate();
        let values = self
            .xnodes
            .iter()
            .map(|lvl| {
                lvl.iter()
                    .map(|n| {
                        let v = [state.eval_raw(n.x), d.eval_raw(n.x)];
                        if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                            Ok(v)
                        } else {
                            Err(Error::NonFiniteIntegrand { x: n.x })
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sampled { values })
    }

    fn q_data(&self, q: f64, lc: f64) -> Result<QData> {
        let l = self.units.length;
        let th = PI * q.min(lc) / l;
        let sin = th.sin();
        let cot = if q <= lc { 1.0 / th.tan() } else { -1.0 / th.tan() };
        let a = -(self.nu + 1.0) * cot;
        let ln_base = self.ln_const + 2.0 * ln_gamma_modulus_scaled(self.nu + 2.0, a)?;
        Ok(QData {
            point: QPoint { q, sin, cot },
            lc,
            a,
            ln_base,
        })
    }

    /// `ln rho_q(x)`, arranged so that no term grows with `|a|` where `rho` matters.
    fn ln_rho(&self, qd: &QData, n: &XNode) -> f64 {
        let l = self.units.length;
        let exp_part = if qd.a < 0.0 {
            2.0 * PI * qd.a * n.x / l
        } else {
            -2.0 * PI * qd.a * n.lc / l
        };
        qd.ln_base + exp_part + (2.0 * self.nu + 2.0) * n.ln_sin
    }

    /// `c(x, q) = (nu+1)(pi/L)(cot(pi x/L) - cot(pi q/L))` in the cancellation-free
    /// form `(nu+1)(pi/L) sin(pi(q-x)/L) / (sin(pi x/L) sin(pi q/L))`.
    fn drift(&self, qd: &QData, n: &XNode) -> f64 {
        let l = self.units.length;
        let half = 0.5 * l;
        let diff = if n.x > half && qd.point.q > half {
            n.lc - qd.lc
        } else {
            qd.point.q - n.x
        };
        (self.nu + 1.0) * PI / l * (PI * diff / l).sin() / (n.sin * qd.point.sin)
    }

    /// Inner `x`-integral at one `q`: returns (value, abs error, abs mass, evaluations).
    fn x_integral(&self, qd: &QData, a: &Sampled, b: &Sampled, g: [f64; 3], rel_tol: f64) -> (Complex64, f64, f64, usize) {
        let rule = TanhSinhRule::global();
        let hbar = self.units.hbar;
        let l = self.units.length;
        let need_d = g[1] != 0.0 || g[2] != 0.0;
        let mut refine = Refinement::new();
        let mut acc = ComplexSum::new();
        let mut mass = NeumaierSum::new();
        let mut last = (Complex64::new(0.0, 0.0), f64::INFINITY, 0.0);
        for (lvl, nodes) in self.xnodes.iter().enumerate() {
            for (i, n) in nodes.iter().enumerate() {
                let rho = self.ln_rho(qd, n).exp();
                if rho == 0.0 {
                    continue;
                }
                let [fa, da] = a.values[lvl][i];
                let [fb, db] = b.values[lvl][i];
                let mut m = fa.conj() * fb * g[0];
                if need_d {
                    let c = self.drift(qd, n);
                    let dfb = db + fb * c;
                    if g[1] != 0.0 {
                        m += Complex64::new(0.0, -hbar * g[1]) * fa.conj() * dfb;
                    }
                    if g[2] != 0.0 {
                        let dfa = da + fa * c;
                        m += dfa.conj() * dfb * (hbar * hbar * g[2]);
                    }
                }
                let v = m * (rho * n.weight);
                acc.add(v);
                mass.add(v.norm());
            }
            refine.evaluations += nodes.len();
            let h = rule.step(lvl) * l;
            let value = acc.value() * h;
            let m = mass.value() * h;
            if let Some((err, done)) = refine.push(value, m, rel_tol * value.norm()) {
                last = (value, err, m);
                if lvl >= MIN_LEVEL && done {
                    break;
                }
            }
        }
        (last.0, last.1, last.2, refine.evaluations)
    }

    /// `sum_k int dq g_k(q) int dx rho_q(x) M_k(x, q)` for profiles `g = profile(q)`.
    ///
    /// `opts.rule` is ignored; the outer rule is always tanh-sinh.
    pub fn form<G>(&self, a: &Sampled, b: &Sampled, profile: G, opts: &QuadOptions) -> Result<QuadratureResult>
    where
        G: Fn(&QPoint) -> [f64; 3] + Sync,
    {
        let rule = TanhSinhRule::global();
        let l = self.units.length;
        let inner_rel = 0.1 * opts.rel_tol;
        let mut refine = Refinement::new();
        let mut acc = ComplexSum::new();
        let mut mass = NeumaierSum::new();
        let mut inner_err = NeumaierSum::new();
        let mut last_err = f64::INFINITY;
        for lvl in 0..=rule.max_level() {
            let nodes = rule.level(lvl);
            let parts = nodes
                .par_iter()
                .map(|n| {
                    let qd = self.q_data(l * n.x, l * n.comp)?;
                    let g = profile(&qd.point);
                    let (v, err, m, evals) = self.x_integral(&qd, a, b, g, inner_rel);
                    Ok((v * n.weight, err * n.weight, m * n.weight, evals))
                })
                .collect::<Result<Vec<_>>>()?;
            for (v, err, m, evals) in parts {
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::NonFiniteIntegrand { x: f64::NAN });
                }
                acc.add(v);
                mass.add(m);
                inner_err.add(err);
                refine.evaluations += evals;
            }
            let h = rule.step(lvl) * l;
            let value = acc.value() * h;
            let target = opts.target(value);
            if let Some((err, done)) = refine.push(value, mass.value() * h, target) {
                let total = err + inner_err.value() * h;
                last_err = total;
                if lvl >= MIN_LEVEL && done {
                    let floor = 64.0 * f64::EPSILON * mass.value() * h;
                    if total <= target.max(floor) * 10.0 {
                        return Ok(QuadratureResult {
                            value,
                            error_estimate: total,
                            evaluations: refine.evaluations,
                        });
                    }
                }
            }
        }
        Err(Error::NonConvergence {
            estimate: last_err,
            tolerance: opts.rel_tol,
            evaluations: refine.evaluations,
        })
    }

    /// `int dq dp/(2 pi hbar) <phi, eta><eta, psi>`, which resolution of unity makes `<phi, psi>`.
    pub fn projector(&self, a: &Sampled, b: &Sampled, opts: &QuadOptions) -> Result<QuadratureResult> {
        self.form(a, b, |_| [1.0, 0.0, 0.0], opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::Rule;
    use crate::params::{ground_state, PtParams};
    use crate::sgp::inner_product;

    fn opts() -> QuadOptions {
        QuadOptions::new(0.0, 1e-11, Rule::TanhSinh)
    }

    #[test]
    fn resolution_of_unity_on_ground_state() {
        let ps = PhaseSpace::new(0.0, Units::default()).unwrap();
        let g = ps.sample(&ground_state(&PtParams::new(0.0, 0.0).unwrap()).unwrap()).unwrap();
        let r = ps.projector(&g, &g, &opts()).unwrap();
        assert!((r.value - Complex64::new(1.0, 0.0)).norm() < 1e-10, "{:?}", r);
    }

    #[test]
    fn projector_reproduces_inner_products() {
        let p = PtParams::new(1.0, 2.0).unwrap();
        let a = ground_state(&p).unwrap();
        let b = SgpState::new(2.5, Complex64::new(0.4, 1.3), vec![Complex64::new(1.0, 0.5), Complex64::new(-0.3, 0.2)], 1.0).unwrap();
        let direct = inner_product(&a, &b).unwrap();
        for &nu in &[-0.5, 0.0, 1.5] {
            let ps = PhaseSpace::new(nu, Units::default()).unwrap();
            let r = ps.projector(&ps.sample(&a).unwrap(), &ps.sample(&b).unwrap(), &opts()).unwrap();
            assert!((r.value - direct).norm() < 1e-9, "nu = {nu}: {} vs {direct}", r.value);
        }
    }

    #[test]
    fn momentum_moment_of_real_state_vanishes() {
        let ps = PhaseSpace::new(0.0, Units::default()).unwrap();
        let g = ps.sample(&ground_state(&PtParams::new(0.0, 0.0).unwrap()).unwrap()).unwrap();
        let r = ps.form(&g, &g, |_| [0.0, 1.0, 0.0], &QuadOptions::new(1e-12, 1e-11, Rule::TanhSinh)).unwrap();
        assert!(r.value.norm() < 1e-10, "{:?}", r);
    }

    #[test]
    fn rejects_out_of_range_nu() {
        assert!(PhaseSpace::new(-1.0, Units::default()).is_err());
    }

    #[test]
    fn scaled_lengths() {
        let units = Units::new(2.5, 1.0, 0.7).unwrap();
        let p = PtParams::with_units(0.5, 0.0, units).unwrap();
        let ps = PhaseSpace::new(0.5, units).unwrap();
        let g = ps.sample(&ground_state(&p).unwrap()).unwrap();
        let r = ps.projector(&g, &g, &opts()).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-10, "{:?}", r);
    }
}
