//! Periodic complex Monge-Ampère solver for `(ω + i∂∂̄ψ)^n = g ω_X^n`,
//! `sup ψ = 0`.
//!
//! Damped Newton on the log-determinant form. The discrete equation is only
//! compatible up to aliasing, so the unknowns are `(ψ, c)` with
//! `log det(ω + i∂∂̄ψ) = log(g det ω_X) + c` and `mean ψ = 0`; `c` is reported
//! and counted in the residual. Linear steps use BiCGSTAB preconditioned by
//! the constant-coefficient operator with the mean of `(ω + i∂∂̄ψ)^{-1}`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::Torus;
use crate::grid::{pairwise_sum, HermitianField, Spectral};
use crate::linalg::Herm;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;
/// Relative floor applied to the density before renormalization.
pub const DENSITY_FLOOR: f64 = 1e-12;
/// Defect above which the density is rescaled to be compatible.
pub const COMPATIBILITY_TOL: f64 = 1e-8;
const STAGE_TOLERANCE: f64 = 1e-6;
const CONTINUATION: [f64; 4] = [0.25, 0.5, 0.75, 1.0];
const MIN_STAGE: f64 = 1.0 / 1024.0;
const STALL_WINDOW: usize = 8;

/// `τ_k(x) = log(1 + e^{kx}) / k`, a smooth positive upper bound of `max(x,0)`.
pub fn tau_k(x: f64, k: f64) -> f64 {
    let kx = k * x;
    if kx > 0.0 {
        x + (-kx).exp().ln_1p() / k
    } else {
        kx.exp().ln_1p() / k
    }
}

/// Sharpness parameter of the smoothed positive part.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedPlus {
    pub k: f64,
}

impl SmoothedPlus {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(LabError::InvalidParameter(format!("sharpness must be positive, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn eval(&self, x: f64) -> f64 {
        tau_k(x, self.k)
    }

    /// Uniform gap `sup (τ_k(x) − max(x,0)) = log 2 / k`.
    pub fn max_gap(&self) -> f64 {
        std::f64::consts::LN_2 / self.k
    }
}

#[derive(Clone, Debug)]
pub struct MASolveProblem {
    pub omega: HermitianField,
    /// Density `g` against `ω_X^n`, after flooring and renormalization.
    pub rhs: Vec<f64>,
    /// `(∫ g ω_X^n − V_ω)/V_ω` of the density as supplied.
    pub compatibility_defect: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl MASolveProblem {
    /// Validates `g`, floors it at `DENSITY_FLOOR · max g` and rescales it to
    /// `∫ g ω_X^n = ∫ ω^n` when the defect exceeds `COMPATIBILITY_TOL`.
    pub fn new(torus: &Torus, omega: HermitianField, rhs: Vec<f64>) -> Result<Self> {
        if rhs.len() != torus.grid.len() {
            return Err(LabError::DimensionMismatch { expected: torus.grid.len(), got: rhs.len() });
        }
        if let Some(index) = rhs.iter().position(|g| !g.is_finite() || *g < 0.0) {
            return Err(LabError::NonFinite { what: "density (must be finite and nonnegative)", index });
        }
        if let Some(point) = omega.points().iter().position(|h| h.cholesky().is_none()) {
            return Err(LabError::NotPositiveDefinite { point });
        }
        let top = rhs.iter().cloned().fold(0.0, f64::max);
        if !(top > 0.0) {
            return Err(LabError::InvalidParameter("density vanishes identically".into()));
        }
        let floor = DENSITY_FLOOR * top;
        let mut rhs: Vec<f64> = rhs.into_iter().map(|g| g.max(floor)).collect();
        let v_omega = torus.form_volume(&omega);
        let mass = torus.integrate_weighted(&rhs, None)?;
        let defect = (mass - v_omega) / v_omega;
        if defect.abs() > COMPATIBILITY_TOL {
            log::warn!("density violates compatibility by {defect:.3e}; renormalizing");
            let scale = v_omega / mass;
            rhs.iter_mut().for_each(|g| *g *= scale);
        }
        Ok(Self {
            omega,
            rhs,
            compatibility_defect: defect,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_max_iterations(mut self, iters: usize) -> Self {
        self.max_iterations = iters;
        self
    }
}

/// Solver diagnostics, serialized as the solver report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub residual: f64,
    pub damping_events: usize,
    pub continuation_path: Vec<f64>,
    pub fallback_steps: usize,
    pub constant_shift: f64,
    pub compatibility_defect: f64,
}

#[derive(Clone, Debug)]
pub struct MASolution {
    /// Sup-normalized solution.
    pub psi: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub report: SolverReport,
}

/// Sup-norm of `log det(ω + i∂∂̄ψ) − log(g det ω_X)`; `+inf` when the form
/// is not positive definite somewhere.
pub fn ma_residual(torus: &Torus, psi: &[f64], problem: &MASolveProblem) -> f64 {
    shifted_residual(torus, psi, problem, 0.0)
}

/// Residual against the density rescaled by `e^c`.
pub fn shifted_residual(torus: &Torus, psi: &[f64], problem: &MASolveProblem, c: f64) -> f64 {
    let hess = torus.spectral.hessian(psi);
    let per_point: Vec<f64> = (0..hess.len())
        .into_par_iter()
        .map(|i| match problem.omega.at(i).add(&hess[i]).cholesky() {
            Some(ch) => (ch.log_det() - (problem.rhs[i] * torus.det_x[i]).ln() - c).abs(),
            None => f64::INFINITY,
        })
        .collect();
    per_point.into_iter().fold(0.0, f64::max)
}

pub fn solve_ma(torus: &Torus, problem: &MASolveProblem) -> Result<MASolution> {
    solve_ma_from(torus, problem, None)
}

/// Solves starting from `initial` (must keep `ω + i∂∂̄ψ` positive); without
/// a starting point the solve continues from `ψ = 0` along
/// `g_θ = (1−θ) det ω/det ω_X + θ g`.
pub fn solve_ma_from(torus: &Torus, problem: &MASolveProblem, initial: Option<&[f64]>) -> Result<MASolution> {
    if !(problem.tolerance > 0.0) {
        return Err(LabError::InvalidParameter("tolerance must be positive".into()));
    }
    let mut newton = Newton::new(torus, &problem.omega);
    let log_g: Vec<f64> = problem.rhs.iter().zip(&torus.det_x).map(|(g, d)| (g * d).ln()).collect();
    let mut report = SolverReport { compatibility_defect: problem.compatibility_defect, ..Default::default() };

    let mut psi = match initial {
        Some(v) => {
            if v.len() != torus.grid.len() {
                return Err(LabError::DimensionMismatch { expected: torus.grid.len(), got: v.len() });
            }
            let m = pairwise_sum(v) / v.len() as f64;
            v.iter().map(|x| x - m).collect()
        }
        None => vec![0.0; torus.grid.len()],
    };
    let mut c = 0.0;

    if initial.is_some() {
        let out = newton.run(&psi, c, &log_g, problem.tolerance, problem.max_iterations, &mut report);
        match out {
            Ok((p, cc)) => {
                psi = p;
                c = cc;
                report.continuation_path.push(1.0);
            }
            Err(_) => {
                // fall back to the homotopy from zero
                log::debug!("warm start failed, continuing from zero");
                psi = vec![0.0; torus.grid.len()];
            }
        }
    }

    if report.continuation_path.is_empty() {
        let log_g0: Vec<f64> = problem.omega.points().iter().map(|h| h.det().ln()).collect();
        let g0: Vec<f64> = log_g0.iter().zip(&torus.det_x).map(|(l, d)| l.exp() / d).collect();
        let mut theta = 0.0f64;
        let mut targets: Vec<f64> = CONTINUATION.to_vec();
        let mut next = 0;
        while next < targets.len() {
            let target = targets[next];
            let last = target >= 1.0;
            let log_t: Vec<f64> = if last {
                log_g.clone()
            } else {
                problem
                    .rhs
                    .iter()
                    .zip(&g0)
                    .zip(&torus.det_x)
                    .map(|((g, g0), d)| (((1.0 - target) * g0 + target * g) * d).ln())
                    .collect()
            };
            let tol = if last { problem.tolerance } else { STAGE_TOLERANCE.max(problem.tolerance) };
            match newton.run(&psi, c, &log_t, tol, problem.max_iterations, &mut report) {
                Ok((p, cc)) => {
                    psi = p;
                    c = cc;
                    theta = target;
                    report.continuation_path.push(target);
                    next += 1;
                }
                Err(e) => {
                    let mid = 0.5 * (theta + target);
                    if target - theta <= MIN_STAGE {
                        report.residual = f64::NAN;
                        return Err(e);
                    }
                    log::debug!("stage {target} failed ({e}); inserting {mid}");
                    targets.insert(next, mid);
                }
            }
        }
    }

    let top = psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    psi.iter_mut().for_each(|v| *v -= top);
    let residual = shifted_residual(torus, &psi, problem, c);
    report.residual = residual;
    report.constant_shift = c;
    if !(residual <= problem.tolerance) {
        return Err(LabError::NonConvergence { iterations: report.iterations, residual });
    }
    Ok(MASolution { psi, residual, iterations: report.iterations, report })
}

struct Newton<'a> {
    spectral: &'a Spectral,
    omega: &'a HermitianField,
    len: usize,
}

/// Current iterate: pointwise `(ω + i∂∂̄ψ)^{-1}` and the equation error.
struct Eval {
    inv: Vec<Herm>,
    err: Vec<f64>,
    norm2: f64,
    sup: f64,
}

impl<'a> Newton<'a> {
    fn new(torus: &'a Torus, omega: &'a HermitianField) -> Self {
        Self { spectral: &torus.spectral, omega, len: torus.grid.len() }
    }

    fn evaluate(&self, psi: &[f64], c: f64, log_target: &[f64]) -> Option<Eval> {
        let hess = self.spectral.hessian(psi);
        let pts: Vec<Option<(Herm, f64)>> = (0..self.len)
            .into_par_iter()
            .map(|i| {
                let a = self.omega.at(i).add(&hess[i]);
                let ch = a.cholesky()?;
                let linv = ch.inverse_l();
                Some((linv.adjoint().mul(&linv), ch.log_det() - log_target[i] - c))
            })
            .collect();
        let mut inv = Vec::with_capacity(self.len);
        let mut err = Vec::with_capacity(self.len);
        for p in pts {
            let (h, e) = p?;
            inv.push(h);
            err.push(e);
        }
        let sq: Vec<f64> = err.iter().map(|e| e * e).collect();
        let norm2 = (pairwise_sum(&sq) / self.len as f64).sqrt();
        let sup = err.iter().fold(0.0f64, |a, e| a.max(e.abs()));
        Some(Eval { inv, err, norm2, sup })
    }

    /// `v ↦ tr(B ∂∂̄v)` pointwise.
    fn trace_apply(&self, b: &[Herm], v: &[f64]) -> Vec<f64> {
        let n = self.omega.grid.n;
        let coeffs = self.spectral.forward(v);
        let mut out = vec![0.0; self.len];
        for j in 0..n {
            for k in j..n {
                let spec: Vec<Complex64> =
                    coeffs.iter().enumerate().map(|(m, c)| c * self.spectral.hessian_symbol(j, k, m)).collect();
                let vals = self.spectral.inverse(spec);
                for ((o, h), bi) in out.iter_mut().zip(&vals).zip(b) {
                    if j == k {
                        *o += bi.m[j][j].re * h.re;
                    } else {
                        *o += 2.0 * (bi.m[k][j] * h).re;
                    }
                }
            }
        }
        out
    }

    /// Runs damped Newton for one continuation stage.
    fn run(
        &mut self,
        psi0: &[f64],
        c0: f64,
        log_target: &[f64],
        tol: f64,
        max_iter: usize,
        report: &mut SolverReport,
    ) -> Result<(Vec<f64>, f64)> {
        let mut psi = psi0.to_vec();
        let mut c = c0;
        let mut cur = self.evaluate(&psi, c, log_target).ok_or(LabError::PositivityLost { iterations: 0 })?;
        let mut history = Vec::new();
        for it in 0..max_iter {
            if cur.sup <= 0.5 * tol {
                return Ok((psi, c));
            }
            // a stage that stalls is cheaper to split than to grind through
            history.push(cur.norm2);
            if it >= STALL_WINDOW && cur.norm2 > 0.9 * history[it - STALL_WINDOW] {
                return Err(LabError::NonConvergence { iterations: it, residual: cur.sup });
            }
            report.iterations += 1;
            let b0 = mean_form(&cur.inv);
            let symbol = self.spectral.trace_symbol(&b0);
            let rhs: Vec<f64> = cur.err.iter().map(|e| -e).chain(std::iter::once(0.0)).collect();
            let inner_tol = (0.1 * cur.sup).clamp(1e-13, 1e-2);
            let step = self.bicgstab(&cur.inv, &symbol, &rhs, inner_tol, 300);
            log::trace!("newton {it}: sup {:.3e} l2 {:.3e}", cur.sup, cur.norm2);
            let accepted = self.line_search(&psi, c, &step, log_target, &cur, tol, report);
            let next = match accepted {
                Some(n) => Some(n),
                None => {
                    // fixed-point fallback: constant-coefficient step
                    report.fallback_steps += 1;
                    let step = precondition(self.spectral, &symbol, &rhs);
                    self.line_search(&psi, c, &step, log_target, &cur, tol, report)
                }
            };
            match next {
                Some((p, cc, ev)) => {
                    psi = p;
                    c = cc;
                    cur = ev;
                }
                None => {
                    return Err(LabError::NonConvergence { iterations: it + 1, residual: cur.sup });
                }
            }
        }
        if cur.sup <= 0.5 * tol {
            Ok((psi, c))
        } else {
            Err(LabError::NonConvergence { iterations: max_iter, residual: cur.sup })
        }
    }

    fn line_search(
        &self,
        psi: &[f64],
        c: f64,
        step: &[f64],
        log_target: &[f64],
        cur: &Eval,
        tol: f64,
        report: &mut SolverReport,
    ) -> Option<(Vec<f64>, f64, Eval)> {
        let mut tau = 1.0;
        for _ in 0..30 {
            let trial: Vec<f64> = psi.iter().zip(step).map(|(p, s)| p + tau * s).collect();
            let ct = c + tau * step[self.len];
            if let Some(ev) = self.evaluate(&trial, ct, log_target) {
                if ev.norm2 <= (1.0 - 1e-4 * tau) * cur.norm2 || ev.sup <= 0.5 * tol {
                    return Some((trial, ct, ev));
                }
            }
            report.damping_events += 1;
            tau *= 0.5;
        }
        None
    }

    /// Bordered operator `(v, c) ↦ (tr(B ∂∂̄v) − c, mean v)`.
    fn apply(&self, b: &[Herm], x: &[f64]) -> Vec<f64> {
        let (v, c) = x.split_at(self.len);
        let mut out = self.trace_apply(b, v);
        out.iter_mut().for_each(|o| *o -= c[0]);
        out.push(pairwise_sum(v) / self.len as f64);
        out
    }

    fn bicgstab(&self, b: &[Herm], symbol: &[f64], rhs: &[f64], rtol: f64, max_iter: usize) -> Vec<f64> {
        let dim = rhs.len();
        let bnorm = norm(rhs).max(f64::MIN_POSITIVE);
        let mut x = vec![0.0; dim];
        let mut r = rhs.to_vec();
        let r0 = r.clone();
        let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
        let mut v = vec![0.0; dim];
        let mut p = vec![0.0; dim];
        let mut best = (bnorm, x.clone());
        for _ in 0..max_iter {
            let rho_new = dot(&r0, &r);
            if rho_new == 0.0 || omega == 0.0 {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..dim {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let y = precondition(self.spectral, symbol, &p);
            v = self.apply(b, &y);
            let denom = dot(&r0, &v);
            if denom == 0.0 {
                break;
            }
            alpha = rho / denom;
            let s: Vec<f64> = r.iter().zip(&v).map(|(r, v)| r - alpha * v).collect();
            for i in 0..dim {
                x[i] += alpha * y[i];
            }
            let snorm = norm(&s);
            if snorm < best.0 {
                best = (snorm, x.clone());
            }
            if snorm <= rtol * bnorm {
                return x;
            }
            let z = precondition(self.spectral, symbol, &s);
            let t = self.apply(b, &z);
            let tt = dot(&t, &t);
            omega = if tt > 0.0 { dot(&t, &s) / tt } else { 0.0 };
            for i in 0..dim {
                x[i] += omega * z[i];
                r[i] = s[i] - omega * t[i];
            }
            let rnorm = norm(&r);
            if rnorm < best.0 {
                best = (rnorm, x.clone());
            }
            if rnorm <= rtol * bnorm {
                return x;
            }
        }
        log::trace!("bicgstab stopped at {:.3e} relative", best.0 / bnorm);
        best.1
    }
}

/// Approximate inverse of the bordered operator with constant coefficients.
fn precondition(spectral: &Spectral, symbol: &[f64], r: &[f64]) -> Vec<f64> {
    let len = r.len() - 1;
    let (r1, r2) = r.split_at(len);
    let mean = pairwise_sum(r1) / len as f64;
    let mut v = spectral.solve_with_symbol(symbol, r1);
    v.iter_mut().for_each(|x| *x += r2[0]);
    v.push(-mean);
    v
}

fn mean_form(forms: &[Herm]) -> Herm {
    let n = forms[0].n;
    let mut acc = Herm::zeros(n);
    for h in forms {
        acc = acc.add(h);
    }
    acc.scale(1.0 / forms.len() as f64)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
