//! Checks for the coupled system
//! `F = log f(λ[h_φ]) − log c_ω`, `Box_{ω_φ} F = −c_θ + G^{ij̄} θ_{ij̄}`.
//!
//! States are manufactured: `c_θ` is the `ω_φ^n`-mean of
//! `G^{ij̄}θ_{ij̄} − Box F`, and a state counts as a near-solution when the
//! centered residual is below tolerance. Genuine solutions of the
//! fourth-order system are not computed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::functionals::entropy_p;
use crate::geometry::{Measure, SolutionState, Torus};
use crate::grid::HermitianField;
use crate::linalg::{relative_eigenvalues, Herm};
use crate::ma_solver::{solve_ma_from, MASolveProblem};
use crate::operators::OperatorSpec;
use crate::proof::barrier::{concentrated_density, plus_mass, BARRIER_TOL};
use crate::proof::ledger::{Ledger, Provenance};
use crate::proof::linearized::LinearizedCoefficients;
use crate::proof::mean_value::{mean_value_bound, MeanValueReport, MeanValueSettings};

pub const RESIDUAL_TOL: f64 = 1e-6;

/// `c_θ` and the centered residual of the second equation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecondEquation {
    pub c_theta: f64,
    pub residual: f64,
    pub accepted: bool,
}

pub fn second_equation(state: &SolutionState, theta: &HermitianField) -> Result<SecondEquation> {
    let coeffs = LinearizedCoefficients::assemble(&state.op, state)?;
    let box_f = coeffs.apply_hessian(&state.torus.hessian(&state.density)?);
    let tr = coeffs.trace_form(theta);
    let diff: Vec<f64> = tr.iter().zip(&box_f).map(|(t, b)| t - b).collect();
    let ones = vec![1.0; diff.len()];
    let c_theta = state.integrate(&diff, Measure::Potential)? / state.integrate(&ones, Measure::Potential)?;
    let residual = diff.iter().map(|d| (d - c_theta).abs()).fold(0.0, f64::max);
    Ok(SecondEquation { c_theta, residual, accepted: residual <= RESIDUAL_TOL })
}

/// Extreme eigenvalues of `θ` relative to `ω` over the grid.
pub fn relative_bounds(theta: &HermitianField, omega: &HermitianField) -> Result<(f64, f64)> {
    let n = theta.grid.n;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (point, (t, w)) in theta.points().iter().zip(omega.points()).enumerate() {
        let ev = relative_eigenvalues(t, w).ok_or(LabError::NotPositiveDefinite { point })?;
        lo = lo.min(ev[0]);
        hi = hi.max(ev[n - 1]);
    }
    Ok((lo, hi))
}

/// `θ ≥ −K_2 ω` audit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct K2Audit {
    pub k2: f64,
    /// `min λ(θ; ω) + K_2`.
    pub margin: f64,
    pub passed: bool,
    /// `δ K_2 > 1/10`: the trace absorption of the barrier is not covered.
    pub absorption_flag: bool,
}

pub fn audit_k2(theta: &HermitianField, omega: &HermitianField, k2: f64) -> Result<K2Audit> {
    let (lo, _) = relative_bounds(theta, omega)?;
    let margin = lo + k2;
    Ok(K2Audit { k2, margin, passed: margin >= -1e-12, absorption_flag: k2 * k2 / 10.0 > 0.1 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiCheck {
    pub delta: f64,
    pub p: f64,
    pub k: f64,
    pub a_k: f64,
    pub a_inf: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub max_psi: f64,
    pub epsilon_gamma: f64,
    pub max_psi_gamma: f64,
    pub tolerance: f64,
    pub solver_residual: f64,
    pub passed: bool,
}

/// `ε` and `Λ` of the coupled barrier for coefficient
/// `(n+p)(1+δc_θ)/(n² g)`; `g = 1` is the displayed choice.
pub fn psi_parameters(n: usize, p: f64, delta: f64, c_theta: f64, a_k: f64, g: f64) -> (f64, f64) {
    let nf = n as f64;
    let coef = (nf + p) * (1.0 + delta * c_theta) / (nf * nf * g);
    let eps = coef.powf(nf / (nf + p)) * a_k.powf(1.0 / (nf + p));
    let lambda = (2.0 * nf / (nf + p) * eps).powf((nf + p) / p);
    (eps, lambda)
}

/// Grid maximum of `Ψ = −ε(−ψ_k + Λ)^{n/(n+p)} − φ + δF`.
pub fn psi_max(state: &SolutionState, psi_k: &[f64], delta: f64, eps: f64, lambda: f64, p: f64) -> f64 {
    let nf = state.n() as f64;
    psi_k
        .iter()
        .zip(&state.phi)
        .zip(&state.density)
        .map(|((ps, ph), f)| -eps * (-ps + lambda).powf(nf / (nf + p)) - ph + delta * f)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Solves `(ω + i∂∂̄ψ_k)^n = τ_k(−φ+δF)^p c_ω^n e^{nF} ω_X^n / A_k` and
/// evaluates `Ψ`.
pub fn check_psi_test_function(
    state: &SolutionState,
    c_theta: f64,
    delta: f64,
    p: f64,
    k: f64,
    tolerance: f64,
) -> Result<PsiCheck> {
    if !(1.0 + delta * c_theta > 0.0) {
        return Err(LabError::InvalidParameter("1 + δ c_θ must be positive".into()));
    }
    let h: Vec<f64> = state.phi.iter().zip(&state.density).map(|(ph, f)| -ph + delta * f).collect();
    let (g, a_k) = concentrated_density(state, &h, p, k)?;
    let a_inf = plus_mass(state, &h, p)?;
    let problem = MASolveProblem::new(&state.torus, state.omega.clone(), g)?.with_tolerance(tolerance);
    let sol = solve_ma_from(&state.torus, &problem, None)?;
    let a_eff = a_k * (-sol.report.constant_shift).exp();
    let n = state.n();
    let (eps, lambda) = psi_parameters(n, p, delta, c_theta, a_eff, 1.0);
    let g_root = state.op.gamma.powf(1.0 / n as f64).min(1.0);
    let (eps_g, lambda_g) = psi_parameters(n, p, delta, c_theta, a_eff, g_root);
    let max_psi = psi_max(state, &sol.psi, delta, eps, lambda, p);
    let tol = BARRIER_TOL * (1.0 + lambda);
    Ok(PsiCheck {
        delta,
        p,
        k,
        a_k,
        a_inf,
        epsilon: eps,
        lambda,
        max_psi,
        epsilon_gamma: eps_g,
        max_psi_gamma: psi_max(state, &sol.psi, delta, eps_g, lambda_g, p),
        tolerance: tol,
        solver_residual: sol.residual,
        passed: max_psi <= tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledSettings {
    /// Entropy exponent, in `(0, n]`.
    pub p: f64,
    pub k2: f64,
    pub sharpness: f64,
    pub solver_tolerance: f64,
    pub mean_value: MeanValueSettings,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledReport {
    pub note: String,
    pub equation: SecondEquation,
    pub k1: f64,
    pub k2: K2Audit,
    pub k3: f64,
    pub delta: f64,
    pub psi: Option<PsiCheck>,
    pub upper: Option<MeanValueReport>,
    pub lower: Option<MeanValueReport>,
    pub sup_f: f64,
    pub inf_f: f64,
    /// Bound on `sup F` from `u = F − K_2 φ`.
    pub f_upper_bound: f64,
    /// Bound on `inf F` from `u = −F − K_3 φ`.
    pub f_lower_bound: f64,
    pub pass: bool,
}

impl CoupledReport {
    pub fn ledger(&self) -> Ledger {
        use Provenance::*;
        let mut l = Ledger::default();
        l.push("coupled.delta", self.delta, "K_2 / 10", "coupled barrier", Explicit);
        l.push(
            "coupled.c_theta",
            self.equation.c_theta,
            "omega_phi^n-mean of G theta - Box F",
            "coupled barrier",
            Measured,
        );
        l.push("coupled.K_1", self.k1, "Ent_p of the state", "coupled barrier", Measured);
        l.push("coupled.K_2", self.k2.k2, "theta >= -K_2 omega", "coupled barrier", Configured);
        l.push("coupled.K_3", self.k3, "max eigenvalue of theta relative to omega", "coupled barrier", Measured);
        if let Some(u) = &self.upper {
            l.push("coupled.a_mv", u.a_mv, "c_theta + K_2", "mean-value", Explicit);
            l.push("degiorgi.r", u.r, "n + 1", "de-giorgi", Configured);
            l.push("degiorgi.C_bar", u.c_bar, "C_39^{1/r}", "de-giorgi", Reconstructed);
            l.push(
                "degiorgi.s_0",
                u.degiorgi.levels.s_0,
                "(2 C_bar)^{rn/(r-n)} c_ratio^{n/(r-n)}",
                "de-giorgi",
                Explicit,
            );
            l.push("degiorgi.S_inf", u.degiorgi.levels.s_inf, "s_0 + 1/(1 - 2^{-(r-n)/(rn)})", "de-giorgi", Explicit);
        }
        if let Some(p) = &self.psi {
            l.push(
                "coupled.epsilon",
                p.epsilon,
                "((n+p)(1+delta c_theta)/n^2)^{n/(n+p)} A_k^{1/(n+p)}",
                "coupled barrier",
                Explicit,
            );
            l.push("coupled.Lambda", p.lambda, "((2n/(n+p)) epsilon)^{(n+p)/p}", "coupled barrier", Explicit);
        }
        l
    }
}

pub const COUPLED_NOTE: &str = "states are manufactured near-solutions: c_theta is fitted as the mean residual of the second equation; genuine solutions of the coupled system are not computed";

/// Full check of a state against a form `θ`.
pub fn coupled_check(
    state: &SolutionState,
    theta: &HermitianField,
    settings: &CoupledSettings,
) -> Result<CoupledReport> {
    let n = state.n() as f64;
    if !(settings.p > 0.0 && settings.p <= n) {
        return Err(LabError::InvalidParameter(format!("p = {} must lie in (0, n]", settings.p)));
    }
    let equation = second_equation(state, theta)?;
    let k2 = audit_k2(theta, &state.omega, settings.k2)?;
    let (_, k3) = relative_bounds(theta, &state.omega)?;
    let k1 = entropy_p(state, settings.p)?;
    let delta = settings.k2 / 10.0;
    let sup_f = state.density.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inf_f = state.density.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut report = CoupledReport {
        note: COUPLED_NOTE.into(),
        equation: equation.clone(),
        k1,
        k2,
        k3,
        delta,
        psi: None,
        upper: None,
        lower: None,
        sup_f,
        inf_f,
        f_upper_bound: f64::INFINITY,
        f_lower_bound: f64::NEG_INFINITY,
        pass: false,
    };
    if !equation.accepted || !k2.passed {
        return Ok(report);
    }
    let c_theta = equation.c_theta;
    let psi =
        check_psi_test_function(state, c_theta, delta, settings.p, settings.sharpness, settings.solver_tolerance)?;

    let u1: Vec<f64> = state.density.iter().zip(&state.phi).map(|(f, p)| f - settings.k2 * p).collect();
    let upper = mean_value_bound(&u1, (c_theta + settings.k2).max(0.0), state, &state.op, &settings.mean_value)?;
    let k3p = k3.max(0.0);
    let u2: Vec<f64> = state.density.iter().zip(&state.phi).map(|(f, p)| -f - k3p * p).collect();
    let lower = mean_value_bound(&u2, (k3p - c_theta).max(0.0), state, &state.op, &settings.mean_value)?;

    report.f_upper_bound = upper.bound;
    report.f_lower_bound = -lower.bound;
    report.pass =
        psi.passed && upper.pass && lower.pass && sup_f <= report.f_upper_bound && inf_f >= report.f_lower_bound;
    report.psi = Some(psi);
    report.upper = Some(upper);
    report.lower = Some(lower);
    Ok(report)
}

/// Near-solution on the flat torus: `ω = ω_X = I`, `φ = ε cos(2π m·x)`,
/// `θ = (π²|m|²/n) ω_X`. The second equation then holds up to `O(ε²)`.
pub fn manufactured_state(n: usize, points: usize, m: &[i64], eps: f64) -> Result<(SolutionState, HermitianField)> {
    if m.len() != 2 * n {
        return Err(LabError::DimensionMismatch { expected: 2 * n, got: m.len() });
    }
    let torus = Torus::flat(n, points)?;
    let op = OperatorSpec::monge_ampere(n)?;
    let phi = torus.grid.sample(|x| {
        let s: f64 = m.iter().zip(x).map(|(k, x)| *k as f64 * x).sum();
        eps * (2.0 * PI * s).cos()
    });
    let omega = HermitianField::identity(torus.grid);
    let state = torus.induce_density(&op, &phi, &omega)?;
    let m2: f64 = m.iter().map(|k| (k * k) as f64).sum();
    let theta = HermitianField::constant(torus.grid, Herm::scalar(n, PI * PI * m2 / n as f64));
    Ok((state, theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_relation() {
        let (eps, lambda) = psi_parameters(2, 1.5, 0.1, 0.7, 0.03, 1.0);
        assert!((lambda.powf(1.5 / 3.5) - 4.0 / 3.5 * eps).abs() < 1e-12);
    }

    #[test]
    fn trivial_state() {
        let torus = Torus::flat(2, 8).unwrap();
        let op = OperatorSpec::monge_ampere(2).unwrap();
        let omega = HermitianField::identity(torus.grid);
        let st = torus.induce_density(&op, &vec![0.0; torus.grid.len()], &omega).unwrap();
        let theta = HermitianField::constant(torus.grid, Herm::zeros(2));
        let eq = second_equation(&st, &theta).unwrap();
        assert!(eq.c_theta.abs() < 1e-14 && eq.accepted);
    }

    #[test]
    fn k2_boundary_case() {
        let g = crate::grid::TorusGrid::new(2, 8).unwrap();
        let omega = HermitianField::constant(g, Herm::diag(&[2.0, 0.5]));
        let theta = omega.scale(-0.7);
        let a = audit_k2(&theta, &omega, 0.7).unwrap();
        assert!(a.passed && a.margin.abs() < 1e-12);
    }

    #[test]
    fn manufactured_residual_is_small() {
        let (st, theta) = manufactured_state(2, 16, &[1, 0, 0, 1], 1e-5).unwrap();
        let eq = second_equation(&st, &theta).unwrap();
        assert!(eq.residual < 1e-6, "{}", eq.residual);
        let c = PI * PI * 2.0 / 2.0;
        assert!((eq.c_theta - c).abs() < 1e-6 * c);
    }
}
