//! Auxiliary Monge-Ampère solves concentrating on a sublevel set, and the
//! comparison function `Φ = −ε(−ψ_{s,k} + Λ)^b − φ − s`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::SolutionState;
use crate::ma_solver::{solve_ma_from, MASolveProblem, SmoothedPlus, SolverReport};
use crate::proof::chain::ConstantChain;

/// Relative tolerance of the barrier checks.
pub const BARRIER_TOL: f64 = 1e-6;

/// Right-hand side `g = τ_k(h)^a c_ω^n e^{nF} / A` with
/// `A = (c_ω^n/V_ω) ∫ τ_k(h)^a e^{nF} ω_X^n`; returns `(g, A)`.
pub fn concentrated_density(state: &SolutionState, h: &[f64], a: f64, k: f64) -> Result<(Vec<f64>, f64)> {
    let tau = SmoothedPlus::new(k)?;
    if h.len() != state.phi.len() {
        return Err(LabError::DimensionMismatch { expected: state.phi.len(), got: h.len() });
    }
    let n = state.n() as i32;
    let weight = state.density_weight();
    let raw: Vec<f64> = h.iter().zip(&weight).map(|(x, w)| tau.eval(*x).powf(a) * w).collect();
    let a_sk = state.c_ratio() * state.torus.integrate_weighted(&raw, None)?;
    if !(a_sk > 0.0) || !a_sk.is_finite() {
        return Err(LabError::InvalidParameter(format!("normalizing mass {a_sk} is not positive")));
    }
    let cn = state.c_omega.powi(n);
    Ok((raw.iter().map(|r| r * cn / a_sk).collect(), a_sk))
}

/// `(c_ω^n/V_ω) ∫ (h)_+^a e^{nF} ω_X^n`, the `k → ∞` limit of the mass.
pub fn plus_mass(state: &SolutionState, h: &[f64], a: f64) -> Result<f64> {
    let weight = state.density_weight();
    let raw: Vec<f64> = h.iter().zip(&weight).map(|(x, w)| x.max(0.0).powf(a) * w).collect();
    Ok(state.c_ratio() * state.torus.integrate_weighted(&raw, None)?)
}

/// One solve of `(ω + i∂∂̄ψ)^n = τ_k(−φ−s)^a c_ω^n e^{nF} ω_X^n / A_{s,k}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuxiliarySolve {
    pub s: f64,
    pub k: f64,
    pub a: f64,
    pub a_sk: f64,
    /// `A_s`, the mass with the exact positive part.
    pub a_s: f64,
    /// Uniform bound on `|A_{s,k} − A_s|` from `0 ≤ τ_k − (·)_+ ≤ log 2/k`.
    pub gap_bound: f64,
    /// Discrete compatibility constant `c` of the solve: the density is
    /// effectively multiplied by `e^c`, so the barrier uses `A_{s,k} e^{−c}`.
    pub constant_shift: f64,
    #[serde(skip)]
    pub psi: Vec<f64>,
    pub report: SolverReport,
}

impl AuxiliarySolve {
    pub fn effective_mass(&self) -> f64 {
        self.a_sk * (-self.constant_shift).exp()
    }
}

pub fn solve_auxiliary(
    state: &SolutionState,
    a: f64,
    s: f64,
    k: f64,
    tolerance: f64,
    warm: Option<&[f64]>,
) -> Result<AuxiliarySolve> {
    if !(s > 0.0) {
        return Err(LabError::InvalidParameter(format!("sublevel parameter must be positive, got {s}")));
    }
    let h: Vec<f64> = state.phi.iter().map(|p| -p - s).collect();
    if h.iter().all(|x| *x <= 0.0) {
        return Err(LabError::InvalidParameter(format!("sublevel set for s = {s} is empty")));
    }
    let (g, a_sk) = concentrated_density(state, &h, a, k)?;
    let a_s = plus_mass(state, &h, a)?;
    let gap = std::f64::consts::LN_2 / k;
    let top = h.iter().cloned().fold(0.0, f64::max);
    let vol = state.torus.volume;
    let gap_bound = if a >= 1.0 {
        a * (top + gap).powf(a - 1.0) * gap * state.c_ratio() * vol
    } else {
        gap.powf(a) * state.c_ratio() * vol
    };
    let problem = MASolveProblem::new(&state.torus, state.omega.clone(), g)?.with_tolerance(tolerance);
    let sol = solve_ma_from(&state.torus, &problem, warm)?;
    Ok(AuxiliarySolve {
        s,
        k,
        a,
        a_sk,
        a_s,
        gap_bound,
        constant_shift: sol.report.constant_shift,
        psi: sol.psi,
        report: sol.report,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierCheck {
    pub max_value: f64,
    /// Largest value of `Φ` off `Ω_s`; negative by construction.
    pub max_off_sublevel: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub tolerance: f64,
    /// Largest `(−φ−s) − ε(−ψ+Λ)^b` on `Ω_s`.
    pub max_on_sublevel: f64,
    pub passed: bool,
}

/// Evaluates `Φ` with `ε`, `Λ` from `chain` at the mass `a_sk`.
pub fn check_phi_test_function(
    state: &SolutionState,
    psi_sk: &[f64],
    chain: &ConstantChain,
    s: f64,
    a_sk: f64,
) -> Result<BarrierCheck> {
    barrier_with(state, psi_sk, chain.epsilon(a_sk), chain.lambda(a_sk), chain.b, s)
}

/// `Φ = −ε(−ψ+Λ)^b − φ − s` for explicit parameters.
pub fn barrier_with(
    state: &SolutionState,
    psi: &[f64],
    epsilon: f64,
    lambda: f64,
    b: f64,
    s: f64,
) -> Result<BarrierCheck> {
    if psi.len() != state.phi.len() {
        return Err(LabError::DimensionMismatch { expected: state.phi.len(), got: psi.len() });
    }
    let mut max_value = f64::NEG_INFINITY;
    let mut max_off = f64::NEG_INFINITY;
    for (p, f) in psi.iter().zip(&state.phi) {
        let base = -p + lambda;
        if !(base > 0.0) {
            return Err(LabError::InvalidParameter("−ψ + Λ must stay positive".into()));
        }
        let v = -epsilon * base.powf(b) - f - s;
        if -f - s > 0.0 {
            max_value = max_value.max(v);
        } else {
            max_off = max_off.max(v);
        }
    }
    let tolerance = BARRIER_TOL * (1.0 + lambda);
    let overall = max_value.max(max_off);
    Ok(BarrierCheck {
        max_value: overall,
        max_off_sublevel: max_off,
        epsilon,
        lambda,
        tolerance,
        max_on_sublevel: max_value,
        passed: overall <= tolerance,
    })
}

/// Results for one `s` across increasing sharpness `k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SharpnessSeries {
    pub s: f64,
    pub solves: Vec<AuxiliarySolve>,
    pub checks: Vec<BarrierCheck>,
}

impl SharpnessSeries {
    /// `|A_{s,k} − A_s|` per `k`.
    pub fn gaps(&self) -> Vec<f64> {
        self.solves.iter().map(|x| (x.a_sk - x.a_s).abs()).collect()
    }

    pub fn gaps_decreasing(&self) -> bool {
        self.gaps().windows(2).all(|w| w[1] <= w[0])
    }

    pub fn gaps_bounded(&self) -> bool {
        self.solves.iter().all(|x| (x.a_sk - x.a_s).abs() <= x.gap_bound)
    }
}

/// Solves for each `k` (ascending), warm-starting from the previous `k`,
/// and checks `Φ` for each.
pub fn sharpness_series(
    state: &SolutionState,
    chain: &ConstantChain,
    s: f64,
    ks: &[f64],
    tolerance: f64,
) -> Result<SharpnessSeries> {
    let mut solves: Vec<AuxiliarySolve> = Vec::with_capacity(ks.len());
    let mut checks = Vec::with_capacity(ks.len());
    for &k in ks {
        let warm = solves.last().map(|x| x.psi.as_slice());
        let sol = solve_auxiliary(state, chain.a, s, k, tolerance, warm)?;
        checks.push(check_phi_test_function(state, &sol.psi, chain, s, sol.effective_mass())?);
        solves.push(sol);
    }
    Ok(SharpnessSeries { s, solves, checks })
}

/// `sup(−φ)` of a state.
pub fn depth(state: &SolutionState) -> f64 {
    state.phi.iter().map(|p| -p).fold(0.0, f64::max)
}
