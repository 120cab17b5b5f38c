//! Scalar functionals of solution states: entropy, energy, level-set
//! masses, Trudinger integrals and the Green's-function L¹ bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Measure, SolutionState};
use crate::grid::{pairwise_sum, Spectral, TorusGrid};
use crate::linalg::Herm;

/// `Ent_p = ∫ |F|^p e^{nF} ω_X^n`.
pub fn entropy_p(state: &SolutionState, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(LabError::InvalidParameter(format!("entropy exponent must be positive, got {p}")));
    }
    let v: Vec<f64> = state.density.iter().map(|f| f.abs().powf(p)).collect();
    state.integrate(&v, Measure::Density)
}

/// `E = (c_ω^n/V_ω) ∫ (−φ) f(λ[h_φ])^n ω_X^n`.
pub fn energy(state: &SolutionState) -> Result<f64> {
    let n = state.n() as i32;
    let v: Vec<f64> = state.phi.iter().zip(&state.f_values).map(|(p, f)| (-p) * f.powi(n)).collect();
    Ok(state.c_ratio() * state.torus.integrate_weighted(&v, None)?)
}

/// `∫ (−φ)^e e^{nF} ω_X^n`, the left side of the energy-like inequality.
pub fn energy_integral(state: &SolutionState, exponent: f64) -> Result<f64> {
    let v: Vec<f64> = state.phi.iter().map(|p| (-p).max(0.0).powf(exponent)).collect();
    state.integrate(&v, Measure::Density)
}

/// Value of a possibly huge integral, kept in log space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogValue {
    pub log: f64,
    /// `exp(log)`, `+inf` when it overflows.
    pub value: f64,
    pub overflow: bool,
}

impl LogValue {
    pub fn from_log(log: f64) -> Self {
        let value = log.exp();
        Self { log, value, overflow: !value.is_finite() }
    }
}

/// `∫ exp(α(−φ)^q) ω_X^n`, summed with a max shift so large exponents
/// never overflow the accumulation.
pub fn trudinger_integral(state: &SolutionState, alpha: f64, q: f64) -> Result<LogValue> {
    if !(alpha > 0.0) || !(q > 0.0) {
        return Err(LabError::InvalidParameter(format!("need alpha > 0 and q > 0, got {alpha}, {q}")));
    }
    let expo: Vec<f64> = state.phi.iter().map(|p| alpha * (-p).max(0.0).powf(q)).collect();
    log_integral(state, &expo)
}

/// `log ∫ e^{expo} ω_X^n`.
pub fn log_integral(state: &SolutionState, expo: &[f64]) -> Result<LogValue> {
    let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(LabError::NonFinite { what: "exponent", index: 0 });
    }
    let shifted: Vec<f64> = expo.iter().map(|e| (e - top).exp()).collect();
    let rest = state.torus.integrate_weighted(&shifted, None)?;
    Ok(LogValue::from_log(top + rest.ln()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelDirection {
    /// `Ω_s = {φ < −s}`
    Sublevel,
    /// `U_s = {u > s}`
    Superlevel,
}

/// Level-set masses `φ(s)` and weighted masses `A_s` on a list of levels.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SublevelProfile {
    pub s_values: Vec<f64>,
    pub phi_of_s: Vec<f64>,
    pub a_of_s: Vec<f64>,
    pub a: f64,
    pub direction: LevelDirection,
}

impl SublevelProfile {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,phi_s,A_s\n");
        for ((s, m), a) in self.s_values.iter().zip(&self.phi_of_s).zip(&self.a_of_s) {
            out.push_str(&format!("{s:.12e},{m:.12e},{a:.12e}\n"));
        }
        out
    }
}

fn check_levels(s_values: &[f64], a: f64) -> Result<()> {
    if !(a > 0.0) {
        return Err(LabError::InvalidParameter(format!("exponent a must be positive, got {a}")));
    }
    if s_values.windows(2).any(|w| !(w[0] < w[1])) || s_values.iter().any(|s| !s.is_finite()) {
        return Err(LabError::InvalidParameter("level values must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Masses of `{g > s}` under `e^{nF} ω_X^n` and `c_ratio ∫ (g − s)_+^a`.
fn level_profile(
    state: &SolutionState,
    g: &[f64],
    a: f64,
    s_values: &[f64],
    direction: LevelDirection,
) -> Result<SublevelProfile> {
    check_levels(s_values, a)?;
    let weight = state.density_weight();
    let ratio = state.c_ratio();
    let cell = state.grid().cell_volume();
    let rows: Vec<(f64, f64)> = s_values
        .par_iter()
        .map(|&s| {
            let mut mass = Vec::with_capacity(g.len());
            let mut moment = Vec::with_capacity(g.len());
            for ((&gi, &w), &d) in g.iter().zip(&weight).zip(&state.torus.det_x) {
                if gi > s {
                    mass.push(w * d);
                    moment.push((gi - s).powf(a) * w * d);
                }
            }
            (pairwise_sum(&mass) * cell, ratio * pairwise_sum(&moment) * cell)
        })
        .collect();
    Ok(SublevelProfile {
        s_values: s_values.to_vec(),
        phi_of_s: rows.iter().map(|r| r.0).collect(),
        a_of_s: rows.iter().map(|r| r.1).collect(),
        a,
        direction,
    })
}

/// `φ(s) = ∫_{φ<−s} e^{nF} ω_X^n` and
/// `A_s = (c_ω^n/V_ω) ∫_{φ<−s} (−φ − s)^a e^{nF} ω_X^n`.
pub fn sublevel_profile(state: &SolutionState, a: f64, s_values: &[f64]) -> Result<SublevelProfile> {
    let g: Vec<f64> = state.phi.iter().map(|p| -p).collect();
    level_profile(state, &g, a, s_values, LevelDirection::Sublevel)
}

/// `φ_u(s) = ∫_{u>s} e^{nF} ω_X^n` and the matching `A_s` for exponent `a`.
pub fn superlevel_profile(state: &SolutionState, u: &[f64], a: f64, s_values: &[f64]) -> Result<SublevelProfile> {
    if u.len() != state.phi.len() {
        return Err(LabError::DimensionMismatch { expected: state.phi.len(), got: u.len() });
    }
    level_profile(state, u, a, s_values, LevelDirection::Superlevel)
}

/// Geometric levels `s_min · 2^j`, `j = 0..count`.
pub fn geometric_levels(s_min: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| s_min * 2f64.powi(j as i32)).collect()
}

/// Green's-formula bound `C_0` with `∫|φ| ω_X^n ≤ C_0` for every `φ` with
/// `sup φ = 0` and `Δ_{ω_X} φ ≥ −nκ`, for a constant reference form.
///
/// Writing `φ(x) − mean φ = ∫ K(x−y) (Δφ + nκ)(y) dy` (the `nκ` term drops
/// since `K` has mean zero) and evaluating at the maximum point gives
/// `−mean φ ≤ nκ · sup K`. The identity is exact for the discrete spectral
/// Laplacian, so the bound holds on the grid as stated.
pub fn l1_green_bound(omega_x: &Herm, kappa: f64, grid: &TorusGrid) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(LabError::InvalidParameter(format!("kappa must be positive, got {kappa}")));
    }
    let kernel = Spectral::new(*grid).green_kernel(omega_x)?;
    let sup = kernel.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let vol = omega_x.det() * grid.domain_volume();
    Ok(grid.n as f64 * kappa * sup * vol * grid.domain_volume())
}

/// `(sup K, inf K)` of the Green kernel of a constant reference form.
pub fn green_extremes(omega_x: &Herm, grid: &TorusGrid) -> Result<(f64, f64)> {
    let kernel = Spectral::new(*grid).green_kernel(omega_x)?;
    let sup = kernel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let inf = kernel.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((sup, inf))
}

/// Bound `C_X ≥ ∫ e^{−βψ} ω_X^n` for every grid function with `sup ψ = 0`
/// and `ω + i∂∂̄ψ > 0`, where `ω ≤ κ ω_X`.
///
/// Green's formula gives `ψ ≥ mean ψ + nκ inf K` and the L¹ bound gives
/// `−mean ψ ≤ C_0/Vol`, so `−ψ ≤ C_0/Vol + nκ (−inf K)`. The kernel minimum
/// diverges under refinement, so this certificate is specific to the grid.
pub fn exp_integrability_certificate(omega_x: &Herm, kappa: f64, beta: f64, grid: &TorusGrid) -> Result<f64> {
    let (sup, inf) = green_extremes(omega_x, grid)?;
    let vol = omega_x.det() * grid.domain_volume();
    let n = grid.n as f64;
    let c0 = n * kappa * sup.max(0.0) * vol * grid.domain_volume();
    let depth = c0 / vol + n * kappa * (-inf).max(0.0);
    Ok(vol * (beta * depth).exp())
}

/// `nκ · ∫ |K| ω_X^n`, reported next to [`l1_green_bound`] for comparison.
pub fn l1_green_bound_abs(omega_x: &Herm, kappa: f64, grid: &TorusGrid) -> Result<f64> {
    let kernel = Spectral::new(*grid).green_kernel(omega_x)?;
    let abs: Vec<f64> = kernel.iter().map(|k| k.abs()).collect();
    Ok(grid.n as f64 * kappa * pairwise_sum(&abs) * grid.cell_volume() * omega_x.det())
}
