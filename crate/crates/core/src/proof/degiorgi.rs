//! De Giorgi iteration on superlevel masses.
//!
//! From `t φ_u(s+t) ≤ C̄ R^{1/n} φ_u(s)^{1+δ}`, `δ = (r−n)/(rn)`, the steps
//! `t_j = 2 C̄ R^{1/n} φ_u(s_j)^δ` halve the mass each time, so the masses
//! vanish past `S_∞ = s_0 + 1/(1 − 2^{−δ})`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::functionals::SublevelProfile;

/// Relative slack when testing that a measured profile is nonincreasing.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiLevels {
    pub r: f64,
    pub c_bar: f64,
    pub s_0: f64,
    pub s_inf: f64,
    /// `δ = (r−n)/(rn)`.
    pub delta: f64,
}

impl DeGiorgiLevels {
    /// `s_0 = (2C̄)^{rn/(r−n)} R^{n/(r−n)}` and `S_∞ = s_0 + 1/(1 − 2^{−δ})`.
    pub fn new(n: usize, r: f64, c_bar: f64, c_ratio: f64) -> Result<Self> {
        let nf = n as f64;
        if !(r > nf) {
            return Err(LabError::InvalidParameter(format!("r = {r} must exceed n = {n}")));
        }
        if !(c_bar > 0.0) || !(c_ratio > 0.0) {
            return Err(LabError::InvalidParameter("C̄ and c_ratio must be positive".into()));
        }
        let delta = (r - nf) / (r * nf);
        let s_0 = (2.0 * c_bar).powf(r * nf / (r - nf)) * c_ratio.powf(nf / (r - nf));
        Ok(Self { r, c_bar, s_0, s_inf: s_0 + increment(delta), delta })
    }
}

/// `1/(1 − 2^{−δ})`.
pub fn increment(delta: f64) -> f64 {
    1.0 / (1.0 - (-delta * std::f64::consts::LN_2).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeGiorgiOutcome {
    pub levels: DeGiorgiLevels,
    /// Profile levels at or above `S_∞`.
    pub levels_checked: usize,
    /// Smallest profile level with vanishing mass, if any.
    pub first_vanishing: Option<f64>,
    pub verified: bool,
}

/// Checks that the measured masses vanish at every profile level `≥ S_∞`.
pub fn de_giorgi(profile: &SublevelProfile, n: usize, c_ratio: f64, r: f64, c_bar: f64) -> Result<DeGiorgiOutcome> {
    let levels = DeGiorgiLevels::new(n, r, c_bar, c_ratio)?;
    let m = &profile.phi_of_s;
    if m.windows(2).any(|w| w[1] > w[0] * (1.0 + MONOTONE_SLACK) + f64::MIN_POSITIVE) {
        return Err(LabError::InvalidParameter("profile is not nonincreasing".into()));
    }
    let above: Vec<f64> =
        profile.s_values.iter().zip(m).filter(|(s, _)| **s >= levels.s_inf).map(|(_, v)| *v).collect();
    let first_vanishing = profile.s_values.iter().zip(m).find(|(_, v)| **v == 0.0).map(|(s, _)| *s);
    Ok(DeGiorgiOutcome {
        levels,
        levels_checked: above.len(),
        first_vanishing,
        verified: above.iter().all(|v| *v == 0.0),
    })
}

/// Smallest `C̄` with `t φ(s+t) ≤ C̄ R^{1/n} φ(s)^{1+δ}` over all pairs of
/// profile levels.
pub fn minimal_recursion_constant(s_values: &[f64], masses: &[f64], n: usize, r: f64, c_ratio: f64) -> f64 {
    let nf = n as f64;
    let delta = (r - nf) / (r * nf);
    let scale = c_ratio.powf(1.0 / nf);
    let mut best = 0.0f64;
    for i in 0..s_values.len() {
        if masses[i] <= 0.0 {
            continue;
        }
        let denom = scale * masses[i].powf(1.0 + delta);
        for j in i + 1..s_values.len() {
            let t = s_values[j] - s_values[i];
            best = best.max(t * masses[j] / denom);
        }
    }
    best
}

/// Runs `s_{j+1} = s_j + 2C̄R^{1/n} φ(s_j)^δ` from `s_0` until the mass
/// vanishes; returns the visited levels.
pub fn simulate_recursion<F>(phi: F, levels: &DeGiorgiLevels, n: usize, c_ratio: f64, max_steps: usize) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let step_scale = 2.0 * levels.c_bar * c_ratio.powf(1.0 / n as f64);
    let mut s = levels.s_0;
    let mut out = vec![s];
    for _ in 0..max_steps {
        let m = phi(s);
        if m <= 0.0 {
            break;
        }
        s += step_scale * m.powf(levels.delta);
        out.push(s);
    }
    out
}
