//! Explicit constants of the entropy → energy → Trudinger argument.
//!
//! Every constant the argument calls "uniform" is rebuilt here by tracing
//! the inequality that introduces it; the trace is recorded in
//! [`ConstantChain::ledger`]. Quantities that can exceed the `f64` range
//! (`s̄`, `C_e`, `C_T`) are carried as logarithms.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::functionals::green_extremes;
use crate::grid::TorusGrid;
use crate::linalg::Herm;
use crate::proof::ledger::{Ledger, Provenance};
use crate::proof::young::young_constant_scaled;

/// Grid used for Green-kernel defaults, by complex dimension.
pub fn default_green_points(n: usize) -> usize {
    match n {
        1 => 64,
        2 => 16,
        _ => 8,
    }
}

static FLAT_GREEN: [OnceLock<(f64, f64)>; 3] = [const { OnceLock::new() }; 3];

/// `(sup K, inf K)` for `ω_X = I` on the default grid.
fn flat_green(n: usize) -> Result<(f64, f64)> {
    if !(1..=3).contains(&n) {
        return Err(LabError::InvalidParameter(format!("dimension {n} unsupported")));
    }
    if let Some(v) = FLAT_GREEN[n - 1].get() {
        return Ok(*v);
    }
    let grid = TorusGrid::new(n, default_green_points(n))?;
    let v = green_extremes(&Herm::identity(n), &grid)?;
    Ok(*FLAT_GREEN[n - 1].get_or_init(|| v))
}

/// Inputs of the chain. `c0`, `c_x`, `beta` and `alpha_config` default to
/// the Green-kernel certificates of a flat reference form of volume `volume`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainInputs {
    pub n: usize,
    pub p: f64,
    /// Required when `p ≥ n`; ignored otherwise.
    pub q: Option<f64>,
    pub gamma: f64,
    pub kappa: f64,
    pub c_ratio: f64,
    /// Upper bound for `Ent_p`.
    pub entropy_bound: f64,
    pub volume: f64,
    pub c0: f64,
    pub c_x: f64,
    pub beta: f64,
    pub alpha_config: f64,
}

impl ChainInputs {
    pub fn new(
        n: usize,
        p: f64,
        gamma: f64,
        kappa: f64,
        c_ratio: f64,
        entropy_bound: f64,
        volume: f64,
    ) -> Result<Self> {
        if !(kappa > 0.0) || !(volume > 0.0) {
            return Err(LabError::InvalidParameter("kappa and volume must be positive".into()));
        }
        let (sup_k, inf_k) = flat_green(n)?;
        // ω_X = s·I with s^n = volume scales the kernel by s
        let s = volume.powf(1.0 / n as f64);
        let nf = n as f64;
        let c0 = nf * kappa * volume * s * sup_k.max(0.0);
        let beta = 0.5 / kappa;
        let depth = c0 / volume + nf * kappa * s * (-inf_k).max(0.0);
        let c_x = volume * (beta * depth).exp();
        Ok(Self { n, p, q: None, gamma, kappa, c_ratio, entropy_bound, volume, c0, c_x, beta, alpha_config: beta })
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_c_x(mut self, c_x: f64) -> Self {
        self.c_x = c_x;
        self
    }

    /// Sets `β`; `α_config` follows unless set afterwards.
    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self.alpha_config = beta;
        self
    }

    pub fn with_alpha_config(mut self, alpha: f64) -> Self {
        self.alpha_config = alpha;
        self
    }

    pub fn with_entropy_bound(mut self, k: f64) -> Self {
        self.entropy_bound = k;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("p", self.p),
            ("gamma", self.gamma),
            ("kappa", self.kappa),
            ("c_ratio", self.c_ratio),
            ("volume", self.volume),
            ("c_x", self.c_x),
            ("beta", self.beta),
            ("alpha_config", self.alpha_config),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(LabError::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.entropy_bound >= 0.0) || !(self.c0 >= 0.0) {
            return Err(LabError::InvalidParameter("entropy bound and C_0 must be nonnegative".into()));
        }
        if self.n == 0 {
            return Err(LabError::InvalidParameter("dimension must be positive".into()));
        }
        if self.alpha_config > 2.0 * self.beta {
            return Err(LabError::InvalidParameter(format!(
                "alpha_config {} exceeds 2·beta = {}",
                self.alpha_config,
                2.0 * self.beta
            )));
        }
        Ok(())
    }
}

/// `log(e^x + e^y)`.
pub fn log_add(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let m = x.max(y);
    if m == f64::INFINITY {
        return m;
    }
    m + ((x - m).exp() + (y - m).exp()).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantChain {
    pub inputs: ChainInputs,
    pub q: f64,
    pub a: f64,
    pub b: f64,
    /// Hölder exponent `na/(p(n+a))` of the sublevel absorption.
    pub theta: f64,
    /// `ε = eps_coef · A^{1/(n+a)}`.
    pub eps_coef: f64,
    /// `Λ = lambda_coef · A^{1/a}`.
    pub lambda_coef: f64,
    pub c_p_young: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub c7: f64,
    pub c8: f64,
    pub c9: f64,
    pub c10: f64,
    pub ln_s_bar: f64,
    pub s_bar: f64,
    pub ln_c_e: f64,
    pub c_e: f64,
    /// Exponent allowed by the exponential-integrability step.
    pub alpha_step4: f64,
    /// Exponent of the certified Trudinger inequality.
    pub alpha: f64,
    /// Exponent `(n+a)/n` produced by the barrier.
    pub q_barrier: f64,
    pub ln_c_t: f64,
    pub c_t: f64,
}

impl ConstantChain {
    pub fn build(inputs: ChainInputs) -> Result<Self> {
        inputs.validate()?;
        let n = inputs.n as f64;
        let p = inputs.p;
        let q = if p < n {
            n / (n - p)
        } else {
            match inputs.q {
                Some(q) if q > 0.0 => q,
                Some(q) => return Err(LabError::InvalidParameter(format!("q must be positive, got {q}"))),
                None => return Err(LabError::InvalidParameter(format!("p = {p} >= n = {n} requires an explicit q"))),
            }
        };
        let a = p * q;
        let b = n / (n + a);
        let theta = n * a / (p * (n + a));
        let gamma = inputs.gamma;
        let r = inputs.c_ratio;
        let k = inputs.entropy_bound;
        let vol = inputs.volume;

        let eps_coef = 1.0 / (gamma.powf(1.0 / (n + a)) * (n * b).powf(n / (n + a)));
        let lambda_coef = (eps_coef * b).powf((n + a) / a);
        let c_p_young = young_constant_scaled(p, 0.5);
        let np_k = n.powf(p) * k;
        let c1 = 2f64.powf(p) * (vol + np_k + c_p_young * inputs.c0);
        let c2 = eps_coef.powf((n + a) * p / n) * 1f64.max(2f64.powf(p - 1.0)) * 1f64.max(lambda_coef).powf(p);
        let c3 = c2 * (2.0 / inputs.beta).powf(p) * (vol + np_k + c_p_young * inputs.c_x);
        let c4 = c3.powf(theta);
        let c5 = c2.powf(theta);
        let ln_s_bar = (2.0 * c1 * c5 * r).powf(1.0 / p).max(0.0);
        let s_bar = ln_s_bar.exp();
        let c6 = (2.0 * c4).powf((n + a) / n) * vol.powf((n + a) * (1.0 - theta) / n);
        let c7 = 2f64.powf(a) * vol;
        let c8 = c7 + vol;
        let ln_c_e = log_add((2f64.powf(a) * c6 * r.powf(a / n)).ln(), c8.ln() + a * ln_s_bar);
        let c9 = eps_coef.powf((n + a) / n) * 1f64.max(lambda_coef);
        let alpha_step4 = 0.5 * inputs.alpha_config / ((2.0 * c6).powf(1.0 / n) * c9 * r.powf((n + a) / (n * n)));
        let c10 = 0.5 * inputs.alpha_config * (2.0 * c6).powf(1.0 / a);
        let t1 = inputs.c_x.max(vol).ln() + c10 * r.powf((n + a) / (n * a));
        let q_barrier = (n + a) / n;
        let alpha = alpha_step4 / 1f64.max(2f64.powf(q_barrier - 1.0));
        let lower_power = if q < q_barrier - 1e-12 { alpha } else { 0.0 };
        let ln_c_t = log_add(
            vol.ln() + alpha * (q * ln_s_bar).exp(),
            t1 + alpha_step4 * (q_barrier * ln_s_bar).exp() + lower_power,
        );
        Ok(Self {
            inputs,
            q,
            a,
            b,
            theta,
            eps_coef,
            lambda_coef,
            c_p_young,
            c1,
            c2,
            c3,
            c4,
            c5,
            c6,
            c7,
            c8,
            c9,
            c10,
            ln_s_bar,
            s_bar,
            ln_c_e,
            c_e: ln_c_e.exp(),
            alpha_step4,
            alpha,
            q_barrier,
            ln_c_t,
            c_t: ln_c_t.exp(),
        })
    }

    /// Barrier amplitude `ε` for a given `A_{s,k}`.
    pub fn epsilon(&self, a_sk: f64) -> f64 {
        self.eps_coef * a_sk.powf(1.0 / (self.inputs.n as f64 + self.a))
    }

    /// Barrier shift `Λ` for a given `A_{s,k}`; `ε b Λ^{−(1−b)} = 1`.
    pub fn lambda(&self, a_sk: f64) -> f64 {
        self.lambda_coef * a_sk.powf(1.0 / self.a)
    }

    /// Bound `C_6 (c_ω^n/V_ω)^{(n+a)/n}` on `A_s` for `s ≥ s̄`.
    pub fn sublevel_bound(&self) -> f64 {
        let n = self.inputs.n as f64;
        self.c6 * self.inputs.c_ratio.powf((n + self.a) / n)
    }

    /// Bound `C_1/(log s)^p` on `φ(s)` for `s > 1`.
    pub fn decay_bound(&self, s: f64) -> f64 {
        self.c1 / s.ln().powf(self.inputs.p)
    }

    pub fn ledger(&self) -> Ledger {
        use Provenance::*;
        let i = &self.inputs;
        let mut l = Ledger::default();
        l.push("n", i.n as f64, "n", "setup", Input);
        l.push("p", i.p, "p", "setup", Input);
        l.push("q", self.q, "q = n/(n-p) if p<n else supplied", "setup", Explicit);
        l.push("a", self.a, "a = p q", "auxiliary equation", Explicit);
        l.push("b", self.b, "b = n/(n+a)", "barrier", Explicit);
        l.push("gamma", i.gamma, "inf prod df/dlambda_j", "structure condition", Input);
        l.push("kappa", i.kappa, "omega <= kappa omega_X", "setup", Input);
        l.push("c_ratio", i.c_ratio, "c_omega^n / V_omega", "setup", Input);
        l.push("K", i.entropy_bound, "upper bound of Ent_p", "setup", Input);
        l.push("Vol", i.volume, "int omega_X^n", "setup", Input);
        l.push("C_0", i.c0, "n kappa Vol sup K_green", "L1 bound", Reconstructed);
        l.push("beta", i.beta, "0.5 / kappa", "exponential integrability", Configured);
        l.push("C_X", i.c_x, "sup int exp(-beta psi) omega_X^n", "exponential integrability", Configured);
        l.push("alpha_config", i.alpha_config, "alpha-invariant proxy, <= 2 beta", "trudinger assembly", Configured);
        l.push("theta", self.theta, "n a / (p (n+a))", "sublevel absorption", Explicit);
        l.push("epsilon_coef", self.eps_coef, "1/(gamma^{1/(n+a)} (n b)^{n/(n+a)})", "barrier", Explicit);
        l.push("Lambda_coef", self.lambda_coef, "(epsilon_coef b)^{(n+a)/a}", "barrier", Explicit);
        l.push(
            "C_p_young",
            self.c_p_young,
            "sup of (u/2)^p v - v(1+|log v|^p) over e^u",
            "hoelder-young",
            Reconstructed,
        );
        l.push("C_1", self.c1, "2^p (Vol + n^p K + C_p C_0)", "level-set decay", Reconstructed);
        l.push(
            "C_2",
            self.c2,
            "epsilon_coef^{(n+a)p/n} max(1,2^{p-1}) max(1,Lambda_coef)^p",
            "barrier power",
            Reconstructed,
        );
        l.push("C_3", self.c3, "C_2 (2/beta)^p (Vol + n^p K + C_p C_X)", "barrier integration", Reconstructed);
        l.push("C_4", self.c4, "C_3^theta", "sublevel absorption", Reconstructed);
        l.push("C_5", self.c5, "C_2^theta", "sublevel absorption", Reconstructed);
        l.push("ln_s_bar", self.ln_s_bar, "max(0, (2 C_1 C_5 c_ratio)^{1/p})", "threshold level", Explicit);
        l.push("s_bar", self.s_bar, "exp(ln_s_bar)", "threshold level", Explicit);
        l.push("C_6", self.c6, "(2 C_4)^{(n+a)/n} Vol^{(n+a)(1-theta)/n}", "sublevel bound", Reconstructed);
        l.push("C_7", self.c7, "2^a Vol", "energy assembly", Reconstructed);
        l.push("C_8", self.c8, "C_7 + Vol", "energy assembly", Reconstructed);
        l.push("ln_C_e", self.ln_c_e, "log(2^a C_6 c_ratio^{a/n} + C_8 s_bar^a)", "energy assembly", Explicit);
        l.push("C_e", self.c_e, "exp(ln_C_e)", "energy assembly", Explicit);
        l.push("C_9", self.c9, "epsilon_coef^{(n+a)/n} max(1, Lambda_coef)", "trudinger barrier", Reconstructed);
        l.push("C_10", self.c10, "0.5 alpha_config (2 C_6)^{1/a}", "trudinger assembly", Reconstructed);
        l.push(
            "alpha_step4",
            self.alpha_step4,
            "0.5 alpha_config / ((2 C_6)^{1/n} C_9 c_ratio^{(n+a)/n^2})",
            "trudinger assembly",
            Explicit,
        );
        l.push("alpha", self.alpha, "alpha_step4 / max(1, 2^{(n+a)/n - 1})", "trudinger assembly", Reconstructed);
        l.push(
            "ln_C_T",
            self.ln_c_t,
            "log(Vol e^{alpha s_bar^q} + exp(ln C_X + C_10 c_ratio^{(n+a)/(na)} + alpha_step4 s_bar^{(n+a)/n} + alpha [q < (n+a)/n]))",
            "trudinger assembly",
            Reconstructed,
        );
        l.push("C_T", self.c_t, "exp(ln_C_T)", "trudinger assembly", Reconstructed);
        l
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ChainInputs {
        ChainInputs::new(2, 1.0, 0.25, 1.0, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn exponents_for_n2_p1() {
        let c = ConstantChain::build(base()).unwrap();
        assert_eq!(c.q, 2.0);
        assert_eq!(c.a, 2.0);
        assert_eq!(c.b, 0.5);
        assert_eq!(c.theta, 1.0);
        assert!(c.ln_c_e.is_finite() && c.ln_c_e > 0.0);
        assert!(c.ln_c_t.is_finite() && c.ln_c_t > 0.0);
        assert!(c.s_bar >= 1.0);
    }

    #[test]
    fn lambda_relation() {
        let c = ConstantChain::build(base()).unwrap();
        for &a_sk in &[1e-6, 0.01, 1.0, 7.5] {
            let e = c.epsilon(a_sk);
            let l = c.lambda(a_sk);
            assert!((e * c.b * l.powf(-(1.0 - c.b)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p_at_least_n_needs_q() {
        let i = ChainInputs::new(2, 3.0, 0.25, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(ConstantChain::build(i.clone()).is_err());
        assert!(ConstantChain::build(i.with_q(0.5)).is_ok());
    }
}
