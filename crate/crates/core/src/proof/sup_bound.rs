//! Uniform bound on `sup |φ|` when `p > n`.
//!
//! Runs the barrier argument with `a = 1` (so `q = 1/p`): the energy bound
//! `∫(−φ) e^{nF} ≤ C_e` caps `A_s`, the barrier gives exponential
//! integrability of `(−φ−s)^{(n+1)/n} / A_s^{1/n}`, and Hölder-Young turns
//! that into the De Giorgi recursion with `r = p`. All large quantities are
//! carried as logarithms.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::proof::chain::{log_add, ChainInputs, ConstantChain};
use crate::proof::degiorgi::increment;
use crate::proof::ledger::{Ledger, Provenance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupBound {
    pub chain: ConstantChain,
    /// Exponent of the integrability step, `β / eps_coef^{(n+1)/n}`.
    pub alpha_1: f64,
    /// `log (R · C_e)`, the cap on `A_s`.
    pub ln_a_max: f64,
    pub ln_c38: f64,
    pub ln_c39: f64,
    pub ln_c_bar: f64,
    /// `(p−n)/(pn)`.
    pub delta: f64,
    pub ln_s_0: f64,
    pub ln_s_inf: f64,
    /// `S_∞`, `+inf` when it exceeds the `f64` range.
    pub s_inf: f64,
}

impl SupBound {
    pub fn build(inputs: ChainInputs) -> Result<Self> {
        let n = inputs.n as f64;
        let p = inputs.p;
        if !(p > n) {
            return Err(LabError::InvalidParameter(format!("sup bound needs p > n, got p = {p}, n = {n}")));
        }
        let chain = ConstantChain::build(inputs.with_q(1.0 / p))?;
        let i = &chain.inputs;
        let r = i.c_ratio;
        let alpha_1 = i.beta / chain.eps_coef.powf((n + 1.0) / n);
        let ln_a_max = r.ln() + chain.ln_c_e;
        // Λ ≤ lambda_coef · A_max (a = 1)
        let ln_c38 = i.beta * chain.lambda_coef * ln_a_max.exp() + i.c_x.ln();
        let base = (i.volume + n.powf(p) * i.entropy_bound).ln();
        let ln_c39 = p * (2.0 / alpha_1).ln() + log_add(base, chain.c_p_young.ln() + ln_c38);
        let ln_c_bar = ln_c39 / p;
        let delta = (p - n) / (p * n);
        let ln_s_0 = chain.ln_c_e + (std::f64::consts::LN_2 + ln_c_bar + r.ln() / n) / delta;
        let ln_s_inf = log_add(ln_s_0, increment(delta).ln());
        Ok(Self { chain, alpha_1, ln_a_max, ln_c38, ln_c39, ln_c_bar, delta, ln_s_0, ln_s_inf, s_inf: ln_s_inf.exp() })
    }

    pub fn ledger(&self) -> Ledger {
        use Provenance::*;
        let mut l = Ledger::default();
        l.push("sup.alpha_1", self.alpha_1, "beta / epsilon_coef^{(n+1)/n}", "sup bound", Reconstructed);
        l.push("sup.ln_A_max", self.ln_a_max, "log(c_ratio C_e) with a = 1", "sup bound", Reconstructed);
        l.push("sup.ln_C_38", self.ln_c38, "beta Lambda_coef A_max + log C_X", "sup bound", Reconstructed);
        l.push(
            "sup.ln_C_39",
            self.ln_c39,
            "p log(2/alpha_1) + log(Vol + n^p K + C_p C_38)",
            "sup bound",
            Reconstructed,
        );
        l.push("sup.ln_C_bar", self.ln_c_bar, "ln_C_39 / p", "de-giorgi", Reconstructed);
        l.push(
            "sup.ln_s_0",
            self.ln_s_0,
            "log C_e + (log 2 + ln C_bar + log(c_ratio)/n) / delta",
            "de-giorgi",
            Reconstructed,
        );
        l.push("sup.ln_S_inf", self.ln_s_inf, "log(s_0 + 1/(1 - 2^{-delta}))", "de-giorgi", Explicit);
        l
    }
}
