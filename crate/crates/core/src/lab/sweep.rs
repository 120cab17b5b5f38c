//! Sweep over degenerating backgrounds `ω = χ + t ω_X`.
//!
//! Every sampled state is scored against the chain built from its own `κ`
//! and `c_ω^n/V_ω` with one entropy bound shared by the whole corpus, so the
//! constants vary with `t` only through those two numbers. Comparisons are
//! made in log space and every pass flag can be recomputed from its row.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::functionals::{energy, energy_integral, entropy_p, geometric_levels, sublevel_profile};
use crate::geometry::{degenerate_background, Torus};
use crate::lab::report::{cell, line_plot, write_json, Axes, Series, Table};
use crate::lab::{prepare_out, state_seeds, ExperimentConfig, Outcome};
use crate::proof::chain::{ChainInputs, ConstantChain};
use crate::proof::sup_bound::SupBound;
use crate::snapshot::write_snapshot;

/// Relative slack when comparing a row constant with the corpus constant:
/// both are evaluated in floating point from nearly equal inputs.
pub const UNIFORM_SLACK: f64 = 1e-12;

/// Measurements of one state that do not depend on the chain.
#[derive(Clone, Debug)]
struct Measured {
    t: f64,
    state: usize,
    kappa: f64,
    c_ratio: f64,
    ent_p: f64,
    ent_sup: f64,
    sup_phi: f64,
    energy: f64,
    energy_lhs: f64,
    phi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub state: usize,
    pub kappa: f64,
    pub c_ratio: f64,
    pub ent_p: f64,
    pub sup_phi: f64,
    pub energy: f64,
    pub alpha: f64,
    pub q: f64,
    pub ln_trudinger_lhs: f64,
    pub ln_c_t: f64,
    pub energy_lhs: f64,
    pub ln_c_e: f64,
    pub ln_s_bar: f64,
    pub trudinger_pass: bool,
    pub energy_pass: bool,
    /// `Ent_{p'}` for the sup-norm exponent `p' > n`.
    pub ent_sup: f64,
    /// `log S_∞` from this row's `κ`, `c_ratio` and `Ent_{p'}`.
    pub ln_sup_bound: f64,
    pub sup_pass: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.trudinger_pass && self.energy_pass && self.sup_pass
    }
}

pub const CSV_HEADER: [&str; 20] = [
    "t",
    "state",
    "kappa",
    "c_ratio",
    "ent_p",
    "sup_phi",
    "energy",
    "alpha",
    "q",
    "ln_trudinger_lhs",
    "ln_C_T",
    "energy_lhs",
    "ln_C_e",
    "ln_s_bar",
    "trudinger_pass",
    "energy_pass",
    "ent_sup_p",
    "ln_sup_bound",
    "sup_pass",
    "error",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformConstants {
    pub kappa_max: f64,
    pub c_ratio_max: f64,
    pub entropy_bound: f64,
    pub ln_c_t: f64,
    pub ln_c_e: f64,
    pub alpha: f64,
    pub entropy_bound_sup: f64,
    /// Single sup-norm constant `log S_∞` for the corpus.
    pub ln_sup_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub rows: Vec<SweepRow>,
    pub uniform: UniformConstants,
    pub violations: usize,
    pub failed_rows: usize,
    /// Every `sup|φ|` lies below the single corpus constant.
    pub sup_uniform: bool,
    /// Within each `t`, the row bound is nondecreasing in `Ent_{p'}`.
    pub sup_monotone: bool,
    pub pass: bool,
}

impl BoundsReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&CSV_HEADER);
        for r in &self.rows {
            t.push(vec![
                cell(r.t),
                r.state.to_string(),
                cell(r.kappa),
                cell(r.c_ratio),
                cell(r.ent_p),
                cell(r.sup_phi),
                cell(r.energy),
                cell(r.alpha),
                cell(r.q),
                cell(r.ln_trudinger_lhs),
                cell(r.ln_c_t),
                cell(r.energy_lhs),
                cell(r.ln_c_e),
                cell(r.ln_s_bar),
                r.trudinger_pass.to_string(),
                r.energy_pass.to_string(),
                cell(r.ent_sup),
                cell(r.ln_sup_bound),
                r.sup_pass.to_string(),
                r.error.clone().unwrap_or_default().replace(',', ";"),
            ]);
        }
        t
    }
}

fn measure(cfg: &ExperimentConfig, torus: &Torus, t_index: usize, state: usize, seed: u64) -> Result<Measured> {
    let t = cfg.background.t[t_index];
    let (omega, kappa) = degenerate_background(&cfg.chi()?, t, &torus.omega_x)?;
    let s = &cfg.sampling;
    let phi = torus.sample_admissible_potential(&cfg.operator, &omega, s.amplitude, s.modes, seed)?;
    let st = torus.induce_density(&cfg.operator, &phi, &omega)?;
    let n = torus.n() as f64;
    let p = cfg.exponents.p;
    let q = if p < n { n / (n - p) } else { cfg.exponents.q.unwrap_or(1.0) };
    Ok(Measured {
        t,
        state,
        kappa,
        c_ratio: st.c_ratio(),
        ent_p: entropy_p(&st, p)?,
        ent_sup: entropy_p(&st, cfg.exponents.sup_p)?,
        sup_phi: st.phi.iter().map(|v| v.abs()).fold(0.0, f64::max),
        energy: energy(&st)?,
        energy_lhs: energy_integral(&st, p * q)?,
        phi: st.phi,
    })
}

fn chain_inputs(cfg: &ExperimentConfig, torus: &Torus, kappa: f64, c_ratio: f64, k: f64) -> Result<ChainInputs> {
    let mut i = ChainInputs::new(torus.n(), cfg.exponents.p, cfg.operator.gamma, kappa, c_ratio, k, torus.volume)?;
    if let Some(q) = cfg.exponents.q {
        i = i.with_q(q);
    }
    Ok(i)
}

fn sup_inputs(cfg: &ExperimentConfig, torus: &Torus, kappa: f64, c_ratio: f64, k: f64) -> Result<ChainInputs> {
    ChainInputs::new(torus.n(), cfg.exponents.sup_p, cfg.operator.gamma, kappa, c_ratio, k, torus.volume)
}

fn score(cfg: &ExperimentConfig, torus: &Torus, m: &Measured, k: f64) -> Result<SweepRow> {
    let chain = ConstantChain::build(chain_inputs(cfg, torus, m.kappa, m.c_ratio, k)?)?;
    let sup = SupBound::build(sup_inputs(cfg, torus, m.kappa, m.c_ratio, m.ent_sup)?)?;
    let expo: Vec<f64> = m.phi.iter().map(|v| chain.alpha * (-v).max(0.0).powf(chain.q)).collect();
    let top = expo.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = expo.iter().map(|e| (e - top).exp()).collect();
    let ln_lhs = top + torus.integrate_weighted(&shifted, None)?.ln();
    Ok(SweepRow {
        t: m.t,
        state: m.state,
        kappa: m.kappa,
        c_ratio: m.c_ratio,
        ent_p: m.ent_p,
        sup_phi: m.sup_phi,
        energy: m.energy,
        alpha: chain.alpha,
        q: chain.q,
        ln_trudinger_lhs: ln_lhs,
        ln_c_t: chain.ln_c_t,
        energy_lhs: m.energy_lhs,
        ln_c_e: chain.ln_c_e,
        ln_s_bar: chain.ln_s_bar,
        trudinger_pass: ln_lhs <= chain.ln_c_t,
        energy_pass: m.energy_lhs.ln() <= chain.ln_c_e,
        ent_sup: m.ent_sup,
        ln_sup_bound: sup.ln_s_inf,
        sup_pass: m.sup_phi.ln() <= sup.ln_s_inf,
        error: None,
    })
}

fn failed_row(t: f64, state: usize, e: String) -> SweepRow {
    let nan = f64::NAN;
    SweepRow {
        t,
        state,
        kappa: nan,
        c_ratio: nan,
        ent_p: nan,
        sup_phi: nan,
        energy: nan,
        alpha: nan,
        q: nan,
        ln_trudinger_lhs: nan,
        ln_c_t: nan,
        energy_lhs: nan,
        ln_c_e: nan,
        ln_s_bar: nan,
        trudinger_pass: false,
        energy_pass: false,
        ent_sup: nan,
        ln_sup_bound: nan,
        sup_pass: false,
        error: Some(e),
    }
}

/// Runs the sweep; sampling is parallel, scoring and ordering are not.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<(BoundsReport, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let torus = Torus::flat(cfg.grid.n, cfg.grid.points)?;
    let seeds = state_seeds(cfg.seed, cfg.sampling.count);
    let jobs: Vec<(usize, usize)> =
        (0..cfg.background.t.len()).flat_map(|ti| (0..cfg.sampling.count).map(move |i| (ti, i))).collect();
    let measured: Vec<std::result::Result<Measured, (usize, usize, String)>> = jobs
        .par_iter()
        .map(|&(ti, i)| measure(cfg, &torus, ti, i, seeds[i]).map_err(|e| (ti, i, e.to_string())))
        .collect();

    let ok: Vec<&Measured> = measured.iter().filter_map(|m| m.as_ref().ok()).collect();
    let max = |f: fn(&Measured) -> f64| ok.iter().map(|m| f(m)).fold(0.0, f64::max);
    let k = cfg.exponents.entropy_bound.unwrap_or_else(|| max(|m| m.ent_p));
    let k_sup = max(|m| m.ent_sup);
    let kappa_max = max(|m| m.kappa);
    let c_ratio_max = max(|m| m.c_ratio);
    let (uniform_chain, uniform_sup) = if ok.is_empty() {
        (None, None)
    } else {
        (
            Some(ConstantChain::build(chain_inputs(cfg, &torus, kappa_max, c_ratio_max, k)?)?),
            Some(SupBound::build(sup_inputs(cfg, &torus, kappa_max, c_ratio_max, k_sup)?)?),
        )
    };
    let ln_sup_uniform = uniform_sup.as_ref().map_or(f64::NAN, |s| s.ln_s_inf);

    let mut rows = Vec::with_capacity(measured.len());
    let mut phis = Vec::new();
    for m in &measured {
        match m {
            Ok(m) => {
                rows.push(score(cfg, &torus, m, k).unwrap_or_else(|e| failed_row(m.t, m.state, e.to_string())));
                if m.state == 0 {
                    phis.push(m.phi.clone());
                }
            }
            Err((ti, i, e)) => rows.push(failed_row(cfg.background.t[*ti], *i, e.clone())),
        }
    }
    let violations =
        rows.iter().filter(|r| r.error.is_none() && !(r.trudinger_pass && r.energy_pass && r.sup_pass)).count();
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    let slack = UNIFORM_SLACK * ln_sup_uniform.abs();
    let sup_uniform = rows
        .iter()
        .filter(|r| r.error.is_none())
        .all(|r| r.sup_phi.ln() <= ln_sup_uniform && r.ln_sup_bound <= ln_sup_uniform + slack);
    let sup_monotone = cfg.background.t.iter().all(|&t| {
        let mut g: Vec<&SweepRow> = rows.iter().filter(|r| r.error.is_none() && r.t == t).collect();
        g.sort_by(|a, b| a.ent_sup.total_cmp(&b.ent_sup));
        g.windows(2).all(|w| w[1].ln_sup_bound >= w[0].ln_sup_bound)
    });
    let uniform = UniformConstants {
        kappa_max,
        c_ratio_max,
        entropy_bound: k,
        ln_c_t: uniform_chain.as_ref().map_or(f64::NAN, |c| c.ln_c_t),
        ln_c_e: uniform_chain.as_ref().map_or(f64::NAN, |c| c.ln_c_e),
        alpha: uniform_chain.as_ref().map_or(f64::NAN, |c| c.alpha),
        entropy_bound_sup: k_sup,
        ln_sup_bound: ln_sup_uniform,
    };
    let pass = violations == 0 && failed_rows == 0 && sup_uniform && sup_monotone;
    Ok((BoundsReport { rows, uniform, violations, failed_rows, sup_uniform, sup_monotone, pass }, phis))
}

fn per_t(report: &BoundsReport, ts: &[f64], f: fn(&SweepRow) -> f64) -> Vec<(f64, f64)> {
    ts.iter()
        .map(|&t| {
            let v = report.rows.iter().filter(|r| r.t == t && r.error.is_none()).map(f).fold(f64::NAN, f64::max);
            (t, v)
        })
        .collect()
}

pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<(BoundsReport, Outcome)> {
    let (report, phis) = run_sweep(cfg)?;
    prepare_out(&cfg.out)?;
    let mut files: Vec<PathBuf> = Vec::new();
    let csv = cfg.out.join("sweep.csv");
    std::fs::write(&csv, report.table().to_csv())?;
    files.push(csv);
    let json = cfg.out.join("sweep_summary.json");
    write_json(
        &json,
        &serde_json::json!({
            "uniform": report.uniform,
            "violations": report.violations,
            "failed_rows": report.failed_rows,
            "sup_uniform": report.sup_uniform,
            "sup_monotone": report.sup_monotone,
            "pass": report.pass,
        }),
    )?;
    files.push(json);

    let ts = &cfg.background.t;
    let log_t = Axes { log_x: true, log_y: false };
    let plots = [
        (
            "sweep_sup_phi.svg",
            "sup |phi| against t",
            "sup |phi| (max over states)",
            vec![Series { label: "sup |phi|".into(), points: per_t(&report, ts, |r| r.sup_phi) }],
        ),
        (
            "sweep_entropy.svg",
            "entropy against t",
            "Ent_p (max over states)",
            vec![Series { label: format!("Ent_{}", cfg.exponents.p), points: per_t(&report, ts, |r| r.ent_p) }],
        ),
    ];
    for (name, title, ylabel, series) in plots {
        let path = cfg.out.join(name);
        std::fs::write(&path, line_plot(title, "t", ylabel, log_t, &series))?;
        files.push(path);
    }

    // decay of the sublevel mass for the first state at each t
    let torus = Torus::flat(cfg.grid.n, cfg.grid.points)?;
    let mut decay = Vec::new();
    for (ti, phi) in phis.iter().enumerate().take(ts.len()) {
        let t = ts[ti];
        let (omega, _) = degenerate_background(&cfg.chi()?, t, &torus.omega_x)?;
        let st = torus.induce_density(&cfg.operator, phi, &omega)?;
        let depth = st.phi.iter().map(|v| -v).fold(0.0, f64::max);
        let levels = geometric_levels((depth / 64.0).max(1e-6), 10);
        let prof = sublevel_profile(&st, 1.0, &levels)?;
        let path = cfg.out.join(format!("profile_t{ti}.csv"));
        std::fs::write(&path, prof.to_csv())?;
        files.push(path);
        let snap = cfg.out.join(format!("phi_t{ti}.bin"));
        write_snapshot(&snap, "phi", &torus.grid, phi, serde_json::json!({ "t": t, "state": 0, "seed": cfg.seed }))?;
        files.push(snap);
        decay.push(Series {
            label: format!("t = {t}"),
            points: prof.s_values.iter().cloned().zip(prof.phi_of_s.iter().cloned()).collect(),
        });
    }
    let path = cfg.out.join("sweep_decay.svg");
    std::fs::write(&path, line_plot("sublevel mass decay", "s", "phi(s)", Axes { log_x: true, log_y: false }, &decay))?;
    files.push(path);

    let summary = format!(
        "{} rows, {} violations, {} failed; uniform log C_T = {:.6e}, log C_e = {:.6e}, log sup bound = {:.6e}",
        report.rows.len(),
        report.violations,
        report.failed_rows,
        report.uniform.ln_c_t,
        report.uniform.ln_c_e,
        report.uniform.ln_sup_bound
    );
    // a state that cannot be built counts as a numerical failure, not a violation
    let solver_failure = report.failed_rows > 0;
    let outcome = Outcome { command: "sweep".into(), pass: report.pass, solver_failure, summary, files };
    Ok((report, outcome))
}
