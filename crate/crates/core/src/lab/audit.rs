//! Step-by-step audit of the estimate on computed data: auxiliary solves and
//! comparison-function checks on a grid of `(s, k)`, the sublevel decay and
//! mass checks, and the final Trudinger/energy comparison.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::functionals::{
    energy_integral, entropy_p, geometric_levels, sublevel_profile, trudinger_integral, SublevelProfile,
};
use crate::geometry::{degenerate_background, Torus};
use crate::grid::HermitianField;
use crate::lab::report::{cell, line_plot, write_json, Axes, Series, Table};
use crate::lab::{is_solver_failure, prepare_out, state_seeds, ExperimentConfig, Outcome};
use crate::linalg::Herm;
use crate::proof::barrier::{depth, sharpness_series};
use crate::proof::chain::{ChainInputs, ConstantChain};
use crate::proof::ledger::Ledger;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiCheckRow {
    pub t: f64,
    pub s: f64,
    pub k: f64,
    pub a_sk: f64,
    pub a_s: f64,
    pub gap_bound: f64,
    pub effective_mass: f64,
    pub epsilon: f64,
    pub lambda: f64,
    pub max_phi: f64,
    pub tolerance: f64,
    pub solver_residual: f64,
    pub passed: bool,
}

/// A family of inequalities checked on profile levels; `nontrivial` counts
/// levels where the left side is nonzero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LevelInequality {
    pub levels: usize,
    pub nontrivial: usize,
    pub worst_ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditBlock {
    pub t: f64,
    pub kappa: f64,
    pub c_ratio: f64,
    pub depth: f64,
    pub entropy: f64,
    pub checks: Vec<PhiCheckRow>,
    pub gaps_decreasing: bool,
    pub gaps_bounded: bool,
    pub solver_failures: Vec<String>,
    /// `φ(s)(log s)^p ≤ C_1` for `s > 1`.
    pub decay: LevelInequality,
    /// `A_s ≤ C_6 c_ratio^{(n+a)/n}` for `s ≥ s̄`.
    pub sublevel_mass: LevelInequality,
    pub ln_trudinger_lhs: f64,
    pub energy_lhs: f64,
    pub trudinger_pass: bool,
    pub energy_pass: bool,
    pub profile: SublevelProfile,
    pub ledger: Ledger,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AuditReport {
    pub blocks: Vec<AuditBlock>,
    pub phi_checks: usize,
    pub phi_failures: usize,
    pub pass: bool,
}

fn level_check(profile: &SublevelProfile, lhs: impl Fn(f64, f64, f64) -> Option<(f64, f64)>) -> LevelInequality {
    let mut out = LevelInequality { passed: true, ..Default::default() };
    for ((&s, &m), &a) in profile.s_values.iter().zip(&profile.phi_of_s).zip(&profile.a_of_s) {
        if let Some((l, bound)) = lhs(s, m, a) {
            out.levels += 1;
            if l > 0.0 {
                out.nontrivial += 1;
            }
            out.worst_ratio = out.worst_ratio.max(l / bound);
            out.passed &= l <= bound;
        }
    }
    out
}

/// Levels below the depth plus doublings up to past `max(2, 2 s̄)`.
fn audit_levels(depth: f64, s_bar: f64, count: usize) -> Vec<f64> {
    let mut s = geometric_levels((depth / 2f64.powi(count as i32 / 2)).max(1e-9), count);
    let top = (2.0 * s_bar).clamp(2.0, 1e300);
    let mut x = 1.5;
    while x <= top {
        s.push(x);
        x *= 2.0;
    }
    s.push(x);
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

pub fn audit_at(cfg: &ExperimentConfig, t: f64, seed: u64) -> Result<AuditBlock> {
    let a = &cfg.audit;
    let n = cfg.grid.n;
    let torus = Torus::flat(n, a.points)?;
    let chi = HermitianField::constant(torus.grid, Herm::diag(&cfg.background.chi_diag));
    let (omega, kappa) = degenerate_background(&chi, t, &torus.omega_x)?;
    let phi = torus.sample_admissible_potential(&cfg.operator, &omega, a.amplitude, cfg.sampling.modes, seed)?;
    let st = torus.induce_density(&cfg.operator, &phi, &omega)?;
    let p = cfg.exponents.p;
    let entropy = entropy_p(&st, p)?;
    let mut inputs = ChainInputs::new(n, p, cfg.operator.gamma, kappa, st.c_ratio(), entropy, torus.volume)?;
    if let Some(q) = cfg.exponents.q {
        inputs = inputs.with_q(q);
    }
    let chain = ConstantChain::build(inputs)?;
    let d = depth(&st);

    let mut checks = Vec::new();
    let mut failures = Vec::new();
    let (mut dec, mut bnd) = (true, true);
    for &frac in &a.s_fractions {
        match sharpness_series(&st, &chain, frac * d, &a.sharpness, a.tolerance) {
            Ok(series) => {
                dec &= series.gaps_decreasing();
                bnd &= series.gaps_bounded();
                for (sol, c) in series.solves.iter().zip(&series.checks) {
                    checks.push(PhiCheckRow {
                        t,
                        s: sol.s,
                        k: sol.k,
                        a_sk: sol.a_sk,
                        a_s: sol.a_s,
                        gap_bound: sol.gap_bound,
                        effective_mass: sol.effective_mass(),
                        epsilon: c.epsilon,
                        lambda: c.lambda,
                        max_phi: c.max_value,
                        tolerance: c.tolerance,
                        solver_residual: sol.report.residual,
                        passed: c.passed,
                    });
                }
            }
            Err(e) if is_solver_failure(&e) => failures.push(format!("s = {:.6e}: {e}", frac * d)),
            Err(e) => return Err(e),
        }
    }

    let levels = audit_levels(d, chain.s_bar, a.profile_levels);
    let profile = sublevel_profile(&st, chain.a, &levels)?;
    let decay = level_check(&profile, |s, m, _| (s > 1.0).then(|| (m * s.ln().powf(p), chain.c1)));
    let mass_bound = chain.sublevel_bound();
    let sublevel_mass = level_check(&profile, |s, _, am| (s >= chain.s_bar).then_some((am, mass_bound)));
    let lhs = trudinger_integral(&st, chain.alpha, chain.q)?;
    let energy_lhs = energy_integral(&st, chain.a)?;
    let trudinger_pass = lhs.log <= chain.ln_c_t;
    let energy_pass = energy_lhs.ln() <= chain.ln_c_e;
    let pass = failures.is_empty()
        && checks.iter().all(|c| c.passed)
        && dec
        && bnd
        && decay.passed
        && sublevel_mass.passed
        && trudinger_pass
        && energy_pass;
    Ok(AuditBlock {
        t,
        kappa,
        c_ratio: st.c_ratio(),
        depth: d,
        entropy,
        checks,
        gaps_decreasing: dec,
        gaps_bounded: bnd,
        solver_failures: failures,
        decay,
        sublevel_mass,
        ln_trudinger_lhs: lhs.log,
        energy_lhs,
        trudinger_pass,
        energy_pass,
        profile,
        ledger: chain.ledger(),
        pass,
    })
}

pub fn run_audit(cfg: &ExperimentConfig) -> Result<AuditReport> {
    cfg.validate()?;
    let seed = state_seeds(cfg.seed, 1)[0];
    let blocks = cfg.audit.t.iter().map(|&t| audit_at(cfg, t, seed)).collect::<Result<Vec<_>>>()?;
    let phi_checks = blocks.iter().map(|b| b.checks.len()).sum();
    let phi_failures = blocks.iter().flat_map(|b| &b.checks).filter(|c| !c.passed).count();
    let pass = blocks.iter().all(|b| b.pass);
    Ok(AuditReport { blocks, phi_checks, phi_failures, pass })
}

pub fn cmd_proof_audit(cfg: &ExperimentConfig) -> Result<(AuditReport, Outcome)> {
    let report = run_audit(cfg)?;
    prepare_out(&cfg.out)?;
    let mut files = Vec::new();
    let path = cfg.out.join("proof_audit.json");
    write_json(&path, &report)?;
    files.push(path);
    let ledgers: Vec<_> =
        report.blocks.iter().map(|b| serde_json::json!({ "t": b.t, "constants": b.ledger.entries })).collect();
    let path = cfg.out.join("ledger.json");
    write_json(&path, &ledgers)?;
    files.push(path);

    let mut table = Table::new(&[
        "t",
        "s",
        "k",
        "A_sk",
        "A_s",
        "gap_bound",
        "effective_mass",
        "epsilon",
        "Lambda",
        "max_Phi",
        "tolerance",
        "pass",
    ]);
    for c in report.blocks.iter().flat_map(|b| &b.checks) {
        table.push(vec![
            cell(c.t),
            cell(c.s),
            cell(c.k),
            cell(c.a_sk),
            cell(c.a_s),
            cell(c.gap_bound),
            cell(c.effective_mass),
            cell(c.epsilon),
            cell(c.lambda),
            cell(c.max_phi),
            cell(c.tolerance),
            c.passed.to_string(),
        ]);
    }
    let path = cfg.out.join("phi_checks.csv");
    std::fs::write(&path, table.to_csv())?;
    files.push(path);

    let series: Vec<Series> = report
        .blocks
        .iter()
        .map(|b| Series {
            label: format!("t = {}", b.t),
            points: b.profile.s_values.iter().cloned().zip(b.profile.phi_of_s.iter().cloned()).collect(),
        })
        .collect();
    let path = cfg.out.join("audit_decay.svg");
    std::fs::write(
        &path,
        line_plot("sublevel mass decay", "s", "phi(s)", Axes { log_x: true, log_y: false }, &series),
    )?;
    files.push(path);

    let solver_failure = report.blocks.iter().any(|b| !b.solver_failures.is_empty());
    let nontrivial: usize = report.blocks.iter().map(|b| b.decay.nontrivial + b.sublevel_mass.nontrivial).sum();
    let summary = format!(
        "{} comparison checks, {} failed; {} nontrivial decay/mass levels",
        report.phi_checks, report.phi_failures, nontrivial
    );
    let pass = report.pass;
    Ok((report, Outcome { command: "proof-audit".into(), pass, solver_failure, summary, files }))
}
