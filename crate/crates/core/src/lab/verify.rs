//! Structural audit of the configured operators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lab::report::write_json;
use crate::lab::{prepare_out, ExperimentConfig, Outcome};
use crate::operators::{gamma_lower_bound, verify_structural_conditions, OperatorConfig, StructuralReport};

/// Sampled γ must match a closed form to this tolerance.
pub const GAMMA_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorAudit {
    pub operator: OperatorConfig,
    pub structural: StructuralReport,
    pub gamma_sampled: f64,
    pub gamma_analytic: Option<f64>,
    pub gamma_matches: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub audits: Vec<OperatorAudit>,
    pub failed_conditions: Vec<String>,
    pub pass: bool,
}

pub fn verify_operators(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    let ops = if cfg.verify.operators.is_empty() { vec![cfg.operator.clone()] } else { cfg.verify.operators.clone() };
    let mut audits = Vec::new();
    let mut failed = Vec::new();
    for op in ops {
        let structural = verify_structural_conditions(&op, cfg.verify.samples, cfg.seed);
        let gamma_sampled = gamma_lower_bound(&op, cfg.verify.samples, cfg.seed)?;
        let gamma_analytic = op.analytic_gamma();
        let gamma_matches = gamma_analytic.is_none_or(|g| (g - gamma_sampled).abs() <= GAMMA_TOL);
        for c in structural.conditions.iter().filter(|c| !c.passed) {
            failed.push(format!("{:?} n={}: {}", op.kind, op.n, c.name));
        }
        let passed = structural.passed && gamma_matches;
        audits.push(OperatorAudit {
            operator: op.into(),
            structural,
            gamma_sampled,
            gamma_analytic,
            gamma_matches,
            passed,
        });
    }
    let pass = audits.iter().all(|a| a.passed);
    Ok(VerifyReport { audits, failed_conditions: failed, pass })
}

pub fn cmd_verify_operator(cfg: &ExperimentConfig) -> Result<(VerifyReport, Outcome)> {
    let report = verify_operators(cfg)?;
    prepare_out(&cfg.out)?;
    let path = cfg.out.join("verify_operator.json");
    write_json(&path, &report)?;
    let summary = if report.pass {
        format!("{} operator(s) satisfy the structural conditions", report.audits.len())
    } else {
        format!("failed: {}", report.failed_conditions.join("; "))
    };
    let outcome = Outcome {
        command: "verify-operator".into(),
        pass: report.pass,
        solver_failure: false,
        summary,
        files: vec![path],
    };
    Ok((report, outcome))
}
