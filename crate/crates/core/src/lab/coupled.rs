//! Coupled-system check on a manufactured near-solution.

use crate::error::Result;
use crate::grid::HermitianField;
use crate::lab::report::write_json;
use crate::lab::{prepare_out, ExperimentConfig, Outcome};
use crate::linalg::Herm;
use crate::proof::chain::ChainInputs;
use crate::proof::coupled::{coupled_check, manufactured_state, CoupledReport, CoupledSettings};
use crate::proof::mean_value::MeanValueSettings;
use crate::snapshot::write_snapshot;

pub fn run_coupled(cfg: &ExperimentConfig) -> Result<CoupledReport> {
    cfg.validate()?;
    let c = &cfg.coupled;
    let n = cfg.grid.n;
    let (state, default_theta) = manufactured_state(n, c.points, &c.mode, c.amplitude)?;
    let theta = match &c.theta_diag {
        Some(d) => HermitianField::constant(state.torus.grid, Herm::diag(d)),
        None => default_theta,
    };
    // β and C_X from the Green-kernel certificate of the reference form
    let reference = ChainInputs::new(n, c.p, state.op.gamma, state.kappa, state.c_ratio(), 0.0, state.torus.volume)?;
    let mut mean_value = MeanValueSettings::new(reference.beta, reference.c_x);
    mean_value.sharpness = vec![c.sharpness];
    mean_value.solver_tolerance = c.tolerance;
    let settings =
        CoupledSettings { p: c.p, k2: c.k2, sharpness: c.sharpness, solver_tolerance: c.tolerance, mean_value };
    coupled_check(&state, &theta, &settings)
}

pub fn cmd_coupled_check(cfg: &ExperimentConfig) -> Result<(CoupledReport, Outcome)> {
    let report = run_coupled(cfg)?;
    prepare_out(&cfg.out)?;
    let mut files = Vec::new();
    let path = cfg.out.join("coupled_check.json");
    write_json(&path, &report)?;
    files.push(path);
    let path = cfg.out.join("coupled_ledger.json");
    write_json(&path, &report.ledger())?;
    files.push(path);

    let c = &cfg.coupled;
    let (state, _) = manufactured_state(cfg.grid.n, c.points, &c.mode, c.amplitude)?;
    let path = cfg.out.join("coupled_F.bin");
    write_snapshot(
        &path,
        "F",
        &state.torus.grid,
        &state.density,
        serde_json::json!({ "mode": c.mode, "amplitude": c.amplitude }),
    )?;
    files.push(path);

    let summary = if !report.equation.accepted {
        format!("state rejected: residual {:.3e} after centering", report.equation.residual)
    } else {
        format!(
            "c_theta = {:.6e}, residual {:.3e}; F in [{:.3e}, {:.3e}] within [{:.3e}, {:.3e}]",
            report.equation.c_theta,
            report.equation.residual,
            report.inf_f,
            report.sup_f,
            report.f_lower_bound,
            report.f_upper_bound
        )
    };
    let pass = report.pass;
    Ok((report, Outcome { command: "coupled-check".into(), pass, solver_failure: false, summary, files }))
}
