//! Manufactured Monge-Ampère solves: the density is computed in closed form
//! from a known potential, and the solver has to recover it.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::Torus;
use crate::grid::HermitianField;
use crate::lab::report::write_json;
use crate::lab::{prepare_out, ExperimentConfig, Outcome};
use crate::ma_solver::{solve_ma, MASolveProblem, SolverReport};
use crate::manufactured::Manufactured;
use crate::snapshot::write_snapshot;

/// Recovery tolerance on the finest grid.
pub const RECOVERY_TOL: f64 = 1e-6;
/// Required error reduction between consecutive grids.
pub const REFINEMENT_FACTOR: f64 = 10.0;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManufacturedSolve {
    pub points: usize,
    pub sup_error: f64,
    pub residual: f64,
    pub report: SolverReport,
    #[serde(skip)]
    pub psi: Vec<f64>,
}

/// Solves `(ω_X + i∂∂̄ψ)^n = det(I + H_{ψ*}) ω_X^n` on the flat torus and
/// compares with the sup-normalized `ψ*`.
pub fn manufactured_solve(
    n: usize,
    points: usize,
    target: &Manufactured,
    tolerance: f64,
    max_iterations: usize,
) -> Result<ManufacturedSolve> {
    let torus = Torus::flat(n, points)?;
    let exact = target.values(&torus.grid)?;
    let hess = target.hessian_field(&torus.grid)?;
    let omega = HermitianField::identity(torus.grid);
    let rhs = omega.add(&hess).determinants();
    let problem =
        MASolveProblem::new(&torus, omega, rhs)?.with_tolerance(tolerance).with_max_iterations(max_iterations);
    let sol = solve_ma(&torus, &problem)?;
    let top = exact.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sup_error = sol.psi.iter().zip(&exact).map(|(a, b)| (a - (b - top)).abs()).fold(0.0, f64::max);
    Ok(ManufacturedSolve { points, sup_error, residual: sol.residual, report: sol.report, psi: sol.psi })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub amplitude: f64,
    pub solves: Vec<ManufacturedSolve>,
    /// Error ratios between consecutive grids.
    pub refinement: Vec<f64>,
    pub pass: bool,
}

pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let n = cfg.grid.n;
    let target = Manufactured::smooth_bump(n, cfg.solve.amplitude);
    let solves = cfg
        .solve
        .points
        .iter()
        .map(|&p| manufactured_solve(n, p, &target, cfg.solver.tolerance, cfg.solver.max_iterations))
        .collect::<Result<Vec<_>>>()?;
    let refinement: Vec<f64> = solves.windows(2).map(|w| w[0].sup_error / w[1].sup_error).collect();
    let last = solves.last().expect("at least one grid");
    let pass = last.sup_error <= RECOVERY_TOL && refinement.iter().all(|r| *r >= REFINEMENT_FACTOR);
    Ok(SolveReport { amplitude: cfg.solve.amplitude, solves, refinement, pass })
}

pub fn cmd_solve_ma(cfg: &ExperimentConfig) -> Result<(SolveReport, Outcome)> {
    let report = run_solve(cfg)?;
    prepare_out(&cfg.out)?;
    let mut files = Vec::new();
    let path = cfg.out.join("solve_ma.json");
    write_json(&path, &report)?;
    files.push(path);
    for s in &report.solves {
        let path = cfg.out.join(format!("psi_N{}.bin", s.points));
        let grid = crate::grid::TorusGrid::new(cfg.grid.n, s.points)?;
        write_snapshot(&path, "psi", &grid, &s.psi, serde_json::to_value(&s.report)?)?;
        files.push(path);
    }
    let summary = report
        .solves
        .iter()
        .map(|s| format!("N={}: error {:.3e}, residual {:.3e}", s.points, s.sup_error, s.residual))
        .collect::<Vec<_>>()
        .join("; ");
    let pass = report.pass;
    Ok((report, Outcome { command: "solve-ma".into(), pass, solver_failure: false, summary, files }))
}
