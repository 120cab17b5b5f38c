//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kahler_lab::functionals::{LevelDirection, SublevelProfile};
use kahler_lab::geometry::complex_hessian;
use kahler_lab::grid::TorusGrid;
use kahler_lab::lab::audit::run_audit;
use kahler_lab::lab::coupled::run_coupled;
use kahler_lab::lab::solve::manufactured_solve;
use kahler_lab::lab::sweep::cmd_sweep;
use kahler_lab::lab::ExperimentConfig;
use kahler_lab::linalg::{relative_eigenvalues, Herm};
use kahler_lab::manufactured::{Manufactured, Ridge};
use kahler_lab::operators::{gamma_lower_bound, verify_structural_conditions, OperatorSpec};
use kahler_lab::proof::degiorgi::{
    de_giorgi, increment, minimal_recursion_constant, simulate_recursion, DeGiorgiLevels,
};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Line {
    pass: bool,
    detail: String,
}

fn line(pass: bool, detail: String) -> Line {
    Line { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn operator_audit() -> Line {
    let start = Instant::now();
    let ops = [
        OperatorSpec::monge_ampere(2).unwrap(),
        OperatorSpec::monge_ampere(3).unwrap(),
        OperatorSpec::hessian(2, 3).unwrap(),
        OperatorSpec::p_monge_ampere(1, 2).unwrap(),
        OperatorSpec::p_monge_ampere(2, 2).unwrap(),
        OperatorSpec::p_monge_ampere(1, 3).unwrap(),
        OperatorSpec::p_monge_ampere(2, 3).unwrap(),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    for op in &ops {
        let r = verify_structural_conditions(op, 2000, 7);
        let defect = r.condition("homogeneity").unwrap().worst.max(r.condition("symmetry").unwrap().worst);
        worst = worst.max(defect);
        ok &= r.passed && defect <= 1e-10;
    }
    let mut gamma_err = 0.0f64;
    for n in [2usize, 3] {
        let g = gamma_lower_bound(&OperatorSpec::monge_ampere(n).unwrap(), 2000, 7).unwrap();
        gamma_err = gamma_err.max((g - (n as f64).powi(-(n as i32))).abs());
    }
    let t = secs(start.elapsed());
    line(
        ok && gamma_err <= 1e-8 && t < 10.0,
        format!("{} operators, worst defect {worst:.2e}, gamma error {gamma_err:.2e}, {t:.1} s", ops.len()),
    )
}

fn embed(h: &Herm) -> DMatrix<f64> {
    let n = h.n;
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

fn oracle_relative(a: &Herm, b: &Herm) -> Vec<f64> {
    let ea = SymmetricEigen::new(embed(a));
    let inv_sqrt = &ea.eigenvectors
        * DMatrix::from_diagonal(&ea.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * ea.eigenvectors.transpose();
    let c = &inv_sqrt * embed(b) * &inv_sqrt;
    let mut ev: Vec<f64> = SymmetricEigen::new((&c + c.transpose()) * 0.5).eigenvalues.iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

fn random_herm(n: usize, rng: &mut ChaCha8Rng, shift: f64) -> Herm {
    let g: Vec<Complex64> =
        (0..n * n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut e = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = (0..n).map(|k| g[i * n + k] * g[j * n + k].conj()).sum::<Complex64>();
        }
        e[i * n + i] += shift;
    }
    Herm::from_entries(n, &e)
}

fn spectral_geometry() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = TorusGrid::new(2, 16).unwrap();
    let mut hess_err = 0.0f64;
    for _ in 0..20 {
        let terms = rng.random_range(1..5);
        let ridges = (0..terms)
            .map(|_| Ridge {
                k: (0..4).map(|_| rng.random_range(-7i64..=7)).collect(),
                amplitude: rng.random_range(-0.05..0.05),
                rho: 0.0,
                phase: rng.random_range(0.0..6.3),
            })
            .collect();
        let pot = Manufactured::new(ridges);
        let h = complex_hessian(&pot.values(&grid).unwrap(), &grid).unwrap();
        let exact = pot.hessian_field(&grid).unwrap();
        for (a, b) in h.points().iter().zip(exact.points()) {
            hess_err = hess_err.max(a.sub(b).max_abs());
        }
    }
    let mut eig_err = 0.0f64;
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let a = random_herm(n, &mut rng, 0.3);
        let b = random_herm(n, &mut rng, 0.05);
        let got = relative_eigenvalues(&b, &a).unwrap();
        let want = oracle_relative(&a, &b);
        for j in 0..n {
            eig_err = eig_err.max((got[j] - want[j]).abs() / want[j].abs().max(1.0));
        }
    }
    line(hess_err <= 1e-12 && eig_err <= 1e-10, format!("hessian error {hess_err:.2e}, eigenvalue error {eig_err:.2e}"))
}

fn ma_solver() -> Line {
    let target = Manufactured::smooth_bump(2, 0.02);
    let mut times = Vec::new();
    let mut solves = Vec::new();
    for points in [8, 16] {
        let start = Instant::now();
        match manufactured_solve(2, points, &target, 1e-9, 200) {
            Ok(s) => solves.push(s),
            Err(e) => return line(false, format!("N = {points}: {e}")),
        }
        times.push(secs(start.elapsed()));
    }
    let (coarse, fine) = (&solves[0], &solves[1]);
    let ratio = coarse.sup_error / fine.sup_error;
    let slowest = times.iter().cloned().fold(0.0, f64::max);
    line(
        fine.sup_error <= 1e-6 && fine.residual <= 1e-9 && ratio >= 10.0 && slowest < 60.0,
        format!(
            "N=16 error {:.2e}, residual {:.2e}, N=8/N=16 ratio {ratio:.1e}, slowest solve {slowest:.1} s",
            fine.sup_error, fine.residual
        ),
    )
}

fn de_giorgi_line() -> Line {
    let want = 1.0 / (1.0 - 0.8408964152537145);
    let levels = DeGiorgiLevels::new(2, 4.0, 0.3, 1.0).unwrap();
    let arith = (levels.s_inf - levels.s_0 - want).abs().max((increment(0.25) - want).abs());

    let mut ok = true;
    let mut worst_margin = f64::INFINITY;
    for (len, m) in [(4.0, 6.0), (6.0, 8.0), (10.0, 3.0)] {
        let phi = |s: f64| (1.0f64 - s / len).max(0.0).powf(m);
        let s_values: Vec<f64> = (0..=2000).map(|i| i as f64 * len / 1600.0).collect();
        let masses: Vec<f64> = s_values.iter().map(|s| phi(*s)).collect();
        let c_bar = 1.01 * minimal_recursion_constant(&s_values, &masses, 2, 4.0, 1.0);
        let lv = DeGiorgiLevels::new(2, 4.0, c_bar, 1.0).unwrap();
        let visited = simulate_recursion(phi, &lv, 2, 1.0, 10_000);
        let last = *visited.last().unwrap();
        let profile = SublevelProfile {
            a_of_s: vec![0.0; s_values.len()],
            s_values,
            phi_of_s: masses,
            a: 1.0,
            direction: LevelDirection::Superlevel,
        };
        let out = de_giorgi(&profile, 2, 1.0, 4.0, c_bar).unwrap();
        ok &= phi(last) == 0.0 && last <= lv.s_inf && out.verified;
        worst_margin = worst_margin.min(lv.s_inf - last);
    }
    line(
        ok && arith <= 1e-12,
        format!("3 synthetic profiles vanish before S_inf (min margin {worst_margin:.3}), increment error {arith:.1e}"),
    )
}

fn coupled() -> Line {
    let r = match run_coupled(&ExperimentConfig::default()) {
        Ok(r) => r,
        Err(e) => return line(false, e.to_string()),
    };
    let upper = r.upper.as_ref().is_some_and(|u| u.pass);
    let (psi_max, psi_tol) = r.psi.as_ref().map_or((f64::NAN, f64::NAN), |p| (p.max_psi, p.tolerance));
    line(
        r.equation.residual <= 1e-6 && upper && psi_max <= psi_tol,
        format!(
            "residual {:.2e}, upper bound {:.3e} >= sup F {:.3e}, Psi max {psi_max:.2e} (tol {psi_tol:.1e})",
            r.equation.residual, r.f_upper_bound, r.sup_f
        ),
    )
}

fn main() -> ExitCode {
    let mut lines: Vec<(&str, Line)> = Vec::new();
    lines.push(("operator audit", operator_audit()));
    lines.push(("spectral geometry", spectral_geometry()));
    lines.push(("MA solver", ma_solver()));

    let dir = tempfile::TempDir::new().unwrap();
    let mut cfg = ExperimentConfig { out: dir.path().join("a"), ..Default::default() };
    let start = Instant::now();
    let first = cmd_sweep(&cfg);
    let sweep_time = secs(start.elapsed());
    match &first {
        Ok((r, _)) => {
            lines.push((
                "bounds sweep",
                line(
                    r.violations == 0 && r.failed_rows == 0 && sweep_time < 600.0,
                    format!(
                        "{} rows, {} violations, {} failed, {sweep_time:.0} s",
                        r.rows.len(),
                        r.violations,
                        r.failed_rows
                    ),
                ),
            ));
            lines.push((
                "sup bound",
                line(
                    r.sup_uniform && r.sup_monotone && r.uniform.ln_sup_bound.is_finite(),
                    format!(
                        "log sup bound {:.4e} for all t, uniform {}, monotone {}",
                        r.uniform.ln_sup_bound, r.sup_uniform, r.sup_monotone
                    ),
                ),
            ));
        }
        Err(e) => {
            lines.push(("bounds sweep", line(false, e.to_string())));
            lines.push(("sup bound", line(false, e.to_string())));
        }
    }

    let audit = match run_audit(&ExperimentConfig::default()) {
        Ok(a) => {
            let rows: Vec<_> = a.blocks.iter().flat_map(|b| &b.checks).collect();
            let phi_ok = rows.iter().all(|c| c.max_phi <= 1e-6 * (1.0 + c.lambda));
            let mass_ok = a.blocks.iter().all(|b| b.sublevel_mass.passed);
            let decay_ok = a.blocks.iter().all(|b| b.decay.passed);
            let mass_nt: usize = a.blocks.iter().map(|b| b.sublevel_mass.nontrivial).sum();
            let decay_nt: usize = a.blocks.iter().map(|b| b.decay.nontrivial).sum();
            line(
                phi_ok && mass_ok && decay_ok && a.phi_failures == 0 && rows.len() == a.phi_checks,
                format!(
                    "{} Phi checks, sublevel mass ok={mass_ok} ({mass_nt} nontrivial levels), decay ok={decay_ok} ({decay_nt} nontrivial levels)",
                    rows.len()
                ),
            )
        }
        Err(e) => line(false, e.to_string()),
    };
    lines.push(("proof audit", audit));
    lines.push(("De Giorgi", de_giorgi_line()));
    lines.push(("coupled check", coupled()));

    cfg.out = dir.path().join("b");
    let det = match (&first, cmd_sweep(&cfg)) {
        (Ok(_), Ok(_)) => {
            let a = std::fs::read(dir.path().join("a/sweep.csv")).unwrap();
            let b = std::fs::read(dir.path().join("b/sweep.csv")).unwrap();
            line(a == b, format!("{} bytes, identical = {}", a.len(), a == b))
        }
        _ => line(false, "sweep failed".into()),
    };
    lines.push(("determinism", det));

    let mut all = true;
    for (i, (name, l)) in lines.iter().enumerate() {
        all &= l.pass;
        println!("[{}] {} {name}: {}", i + 1, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
