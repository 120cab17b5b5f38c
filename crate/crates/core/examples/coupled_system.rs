//! Coupled check on `φ = ε cos(2π(x_1 + y_2))` with `θ = (π²|m|²/n) ω_X`.
//!
//! cargo run --release --example coupled_system -- [epsilon]

use kahler_lab::lab::coupled::run_coupled;
use kahler_lab::lab::ExperimentConfig;

fn main() -> kahler_lab::Result<()> {
    let mut cfg = ExperimentConfig::default();
    if let Some(eps) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.coupled.amplitude = eps;
    }
    let r = run_coupled(&cfg)?;
    println!("{}", r.note);
    println!(
        "c_theta {:.8}  residual {:.3e}  accepted {}",
        r.equation.c_theta, r.equation.residual, r.equation.accepted
    );
    println!("K_1 {:.4e}  K_2 margin {:.4}  K_3 {:.4}  delta {}", r.k1, r.k2.margin, r.k3, r.delta);
    if let Some(p) = &r.psi {
        println!(
            "Psi max {:+.4e} (tol {:.1e}); with the gamma factor {:+.4e}",
            p.max_psi, p.tolerance, p.max_psi_gamma
        );
    }
    for (name, m) in [("u = F - K_2 phi", &r.upper), ("u = -F - K_3 phi", &r.lower)] {
        if let Some(m) = m {
            println!(
                "{name}: sup u {:.4e}, ln bound {:.4e}, levels ok {}",
                m.sup_u,
                m.ln_bound,
                m.levels.iter().all(|l| l.passed)
            );
        }
    }
    println!("F in [{:.4e}, {:.4e}], pass {}", r.inf_f, r.sup_f, r.pass);
    Ok(())
}
