//! Auxiliary solves and comparison-function checks on one sampled state per
//! background, plus the constant ledger.
//!
//! cargo run --release --example proof_audit -- [out_dir]

use kahler_lab::lab::audit::cmd_proof_audit;
use kahler_lab::lab::ExperimentConfig;

fn main() -> kahler_lab::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "lab-out/audit".into());
    let cfg = ExperimentConfig { out: out.into(), ..Default::default() };
    let (report, outcome) = cmd_proof_audit(&cfg)?;
    for b in &report.blocks {
        println!("t = {}  depth {:.4e}  Ent_1 {:.4e}", b.t, b.depth, b.entropy);
        for c in &b.checks {
            println!(
                "  s {:.3e}  k {:>5}  A_sk {:.4e}  A_s {:.4e}  max Phi {:+.4e}  tol {:.1e}  {}",
                c.s,
                c.k,
                c.a_sk,
                c.a_s,
                c.max_phi,
                c.tolerance,
                if c.passed { "ok" } else { "FAIL" }
            );
        }
        println!(
            "  decay levels {} ({} nontrivial), mass levels {} ({} nontrivial), Trudinger {}, energy {}",
            b.decay.levels,
            b.decay.nontrivial,
            b.sublevel_mass.levels,
            b.sublevel_mass.nontrivial,
            b.trudinger_pass,
            b.energy_pass
        );
    }
    println!("{}", outcome.summary);
    Ok(())
}
