//! Structural audit and sampled γ for the operator family.
//!
//! cargo run --example operator_audit -- [samples]

use kahler_lab::operators::{gamma_lower_bound, verify_structural_conditions, OperatorKind, OperatorSpec};

fn main() -> kahler_lab::Result<()> {
    let samples: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let ops = [
        OperatorSpec::monge_ampere(2)?,
        OperatorSpec::monge_ampere(3)?,
        OperatorSpec::hessian(2, 3)?,
        OperatorSpec::p_monge_ampere(1, 2)?,
        OperatorSpec::p_monge_ampere(2, 3)?,
        OperatorSpec::new(OperatorKind::FirstEntry, 2)?,
    ];
    for op in &ops {
        let report = verify_structural_conditions(op, samples, 1);
        let gamma = gamma_lower_bound(op, samples, 1)?;
        let failed: Vec<&str> = report.conditions.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        println!(
            "{:<28} n={}  gamma sampled {:.6e}  closed form {:<14}  {}",
            format!("{:?}", op.kind),
            op.n,
            gamma,
            op.analytic_gamma().map_or("-".into(), |g| format!("{g:.6e}")),
            if report.passed { "ok".to_string() } else { format!("fails {}", failed.join(", ")) }
        );
    }
    Ok(())
}
