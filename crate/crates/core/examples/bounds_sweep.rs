//! Trudinger and energy bounds over `ω = diag(1,0) + t I`, with the CSV and
//! plots written to a directory.
//!
//! cargo run --release --example bounds_sweep -- [states] [out_dir]

use kahler_lab::lab::sweep::cmd_sweep;
use kahler_lab::lab::ExperimentConfig;

fn main() -> kahler_lab::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::default();
    cfg.sampling.count = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    cfg.out = args.next().unwrap_or_else(|| "lab-out/sweep".into()).into();
    let (report, outcome) = cmd_sweep(&cfg)?;
    println!(
        "{:>6} {:>8} {:>12} {:>12} {:>14} {:>14}",
        "t", "kappa", "max Ent_p", "max sup|phi|", "max ln LHS", "ln C_T"
    );
    for &t in &cfg.background.t {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.t == t).collect();
        let max = |f: fn(&&kahler_lab::lab::sweep::SweepRow) -> f64| rows.iter().map(f).fold(f64::NAN, f64::max);
        println!(
            "{:>6} {:>8.3} {:>12.4e} {:>12.4e} {:>14.4e} {:>14.4e}",
            t,
            rows[0].kappa,
            max(|r| r.ent_p),
            max(|r| r.sup_phi),
            max(|r| r.ln_trudinger_lhs),
            rows[0].ln_c_t
        );
    }
    println!("{}", outcome.summary);
    println!("violations: {}, written to {}", report.violations, cfg.out.display());
    Ok(())
}
