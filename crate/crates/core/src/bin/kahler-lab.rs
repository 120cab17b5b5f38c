use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kahler_lab::lab::{self, exit_code_for_error, with_jobs, ExperimentConfig, Outcome};
use kahler_lab::Result;

#[derive(Parser, Debug)]
#[command(name = "kahler-lab", version, about = "Run lab experiments on flat complex tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config; defaults apply to missing fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Points per real axis for the command's grid.
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Audit the structural conditions and γ of the configured operators.
    VerifyOperator,
    /// Sample states over the degenerating backgrounds and score the bounds.
    Sweep,
    /// Auxiliary solves, comparison-function checks and the constant ledger.
    ProofAudit,
    /// Coupled-system check on a manufactured near-solution.
    CoupledCheck,
    /// Manufactured Monge-Ampère solves with a refinement check.
    SolveMa,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if let Some(g) = cli.grid {
        match cli.command {
            Command::ProofAudit => cfg.audit.points = g,
            Command::CoupledCheck => cfg.coupled.points = g,
            Command::SolveMa => cfg.solve.points = vec![g],
            _ => cfg.grid.points = g,
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = load(cli)?;
    with_jobs(cli.jobs, || match cli.command {
        Command::VerifyOperator => lab::verify::cmd_verify_operator(&cfg).map(|r| r.1),
        Command::Sweep => lab::sweep::cmd_sweep(&cfg).map(|r| r.1),
        Command::ProofAudit => lab::audit::cmd_proof_audit(&cfg).map(|r| r.1),
        Command::CoupledCheck => lab::coupled::cmd_coupled_check(&cfg).map(|r| r.1),
        Command::SolveMa => lab::solve::cmd_solve_ma(&cfg).map(|r| r.1),
    })?
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            let verdict = if o.solver_failure {
                "ERROR"
            } else if o.pass {
                "PASS"
            } else {
                "FAIL"
            };
            println!("{verdict} {}: {}", o.command, o.summary);
            for f in &o.files {
                println!("  {}", f.display());
            }
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for_error(&e) as u8)
        }
    }
}
