//! Reproducible experiments composed from the library: each command reads an
//! [`ExperimentConfig`], writes its reports under the output directory and
//! returns a verdict.

pub mod audit;
pub mod config;
pub mod coupled;
pub mod report;
pub mod solve;
pub mod sweep;
pub mod verify;

use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::ExperimentConfig;

use crate::error::{LabError, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// What a command produced.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Outcome {
    pub command: String,
    pub pass: bool,
    /// Some step hit a solver failure; rows were marked and the run went on.
    pub solver_failure: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.solver_failure {
            EXIT_SOLVER
        } else if self.pass {
            EXIT_PASS
        } else {
            EXIT_VIOLATION
        }
    }
}

pub fn exit_code_for_error(e: &LabError) -> i32 {
    match e {
        LabError::Config(_) | LabError::InvalidGrid(_) | LabError::Io(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

pub fn is_solver_failure(e: &LabError) -> bool {
    matches!(e, LabError::NonConvergence { .. } | LabError::PositivityLost { .. })
}

/// Per-state seeds drawn from the config seed.
pub fn state_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.next_u64()).collect()
}

/// Runs `f` on a pool of `jobs` threads (`0` means the global pool).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}
