//! Experiment configuration, read from TOML. Every field has a default, so
//! an empty file is a valid config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{HermitianField, TorusGrid};
use crate::linalg::Herm;
use crate::operators::{OperatorKind, OperatorSpec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 2, points: 16 }
    }
}

/// `ω = χ + t ω_X` with constant `χ = diag(chi_diag)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundConfig {
    pub chi_diag: Vec<f64>,
    pub t: Vec<f64>,
}

impl Default for BackgroundConfig {
    fn default() -> Self {
        Self { chi_diag: vec![1.0, 0.0], t: vec![1.0, 0.5, 0.1, 0.01] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub count: usize,
    pub amplitude: f64,
    pub modes: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { count: 50, amplitude: 1.0, modes: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentConfig {
    /// Entropy exponent of the Trudinger/energy sweep.
    pub p: f64,
    /// Required when `p ≥ n`.
    pub q: Option<f64>,
    /// Entropy exponent of the sup-norm sweep, `> n`.
    pub sup_p: f64,
    /// Entropy bound fed to the chain; defaults to the corpus maximum.
    pub entropy_bound: Option<f64>,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        Self { p: 1.0, q: None, sup_p: 3.0, entropy_bound: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Operators to audit; empty means the configured operator only.
    pub operators: Vec<OperatorSpec>,
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { operators: Vec::new(), samples: 2000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub points: usize,
    pub amplitude: f64,
    pub t: Vec<f64>,
    /// Levels `s` as fractions of `sup(−φ)`.
    pub s_fractions: Vec<f64>,
    pub sharpness: Vec<f64>,
    pub tolerance: f64,
    pub profile_levels: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            points: 8,
            amplitude: 0.01,
            t: vec![1.0, 0.1, 0.01],
            s_fractions: vec![0.2, 0.4, 0.6],
            sharpness: vec![8.0, 32.0, 128.0],
            tolerance: 1e-7,
            profile_levels: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoupledConfig {
    pub points: usize,
    /// Wave vector of the manufactured potential.
    pub mode: Vec<i64>,
    pub amplitude: f64,
    /// Constant `θ`; defaults to the form matching `mode`.
    pub theta_diag: Option<Vec<f64>>,
    pub p: f64,
    pub k2: f64,
    pub sharpness: f64,
    pub tolerance: f64,
}

impl Default for CoupledConfig {
    fn default() -> Self {
        Self {
            points: 8,
            mode: vec![1, 0, 0, 1],
            amplitude: 1e-5,
            theta_diag: None,
            p: 1.0,
            k2: 1.0,
            sharpness: 32.0,
            tolerance: 1e-7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Amplitude of the manufactured potential.
    pub amplitude: f64,
    /// Grids to solve on, for the refinement check.
    pub points: Vec<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { amplitude: 0.02, points: vec![8, 16] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub operator: OperatorSpec,
    pub grid: GridConfig,
    pub background: BackgroundConfig,
    pub sampling: SamplingConfig,
    pub exponents: ExponentConfig,
    pub solver: SolverConfig,
    pub verify: VerifyConfig,
    pub audit: AuditConfig,
    pub coupled: CoupledConfig,
    pub solve: SolveConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            out: PathBuf::from("lab-out"),
            operator: OperatorSpec::new(OperatorKind::MongeAmpere, 2).expect("n = 2 is valid"),
            grid: GridConfig::default(),
            background: BackgroundConfig::default(),
            sampling: SamplingConfig::default(),
            exponents: ExponentConfig::default(),
            solver: SolverConfig::default(),
            verify: VerifyConfig::default(),
            audit: AuditConfig::default(),
            coupled: CoupledConfig::default(),
            solve: SolveConfig::default(),
        }
    }
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Default config adjusted to complex dimension `n`.
    pub fn for_dimension(n: usize) -> Result<Self> {
        let mut c = Self { operator: OperatorSpec::monge_ampere(n)?, ..Self::default() };
        c.grid.n = n;
        c.background.chi_diag = (0..n).map(|j| if j == 0 { 1.0 } else { 0.0 }).collect();
        c.coupled.mode = (0..2 * n).map(|j| if j == 0 || j == 2 * n - 1 { 1 } else { 0 }).collect();
        c.exponents.sup_p = c.exponents.sup_p.max(n as f64 + 1.0);
        if c.exponents.p >= n as f64 {
            c.exponents.q.get_or_insert(1.0);
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.n;
        TorusGrid::new(n, self.grid.points).map_err(|e| bad(e.to_string()))?;
        TorusGrid::new(n, self.audit.points).map_err(|e| bad(format!("audit grid: {e}")))?;
        TorusGrid::new(n, self.coupled.points).map_err(|e| bad(format!("coupled grid: {e}")))?;
        if self.operator.n != n {
            return Err(bad(format!("operator dimension {} differs from grid dimension {n}", self.operator.n)));
        }
        if self.background.chi_diag.len() != n || self.background.chi_diag.iter().any(|c| !(*c >= 0.0)) {
            return Err(bad(format!("chi_diag needs {n} nonnegative entries")));
        }
        for (name, ts) in [("background.t", &self.background.t), ("audit.t", &self.audit.t)] {
            if ts.is_empty() || ts.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
                return Err(bad(format!("{name} values must lie in (0, 1]")));
            }
        }
        if self.sampling.count == 0 {
            return Err(bad("sampling.count must be at least 1"));
        }
        if !(self.sampling.amplitude >= 0.0) || !(self.audit.amplitude > 0.0) {
            return Err(bad("amplitudes must be nonnegative (audit amplitude positive)"));
        }
        let nf = n as f64;
        let e = &self.exponents;
        if !(e.p > 0.0) || (e.p >= nf && !e.q.is_some_and(|q| q > 0.0)) {
            return Err(bad("exponents.p must be positive, with a positive q when p >= n"));
        }
        if !(e.sup_p > nf) {
            return Err(bad(format!("exponents.sup_p must exceed n = {n}")));
        }
        if e.entropy_bound.is_some_and(|k| !(k >= 0.0)) {
            return Err(bad("exponents.entropy_bound must be nonnegative"));
        }
        if !(self.solver.tolerance > 0.0) || self.solver.max_iterations == 0 {
            return Err(bad("solver settings must be positive"));
        }
        let a = &self.audit;
        if a.s_fractions.is_empty() || a.s_fractions.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
            return Err(bad("audit.s_fractions must lie in (0, 1): sublevel sets need s > 0"));
        }
        if a.sharpness.is_empty() || a.sharpness.iter().any(|k| !(*k > 0.0)) {
            return Err(bad("audit.sharpness values must be positive"));
        }
        let c = &self.coupled;
        if c.mode.len() != 2 * n || c.mode.iter().all(|m| *m == 0) {
            return Err(bad(format!("coupled.mode needs {} entries, not all zero", 2 * n)));
        }
        if let Some(t) = &c.theta_diag {
            if t.len() != n {
                return Err(bad(format!("coupled.theta_diag needs {n} entries")));
            }
        }
        if !(c.p > 0.0 && c.p <= nf) || !(c.k2 >= 0.0) || !(c.amplitude > 0.0) {
            return Err(bad("coupled: need 0 < p <= n, k2 >= 0, amplitude > 0"));
        }
        if self.solve.points.is_empty() || !(self.solve.amplitude > 0.0) {
            return Err(bad("solve: need at least one grid and a positive amplitude"));
        }
        for &p in &self.solve.points {
            TorusGrid::new(n, p).map_err(|e| bad(format!("solve grid: {e}")))?;
        }
        Ok(())
    }

    pub fn chi(&self) -> Result<HermitianField> {
        let grid = TorusGrid::new(self.grid.n, self.grid.points)?;
        Ok(HermitianField::constant(grid, Herm::diag(&self.background.chi_diag)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(ExperimentConfig::from_toml("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "[background]\nt = [0.0]",
            "[background]\nt = [1.5]",
            "[sampling]\ncount = 0",
            "[audit]\ns_fractions = [-0.1]",
            "[grid]\nn = 3",
            "bogus = 1",
        ] {
            assert!(matches!(ExperimentConfig::from_toml(text), Err(LabError::Config(_))), "{text}");
        }
    }

    #[test]
    fn dimension_presets_validate() {
        for n in 1..=3 {
            ExperimentConfig::for_dimension(n).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn operator_table() {
        let c = ExperimentConfig::from_toml("[operator]\nkind = \"hessian\"\nk = 2\nn = 3\n[grid]\nn = 3\npoints = 8\n[background]\nchi_diag = [1.0, 0.0, 0.0]\n[exponents]\nsup_p = 4.0\n[audit]\npoints = 8\n[coupled]\nmode = [1, 0, 0, 0, 0, 1]\n[solve]\npoints = [8]");
        assert_eq!(c.unwrap().operator, OperatorSpec::hessian(2, 3).unwrap());
    }
}
