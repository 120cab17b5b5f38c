//! Symmetric degree-one operators `f(λ)` on admissible cones, with closed-form
//! gradients and a sampling audit of the structural conditions the
//! estimates rely on: cone nesting `Γ_n ⊆ Γ ⊆ Γ_1`, symmetry, homogeneity,
//! monotonicity, and the derivative-product lower bound `∏ ∂f/∂λ_j ≥ γ`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Relative tolerance for "strictly inside" a cone.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Safety factor applied to a sampled γ when no closed form is known.
pub const GAMMA_SAFETY: f64 = 0.9;

/// Sample budget and seed used when an operator computes its own γ.
const GAMMA_BUDGET: usize = 20_000;
const GAMMA_SEED: u64 = 0x5eed;

/// The unordered eigenvalues of the relative endomorphism at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueVector(pub Vec<f64>);

impl EigenvalueVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(LabError::InvalidParameter("empty eigenvalue vector".into()));
        }
        if let Some(i) = entries.iter().position(|v| !v.is_finite()) {
            return Err(LabError::NonFinite { what: "eigenvalue vector", index: i });
        }
        Ok(Self(entries))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl From<&[f64]> for EigenvalueVector {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeKind {
    /// `Γ_k`: `σ_1, …, σ_k > 0`.
    GammaK { k: usize },
    /// `λ_I > 0` for every `p`-element multi-index `I`.
    Pma { p: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub kind: ConeKind,
    pub n: usize,
}

impl ConeSpec {
    pub fn gamma_k(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(LabError::IndexOutOfRange { k, n });
        }
        Ok(Self { kind: ConeKind::GammaK { k }, n })
    }

    pub fn pma(p: usize, n: usize) -> Result<Self> {
        if p == 0 || p > n {
            return Err(LabError::IndexOutOfRange { k: p, n });
        }
        Ok(Self { kind: ConeKind::Pma { p }, n })
    }

    /// The positive octant `Γ_n`.
    pub fn positive(n: usize) -> Self {
        Self { kind: ConeKind::GammaK { k: n }, n }
    }

    /// The half-space `Γ_1`.
    pub fn half_space(n: usize) -> Self {
        Self { kind: ConeKind::GammaK { k: 1 }, n }
    }

    /// Smallest defining function, each normalized to degree one
    /// (`sign(σ_j)|σ_j|^{1/j}` for `Γ_k`, `λ_I` for the p-MA cone).
    /// Positive iff the point lies in the open cone.
    pub fn margin(&self, lambda: &[f64]) -> f64 {
        match self.kind {
            ConeKind::GammaK { k } => {
                let e = elementary_symmetric(lambda, k);
                (1..=k).map(|j| e[j].signum() * e[j].abs().powf(1.0 / j as f64)).fold(f64::INFINITY, f64::min)
            }
            ConeKind::Pma { p } => (0..lambda.len())
                .combinations(p)
                .map(|idx| idx.iter().map(|&i| lambda[i]).sum::<f64>())
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn check_dim(&self, lambda: &EigenvalueVector) -> Result<()> {
        if lambda.dim() != self.n {
            return Err(LabError::DimensionMismatch { expected: self.n, got: lambda.dim() });
        }
        Ok(())
    }
}

/// Elementary symmetric polynomials `e[0..=k]` of `lambda` (`e[0] = 1`).
pub fn elementary_symmetric(lambda: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in lambda {
        for j in (1..=k).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// `σ_k(λ)`.
pub fn sigma_k(lambda: &EigenvalueVector, k: usize) -> Result<f64> {
    let n = lambda.dim();
    if k == 0 || k > n {
        return Err(LabError::IndexOutOfRange { k, n });
    }
    Ok(elementary_symmetric(lambda.as_slice(), k)[k])
}

/// Open-cone membership.
pub fn cone_contains(cone: &ConeSpec, lambda: &EigenvalueVector) -> Result<bool> {
    cone.check_dim(lambda)?;
    Ok(cone.margin(lambda.as_slice()) > 0.0)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OperatorKind {
    /// `(∏ λ_j)^{1/n}` on `Γ_n`.
    MongeAmpere,
    /// `σ_k^{1/k}` on `Γ_k`.
    Hessian { k: usize },
    /// `(∏_I λ_I)^{1/C(n,p)}` over `p`-element multi-indices.
    PMongeAmpere { p: usize },
    /// `f(λ) = λ_1` on `Γ_n`: a deliberately non-symmetric fixture used to
    /// exercise failure paths of the audit.
    FirstEntry,
}

/// Operator plus cone and structural constant. Serialized as e.g.
/// `{"kind":"hessian","k":2,"n":3}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorConfig", into = "OperatorConfig")]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub n: usize,
    pub cone: ConeSpec,
    pub gamma: f64,
}

/// Wire form of an operator: kind, parameters and optionally a pinned γ.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorConfig {
    #[serde(flatten)]
    pub kind: OperatorKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl TryFrom<OperatorConfig> for OperatorSpec {
    type Error = LabError;

    fn try_from(c: OperatorConfig) -> Result<Self> {
        let mut spec = OperatorSpec::new(c.kind, c.n)?;
        if let Some(g) = c.gamma {
            if !(g > 0.0) {
                return Err(LabError::InvalidParameter(format!("gamma must be positive, got {g}")));
            }
            spec.gamma = g;
        }
        Ok(spec)
    }
}

impl From<OperatorSpec> for OperatorConfig {
    fn from(s: OperatorSpec) -> Self {
        OperatorConfig { kind: s.kind, n: s.n, gamma: Some(s.gamma) }
    }
}

impl OperatorSpec {
    /// Builds the operator and fills in γ: the closed form when one is known,
    /// otherwise the sampled infimum times [`GAMMA_SAFETY`].
    pub fn new(kind: OperatorKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidParameter("dimension must be at least 1".into()));
        }
        let cone = match kind {
            OperatorKind::MongeAmpere | OperatorKind::FirstEntry => ConeSpec::positive(n),
            OperatorKind::Hessian { k } => ConeSpec::gamma_k(k, n)?,
            OperatorKind::PMongeAmpere { p } => ConeSpec::pma(p, n)?,
        };
        let mut spec = OperatorSpec { kind, n, cone, gamma: 1.0 };
        spec.gamma = match spec.analytic_gamma() {
            Some(g) => g,
            None => {
                let sampled = gamma_lower_bound(&spec, GAMMA_BUDGET, GAMMA_SEED)?;
                if sampled > 0.0 {
                    sampled * GAMMA_SAFETY
                } else {
                    // only reachable for fixtures without a positive bound
                    f64::MIN_POSITIVE
                }
            }
        };
        Ok(spec)
    }

    pub fn monge_ampere(n: usize) -> Result<Self> {
        Self::new(OperatorKind::MongeAmpere, n)
    }

    pub fn hessian(k: usize, n: usize) -> Result<Self> {
        Self::new(OperatorKind::Hessian { k }, n)
    }

    pub fn p_monge_ampere(p: usize, n: usize) -> Result<Self> {
        Self::new(OperatorKind::PMongeAmpere { p }, n)
    }

    /// Closed-form derivative-product infimum, where the product is constant.
    pub fn analytic_gamma(&self) -> Option<f64> {
        let n = self.n as f64;
        match self.kind {
            OperatorKind::MongeAmpere => Some(n.powf(-n)),
            OperatorKind::PMongeAmpere { p: 1 } => Some(n.powf(-n)),
            OperatorKind::Hessian { k: 1 } => Some(1.0),
            OperatorKind::PMongeAmpere { p } if p == self.n => Some(1.0),
            _ => None,
        }
    }

    fn check(&self, lambda: &EigenvalueVector) -> Result<()> {
        self.cone.check_dim(lambda)?;
        let margin = self.cone.margin(lambda.as_slice());
        if !(margin > BOUNDARY_TOL * lambda.norm()) {
            return Err(LabError::OutsideCone { margin });
        }
        Ok(())
    }

    /// `f(λ)`; λ must lie strictly inside the cone.
    pub fn eval(&self, lambda: &EigenvalueVector) -> Result<f64> {
        self.check(lambda)?;
        Ok(self.eval_unchecked(lambda.as_slice()))
    }

    /// `f(λ)` without the cone check, for hot per-grid-point loops whose
    /// callers have already verified membership.
    pub fn eval_unchecked(&self, l: &[f64]) -> f64 {
        let n = self.n;
        match self.kind {
            OperatorKind::MongeAmpere => (l.iter().map(|x| x.ln()).sum::<f64>() / n as f64).exp(),
            OperatorKind::Hessian { k } => elementary_symmetric(l, k)[k].powf(1.0 / k as f64),
            OperatorKind::PMongeAmpere { p } => {
                let m = binomial(n, p) as f64;
                let s: f64 = (0..n).combinations(p).map(|idx| idx.iter().map(|&i| l[i]).sum::<f64>().ln()).sum();
                (s / m).exp()
            }
            OperatorKind::FirstEntry => l[0],
        }
    }

    /// Closed-form gradient `∂f/∂λ_j`.
    pub fn grad(&self, lambda: &EigenvalueVector) -> Result<EigenvalueVector> {
        self.check(lambda)?;
        Ok(EigenvalueVector(self.grad_unchecked(lambda.as_slice())))
    }

    pub fn grad_unchecked(&self, l: &[f64]) -> Vec<f64> {
        let n = self.n;
        match self.kind {
            OperatorKind::MongeAmpere => {
                let f = self.eval_unchecked(l);
                l.iter().map(|x| f / (n as f64 * x)).collect()
            }
            OperatorKind::Hessian { k } => {
                let sk = elementary_symmetric(l, k)[k];
                let pref = sk.powf(1.0 / k as f64 - 1.0) / k as f64;
                (0..n)
                    .map(|j| {
                        let rest: Vec<f64> = l.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect();
                        pref * elementary_symmetric(&rest, k - 1)[k - 1]
                    })
                    .collect()
            }
            OperatorKind::PMongeAmpere { p } => {
                let f = self.eval_unchecked(l);
                let m = binomial(n, p) as f64;
                let mut g = vec![0.0; n];
                for idx in (0..n).combinations(p) {
                    let li: f64 = idx.iter().map(|&i| l[i]).sum();
                    for &i in &idx {
                        g[i] += 1.0 / li;
                    }
                }
                g.iter().map(|v| f * v / m).collect()
            }
            OperatorKind::FirstEntry => {
                let mut g = vec![0.0; n];
                g[0] = 1.0;
                g
            }
        }
    }
}

/// `f(λ)`.
pub fn f_eval(op: &OperatorSpec, lambda: &EigenvalueVector) -> Result<f64> {
    op.eval(lambda)
}

/// `∇f(λ)`.
pub fn f_grad(op: &OperatorSpec, lambda: &EigenvalueVector) -> Result<EigenvalueVector> {
    op.grad(lambda)
}

/// Draws points of `cone`: directions uniform on the unit sphere accepted by
/// rejection, radii log-uniform in `[1e-3, 1e3]`.
pub fn sample_cone<R: Rng>(cone: &ConeSpec, rng: &mut R) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..cone.n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let unit: Vec<f64> = dir.iter().map(|v| v / norm).collect();
        if cone.margin(&unit) > BOUNDARY_TOL {
            let radius = 10f64.powf(rng.random_range(-3.0..3.0));
            return unit.into_iter().map(|v| v * radius).collect();
        }
    }
}

/// Infimum over sampled cone points of `∏_j ∂f/∂λ_j`.
pub fn gamma_lower_bound(op: &OperatorSpec, sample_budget: usize, seed: u64) -> Result<f64> {
    if sample_budget == 0 {
        return Err(LabError::InvalidParameter("sample budget must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inf = f64::INFINITY;
    for _ in 0..sample_budget {
        let l = sample_cone(&op.cone, &mut rng);
        let prod: f64 = op.grad_unchecked(&l).iter().product();
        inf = inf.min(prod);
    }
    Ok(inf)
}

/// Outcome of one structural condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub passed: bool,
    /// Worst violation magnitude seen (0 when nothing was violated).
    pub worst: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructuralReport {
    pub operator: OperatorConfig,
    pub samples: usize,
    pub seed: u64,
    pub gamma_estimate: f64,
    pub conditions: Vec<ConditionResult>,
    pub passed: bool,
}

impl StructuralReport {
    pub fn condition(&self, name: &str) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

/// Tolerance applied to symmetry and homogeneity defects.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Samples the cone and audits conditions (1)-(4). Failures are entries in
/// the report, never errors.
pub fn verify_structural_conditions(op: &OperatorSpec, sample_budget: usize, seed: u64) -> StructuralReport {
    let budget = sample_budget.max(1);
    let n = op.n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..budget).map(|_| sample_cone(&op.cone, &mut rng)).collect();

    // symmetry
    let perms: Vec<Vec<usize>> = if n <= 4 {
        (0..n).permutations(n).collect()
    } else {
        (0..50)
            .map(|_| {
                let mut p: Vec<usize> = (0..n).collect();
                for i in (1..n).rev() {
                    p.swap(i, rng.random_range(0..=i));
                }
                p
            })
            .collect()
    };
    let mut sym_worst: f64 = 0.0;
    let mut hom_worst: f64 = 0.0;
    let mut mono_worst: f64 = 0.0;
    let mut prod_min = f64::INFINITY;
    for l in &points {
        let f = op.eval_unchecked(l);
        for p in &perms {
            let lp: Vec<f64> = p.iter().map(|&i| l[i]).collect();
            sym_worst = sym_worst.max((op.eval_unchecked(&lp) - f).abs() / f.abs().max(f64::MIN_POSITIVE));
        }
        for t in [0.5, 2.0, 10.0] {
            let lt: Vec<f64> = l.iter().map(|v| v * t).collect();
            let ft = op.eval_unchecked(&lt);
            hom_worst = hom_worst.max((ft / (t * f) - 1.0).abs());
        }
        let g = op.grad_unchecked(l);
        for &gj in &g {
            if !(gj > 0.0) {
                mono_worst = mono_worst.max(-gj).max(f64::MIN_POSITIVE);
            }
        }
        prod_min = prod_min.min(g.iter().product());
    }

    // cone nesting: Γ_n points inside Γ, Γ points inside Γ_1
    let positive = ConeSpec::positive(n);
    let half = ConeSpec::half_space(n);
    let mut nest_worst: f64 = 0.0;
    for _ in 0..budget {
        let l = sample_cone(&positive, &mut rng);
        let m = op.cone.margin(&l);
        if !(m > 0.0) {
            nest_worst = nest_worst.max(-m).max(f64::MIN_POSITIVE);
        }
    }
    for l in &points {
        let m = half.margin(l);
        if !(m > 0.0) {
            nest_worst = nest_worst.max(-m).max(f64::MIN_POSITIVE);
        }
    }

    let prod_shortfall = if prod_min >= op.gamma * (1.0 - IDENTITY_TOL) { 0.0 } else { op.gamma - prod_min };
    let conditions = vec![
        ConditionResult { name: "symmetry".into(), passed: sym_worst <= IDENTITY_TOL, worst: sym_worst },
        ConditionResult { name: "homogeneity".into(), passed: hom_worst <= IDENTITY_TOL, worst: hom_worst },
        ConditionResult { name: "monotonicity".into(), passed: mono_worst == 0.0, worst: mono_worst },
        ConditionResult { name: "cone_nesting".into(), passed: nest_worst == 0.0, worst: nest_worst },
        ConditionResult {
            name: "derivative_product".into(),
            passed: prod_min > 0.0 && prod_shortfall == 0.0,
            worst: prod_shortfall,
        },
    ];
    let passed = conditions.iter().all(|c| c.passed);
    StructuralReport {
        operator: op.clone().into(),
        samples: budget,
        seed,
        gamma_estimate: prod_min,
        conditions,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(v: &[f64]) -> EigenvalueVector {
        EigenvalueVector(v.to_vec())
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_k(&ev(&[1.0, 2.0, 3.0]), 1).unwrap(), 6.0);
        assert_eq!(sigma_k(&ev(&[1.0, 1.0, 1.0]), 3).unwrap(), 1.0);
        // brute force over pairs: 1*2 + 1*3 + 2*3
        let brute: f64 = [(1.0, 2.0), (1.0, 3.0), (2.0, 3.0)].iter().map(|(a, b)| a * b).sum();
        assert_eq!(sigma_k(&ev(&[1.0, 2.0, 3.0]), 2).unwrap(), brute);
        assert!(matches!(sigma_k(&ev(&[1.0]), 2), Err(LabError::IndexOutOfRange { .. })));
        assert!(sigma_k(&ev(&[1.0]), 0).is_err());
    }

    #[test]
    fn cone_examples() {
        let g1 = ConeSpec::gamma_k(1, 2).unwrap();
        let g2 = ConeSpec::gamma_k(2, 2).unwrap();
        assert!(cone_contains(&g1, &ev(&[2.0, -1.0])).unwrap());
        assert!(!cone_contains(&g2, &ev(&[2.0, -1.0])).unwrap());
        assert!(cone_contains(&g1, &ev(&[1.0, 2.0, 3.0])).is_err());

        let pma1 = ConeSpec::pma(1, 3).unwrap();
        let pos = ConeSpec::positive(3);
        for l in [[1.0, 2.0, 3.0], [1.0, -0.1, 3.0], [-1.0, -2.0, 0.5], [0.1, 0.2, 0.0]] {
            assert_eq!(cone_contains(&pma1, &ev(&l)).unwrap(), cone_contains(&pos, &ev(&l)).unwrap());
        }
    }

    #[test]
    fn eval_examples() {
        let ma = OperatorSpec::monge_ampere(3).unwrap();
        assert!((ma.eval(&ev(&[1.0, 1.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        let h2 = OperatorSpec::hessian(2, 3).unwrap();
        assert!((h2.eval(&ev(&[1.0, 1.0, 1.0])).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        let pn = OperatorSpec::p_monge_ampere(3, 3).unwrap();
        let l = ev(&[0.5, 2.0, -0.3]);
        assert!((pn.eval(&l).unwrap() - 2.2).abs() < 1e-14);
        assert!(matches!(ma.eval(&ev(&[1.0, -1.0, 1.0])), Err(LabError::OutsideCone { .. })));
    }

    #[test]
    fn grad_examples() {
        let ma = OperatorSpec::monge_ampere(2).unwrap();
        let g = ma.grad(&ev(&[1.0, 1.0])).unwrap();
        assert!((g.0[0] - 0.5).abs() < 1e-15 && (g.0[1] - 0.5).abs() < 1e-15);
        // finite-difference oracle
        let h = 1e-6;
        for j in 0..2 {
            let mut up = vec![1.0, 1.0];
            let mut dn = vec![1.0, 1.0];
            up[j] += h;
            dn[j] -= h;
            let fd = (ma.eval_unchecked(&up) - ma.eval_unchecked(&dn)) / (2.0 * h);
            assert!((fd - g.0[j]).abs() < 1e-7);
        }
        let s1 = OperatorSpec::hessian(1, 4).unwrap();
        assert_eq!(s1.grad(&ev(&[1.0, -0.2, 3.0, 0.4])).unwrap().0, vec![1.0; 4]);
    }

    #[test]
    fn euler_identity_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for op in [
            OperatorSpec::monge_ampere(3).unwrap(),
            OperatorSpec::hessian(2, 3).unwrap(),
            OperatorSpec::p_monge_ampere(2, 3).unwrap(),
        ] {
            for _ in 0..100 {
                let l = sample_cone(&op.cone, &mut rng);
                let f = op.eval_unchecked(&l);
                let lhs: f64 = op.grad_unchecked(&l).iter().zip(&l).map(|(g, x)| g * x).sum();
                assert!((lhs - f).abs() <= 1e-12 * f.abs(), "{op:?}");
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let ma2 = OperatorSpec::monge_ampere(2).unwrap();
        assert!((gamma_lower_bound(&ma2, 2000, 1).unwrap() - 0.25).abs() < 1e-10);
        let ma3 = OperatorSpec::monge_ampere(3).unwrap();
        assert!((gamma_lower_bound(&ma3, 2000, 1).unwrap() - 1.0 / 27.0).abs() < 1e-10);
        let s1 = OperatorSpec::hessian(1, 3).unwrap();
        assert_eq!(gamma_lower_bound(&s1, 100, 1).unwrap(), 1.0);
        assert_eq!(s1.gamma, 1.0);
        assert!(gamma_lower_bound(&s1, 0, 1).is_err());
    }

    #[test]
    fn audit_flags_broken_operator() {
        let broken = OperatorSpec::new(OperatorKind::FirstEntry, 3).unwrap();
        let r = verify_structural_conditions(&broken, 200, 3);
        assert!(!r.passed);
        assert!(!r.condition("symmetry").unwrap().passed);
        let ma = verify_structural_conditions(&OperatorSpec::monge_ampere(2).unwrap(), 500, 3);
        assert!(ma.passed, "{ma:?}");
        assert!(ma.condition("homogeneity").unwrap().worst <= 1e-12);
        let h = verify_structural_conditions(&OperatorSpec::hessian(2, 3).unwrap(), 500, 3);
        assert!(h.passed && h.gamma_estimate > 0.0, "{h:?}");
    }

    #[test]
    fn operator_wire_format() {
        let spec: OperatorSpec = serde_json::from_str(r#"{"kind":"hessian","k":2,"n":3}"#).unwrap();
        assert_eq!(spec.kind, OperatorKind::Hessian { k: 2 });
        assert_eq!(spec.n, 3);
        assert!(spec.gamma > 0.0);
        let ma: OperatorSpec = serde_json::from_str(r#"{"kind":"monge_ampere","n":2}"#).unwrap();
        assert_eq!(ma.gamma, 0.25);
        assert!(serde_json::from_str::<OperatorSpec>(r#"{"kind":"hessian","k":4,"n":3}"#).is_err());
    }
}
