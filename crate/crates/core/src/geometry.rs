//! Background geometry on the torus: eigenvalue fields of the relative
//! endomorphism, induced densities, quadrature and admissible potentials.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{pairwise_sum, HermitianField, Spectral, TorusGrid};
use crate::linalg::{relative_eigenvalues as pencil_eigenvalues, Herm};
use crate::operators::{OperatorSpec, BOUNDARY_TOL};

/// Margin kept from the cone boundary by sampled potentials.
pub const SAMPLE_MARGIN: f64 = 1e-6;

/// Eigenvalues of the relative endomorphism at every grid point, ascending,
/// stored point-major.
#[derive(Clone, Debug)]
pub struct EigenField {
    pub n: usize,
    pub values: Vec<f64>,
}

impl EigenField {
    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn products(&self) -> Vec<f64> {
        self.values.chunks(self.n).map(|c| c.iter().product()).collect()
    }
}

/// A discretized torus with its Kähler reference form `ω_X`.
#[derive(Clone)]
pub struct Torus {
    pub grid: TorusGrid,
    pub spectral: Arc<Spectral>,
    pub omega_x: HermitianField,
    /// `ω_X^n / dx` at each point.
    pub det_x: Vec<f64>,
    pub volume: f64,
}

impl std::fmt::Debug for Torus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Torus").field("grid", &self.grid).field("volume", &self.volume).finish()
    }
}

impl Torus {
    pub fn new(omega_x: HermitianField) -> Result<Self> {
        let grid = omega_x.grid;
        if let Some(point) = omega_x.points().iter().position(|h| h.cholesky().is_none()) {
            return Err(LabError::NotPositiveDefinite { point });
        }
        if omega_x.max_hermitian_defect() > 1e-12 {
            return Err(LabError::InvalidParameter("reference form is not Hermitian".into()));
        }
        let det_x = omega_x.determinants();
        let volume = pairwise_sum(&det_x) * grid.cell_volume();
        Ok(Self { grid, spectral: Arc::new(Spectral::new(grid)), omega_x, det_x, volume })
    }

    /// Flat torus with `ω_X = I`.
    pub fn flat(n: usize, points: usize) -> Result<Self> {
        let grid = TorusGrid::new(n, points)?;
        Self::new(HermitianField::identity(grid))
    }

    /// Flat torus with a constant reference form.
    pub fn with_constant_form(points: usize, omega_x: Herm) -> Result<Self> {
        let grid = TorusGrid::new(omega_x.n, points)?;
        Self::new(HermitianField::constant(grid, omega_x))
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn hessian(&self, phi: &[f64]) -> Result<HermitianField> {
        check_finite(phi, "potential")?;
        if phi.len() != self.grid.len() {
            return Err(LabError::DimensionMismatch { expected: self.grid.len(), got: phi.len() });
        }
        HermitianField::from_points(self.grid, self.spectral.hessian(phi))
    }

    /// Quadrature of `values` against `ω_X^n` weighted by `weight`.
    pub fn integrate_weighted(&self, values: &[f64], weight: Option<&[f64]>) -> Result<f64> {
        check_finite(values, "integrand")?;
        let terms: Vec<f64> = match weight {
            Some(w) => values.iter().zip(w).zip(&self.det_x).map(|((v, w), d)| v * w * d).collect(),
            None => values.iter().zip(&self.det_x).map(|(v, d)| v * d).collect(),
        };
        Ok(pairwise_sum(&terms) * self.grid.cell_volume())
    }

    /// `∫ ω^n` for a form field `ω`.
    pub fn form_volume(&self, omega: &HermitianField) -> f64 {
        pairwise_sum(&omega.determinants()) * self.grid.cell_volume()
    }

    /// Smallest `κ` with `ω ≤ κ ω_X` pointwise.
    pub fn kappa(&self, omega: &HermitianField) -> Result<f64> {
        let ev = relative_eigenvalues(&self.omega_x, omega)?;
        Ok(ev.values.chunks(ev.n).map(|c| c[ev.n - 1]).fold(f64::NEG_INFINITY, f64::max))
    }

    /// Builds the solution state of `φ`: eigenvalues of `h_φ`, the density
    /// `F` and the constants `c_ω`, `V_ω`, `κ`.
    pub fn induce_density(&self, op: &OperatorSpec, phi: &[f64], omega: &HermitianField) -> Result<SolutionState> {
        if op.n != self.n() {
            return Err(LabError::DimensionMismatch { expected: self.n(), got: op.n });
        }
        let hess = self.hessian(phi)?;
        let omega_phi = omega.add(&hess);
        let lambda = relative_eigenvalues(&self.omega_x, &omega_phi)?;
        let bad: Vec<usize> = (0..self.grid.len())
            .into_par_iter()
            .filter(|&i| {
                let l = lambda.at(i);
                let norm = l.iter().map(|x| x * x).sum::<f64>().sqrt();
                !(op.cone.margin(l) > BOUNDARY_TOL * norm)
            })
            .collect();
        if let Some(&first) = bad.first() {
            return Err(LabError::ConeViolation { count: bad.len(), first });
        }
        let f_values: Vec<f64> = (0..self.grid.len()).map(|i| op.eval_unchecked(lambda.at(i))).collect();
        if let Some(i) = f_values.iter().position(|&f| !(f > 0.0) || !f.is_finite()) {
            return Err(LabError::ConeViolation { count: 1, first: i });
        }
        let n = self.n() as i32;
        let fn_pow: Vec<f64> = f_values.iter().map(|f| f.powi(n)).collect();
        let c_pow_n = self.integrate_weighted(&fn_pow, None)? / self.volume;
        let log_c = c_pow_n.ln() / n as f64;
        let density: Vec<f64> = f_values.iter().map(|f| f.ln() - log_c).collect();
        let v_omega = self.form_volume(omega);
        let kappa = self.kappa(omega)?;
        let mut phi = phi.to_vec();
        let top = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top != 0.0 {
            // sup-normalization does not change the Hessian
            phi.iter_mut().for_each(|v| *v -= top);
        }
        Ok(SolutionState {
            torus: self.clone(),
            op: op.clone(),
            phi,
            lambda,
            f_values,
            density,
            c_omega: log_c.exp(),
            v_omega,
            kappa,
            omega: omega.clone(),
            omega_phi,
        })
    }

    /// Random trigonometric polynomial with at most `modes` frequencies,
    /// scaled to the largest multiple of `amplitude` that keeps `λ[h_φ]` in
    /// the cone with margin [`SAMPLE_MARGIN`], then normalized to `sup φ = 0`.
    pub fn sample_admissible_potential(
        &self,
        op: &OperatorSpec,
        omega: &HermitianField,
        amplitude: f64,
        modes: usize,
        seed: u64,
    ) -> Result<Vec<f64>> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(LabError::InvalidParameter(format!("amplitude must be nonnegative, got {amplitude}")));
        }
        let m = self.grid.len();
        if amplitude == 0.0 || modes == 0 {
            return Ok(vec![0.0; m]);
        }
        let base_admissible = |t: f64, h: &[Herm]| -> bool {
            (0..m).into_par_iter().all(|i| {
                let form = omega.at(i).axpy(t, &h[i]);
                match pencil_eigenvalues(&form, self.omega_x.at(i)) {
                    Some(l) => op.cone.margin(&l[..op.n]) >= SAMPLE_MARGIN,
                    None => false,
                }
            })
        };
        if !base_admissible(0.0, &vec![Herm::zeros(self.n()); m]) {
            return Err(LabError::InvalidParameter("background form is not admissible for the operator".into()));
        }
        let raw = random_trig_poly(&self.grid, modes, seed);
        let sup = raw.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if sup == 0.0 {
            return Ok(vec![0.0; m]);
        }
        let raw: Vec<f64> = raw.iter().map(|v| v / sup).collect();
        let h = self.spectral.hessian(&raw);
        let t = if base_admissible(amplitude, &h) {
            amplitude
        } else {
            let (mut lo, mut hi) = (0.0, amplitude);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if base_admissible(mid, &h) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-6 * hi {
                    break;
                }
            }
            lo
        };
        let mut phi: Vec<f64> = raw.iter().map(|v| t * v).collect();
        let top = phi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        phi.iter_mut().for_each(|v| *v -= top);
        Ok(phi)
    }
}

fn random_trig_poly(grid: &TorusGrid, modes: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.real_dim();
    let kmax = 2i64.min(grid.points as i64 / 2 - 1);
    let mut terms = Vec::with_capacity(modes);
    while terms.len() < modes {
        let freq: Vec<f64> = (0..d).map(|_| rng.random_range(-kmax..=kmax) as f64).collect();
        if freq.iter().all(|&k| k == 0.0) {
            continue;
        }
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        terms.push((freq, a, b));
    }
    let tau = 2.0 * std::f64::consts::PI;
    grid.sample(|x| {
        terms
            .iter()
            .map(|(k, a, b)| {
                let s: f64 = k.iter().zip(x).map(|(k, x)| k * x).sum();
                a * (tau * s).cos() + b * (tau * s).sin()
            })
            .sum()
    })
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(LabError::NonFinite { what, index }),
        None => Ok(()),
    }
}

/// Complex Hessian `∂²φ/∂z_i∂z̄_j` computed spectrally.
pub fn complex_hessian(phi: &[f64], grid: &TorusGrid) -> Result<HermitianField> {
    check_finite(phi, "potential")?;
    if phi.len() != grid.len() {
        return Err(LabError::DimensionMismatch { expected: grid.len(), got: phi.len() });
    }
    HermitianField::from_points(*grid, Spectral::new(*grid).hessian(phi))
}

/// Eigenvalues of `ω_X^{-1} ω_φ` at every point, ascending.
pub fn relative_eigenvalues(omega_x: &HermitianField, omega_phi: &HermitianField) -> Result<EigenField> {
    let n = omega_x.grid.n;
    let per_point: Vec<Option<[f64; 3]>> =
        omega_x.points().par_iter().zip(omega_phi.points().par_iter()).map(|(b, a)| pencil_eigenvalues(a, b)).collect();
    let mut values = Vec::with_capacity(n * per_point.len());
    for (point, ev) in per_point.into_iter().enumerate() {
        let ev = ev.ok_or(LabError::NotPositiveDefinite { point })?;
        values.extend_from_slice(&ev[..n]);
    }
    Ok(EigenField { n, values })
}

/// `ω = χ + t ω_X` and the smallest `κ` with `ω ≤ κ ω_X`.
pub fn degenerate_background(chi: &HermitianField, t: f64, omega_x: &HermitianField) -> Result<(HermitianField, f64)> {
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("t must be positive, got {t}")));
    }
    for (point, h) in chi.points().iter().enumerate() {
        let ev = h.eigenvalues();
        let scale = h.max_abs().max(1.0);
        if ev[0] < -1e-12 * scale {
            return Err(LabError::NotPositiveSemidefinite { point, min_eig: ev[0] });
        }
    }
    let mut omega = chi.axpy(t, omega_x);
    if chi.is_constant() && omega_x.is_constant() {
        omega = HermitianField::constant(chi.grid, *omega.at(0));
    }
    let ev = relative_eigenvalues(omega_x, &omega)?;
    let kappa = ev.values.chunks(ev.n).map(|c| c[ev.n - 1]).fold(f64::NEG_INFINITY, f64::max);
    Ok((omega, kappa))
}

/// Integration measures available on a solution state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// `ω_X^n`
    Background,
    /// `e^{nF} ω_X^n`
    Density,
    /// `ω_φ^n`
    Potential,
}

/// A potential together with everything induced from it.
#[derive(Clone, Debug)]
pub struct SolutionState {
    pub torus: Torus,
    pub op: OperatorSpec,
    /// Sup-normalized potential.
    pub phi: Vec<f64>,
    pub lambda: EigenField,
    /// `f(λ[h_φ])` at each point.
    pub f_values: Vec<f64>,
    /// `F = log f(λ) − log c_ω`.
    pub density: Vec<f64>,
    pub c_omega: f64,
    pub v_omega: f64,
    pub kappa: f64,
    pub omega: HermitianField,
    pub omega_phi: HermitianField,
}

impl SolutionState {
    pub fn grid(&self) -> &TorusGrid {
        &self.torus.grid
    }

    pub fn n(&self) -> usize {
        self.torus.n()
    }

    /// `e^{nF}` at each point.
    pub fn density_weight(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.density.iter().map(|f| (n * f).exp()).collect()
    }

    /// `c_ω^n / V_ω`.
    pub fn c_ratio(&self) -> f64 {
        self.c_omega.powi(self.n() as i32) / self.v_omega
    }

    pub fn integrate(&self, values: &[f64], measure: Measure) -> Result<f64> {
        match measure {
            Measure::Background => self.torus.integrate_weighted(values, None),
            Measure::Density => self.torus.integrate_weighted(values, Some(&self.density_weight())),
            Measure::Potential => self.torus.integrate_weighted(values, Some(&self.lambda.products())),
        }
    }
}

/// Uniform Riemann sum of `values` against `measure`.
pub fn integrate(state: &SolutionState, values: &[f64], measure: Measure) -> Result<f64> {
    state.integrate(values, measure)
}
