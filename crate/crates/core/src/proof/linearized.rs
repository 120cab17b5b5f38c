//! Coefficients `G^{ij̄} = (1/f) ∂f(λ[h_φ])/∂h_{ij̄}` of the linearized
//! operator.
//!
//! With `ω_X = L L^H` and `L^{-1} ω_φ L^{-H} = U Λ U^H`, the coefficient
//! matrix is `L^{-H} U diag(f_j/f) U^H L^{-1}` and `Box v = Re tr(G · ∂∂̄v)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::SolutionState;
use crate::grid::HermitianField;
use crate::linalg::Herm;
use crate::operators::{OperatorSpec, BOUNDARY_TOL};

/// Pointwise coefficient matrices of `Box_{ω_φ}`.
#[derive(Clone, Debug)]
pub struct LinearizedCoefficients {
    pub n: usize,
    pub g: Vec<Herm>,
    /// `det G · det ω_X`, the determinant measured against `ω_X`.
    pub det: Vec<f64>,
    /// `γ / f^n` at each point.
    pub det_floor: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminantCheck {
    /// `min det G · f^n / γ`; the structure condition needs `≥ 1`.
    pub min_ratio: f64,
    pub worst_point: usize,
    pub passed: bool,
}

impl LinearizedCoefficients {
    pub fn assemble(op: &OperatorSpec, state: &SolutionState) -> Result<Self> {
        if op.n != state.n() {
            return Err(LabError::DimensionMismatch { expected: state.n(), got: op.n });
        }
        let n = state.n();
        let torus = &state.torus;
        let rows: Vec<Result<(Herm, f64, f64)>> = (0..state.grid().len())
            .into_par_iter()
            .map(|i| {
                let ch = torus.omega_x.at(i).cholesky().ok_or(LabError::NotPositiveDefinite { point: i })?;
                let li = ch.inverse_l();
                let rel = ch.congruence(state.omega_phi.at(i));
                let (lam, u) = rel.eigh();
                let lam = &lam[..n];
                let norm = lam.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !(op.cone.margin(lam) > BOUNDARY_TOL * norm) {
                    return Err(LabError::ConeViolation { count: 1, first: i });
                }
                let f = op.eval_unchecked(lam);
                let df = op.grad_unchecked(lam);
                let d: Vec<f64> = df.iter().map(|x| x / f).collect();
                // U diag(d) U^H, then conjugate by L^{-1}
                let mut inner = Herm::zeros(n);
                for a in 0..n {
                    for b in 0..n {
                        inner.m[a][b] = (0..n).map(|j| u.m[a][j] * d[j] * u.m[b][j].conj()).sum();
                    }
                }
                let g = li.adjoint().mul(&inner).mul(&li);
                // det G = ∏ d_j / det ω_X
                let floor = op.gamma / f.powi(n as i32);
                Ok((g, d.iter().product::<f64>(), floor))
            })
            .collect();
        let mut g = Vec::with_capacity(rows.len());
        let mut det = Vec::with_capacity(rows.len());
        let mut det_floor = Vec::with_capacity(rows.len());
        for r in rows {
            let (a, b, c) = r?;
            g.push(a);
            det.push(b);
            det_floor.push(c);
        }
        Ok(Self { n, g, det, det_floor })
    }

    /// `Re tr(G · H)` pointwise.
    pub fn apply_hessian(&self, hess: &HermitianField) -> Vec<f64> {
        self.g.iter().zip(hess.points()).map(|(g, h)| g.trace_product(h)).collect()
    }

    /// `tr(G · θ)` for a form field `θ`.
    pub fn trace_form(&self, theta: &HermitianField) -> Vec<f64> {
        self.apply_hessian(theta)
    }

    /// Checks `det G ≥ γ / f^n` at every point (relative slack `1e-12`).
    pub fn check_determinant(&self) -> DeterminantCheck {
        let (worst_point, min_ratio) = self
            .det
            .iter()
            .zip(&self.det_floor)
            .map(|(d, f)| d / f)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, r)| if r < acc.1 { (i, r) } else { acc });
        DeterminantCheck { min_ratio, worst_point, passed: min_ratio >= 1.0 - 1e-12 }
    }

    /// Smallest eigenvalue of `G` over the grid.
    pub fn min_eigenvalue(&self) -> f64 {
        self.g.iter().map(|g| g.eigenvalues()[0]).fold(f64::INFINITY, f64::min)
    }
}

/// `Box_{ω_φ} v = G^{ij̄} v_{ij̄}` on the grid.
pub fn linearized_operator(op: &OperatorSpec, state: &SolutionState, v: &[f64]) -> Result<Vec<f64>> {
    let coeffs = LinearizedCoefficients::assemble(op, state)?;
    let hess = state.torus.hessian(v)?;
    Ok(coeffs.apply_hessian(&hess))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Torus;
    use std::f64::consts::PI;

    fn state(op: &OperatorSpec) -> SolutionState {
        let torus = Torus::flat(2, 8).unwrap();
        let phi = torus.grid.sample(|x| 0.01 * ((2.0 * PI * x[0]).cos() + (2.0 * PI * (x[1] + x[2])).sin()));
        torus.induce_density(op, &phi, &HermitianField::identity(torus.grid)).unwrap()
    }

    #[test]
    fn euler_identity() {
        let op = OperatorSpec::hessian(2, 2).unwrap();
        let st = state(&op);
        let c = LinearizedCoefficients::assemble(&op, &st).unwrap();
        let box_phi = c.apply_hessian(&st.torus.hessian(&st.phi).unwrap());
        let tr = c.trace_form(&st.omega);
        for (b, t) in box_phi.iter().zip(&tr) {
            assert!((b + t - 1.0).abs() < 1e-12);
        }
        assert!(c.check_determinant().passed);
        assert!(c.min_eigenvalue() > 0.0);
    }

    #[test]
    fn constant_is_in_kernel() {
        let op = OperatorSpec::monge_ampere(2).unwrap();
        let st = state(&op);
        let v = vec![3.5; st.grid().len()];
        assert!(linearized_operator(&op, &st, &v).unwrap().iter().all(|x| x.abs() < 1e-12));
    }
}
