//! Potentials with closed-form complex Hessians, for manufactured-solution
//! tests of the spectral machinery and the solver.
//!
//! A ridge term is `ψ(x) = ε h(k·x)` with `h(s) = exp(ρ cos(2π(s + s₀)))`
//! (plain `cos` when `ρ = 0`). Since `∂_{z_j}(k·x) = w_j` with
//! `w_j = (k_{x_j} − i k_{y_j})/2`, its Hessian is `ε h''(k·x) w_j w̄_l`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{HermitianField, TorusGrid};
use crate::linalg::Herm;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ridge {
    /// Integer wave vector over the real axes `(x_1, y_1, …)`.
    pub k: Vec<i64>,
    pub amplitude: f64,
    /// `0` gives a single Fourier mode; larger values spread the spectrum.
    pub rho: f64,
    pub phase: f64,
}

impl Ridge {
    pub fn cosine(k: Vec<i64>, amplitude: f64) -> Self {
        Self { k, amplitude, rho: 0.0, phase: 0.0 }
    }

    fn s(&self, x: &[f64]) -> f64 {
        self.k.iter().zip(x).map(|(k, x)| *k as f64 * x).sum::<f64>() + self.phase
    }

    /// `(h, h'')` at `s`.
    fn profile(&self, s: f64) -> (f64, f64) {
        let w = 2.0 * PI;
        let (sn, cs) = (w * s).sin_cos();
        if self.rho == 0.0 {
            (cs, -w * w * cs)
        } else {
            let h = (self.rho * cs).exp();
            let d1 = -self.rho * w * sn;
            let d2 = -self.rho * w * w * cs;
            (h, h * (d1 * d1 + d2))
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * self.profile(self.s(x)).0
    }

    pub fn hessian(&self, x: &[f64]) -> Herm {
        let n = self.k.len() / 2;
        let h2 = self.amplitude * self.profile(self.s(x)).1;
        let w: Vec<Complex64> =
            (0..n).map(|j| Complex64::new(self.k[2 * j] as f64, -(self.k[2 * j + 1] as f64)) * 0.5).collect();
        let mut out = Herm::zeros(n);
        for j in 0..n {
            for l in 0..n {
                out.m[j][l] = w[j] * w[l].conj() * h2;
            }
        }
        out
    }
}

/// Sum of ridge terms.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub terms: Vec<Ridge>,
}

impl Manufactured {
    pub fn new(terms: Vec<Ridge>) -> Self {
        Self { terms }
    }

    fn check(&self, grid: &TorusGrid) -> Result<()> {
        for t in &self.terms {
            if t.k.len() != grid.real_dim() {
                return Err(LabError::DimensionMismatch { expected: grid.real_dim(), got: t.k.len() });
            }
        }
        Ok(())
    }

    pub fn values(&self, grid: &TorusGrid) -> Result<Vec<f64>> {
        self.check(grid)?;
        Ok(grid.sample(|x| self.terms.iter().map(|t| t.value(x)).sum()))
    }

    pub fn hessian_field(&self, grid: &TorusGrid) -> Result<HermitianField> {
        self.check(grid)?;
        let pts = (0..grid.len())
            .map(|i| {
                let x = grid.coords(i);
                let x = &x[..grid.real_dim()];
                self.terms.iter().fold(Herm::zeros(grid.n), |acc, t| acc.add(&t.hessian(x)))
            })
            .collect();
        HermitianField::from_points(*grid, pts)
    }

    /// A smooth, non-band-limited potential in complex dimension `n` with
    /// amplitude `eps` per term.
    pub fn smooth_bump(n: usize, eps: f64) -> Self {
        let mut terms = Vec::new();
        for j in 0..n {
            let mut k = vec![0; 2 * n];
            k[2 * j] = 1;
            terms.push(Ridge { k: k.clone(), amplitude: eps, rho: 1.0, phase: 0.1 * j as f64 });
            let mut k2 = vec![0; 2 * n];
            k2[2 * j + 1] = 1;
            k2[(2 * j + 2) % (2 * n)] += 1;
            terms.push(Ridge { k: k2, amplitude: 0.5 * eps, rho: 0.8, phase: 0.3 });
        }
        Self { terms }
    }
}
