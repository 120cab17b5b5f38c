//! Periodic grids on the flat complex torus `C^n / Z^{2n}`, spectral
//! differentiation, and Hermitian form fields.
//!
//! Real axes are ordered `(x_1, y_1, …, x_n, y_n)` with `z_j = x_j + i y_j`,
//! and the complex derivatives follow `∂_z = (∂_x − i∂_y)/2`,
//! `∂_z̄ = (∂_x + i∂_y)/2`. Grid points are stored row-major with axis 0 the
//! slowest.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{Herm, MAX_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    /// Complex dimension.
    pub n: usize,
    /// Points per real axis.
    pub points: usize,
}

impl TorusGrid {
    pub fn new(n: usize, points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(LabError::InvalidGrid(format!("complex dimension {n} not in 1..={MAX_DIM}")));
        }
        if points < 8 || !points.is_multiple_of(2) {
            return Err(LabError::InvalidGrid(format!("points per axis must be even and >= 8, got {points}")));
        }
        let total = (points as u128).pow(2 * n as u32);
        if total > 1 << 26 {
            return Err(LabError::InvalidGrid(format!("{total} grid points is too many")));
        }
        Ok(Self { n, points })
    }

    pub fn real_dim(&self) -> usize {
        2 * self.n
    }

    pub fn len(&self) -> usize {
        self.points.pow(self.real_dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of the fundamental domain `[0,1)^{2n}` in coordinates.
    pub fn domain_volume(&self) -> f64 {
        1.0
    }

    pub fn cell_volume(&self) -> f64 {
        self.domain_volume() / self.len() as f64
    }

    /// Integer coordinates of grid point `index`.
    pub fn digits(&self, mut index: usize) -> [usize; 2 * MAX_DIM] {
        let d = self.real_dim();
        let mut out = [0usize; 2 * MAX_DIM];
        for a in (0..d).rev() {
            out[a] = index % self.points;
            index /= self.points;
        }
        out
    }

    /// Real coordinates in `[0,1)^{2n}` of grid point `index`.
    pub fn coords(&self, index: usize) -> [f64; 2 * MAX_DIM] {
        let dg = self.digits(index);
        let mut x = [0.0; 2 * MAX_DIM];
        for a in 0..self.real_dim() {
            x[a] = dg[a] as f64 / self.points as f64;
        }
        x
    }

    /// Evaluates `f` at every grid point.
    pub fn sample<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = self.real_dim();
        (0..self.len()).into_par_iter().map(|i| f(&self.coords(i)[..d])).collect()
    }

    /// Signed frequency of digit `i` (Nyquist reported as `+N/2`).
    pub fn frequency(&self, i: usize) -> i64 {
        let n = self.points as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }
}

/// Pairwise Riemann sum (plain sum times `cell_volume` is the quadrature).
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 64 {
        v.iter().sum()
    } else {
        let (a, b) = v.split_at(v.len() / 2);
        pairwise_sum(a) + pairwise_sum(b)
    }
}

/// A field of Hermitian forms, one `n x n` matrix per grid point.
#[derive(Clone, Debug)]
pub struct HermitianField {
    pub grid: TorusGrid,
    data: Vec<Herm>,
    constant: bool,
}

impl HermitianField {
    pub fn constant(grid: TorusGrid, h: Herm) -> Self {
        assert_eq!(h.n, grid.n);
        Self { grid, data: vec![h; grid.len()], constant: true }
    }

    pub fn identity(grid: TorusGrid) -> Self {
        Self::constant(grid, Herm::identity(grid.n))
    }

    pub fn from_points(grid: TorusGrid, data: Vec<Herm>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(LabError::DimensionMismatch { expected: grid.len(), got: data.len() });
        }
        Ok(Self { grid, data, constant: false })
    }

    /// True when the field was built as a single constant form.
    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn at(&self, i: usize) -> &Herm {
        &self.data[i]
    }

    pub fn points(&self) -> &[Herm] {
        &self.data
    }

    pub fn map<F>(&self, f: F) -> HermitianField
    where
        F: Fn(usize, &Herm) -> Herm + Sync,
    {
        let data = self.data.par_iter().enumerate().map(|(i, h)| f(i, h)).collect();
        HermitianField { grid: self.grid, data, constant: false }
    }

    pub fn add(&self, other: &HermitianField) -> HermitianField {
        let mut out = self.map(|i, h| h.add(other.at(i)));
        out.constant = self.constant && other.constant;
        out
    }

    pub fn scale(&self, t: f64) -> HermitianField {
        let mut out = self.map(|_, h| h.scale(t));
        out.constant = self.constant;
        out
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &HermitianField) -> HermitianField {
        let mut out = self.map(|i, h| h.axpy(t, other.at(i)));
        out.constant = self.constant && other.constant;
        out
    }

    pub fn determinants(&self) -> Vec<f64> {
        self.data.par_iter().map(|h| h.det()).collect()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        self.data.iter().map(|h| h.hermitian_defect()).fold(0.0, f64::max)
    }
}

/// FFT machinery for one grid. Forward transforms are normalized so the
/// output is the Fourier coefficient of `e^{2πi m·x}`.
pub struct Spectral {
    pub grid: TorusGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// First-derivative frequency per axis per mode, Nyquist mapped to 0.
    k1: Vec<Vec<f64>>,
    /// Squared frequency per axis per mode for repeated derivatives along one
    /// axis (Nyquist retained).
    k2: Vec<Vec<f64>>,
}

impl Spectral {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.points);
        let inv = planner.plan_fft_inverse(grid.points);
        let d = grid.real_dim();
        let half = (grid.points / 2) as i64;
        let mut k1 = vec![vec![0.0; grid.len()]; d];
        let mut k2 = vec![vec![0.0; grid.len()]; d];
        for i in 0..grid.len() {
            let dg = grid.digits(i);
            for a in 0..d {
                let m = grid.frequency(dg[a]);
                k1[a][i] = if m.abs() == half { 0.0 } else { m as f64 };
                k2[a][i] = (m * m) as f64;
            }
        }
        Self { grid, fwd, inv, k1, k2 }
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let plan = if inverse { &self.inv } else { &self.fwd };
        let np = self.grid.points;
        let total = data.len();
        let d = self.grid.real_dim();
        let mut scratch = vec![Complex64::new(0.0, 0.0); total];
        for a in 0..d {
            let stride = np.pow((d - 1 - a) as u32);
            if stride == 1 {
                plan.process(data);
                continue;
            }
            let blocks = total / (np * stride);
            for b in 0..blocks {
                for inner in 0..stride {
                    let line = b * stride + inner;
                    let base = b * np * stride + inner;
                    for k in 0..np {
                        scratch[line * np + k] = data[base + k * stride];
                    }
                }
            }
            plan.process(&mut scratch);
            for b in 0..blocks {
                for inner in 0..stride {
                    let line = b * stride + inner;
                    let base = b * np * stride + inner;
                    for k in 0..np {
                        data[base + k * stride] = scratch[line * np + k];
                    }
                }
            }
        }
    }

    /// Fourier coefficients of a real field.
    pub fn forward(&self, v: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.transform(&mut data, false);
        let scale = 1.0 / data.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
        data
    }

    /// Synthesizes grid values from Fourier coefficients.
    pub fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
        self.transform(&mut coeffs, true);
        coeffs
    }

    pub fn inverse_real(&self, coeffs: Vec<Complex64>) -> Vec<f64> {
        self.inverse(coeffs).into_iter().map(|c| c.re).collect()
    }

    #[inline]
    fn second(&self, a: usize, b: usize, mode: usize) -> f64 {
        let w = -4.0 * PI * PI;
        if a == b {
            w * self.k2[a][mode]
        } else {
            w * self.k1[a][mode] * self.k1[b][mode]
        }
    }

    /// Spectral multiplier of `∂²/∂z_j∂z̄_k` at `mode`.
    #[inline]
    pub fn hessian_symbol(&self, j: usize, k: usize, mode: usize) -> Complex64 {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        let re = self.second(xj, xk, mode) + self.second(yj, yk, mode);
        let im = if j == k { 0.0 } else { self.second(xj, yk, mode) - self.second(yj, xk, mode) };
        Complex64::new(0.25 * re, 0.25 * im)
    }

    /// Complex Hessian `(∂²v/∂z_j∂z̄_k)` from Fourier coefficients.
    pub fn hessian_from_coeffs(&self, coeffs: &[Complex64]) -> Vec<Herm> {
        let n = self.grid.n;
        let len = self.grid.len();
        let mut out = vec![Herm::zeros(n); len];
        for j in 0..n {
            for k in j..n {
                let spec: Vec<Complex64> =
                    coeffs.iter().enumerate().map(|(m, c)| c * self.hessian_symbol(j, k, m)).collect();
                let vals = self.inverse(spec);
                for (h, v) in out.iter_mut().zip(vals) {
                    if j == k {
                        h.m[j][j] = Complex64::new(v.re, 0.0);
                    } else {
                        h.m[j][k] = v;
                        h.m[k][j] = v.conj();
                    }
                }
            }
        }
        out
    }

    pub fn hessian(&self, v: &[f64]) -> Vec<Herm> {
        self.hessian_from_coeffs(&self.forward(v))
    }

    /// Symbol of the constant-coefficient operator `v ↦ tr(b · ∂∂̄v)`.
    pub fn trace_symbol(&self, b: &Herm) -> Vec<f64> {
        let n = self.grid.n;
        (0..self.grid.len())
            .map(|m| {
                let mut acc = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        acc += (b.m[k][j] * self.hessian_symbol(j, k, m)).re;
                    }
                }
                acc
            })
            .collect()
    }

    /// Solves `tr(b · ∂∂̄v) = rhs − mean(rhs)` for mean-zero `v`.
    pub fn solve_trace_operator(&self, b: &Herm, rhs: &[f64]) -> Vec<f64> {
        let symbol = self.trace_symbol(b);
        self.solve_with_symbol(&symbol, rhs)
    }

    pub fn solve_with_symbol(&self, symbol: &[f64], rhs: &[f64]) -> Vec<f64> {
        let mut c = self.forward(rhs);
        for (ci, &s) in c.iter_mut().zip(symbol) {
            if s.abs() > 0.0 {
                *ci /= s;
            } else {
                *ci = Complex64::new(0.0, 0.0);
            }
        }
        self.inverse_real(c)
    }

    /// Green's kernel `K` of `Δ_b = tr(b^{-1}∂∂̄)`: the mean-zero grid function
    /// with `v − mean(v) = Σ_y K(x − y) Δ_b v(y) · cell_volume`. Returned as
    /// values `K(x)` at every grid offset `x`.
    pub fn green_kernel(&self, omega_x: &Herm) -> Result<Vec<f64>> {
        let inv = omega_x.inverse_pd().ok_or(LabError::NotPositiveDefinite { point: 0 })?;
        let symbol = self.trace_symbol(&inv);
        let coeffs: Vec<Complex64> = symbol
            .iter()
            .map(|&s| if s.abs() > 0.0 { Complex64::new(1.0 / s, 0.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        Ok(self.inverse_real(coeffs))
    }
}
