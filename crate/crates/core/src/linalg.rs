//! Small dense Hermitian matrices (complex dimension at most [`MAX_DIM`]).
//!
//! Every grid point of a form field carries one of these, so they live on the
//! stack and the kernels avoid allocation.

use num_complex::Complex64;

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// An `n x n` complex matrix, `n <= MAX_DIM`, stored row-major. Entry `(i, j)`
/// holds the coefficient of `dz_i ∧ dz̄_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Herm {
    pub n: usize,
    pub m: [[Complex64; MAX_DIM]; MAX_DIM],
}

/// Lower-triangular Cholesky factor `L` with `A = L L^H`.
#[derive(Clone, Copy, Debug)]
pub struct Cholesky {
    pub l: Herm,
}

impl Herm {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} unsupported");
        Herm { n, m: [[ZERO; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    pub fn scalar(n: usize, t: f64) -> Self {
        let mut h = Self::zeros(n);
        for i in 0..n {
            h.m[i][i] = Complex64::new(t, 0.0);
        }
        h
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut h = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            h.m[i][i] = Complex64::new(v, 0.0);
        }
        h
    }

    /// Builds from a row-major slice of `n*n` complex entries.
    pub fn from_entries(n: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), n * n);
        let mut h = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                h.m[i][j] = entries[i * n + j];
            }
        }
        h
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn add(&self, other: &Herm) -> Herm {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.m[i][j] += other.m[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Herm) -> Herm {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, t: f64) -> Herm {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.m[i][j] *= t;
            }
        }
        out
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Herm) -> Herm {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.m[i][j] += other.m[i][j] * t;
            }
        }
        out
    }

    pub fn mul(&self, other: &Herm) -> Herm {
        let n = self.n;
        let mut out = Herm::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.m[i][k] * other.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Herm {
        let mut out = Herm::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.m[i][i].re).sum()
    }

    /// Real part of `tr(self * other)`.
    pub fn trace_product(&self, other: &Herm) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for k in 0..self.n {
                acc += (self.m[i][k] * other.m[k][i]).re;
            }
        }
        acc
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max(self.m[i][j].norm());
            }
        }
        worst
    }

    /// Determinant (real part; exact for Hermitian input).
    pub fn det(&self) -> f64 {
        let m = &self.m;
        match self.n {
            1 => m[0][0].re,
            2 => (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re,
            3 => {
                (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                    + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
                    .re
            }
            _ => unreachable!(),
        }
    }

    /// Cholesky factorization; `None` unless positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.n;
        let mut l = Herm::zeros(n);
        for j in 0..n {
            let mut d = self.m[j][j].re;
            for k in 0..j {
                d -= l.m[j][k].norm_sqr();
            }
            if !(d > 0.0) {
                return None;
            }
            let ljj = d.sqrt();
            l.m[j][j] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = self.m[i][j];
                for k in 0..j {
                    s -= l.m[i][k] * l.m[j][k].conj();
                }
                l.m[i][j] = s / ljj;
            }
        }
        Some(Cholesky { l })
    }

    /// Inverse of a positive definite matrix.
    pub fn inverse_pd(&self) -> Option<Herm> {
        let c = self.cholesky()?;
        let linv = c.inverse_l();
        // A^{-1} = L^{-H} L^{-1}
        Some(linv.adjoint().mul(&linv))
    }

    /// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Eigenvalues ascending; column `j` of the returned matrix is
    /// the unit eigenvector for eigenvalue `j`.
    pub fn eigh(&self) -> ([f64; MAX_DIM], Herm) {
        let n = self.n;
        let mut a = *self;
        let mut v = Herm::identity(n);
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a.m[p][q].norm_sqr();
                }
            }
            if off.sqrt() <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.m[p][q];
                    let g = apq.norm();
                    if g <= 1e-300 {
                        continue;
                    }
                    let phase = apq / g;
                    let app = a.m[p][p].re;
                    let aqq = a.m[q][q].re;
                    let theta = (aqq - app) / (2.0 * g);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    // U = P R with P = diag(.., 1 @p, conj(phase) @q ..),
                    // R the real rotation [[c, s], [-s, c]] in the (p, q) plane.
                    let mut u = Herm::identity(n);
                    u.m[p][p] = Complex64::new(c, 0.0);
                    u.m[p][q] = Complex64::new(s, 0.0);
                    u.m[q][p] = phase.conj() * (-s);
                    u.m[q][q] = phase.conj() * c;
                    a = u.adjoint().mul(&a).mul(&u);
                    a.m[p][q] = ZERO;
                    a.m[q][p] = ZERO;
                    for i in 0..n {
                        a.m[i][i].im = 0.0;
                    }
                    v = v.mul(&u);
                }
            }
        }
        let mut idx = [0usize, 1, 2];
        let idx = &mut idx[..n];
        idx.sort_by(|&i, &j| a.m[i][i].re.total_cmp(&a.m[j][j].re));
        let mut evals = [0.0; MAX_DIM];
        let mut evecs = Herm::zeros(n);
        for (col, &src) in idx.iter().enumerate() {
            evals[col] = a.m[src][src].re;
            for row in 0..n {
                evecs.m[row][col] = v.m[row][src];
            }
        }
        (evals, evecs)
    }

    pub fn eigenvalues(&self) -> [f64; MAX_DIM] {
        self.eigh().0
    }
}

impl Cholesky {
    pub fn log_det(&self) -> f64 {
        (0..self.l.n).map(|i| self.l.m[i][i].re.ln()).sum::<f64>() * 2.0
    }

    pub fn inverse_l(&self) -> Herm {
        let n = self.l.n;
        let mut inv = Herm::zeros(n);
        for col in 0..n {
            // forward substitution for L x = e_col
            for i in 0..n {
                let mut s = if i == col { ONE } else { ZERO };
                for k in 0..i {
                    s -= self.l.m[i][k] * inv.m[k][col];
                }
                inv.m[i][col] = s / self.l.m[i][i];
            }
        }
        inv
    }

    /// `L^{-1} A L^{-H}`.
    pub fn congruence(&self, a: &Herm) -> Herm {
        let linv = self.inverse_l();
        let mut c = linv.mul(a).mul(&linv.adjoint());
        for i in 0..c.n {
            c.m[i][i].im = 0.0;
        }
        c
    }
}

/// Eigenvalues of the pencil `(a, b)` with `b` positive definite, i.e. of
/// `b^{-1} a`, ascending. `None` if `b` is not positive definite.
pub fn relative_eigenvalues(a: &Herm, b: &Herm) -> Option<[f64; MAX_DIM]> {
    let chol = b.cholesky()?;
    Some(chol.congruence(a).eigenvalues())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample() -> Herm {
        Herm::from_entries(
            3,
            &[
                c(2.0, 0.0),
                c(0.3, 0.4),
                c(-0.1, 0.2),
                c(0.3, -0.4),
                c(1.5, 0.0),
                c(0.05, -0.3),
                c(-0.1, -0.2),
                c(0.05, 0.3),
                c(0.7, 0.0),
            ],
        )
    }

    #[test]
    fn eigh_reconstructs() {
        let a = sample();
        let (ev, u) = a.eigh();
        let d = Herm::diag(&ev[..3]);
        let back = u.mul(&d).mul(&u.adjoint());
        assert!(back.sub(&a).max_abs() < 1e-13);
        assert!(ev[0] <= ev[1] && ev[1] <= ev[2]);
        // trace and determinant invariants
        assert!((ev.iter().sum::<f64>() - a.trace()).abs() < 1e-13);
        assert!((ev.iter().product::<f64>() - a.det()).abs() < 1e-13);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(Herm::diag(&[1.0, -1.0]).cholesky().is_none());
        let a = sample();
        let ch = a.cholesky().unwrap();
        assert!((ch.log_det() - a.det().ln()).abs() < 1e-13);
        let inv = a.inverse_pd().unwrap();
        assert!(inv.mul(&a).sub(&Herm::identity(3)).max_abs() < 1e-13);
    }

    #[test]
    fn relative_eigenvalues_of_homothety() {
        let b = sample();
        let ev = relative_eigenvalues(&b.scale(2.5), &b).unwrap();
        for v in &ev[..3] {
            assert!((v - 2.5).abs() < 1e-12);
        }
    }
}
