use kahler_lab::geometry::{complex_hessian, degenerate_background, relative_eigenvalues, Measure, Torus};
use kahler_lab::grid::{HermitianField, TorusGrid};
use kahler_lab::linalg::Herm;
use kahler_lab::manufactured::{Manufactured, Ridge};
use kahler_lab::operators::OperatorSpec;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

/// Real 2n×2n embedding `[[Re, −Im], [Im, Re]]`; each eigenvalue of the
/// Hermitian matrix appears twice.
fn embed(h: &Herm) -> DMatrix<f64> {
    let n = h.n;
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h.get(i % n, j % n);
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Eigenvalues of `B` relative to `A` through `A^{-1/2} B A^{-1/2}`.
fn oracle_relative(a: &Herm, b: &Herm) -> Vec<f64> {
    let ea = SymmetricEigen::new(embed(a));
    let inv_sqrt = &ea.eigenvectors
        * DMatrix::from_diagonal(&ea.eigenvalues.map(|v| 1.0 / v.sqrt()))
        * ea.eigenvectors.transpose();
    let c = &inv_sqrt * embed(b) * &inv_sqrt;
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}

fn herm_from(n: usize, raw: &[f64], shift: f64) -> Herm {
    // G Gᴴ + shift I is positive definite
    let g: Vec<Complex64> = (0..n * n).map(|i| Complex64::new(raw[2 * i], raw[2 * i + 1])).collect();
    let mut e = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            e[i * n + j] = (0..n).map(|k| g[i * n + k] * g[j * n + k].conj()).sum::<Complex64>();
        }
        e[i * n + i] += shift;
    }
    Herm::from_entries(n, &e)
}

fn random_ridges(n: usize, points: usize, seeds: &[(i64, i64, i64, i64, f64)]) -> Manufactured {
    let half = (points / 2 - 1) as i64;
    Manufactured::new(
        seeds
            .iter()
            .map(|&(a, b, c, d, amp)| {
                let raw = [a, b, c, d];
                let k: Vec<i64> = (0..2 * n).map(|j| raw[j % 4].rem_euclid(2 * half + 1) - half).collect();
                Ridge { k, amplitude: amp, rho: 0.0, phase: amp * 7.0 }
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn spectral_hessian_is_exact_below_nyquist(
        terms in prop::collection::vec((any::<i64>(), any::<i64>(), any::<i64>(), any::<i64>(), -0.05f64..0.05), 1..5)
    ) {
        let grid = TorusGrid::new(2, 16).unwrap();
        let pot = random_ridges(2, 16, &terms);
        let h = complex_hessian(&pot.values(&grid).unwrap(), &grid).unwrap();
        let exact = pot.hessian_field(&grid).unwrap();
        let err = h.points().iter().zip(exact.points()).map(|(a, b)| a.sub(b).max_abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-12, "error {}", err);
    }

    #[test]
    fn relative_eigenvalues_match_dense_oracle(
        n in 1usize..=3,
        ra in prop::collection::vec(-1.0f64..1.0, 18),
        rb in prop::collection::vec(-1.0f64..1.0, 18),
    ) {
        let a = herm_from(n, &ra, 0.3);
        let b = herm_from(n, &rb, 0.05);
        let got = kahler_lab::linalg::relative_eigenvalues(&b, &a).unwrap();
        let want = oracle_relative(&a, &b);
        for j in 0..n {
            prop_assert!((got[j] - want[j]).abs() <= 1e-10 * want[j].abs().max(1.0), "{:?} vs {:?}", &got[..n], want);
        }
    }

    #[test]
    fn sampled_states_satisfy_pointwise_identities(seed in any::<u64>(), t in 0.01f64..1.0) {
        let torus = Torus::flat(2, 8).unwrap();
        let op = OperatorSpec::monge_ampere(2).unwrap();
        let chi = HermitianField::constant(torus.grid, Herm::diag(&[1.0, 0.0]));
        let (omega, kappa) = degenerate_background(&chi, t, &torus.omega_x).unwrap();
        let phi = torus.sample_admissible_potential(&op, &omega, 1.0, 6, seed).unwrap();
        let st = torus.induce_density(&op, &phi, &omega).unwrap();

        // f^n ω_X^n = ω_φ^n
        for (i, f) in st.f_values.iter().enumerate() {
            let ratio = st.omega_phi.at(i).det() / torus.det_x[i];
            prop_assert!((f.powi(2) - ratio).abs() <= 1e-10 * ratio.max(1.0));
        }
        // ∫ e^{nF} ω_X^n = ∫ ω_X^n
        let mass = st.integrate(&vec![1.0; phi.len()], Measure::Density).unwrap();
        prop_assert!((mass - torus.volume).abs() <= 1e-10 * torus.volume);
        // ω ≤ κ ω_X
        let ev = relative_eigenvalues(&torus.omega_x, &omega).unwrap();
        prop_assert!(ev.values.iter().all(|v| *v <= kappa + 1e-12));
        // tr_{ω_X} ω + Δ φ > 0
        let h = complex_hessian(&phi, &torus.grid).unwrap();
        for i in 0..phi.len() {
            prop_assert!(omega.at(i).trace() + h.at(i).trace() > 0.0);
        }
    }
}

#[test]
fn refined_grid_reproduces_band_limited_integrals() {
    for points in [8, 16] {
        let torus = Torus::flat(1, points).unwrap();
        let v = torus.grid.sample(|x| 1.0 + (2.0 * std::f64::consts::PI * (x[0] + 2.0 * x[1])).cos().powi(2));
        let got = torus.integrate_weighted(&v, None).unwrap();
        assert!((got - 1.5).abs() < 1e-14, "{got}");
    }
}
