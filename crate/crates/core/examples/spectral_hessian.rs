//! Spectral complex Hessian of a trigonometric potential against its closed
//! form, and the eigenvalues of `ω_φ` relative to `ω_X`.

use kahler_lab::geometry::{complex_hessian, relative_eigenvalues};
use kahler_lab::grid::{HermitianField, TorusGrid};
use kahler_lab::manufactured::{Manufactured, Ridge};

fn main() -> kahler_lab::Result<()> {
    let grid = TorusGrid::new(2, 16)?;
    let pot = Manufactured::new(vec![
        Ridge::cosine(vec![1, 0, 0, 2], 0.01),
        Ridge::cosine(vec![0, 1, -1, 0], 0.02),
        Ridge::cosine(vec![3, 0, 1, 1], 0.005),
    ]);
    let spectral = complex_hessian(&pot.values(&grid)?, &grid)?;
    let exact = pot.hessian_field(&grid)?;
    let err =
        spectral.points().iter().zip(exact.points()).map(|(a, b)| a.add(&b.scale(-1.0)).max_abs()).fold(0.0, f64::max);
    println!("max |H_spectral - H_exact| = {err:.3e}");

    let omega_x = HermitianField::identity(grid);
    let ev = relative_eigenvalues(&omega_x, &omega_x.add(&spectral))?;
    let (lo, hi) = ev.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    println!("eigenvalues of omega_phi relative to omega_X lie in [{lo:.6}, {hi:.6}]");
    Ok(())
}
