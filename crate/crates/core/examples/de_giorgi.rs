//! De Giorgi levels on a synthetic profile `φ(s) = (1 − s)_+^3`: the smallest
//! admissible constant, the resulting `S_∞`, and the simulated recursion.

use kahler_lab::functionals::{LevelDirection, SublevelProfile};
use kahler_lab::proof::degiorgi::{de_giorgi, minimal_recursion_constant, simulate_recursion};

fn main() -> kahler_lab::Result<()> {
    let (n, r, ratio) = (2, 4.0, 1.0);
    let phi = |s: f64| (1.0 - s).max(0.0).powi(3);
    let s: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let m: Vec<f64> = s.iter().map(|&x| phi(x)).collect();
    let c_bar = minimal_recursion_constant(&s, &m, n, r, ratio);
    let profile = SublevelProfile {
        s_values: s.clone(),
        phi_of_s: m,
        a_of_s: vec![0.0; s.len()],
        a: 1.0,
        direction: LevelDirection::Superlevel,
    };
    let out = de_giorgi(&profile, n, ratio, r, c_bar)?;
    println!("C_bar = {c_bar:.6}, s_0 = {:.6}, S_inf = {:.6}", out.levels.s_0, out.levels.s_inf);
    println!("mass first vanishes at s = {:?}; verified: {}", out.first_vanishing, out.verified);
    let steps = simulate_recursion(phi, &out.levels, n, ratio, 100);
    println!("recursion levels: {:?}", steps.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>());
    Ok(())
}
