//! Constants of the Hölder-Young inequality
//! `(s·u)^p v ≤ v(1 + |log v|^p) + C e^u` for `u ≥ 0`, `v > 0`.
//!
//! With `s = 1` the best constant is finite only for `p ≤ 1` (for `p > 1` it
//! grows with the search domain); the proofs use `s = 1/2`, which is bounded
//! for every `p`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rayon::prelude::*;

pub const YOUNG_SAFETY: f64 = 1.05;
pub const YOUNG_STEP: f64 = 1e-3;
pub const YOUNG_U_MAX: f64 = 50.0;
pub const YOUNG_LOG_V_MAX: f64 = 50.0;

/// Search-grid constant for `s = 1` on `u ∈ [0, 50]`, `log v ∈ [−50, 50]`,
/// times [`YOUNG_SAFETY`].
pub fn young_constant(p: f64) -> f64 {
    young_constant_on(p, 1.0, YOUNG_U_MAX)
}

/// Same search for the scaled form `(s·u)^p v`. Memoized.
pub fn young_constant_scaled(p: f64, scale: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (p.to_bits(), scale.to_bits());
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return *v;
    }
    let v = young_constant_on(p, scale, YOUNG_U_MAX);
    cache.lock().unwrap().insert(key, v);
    v
}

/// Largest value of `e^{−u} v ((s u)^p − 1 − |log v|^p)` over the lattice
/// with spacing [`YOUNG_STEP`], times [`YOUNG_SAFETY`].
pub fn young_constant_on(p: f64, scale: f64, u_max: f64) -> f64 {
    assert!(p > 0.0 && scale > 0.0 && u_max > 0.0);
    let steps = (u_max / YOUNG_STEP).round() as usize;
    let best =
        (0..=steps).into_par_iter().map(|i| best_for_u(p, scale, i as f64 * YOUNG_STEP)).reduce(|| 0.0, f64::max);
    best * YOUNG_SAFETY
}

/// For fixed `u` the objective `e^{L−u}(A − |L|^p)` with `A = (su)^p − 1` is
/// below `A e^{−u}` for `L < 0` and vanishes beyond `L = A^{1/p}`, so only
/// `L ∈ [0, A^{1/p}]` matters: coarse scan, then the lattice near the best.
fn best_for_u(p: f64, scale: f64, u: f64) -> f64 {
    let a = (scale * u).powf(p) - 1.0;
    if a <= 0.0 {
        return 0.0;
    }
    let l_max = a.powf(1.0 / p).min(YOUNG_LOG_V_MAX);
    let obj = |l: f64| (l - u).exp() * (a - l.powf(p));
    let coarse = 0.05;
    let mut arg = 0.0;
    let mut best = obj(0.0);
    let mut l = coarse;
    while l <= l_max {
        let v = obj(l);
        if v > best {
            best = v;
            arg = l;
        }
        l += coarse;
    }
    let lo = ((arg - coarse).max(0.0) / YOUNG_STEP).floor() as i64;
    let hi = ((arg + coarse).min(l_max) / YOUNG_STEP).ceil() as i64;
    for j in lo..=hi {
        best = best.max(obj(j as f64 * YOUNG_STEP));
    }
    best.max(0.0)
}

/// Checks the inequality at one point.
pub fn young_holds(p: f64, scale: f64, c: f64, u: f64, v: f64) -> bool {
    let lhs = (scale * u).powf(p) * v;
    let rhs = v * (1.0 + v.ln().abs().powf(p)) + c * u.exp();
    lhs <= rhs * (1.0 + 1e-12)
}
