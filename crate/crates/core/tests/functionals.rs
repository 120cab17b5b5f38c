use kahler_lab::functionals::{entropy_p, sublevel_profile, trudinger_integral};
use kahler_lab::geometry::{degenerate_background, SolutionState, Torus};
use kahler_lab::grid::HermitianField;
use kahler_lab::linalg::Herm;
use kahler_lab::operators::OperatorSpec;
use kahler_lab::proof::chain::{ChainInputs, ConstantChain};
use proptest::prelude::*;

fn state(seed: u64, t: f64, amp: f64) -> SolutionState {
    let torus = Torus::flat(2, 8).unwrap();
    let op = OperatorSpec::monge_ampere(2).unwrap();
    let chi = HermitianField::constant(torus.grid, Herm::diag(&[1.0, 0.0]));
    let (omega, _) = degenerate_background(&chi, t, &torus.omega_x).unwrap();
    let phi = torus.sample_admissible_potential(&op, &omega, amp, 6, seed).unwrap();
    torus.induce_density(&op, &phi, &omega).unwrap()
}

/// Neumaier-compensated sum.
fn neumaier(v: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in v {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn profile_is_nonincreasing_and_right_continuous(seed in any::<u64>(), t in 0.01f64..1.0) {
        let st = state(seed, t, 1.0);
        let mut values: Vec<f64> = st.phi.iter().map(|p| -p).filter(|v| *v > 0.0).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let picks: Vec<usize> = (0..values.len() - 1)
            .step_by(97)
            .filter(|&i| 0.5 * (values[i] + values[i + 1]) < values[i + 1])
            .collect();
        let levels: Vec<f64> = picks.iter().map(|&i| values[i]).collect();
        let prof = sublevel_profile(&st, 1.0, &levels).unwrap();
        prop_assert!(prof.phi_of_s.windows(2).all(|w| w[1] <= w[0]));
        // at a level equal to an attained value the attaining points are
        // already excluded, so moving right within the gap changes nothing
        let nudged: Vec<f64> = picks.iter().map(|&i| 0.5 * (values[i] + values[i + 1])).collect();
        let right = sublevel_profile(&st, 1.0, &nudged).unwrap();
        for (a, b) in prof.phi_of_s.iter().zip(&right.phi_of_s) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn layer_cake_for_a_equal_one(seed in any::<u64>()) {
        let st = state(seed, 0.3, 1.0);
        let depth = st.phi.iter().map(|p| -p).fold(0.0, f64::max);
        let s0 = 0.25 * depth;
        let m = 20000;
        let h = (depth - s0) / m as f64;
        let grid: Vec<f64> = (0..=m).map(|i| s0 + i as f64 * h).collect();
        let prof = sublevel_profile(&st, 1.0, &grid).unwrap();
        let integral = h * (prof.phi_of_s.iter().sum::<f64>() - 0.5 * (prof.phi_of_s[0] + prof.phi_of_s[m]));
        let a = prof.a_of_s[0];
        prop_assert!((st.c_ratio() * integral - a).abs() <= 1e-3 * a, "{} vs {}", st.c_ratio() * integral, a);
    }

    #[test]
    fn integrals_match_compensated_summation(seed in any::<u64>(), p in 0.5f64..4.0) {
        let st = state(seed, 0.5, 1.0);
        let cell = st.grid().cell_volume();
        let w = st.density_weight();
        let oracle = cell * neumaier(st.density.iter().zip(&w).zip(&st.torus.det_x).map(|((f, w), d)| f.abs().powf(p) * w * d));
        let got = entropy_p(&st, p).unwrap();
        prop_assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1e-300));

        let (alpha, q) = (0.7, 1.5);
        let oracle = (cell * neumaier(st.phi.iter().zip(&st.torus.det_x).map(|(v, d)| (alpha * (-v).powf(q)).exp() * d))).ln();
        let got = trudinger_integral(&st, alpha, q).unwrap().log;
        prop_assert!((got - oracle).abs() <= 1e-12 * oracle.abs().max(1.0));
    }

    #[test]
    fn decay_bound_holds_on_generated_states(seed in any::<u64>(), t in 0.01f64..1.0) {
        let st = state(seed, t, 1.0);
        let ent = entropy_p(&st, 1.0).unwrap();
        let chain = ConstantChain::build(ChainInputs::new(2, 1.0, 0.25, st.kappa, st.c_ratio(), ent, 1.0).unwrap()).unwrap();
        let levels: Vec<f64> = (0..40).map(|j| 1.0 + 0.05 * 1.3f64.powi(j)).collect();
        let prof = sublevel_profile(&st, chain.a, &levels).unwrap();
        for (s, m) in prof.s_values.iter().zip(&prof.phi_of_s) {
            prop_assert!(m * s.ln().powf(1.0) <= chain.c1);
        }
    }
}
