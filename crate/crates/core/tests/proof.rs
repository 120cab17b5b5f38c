use kahler_lab::functionals::{entropy_p, LevelDirection, SublevelProfile};
use kahler_lab::geometry::{degenerate_background, SolutionState, Torus};
use kahler_lab::grid::HermitianField;
use kahler_lab::linalg::Herm;
use kahler_lab::operators::OperatorSpec;
use kahler_lab::proof::barrier::{check_phi_test_function, depth, sharpness_series, solve_auxiliary};
use kahler_lab::proof::chain::{ChainInputs, ConstantChain};
use kahler_lab::proof::coupled::{audit_k2, coupled_check, manufactured_state, second_equation, CoupledSettings};
use kahler_lab::proof::degiorgi::{
    de_giorgi, increment, minimal_recursion_constant, simulate_recursion, DeGiorgiLevels,
};
use kahler_lab::proof::linearized::LinearizedCoefficients;
use kahler_lab::proof::mean_value::MeanValueSettings;
use kahler_lab::proof::young::{young_constant_scaled, young_holds};
use proptest::prelude::*;

fn state(op: &OperatorSpec, seed: u64, t: f64, amp: f64) -> SolutionState {
    let n = op.n;
    let torus = Torus::flat(n, 8).unwrap();
    let mut d = vec![0.0; n];
    d[0] = 1.0;
    let chi = HermitianField::constant(torus.grid, Herm::diag(&d));
    let (omega, _) = degenerate_background(&chi, t, &torus.omega_x).unwrap();
    let phi = torus.sample_admissible_potential(op, &omega, amp, 6, seed).unwrap();
    torus.induce_density(op, &phi, &omega).unwrap()
}

fn chain_for(st: &SolutionState, k: f64) -> ConstantChain {
    let inputs = ChainInputs::new(st.n(), 1.0, st.op.gamma, st.kappa, st.c_ratio(), k, st.torus.volume).unwrap();
    ConstantChain::build(inputs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn linearized_determinant_is_bounded_below(seed in any::<u64>(), t in 0.01f64..1.0, which in 0usize..3) {
        let op = [
            OperatorSpec::monge_ampere(2).unwrap(),
            OperatorSpec::hessian(1, 2).unwrap(),
            OperatorSpec::p_monge_ampere(1, 2).unwrap(),
        ][which]
            .clone();
        let st = state(&op, seed, t, 1.0);
        let g = LinearizedCoefficients::assemble(&op, &st).unwrap();
        let check = g.check_determinant();
        prop_assert!(check.passed, "min ratio {}", check.min_ratio);
        prop_assert!(g.min_eigenvalue() > 0.0);
    }

    #[test]
    fn chain_constants_grow_with_the_entropy_bound(k in 0.0f64..50.0, dk in 0.0f64..50.0, kappa in 0.5f64..4.0) {
        let lo = ConstantChain::build(ChainInputs::new(2, 1.0, 0.25, kappa, 1.0, k, 1.0).unwrap()).unwrap();
        let hi = ConstantChain::build(ChainInputs::new(2, 1.0, 0.25, kappa, 1.0, k + dk, 1.0).unwrap()).unwrap();
        prop_assert!(hi.ln_c_e >= lo.ln_c_e);
        prop_assert!(hi.ln_c_t >= lo.ln_c_t);
        prop_assert!(hi.c1 >= lo.c1);
        prop_assert!(hi.alpha <= lo.alpha);
    }

    #[test]
    fn young_inequality_holds_off_lattice(which in 0usize..4, u in 0.0f64..50.0, log_v in -50.0f64..50.0) {
        let p = [0.5, 1.0, 2.0, 3.0][which];
        let c = young_constant_scaled(p, 0.5);
        prop_assert!(young_holds(p, 0.5, c, u, log_v.exp()), "p {} u {} log v {}", p, u, log_v);
    }
}

#[test]
fn linearized_determinant_in_three_dimensions() {
    for op in [OperatorSpec::monge_ampere(3).unwrap(), OperatorSpec::hessian(2, 3).unwrap()] {
        let st = state(&op, 17, 0.05, 1.0);
        let check = LinearizedCoefficients::assemble(&op, &st).unwrap().check_determinant();
        assert!(check.passed, "{:?}: {}", op.kind, check.min_ratio);
    }
}

#[test]
fn comparison_function_is_nonpositive_on_the_sublevel_set() {
    let op = OperatorSpec::monge_ampere(2).unwrap();
    let st = state(&op, 3, 0.1, 0.01);
    let chain = chain_for(&st, entropy_p(&st, 1.0).unwrap());
    for frac in [0.2, 0.4, 0.6] {
        let s = frac * depth(&st);
        let aux = solve_auxiliary(&st, chain.a, s, 32.0, 1e-7, None).unwrap();
        let check = check_phi_test_function(&st, &aux.psi, &chain, s, aux.effective_mass()).unwrap();
        assert!(check.passed, "s = {s}: {check:?}");
        assert!(check.max_on_sublevel <= check.tolerance);
        assert!(check.max_off_sublevel < 0.0);
    }
}

#[test]
fn smoothed_mass_gap_shrinks_with_sharpness() {
    let op = OperatorSpec::monge_ampere(2).unwrap();
    let st = state(&op, 3, 0.1, 0.01);
    let chain = chain_for(&st, entropy_p(&st, 1.0).unwrap());
    let series = sharpness_series(&st, &chain, 0.4 * depth(&st), &[8.0, 32.0, 128.0], 1e-7).unwrap();
    assert!(series.gaps_decreasing(), "{:?}", series.gaps());
    assert!(series.gaps_bounded());
    assert!(series.checks.iter().all(|c| c.passed));
}

#[test]
fn de_giorgi_increment_matches_hand_value() {
    // 2^{-1/4} to double precision
    let want = 1.0 / (1.0 - 0.8408964152537145);
    assert!((increment(0.25) - want).abs() <= 1e-12 * want);
}

#[test]
fn synthetic_profile_halves_and_vanishes_before_the_final_level() {
    // φ(s) = (1 − s/L)_+^m with volume normalized to 1
    let (n, r, len, m) = (2usize, 3.0, 6.0, 8.0);
    let phi = |s: f64| (1.0 - s / len).max(0.0).powf(m);
    let s_values: Vec<f64> = (0..=1200).map(|i| i as f64 * 0.005).collect();
    let masses: Vec<f64> = s_values.iter().map(|s| phi(*s)).collect();
    let c_bar = 1.01 * minimal_recursion_constant(&s_values, &masses, n, r, 1.0);
    let levels = DeGiorgiLevels::new(n, r, c_bar, 1.0).unwrap();
    let visited = simulate_recursion(phi, &levels, n, 1.0, 10_000);
    assert_eq!(phi(*visited.last().unwrap()), 0.0);
    for w in visited.windows(2) {
        assert!(phi(w[1]) <= 0.5 * phi(w[0]) * (1.0 + 1e-9));
    }
    assert!(*visited.last().unwrap() <= levels.s_inf);

    let profile = SublevelProfile {
        s_values: s_values.clone(),
        phi_of_s: masses.clone(),
        a_of_s: vec![0.0; s_values.len()],
        a: 1.0,
        direction: LevelDirection::Superlevel,
    };
    let out = de_giorgi(&profile, n, 1.0, r, c_bar).unwrap();
    assert!(out.verified);
    assert!(out.first_vanishing.unwrap() <= levels.s_inf);
}

#[test]
fn de_giorgi_rejects_increasing_profiles() {
    let profile = SublevelProfile {
        s_values: vec![0.0, 1.0, 2.0],
        phi_of_s: vec![0.1, 0.2, 0.0],
        a_of_s: vec![0.0; 3],
        a: 1.0,
        direction: LevelDirection::Superlevel,
    };
    assert!(de_giorgi(&profile, 2, 1.0, 3.0, 1.0).is_err());
}

#[test]
fn coupled_trivial_state_has_zero_constant() {
    let torus = Torus::flat(2, 8).unwrap();
    let op = OperatorSpec::monge_ampere(2).unwrap();
    let omega = HermitianField::identity(torus.grid);
    let st = torus.induce_density(&op, &vec![0.0; torus.grid.len()], &omega).unwrap();
    let eq = second_equation(&st, &HermitianField::constant(torus.grid, Herm::zeros(2))).unwrap();
    assert!(eq.accepted && eq.c_theta.abs() < 1e-14);
}

#[test]
fn coupled_k2_audit_accepts_the_boundary_and_rejects_beyond() {
    let g = kahler_lab::grid::TorusGrid::new(2, 8).unwrap();
    let omega = HermitianField::constant(g, Herm::diag(&[3.0, 0.25]));
    let theta = omega.scale(-0.5);
    assert!(audit_k2(&theta, &omega, 0.5).unwrap().passed);
    assert!(!audit_k2(&theta, &omega, 0.49).unwrap().passed);
}

#[test]
fn coupled_manufactured_state_passes() {
    let (st, theta) = manufactured_state(2, 8, &[1, 0, 0, 1], 1e-5).unwrap();
    let reference = ChainInputs::new(2, 1.0, st.op.gamma, st.kappa, st.c_ratio(), 0.0, st.torus.volume).unwrap();
    let settings = CoupledSettings {
        p: 1.0,
        k2: 1.0,
        sharpness: 32.0,
        solver_tolerance: 1e-7,
        mean_value: MeanValueSettings::new(reference.beta, reference.c_x),
    };
    let report = coupled_check(&st, &theta, &settings).unwrap();
    assert!(report.equation.residual <= 1e-6);
    assert!(report.pass, "{report:?}");
    assert!(report.sup_f <= report.f_upper_bound && report.inf_f >= report.f_lower_bound);
    let ledger = report.ledger();
    assert!(ledger.get("coupled.c_theta").is_some() && ledger.get("degiorgi.S_inf").is_some());

    let bad = CoupledSettings { p: 2.5, ..settings };
    assert!(coupled_check(&st, &theta, &bad).is_err());
}
