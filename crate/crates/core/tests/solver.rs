use kahler_lab::functionals::exp_integrability_certificate;
use kahler_lab::geometry::{complex_hessian, degenerate_background, Torus};
use kahler_lab::grid::HermitianField;
use kahler_lab::lab::solve::manufactured_solve;
use kahler_lab::linalg::Herm;
use kahler_lab::ma_solver::{solve_ma, MASolveProblem};
use kahler_lab::manufactured::Manufactured;
use kahler_lab::operators::OperatorSpec;
use kahler_lab::proof::barrier::{depth, solve_auxiliary};

#[test]
fn manufactured_recovery_and_refinement_n2() {
    let target = Manufactured::smooth_bump(2, 0.02);
    let coarse = manufactured_solve(2, 8, &target, 1e-9, 200).unwrap();
    let fine = manufactured_solve(2, 16, &target, 1e-9, 200).unwrap();
    assert!(fine.sup_error <= 1e-6, "{}", fine.sup_error);
    assert!(fine.residual <= 1e-9, "{}", fine.residual);
    assert!(coarse.sup_error >= 10.0 * fine.sup_error);
}

#[test]
fn refinement_continues_to_n32_in_one_dimension() {
    let target = Manufactured::smooth_bump(1, 0.02);
    let errs: Vec<f64> =
        [8, 16, 32].iter().map(|&p| manufactured_solve(1, p, &target, 1e-12, 200).unwrap().sup_error).collect();
    assert!(errs[0] >= 10.0 * errs[1], "{errs:?}");
    assert!(errs[1] >= 10.0 * errs[2], "{errs:?}");
}

#[test]
fn output_is_plurisubharmonic_and_deterministic() {
    let torus = Torus::flat(2, 8).unwrap();
    let target = Manufactured::smooth_bump(2, 0.02);
    let omega = HermitianField::identity(torus.grid);
    let rhs = omega.add(&target.hessian_field(&torus.grid).unwrap()).determinants();
    let problem = MASolveProblem::new(&torus, omega.clone(), rhs).unwrap();
    let a = solve_ma(&torus, &problem).unwrap();
    let b = solve_ma(&torus, &problem).unwrap();
    assert_eq!(
        a.psi.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        b.psi.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    let form = omega.add(&complex_hessian(&a.psi, &torus.grid).unwrap());
    assert!(form.points().iter().all(|h| h.eigenvalues()[0] > 0.0));
}

#[test]
fn auxiliary_outputs_are_exponentially_integrable() {
    let torus = Torus::flat(2, 8).unwrap();
    let op = OperatorSpec::monge_ampere(2).unwrap();
    let chi = HermitianField::constant(torus.grid, Herm::diag(&[1.0, 0.0]));
    for t in [1.0, 0.1] {
        let (omega, kappa) = degenerate_background(&chi, t, &torus.omega_x).unwrap();
        let phi = torus.sample_admissible_potential(&op, &omega, 0.01, 6, 11).unwrap();
        let st = torus.induce_density(&op, &phi, &omega).unwrap();
        let beta = 0.5 / kappa;
        let c_x = exp_integrability_certificate(&Herm::identity(2), kappa, beta, &torus.grid).unwrap();
        for frac in [0.2, 0.6] {
            let aux = solve_auxiliary(&st, 2.0, frac * depth(&st), 32.0, 1e-7, None).unwrap();
            let top = aux.psi.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let v: Vec<f64> = aux.psi.iter().map(|p| (-beta * (p - top)).exp()).collect();
            let integral = torus.integrate_weighted(&v, None).unwrap();
            assert!(integral <= c_x, "t = {t}: {integral} > {c_x}");
        }
    }
}
