use itertools::Itertools;
use kahler_lab::operators::{cone_contains, sample_cone, ConeSpec, EigenvalueVector, OperatorKind, OperatorSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn family() -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::monge_ampere(2).unwrap(),
        OperatorSpec::monge_ampere(3).unwrap(),
        OperatorSpec::hessian(1, 3).unwrap(),
        OperatorSpec::hessian(2, 3).unwrap(),
        OperatorSpec::hessian(2, 4).unwrap(),
        OperatorSpec::p_monge_ampere(1, 2).unwrap(),
        OperatorSpec::p_monge_ampere(2, 2).unwrap(),
        OperatorSpec::p_monge_ampere(2, 3).unwrap(),
    ]
}

fn point(op: &OperatorSpec, seed: u64) -> Vec<f64> {
    sample_cone(&op.cone, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneous_of_degree_one(seed in any::<u64>(), which in 0usize..8) {
        let op = &family()[which];
        let l = point(op, seed);
        let f = op.eval_unchecked(&l);
        for t in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = l.iter().map(|x| t * x).collect();
            let ft = op.eval_unchecked(&scaled);
            prop_assert!((ft - t * f).abs() <= 1e-10 * ft.abs());
        }
    }

    #[test]
    fn symmetric_under_permutations(seed in any::<u64>(), which in 0usize..8) {
        let op = &family()[which];
        let l = point(op, seed);
        let f = op.eval_unchecked(&l);
        for perm in (0..l.len()).permutations(l.len()) {
            let p: Vec<f64> = perm.iter().map(|&i| l[i]).collect();
            prop_assert!((op.eval_unchecked(&p) - f).abs() <= 1e-10 * f.abs().max(1e-300));
        }
    }

    #[test]
    fn gradient_is_positive_and_matches_differences(seed in any::<u64>(), which in 0usize..8) {
        let op = &family()[which];
        let l = point(op, seed);
        let g = op.grad(&EigenvalueVector::new(l.clone()).unwrap()).unwrap();
        for (j, gj) in g.as_slice().iter().enumerate() {
            prop_assert!(*gj > 0.0);
            let h = 1e-6 * l[j].abs().max(1e-3);
            let mut a = l.clone();
            let mut b = l.clone();
            a[j] += h;
            b[j] -= h;
            if op.cone.margin(&b) <= 0.0 {
                continue;
            }
            let fd = (op.eval_unchecked(&a) - op.eval_unchecked(&b)) / (2.0 * h);
            prop_assert!((fd - gj).abs() <= 1e-6 * gj.abs().max(fd.abs()) + 1e-9, "fd {} grad {}", fd, gj);
        }
    }

    #[test]
    fn cones_nest_between_positive_and_trace(seed in any::<u64>(), which in 0usize..8) {
        let op = &family()[which];
        let n = op.n;
        let positive = ConeSpec::positive(n);
        let l = EigenvalueVector::new(point(&OperatorSpec::monge_ampere(n).unwrap(), seed)).unwrap();
        prop_assert!(cone_contains(&op.cone, &l).unwrap());
        prop_assert!(cone_contains(&positive, &l).unwrap());
        let m = point(op, seed);
        prop_assert!(m.iter().sum::<f64>() > 0.0);
    }

    #[test]
    fn monge_ampere_derivative_product_is_constant(seed in any::<u64>(), n in 2usize..=3) {
        let op = OperatorSpec::monge_ampere(n).unwrap();
        let l = point(&op, seed);
        let prod: f64 = op.grad_unchecked(&l).iter().product();
        let target = (n as f64).powi(-(n as i32));
        prop_assert!((prod - target).abs() <= 1e-10);
    }
}

#[test]
fn first_entry_fixture_is_rejected() {
    let op = OperatorSpec::new(OperatorKind::FirstEntry, 3).unwrap();
    let r = kahler_lab::operators::verify_structural_conditions(&op, 500, 3);
    assert!(!r.passed);
    assert!(!r.condition("symmetry").unwrap().passed);
}
