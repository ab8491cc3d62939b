use bellmart::bellman::{bellman_value, eval_bellman};
use bellmart::lift::{
    certificate_p3, decompose_form, fd_error, fd_value_error, key_inequality_pair,
    lifted_hessian_apply, orth_pair_from, orthogonality_identity, LiftedPoint, Vec4,
};
use bellmart::ConjugatePair;
use proptest::prelude::*;

fn lifted_y() -> impl Strategy<Value = Vec4> {
    (
        -3.0..3.0f64,
        -3.0..3.0f64,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(l1, l2, a, b)| {
            let (x1, x2) = (10f64.powf(l1 / 1.5), 10f64.powf(l2 / 1.5));
            [x1 * a.cos(), x1 * a.sin(), x2 * b.cos(), x2 * b.sin()]
        })
}

fn moderate_y() -> impl Strategy<Value = Vec4> {
    (
        0.3..3.0f64,
        0.3..3.0f64,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(x1, x2, a, b)| [x1 * a.cos(), x1 * a.sin(), x2 * b.cos(), x2 * b.sin()])
}

fn direction() -> impl Strategy<Value = Vec4> {
    prop::array::uniform4(-1.0..1.0f64).prop_filter("nonzero", |d| d.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lifted_form_matches_value_differences(p in 2.2..6.0f64, y in moderate_y(), dy in direction()) {
        let pair = ConjugatePair::from_p(p).unwrap();
        let pt = LiftedPoint::plus(pair, y).unwrap();
        let err = fd_value_error(&pt, &dy, |u, v| bellman_value(pair, u, v)).unwrap();
        prop_assert!(err <= 1e-4, "err {err}");
    }

    #[test]
    fn lifted_form_matches_gradient_differences(p in 2.2..6.0f64, y in lifted_y(), dy in direction()) {
        let pair = ConjugatePair::from_p(p).unwrap();
        let pt = LiftedPoint::plus(pair, y).unwrap();
        let err = fd_error(&pt, &dy, |u, v| eval_bellman(pair, u, v)).unwrap();
        prop_assert!(err <= 1e-4, "err {err}");
    }

    #[test]
    fn certificate_terms(y in lifted_y(), dy in direction()) {
        let pt = LiftedPoint::closed_p3(y).unwrap();
        let cert = certificate_p3(&pt, &dy).unwrap();
        prop_assert!(cert.all_nonnegative());
        let form = lifted_hessian_apply(&pt, &dy);
        prop_assert!((cert.total() - form).abs() <= 1e-10 * cert.total().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn lower_bound_by_tau(p in 2.2..6.0f64, y in lifted_y(), dy in direction()) {
        let pair = ConjugatePair::from_p(p).unwrap();
        let pt = LiftedPoint::plus(pair, y).unwrap();
        let q = lifted_hessian_apply(&pt, &dy);
        let tau = pt.base.tau;
        let n1 = dy[0] * dy[0] + dy[1] * dy[1];
        let n2 = dy[2] * dy[2] + dy[3] * dy[3];
        let bound = tau * n1 + n2 / tau;
        prop_assert!(q >= bound - 1e-10 * (q.abs() + bound), "{q} < {bound}");
    }

    #[test]
    fn key_inequality(k in 0usize..3, y in lifted_y(), dy in direction(), first in prop::array::uniform2(-1.0..1.0f64), reflect: bool) {
        let pair = ConjugatePair::from_p([2.5, 3.0, 4.0][k]).unwrap();
        let pt = LiftedPoint::plus(pair, y).unwrap();
        let (a, b) = orth_pair_from(dy, first, reflect);
        let key = key_inequality_pair(&pt, &a, &b).unwrap();
        prop_assert!(key.slack >= -1e-10 * (key.lhs.abs() + key.rhs), "{key:?}");
    }

    #[test]
    fn decomposition_reconstructs(a in 1e-3..1e3f64, c in 1e-3..1e3f64, frac in -1.0..1.0f64, x in -10.0..10.0f64, y in -10.0..10.0f64) {
        let b = frac * (a * c).sqrt();
        let form = decompose_form(a, b, c).unwrap();
        prop_assert!(form.d >= 0.0);
        prop_assert!(form.reconstruction_error(x, y) <= 1e-12);
        prop_assert!((form.ratio_minimum() - form.d).abs() <= 1e-10 * (a * c).sqrt());
    }

    #[test]
    fn orthogonality_identity_holds(big_u in -5.0..5.0f64, big_v in -5.0..5.0f64, u in prop::array::uniform2(-3.0..3.0f64), reflect: bool) {
        let v = if reflect { [u[1], -u[0]] } else { [-u[1], u[0]] };
        let check = orthogonality_identity(big_u, big_v, u, v).unwrap();
        prop_assert!((check.lhs - check.rhs).abs() <= 1e-12 * (1.0 + check.rhs));
    }
}

#[test]
fn key_inequality_rejects_unconstrained_pairs() {
    let pair = ConjugatePair::from_p(3.0).unwrap();
    let pt = LiftedPoint::plus(pair, [1.0, 0.0, 1.0, 0.0]).unwrap();
    let err = key_inequality_pair(&pt, &[0.0, 0.0, 1.0, 1.0], &[0.0; 4]).unwrap_err();
    assert!(err.to_string().contains("orthogonality"));
    let err = key_inequality_pair(&pt, &[0.0, 0.0, 1.0, 0.0], &[0.0; 4]).unwrap_err();
    assert!(err.to_string().contains("equal norms"));
}

#[test]
fn certificate_at_reference_point() {
    let pt = LiftedPoint::closed_p3([1.0, 0.0, 1.0, 0.0]).unwrap();
    let cert = certificate_p3(&pt, &[0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!((cert.total() - 2.0).abs() < 1e-14);
    assert_eq!(cert.term_square, 0.0);
}
