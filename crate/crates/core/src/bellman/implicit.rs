use super::{BellmanPoint, Branch, ImplicitParts};
use crate::error::{ensure_finite, Error, Result};
use crate::pair::ConjugatePair;
use crate::roots::safeguarded_newton;

const T_REL_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 200;

/// Coefficients of `t = k_u t^(1/q) u + k_v t^(1/p) v`.
fn coefficients(pair: ConjugatePair) -> (f64, f64) {
    let (p, q) = (pair.p(), pair.q());
    (p.powf(1.0 / p) / q, p.powf(1.0 / q) / p)
}

/// `|f(t)| / t` for the implicit equation at `(u, v)`.
pub fn t_residual(pair: ConjugatePair, u: f64, v: f64, t: f64) -> f64 {
    let (ku, kv) = coefficients(pair);
    let (p, q) = (pair.p(), pair.q());
    let f = t - ku * t.powf(1.0 / q) * u.abs() - kv * t.powf(1.0 / p) * v.abs();
    f.abs() / t
}

/// Unique positive root `t(u, v)` of
/// `t = (p^(1/p)/q) t^(1/q) u + (p^(1/q)/p) t^(1/p) v`.
///
/// Inputs are folded to `|u|, |v|`. The point is first rescaled along the
/// homogeneity orbit so that `max(u^p, v^q) = 1`.
pub fn solve_t(pair: ConjugatePair, u: f64, v: f64) -> Result<f64> {
    ensure_finite("u", u)?;
    ensure_finite("v", v)?;
    let (u, v) = (u.abs(), v.abs());
    if u == 0.0 && v == 0.0 {
        return Err(Error::Domain("t=0 degenerate point (u, v) = (0, 0)".into()));
    }
    let (p, q) = (pair.p(), pair.q());
    let scale = u.powf(p).max(v.powf(q));
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Domain(format!(
            "(u, v) = ({u}, {v}) is out of floating-point range for p = {p}"
        )));
    }
    let un = u / scale.powf(1.0 / p);
    let vn = v / scale.powf(1.0 / q);
    let tn = solve_normalized(pair, un, vn)?;
    let t = scale * tn;

    let residual = t_residual(pair, u, v, t);
    if residual > T_REL_TOL {
        return Err(Error::NoConvergence {
            what: "implicit t equation",
            iterations: NEWTON_MAX_ITER,
            residual,
        });
    }
    Ok(t)
}

fn solve_normalized(pair: ConjugatePair, u: f64, v: f64) -> Result<f64> {
    let (ku, kv) = coefficients(pair);
    let (p, q) = (pair.p(), pair.q());
    let f = |t: f64| {
        let a = t.powf(1.0 / q);
        let b = t.powf(1.0 / p);
        let value = t - ku * a * u - kv * b * v;
        let slope = 1.0 - ku * a * u / (q * t) - kv * b * v / (p * t);
        (value, slope)
    };
    // The single-variable roots (ku u)^p and (kv v)^q both sit below the
    // root, so their maximum is a lower bracket end.
    let lo = (ku * u).powf(p).max((kv * v).powf(q));
    let (f_lo, _) = f(lo);
    if f_lo.abs() <= 4.0 * f64::EPSILON * lo {
        return Ok(lo);
    }
    let mut lo = lo;
    while f(lo).0 > 0.0 {
        lo *= 0.5;
    }
    let mut hi = 2.0 * lo.max(f64::MIN_POSITIVE);
    let mut doublings = 0;
    while f(hi).0 <= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 2000 {
            return Err(Error::NoBracket("implicit t equation".into()));
        }
    }
    safeguarded_newton(f, |t| t, lo, hi, 1e-15, NEWTON_MAX_ITER)
}

/// Plus-branch Bellman function with gradient, Hessian and the auxiliary
/// quantities `S`, `α`, `β`, `τ`.
pub fn eval_bellman(pair: ConjugatePair, u: f64, v: f64) -> Result<BellmanPoint> {
    let t = solve_t(pair, u, v)?;
    let (u, v) = (u.abs(), v.abs());
    let (p, q) = (pair.p(), pair.q());
    let p_1p = p.powf(1.0 / p);
    let p_1q = p.powf(1.0 / q);
    let t_1q = t.powf(1.0 / q);
    let t_1p = t.powf(1.0 / p);

    let s = p_1p * t_1q * u + p_1q * t_1p * v;
    let alpha = p * p_1p * t_1q / s;
    let beta = q * p_1q * t_1p / s;
    let m = s / (p * q);
    let tau = alpha / beta;

    let value = p_1p / p * t_1q * u + p_1q / q * t_1p * v - u * v;
    // B_u/u = τ; B_v = v/τ + (p - q) t^(1/p) / p^(1/p). Both sums are
    // cancellation-free, unlike p^(1/p) t^(1/q) - v and p^(1/q) t^(1/p) - u.
    let b_u = tau * u;
    let b_v = v / tau + (p - q) * t_1p / p_1p;
    let b_uv_plus1 = p * t / s;

    Ok(BellmanPoint {
        branch: Branch::Plus,
        u,
        v,
        t,
        value,
        b_u,
        b_v,
        b_uu: m * alpha * alpha,
        b_uv_plus1,
        b_uv_minus1: b_uv_plus1 - 2.0,
        b_vv: m * beta * beta,
        tau,
        implicit: Some(ImplicitParts { s, alpha, beta }),
    })
}

/// Plus-branch value, extended by `B(0, 0) = 0`.
pub fn bellman_value(pair: ConjugatePair, u: f64, v: f64) -> Result<f64> {
    if u == 0.0 && v == 0.0 {
        return Ok(0.0);
    }
    eval_bellman(pair, u, v).map(|pt| pt.value)
}

/// `φ(u, v) = (p - 1)(|u|^p/p + |v|^q/q)`.
pub fn upper_obstacle(pair: ConjugatePair, u: f64, v: f64) -> f64 {
    let (p, q) = (pair.p(), pair.q());
    (p - 1.0) * (u.abs().powf(p) / p + v.abs().powf(q) / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(p: f64) -> ConjugatePair {
        ConjugatePair::from_p(p).unwrap()
    }

    #[test]
    fn t_at_p3_unit_point() {
        let t = solve_t(pair(3.0), 1.0, 1.0).unwrap();
        assert!((t - 3.0).abs() < 1e-12, "t = {t}");
    }

    #[test]
    fn t_on_the_axes() {
        let t = solve_t(pair(3.0), 0.0, 1.0).unwrap();
        assert!((t - 1.0 / 3f64.sqrt()).abs() < 1e-14);
        let t = solve_t(pair(2.0), 1.0, 0.0).unwrap();
        assert!((t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn origin_is_degenerate() {
        assert!(matches!(
            solve_t(pair(3.0), 0.0, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(eval_bellman(pair(3.0), 0.0, 0.0).is_err());
        assert_eq!(bellman_value(pair(3.0), 0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_inputs_rejected() {
        assert!(solve_t(pair(3.0), f64::NAN, 1.0).is_err());
        assert!(solve_t(pair(3.0), 1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn p3_unit_point_values() {
        let pt = eval_bellman(pair(3.0), 1.0, 1.0).unwrap();
        assert!((pt.value - 2.0).abs() < 1e-12);
        assert!((pt.tau - 2.0).abs() < 1e-12);
        assert!((pt.b_u - 2.0).abs() < 1e-12);
        assert!((pt.b_v - 2.0).abs() < 1e-12);
        // §7 closed-form Hessian at (1, 1): A = 3, B = 1/2, C = 3/4.
        assert!((pt.b_uu - 3.0).abs() < 1e-12);
        assert!((pt.b_uv() - 0.5).abs() < 1e-12);
        assert!((pt.b_vv - 0.75).abs() < 1e-12);
    }

    #[test]
    fn p3_on_u_axis() {
        let pt = eval_bellman(pair(3.0), 1.0, 0.0).unwrap();
        assert!((pt.value - 4.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn p2_is_the_half_square_norm() {
        // At p = q = 2 the implicit equation gives t = (u + v)^2 / 2 and
        // B = (u^2 + v^2) / 2.
        for &(u, v) in &[(1.0, 2.0), (0.3, 0.01), (5.0, 7.0)] {
            let pt = eval_bellman(pair(2.0), u, v).unwrap();
            assert!((pt.t - (u + v) * (u + v) / 2.0).abs() < 1e-12 * pt.t);
            assert!((pt.value - (u * u + v * v) / 2.0).abs() < 1e-12 * pt.value);
            assert!((pt.b_v - v).abs() < 1e-12 * (u + v));
        }
    }

    #[test]
    fn buab_expression_agrees_with_tau() {
        for &p in &[2.2, 3.0, 4.0, 6.0] {
            let pair = pair(p);
            for &(u, v) in &[(0.5, 2.0), (3.0, 0.2), (1.0, 1.0)] {
                let pt = eval_bellman(pair, u, v).unwrap();
                let buab = p.powf(1.0 / p) * pt.t.powf(1.0 / pair.q()) - v;
                assert!(
                    (buab / u - pt.tau).abs() < 1e-10 * pt.tau,
                    "p={p} ({u},{v})"
                );
            }
        }
    }

    #[test]
    fn symmetric_fold() {
        let a = eval_bellman(pair(3.0), -1.5, 2.0).unwrap();
        let b = eval_bellman(pair(3.0), 1.5, -2.0).unwrap();
        assert_eq!(a.value, b.value);
    }
}
