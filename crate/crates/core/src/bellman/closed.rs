use super::{BellmanPoint, Branch, PogorelovSolution};
use crate::error::{Error, Result};

/// `(2/9)((u² + 3v)^(3/2) + |u|³)`, the plus branch at `p = 3`.
pub fn eval_closed_p3_plus(u: f64, v: f64) -> f64 {
    let (u, v) = (u.abs(), v.abs());
    let r = (u * u + 3.0 * v).sqrt();
    2.0 / 9.0 * (r * r * r + u * u * u)
}

fn origin_point(branch: Branch) -> BellmanPoint {
    BellmanPoint {
        branch,
        u: 0.0,
        v: 0.0,
        t: 0.0,
        value: 0.0,
        b_u: f64::NAN,
        b_v: f64::NAN,
        b_uu: f64::NAN,
        b_uv_plus1: f64::NAN,
        b_uv_minus1: f64::NAN,
        b_vv: f64::NAN,
        tau: f64::NAN,
        implicit: None,
    }
}

/// Plus branch at `p = 3` with the explicit derivatives of the closed form.
///
/// Independent of the implicit solver; `t` comes from the quadratic in
/// `s = t^(1/3)`. At the origin only the value (zero) is defined.
pub fn closed_p3_plus_point(u: f64, v: f64) -> BellmanPoint {
    let (u, v) = (u.abs(), v.abs());
    if u == 0.0 && v == 0.0 {
        return origin_point(Branch::Plus);
    }
    let r = (u * u + 3.0 * v).sqrt();
    let c1 = 3f64.cbrt() / 3.0;
    let c2 = 2.0 / 3.0 * 3f64.cbrt().powi(2);
    let s = c1 * u + (c1 * c1 * u * u + 0.5 * c2 * v).sqrt();
    let b_uv = u / r;
    BellmanPoint {
        branch: Branch::Plus,
        u,
        v,
        t: s * s * s,
        value: eval_closed_p3_plus(u, v),
        b_u: 2.0 / 3.0 * u * (r + u),
        b_v: r,
        b_uu: 2.0 * (r + u) * (r + u) / (3.0 * r),
        b_uv_plus1: b_uv + 1.0,
        // u/r - 1 rewritten without cancellation.
        b_uv_minus1: -3.0 * v / (r * (r + u)),
        b_vv: 3.0 / (2.0 * r),
        tau: 2.0 / 3.0 * (r + u),
        implicit: None,
    }
}

/// Minus branch at `p = 3`:
/// `B = (2/27)(C₁²u² + 3C₂v)^(3/2) + (2/27)C₁³u³` with its derivatives and
/// `τ = √(B_uu / B_vv)`.
pub fn eval_closed_p3_minus(u: f64, v: f64, sol: &PogorelovSolution) -> Result<BellmanPoint> {
    if sol.branch != Branch::Minus {
        return Err(Error::Usage(
            "eval_closed_p3_minus needs a minus-branch solution".into(),
        ));
    }
    if (sol.p - 3.0).abs() > 1e-12 {
        return Err(Error::Usage(format!(
            "the minus-branch surface is only available at p = 3, got p = {}",
            sol.p
        )));
    }
    let (u, v) = (u.abs(), v.abs());
    if u == 0.0 && v == 0.0 {
        return Ok(origin_point(Branch::Minus));
    }
    let c2 = sol.c2;
    let k = sol.c1.abs();
    let r = (k * k * u * u + 3.0 * c2 * v).sqrt();
    // R + C₁u = R - ku = 3C₂v / (R + ku).
    let gap = 3.0 * c2 * v / (r + k * u);
    let value = 2.0 / 27.0 * gap * (r * r + r * k * u + k * k * u * u);
    // |C₁|C₂ = 3 up to rounding; keep the ratio explicit in B_uv.
    let ratio = k * c2 / 3.0;
    let b_uv = k * k * c2 * u / (3.0 * r);
    let b_uv_minus1 = -ratio * gap / r + (ratio - 1.0);
    let s = gap / 3.0;
    Ok(BellmanPoint {
        branch: Branch::Minus,
        u,
        v,
        t: s * s * s,
        value,
        b_u: 2.0 / 9.0 * k * k * u * gap,
        b_v: c2 / 3.0 * r,
        b_uu: 2.0 / 9.0 * k * k * gap * gap / r,
        b_uv_plus1: b_uv + 1.0,
        b_uv_minus1,
        b_vv: c2 * c2 / (2.0 * r),
        tau: 2.0 / 3.0 * (k / c2) * gap,
        implicit: None,
    })
}
