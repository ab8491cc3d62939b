//! Four-variable lift `𝐁(y) = B(|y₁|, |y₂|)` with `y₁, y₂ ∈ R²`.

mod certificate;
mod form;
mod scan;

use serde::Serialize;

use crate::bellman::{closed_p3_plus_point, eval_bellman, BellmanPoint};
use crate::error::{Error, Result};
use crate::pair::ConjugatePair;

pub use certificate::{
    certificate_p3, check_tau_condition, key_inequality_pair, orth_pair_from,
    orthogonality_identity, CertificateBreakdown, KeyInequality, OrthogonalityCheck,
    TauConditionReport,
};
pub use form::{decompose_form, QuadraticFormDecomposition};
pub use scan::{certify_csv, certify_scan, CertifyRow, CertifySummary, CERTIFY_CSV_HEADER};

pub type Vec4 = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftedPoint {
    pub p: f64,
    /// `(y₁₁, y₁₂, y₂₁, y₂₂)`.
    pub y: Vec4,
    pub x1: f64,
    pub x2: f64,
    pub base: BellmanPoint,
}

fn norms(y: &Vec4) -> Result<(f64, f64)> {
    let x1 = y[0].hypot(y[1]);
    let x2 = y[2].hypot(y[3]);
    if !(x1 > 0.0 && x2 > 0.0) || !x1.is_finite() || !x2.is_finite() {
        return Err(Error::Domain(format!(
            "lifted point needs both pair norms positive, got x1 = {x1}, x2 = {x2}"
        )));
    }
    Ok((x1, x2))
}

impl LiftedPoint {
    /// Lift of an arbitrary base evaluator `(x1, x2) -> BellmanPoint`.
    pub fn with_base<F>(p: f64, y: Vec4, base: F) -> Result<Self>
    where
        F: FnOnce(f64, f64) -> Result<BellmanPoint>,
    {
        let (x1, x2) = norms(&y)?;
        Ok(Self {
            p,
            y,
            x1,
            x2,
            base: base(x1, x2)?,
        })
    }

    /// Lift of the implicit plus branch.
    pub fn plus(pair: ConjugatePair, y: Vec4) -> Result<Self> {
        Self::with_base(pair.p(), y, |u, v| eval_bellman(pair, u, v))
    }

    /// Lift of the explicit `p = 3` plus branch.
    pub fn closed_p3(y: Vec4) -> Result<Self> {
        Self::with_base(3.0, y, |u, v| Ok(closed_p3_plus_point(u, v)))
    }

    /// `P_i = <y_i, dy_i> / x_i`.
    pub fn projections(&self, dy: &Vec4) -> (f64, f64) {
        let y = &self.y;
        (
            (y[0] * dy[0] + y[1] * dy[1]) / self.x1,
            (y[2] * dy[2] + y[3] * dy[3]) / self.x2,
        )
    }

    /// `R_i = (y_i2 dy_i1 - y_i1 dy_i2) / x_i`, so `|dy_i|² = P_i² + R_i²`.
    pub fn rotations(&self, dy: &Vec4) -> (f64, f64) {
        let y = &self.y;
        (
            (y[1] * dy[0] - y[0] * dy[1]) / self.x1,
            (y[3] * dy[2] - y[2] * dy[3]) / self.x2,
        )
    }
}

/// `d²𝐁(dy)`: the base Hessian on the radial projections plus
/// `(B_{x_i}/x_i)(|dy_i|² - P_i²)` for each block. The tangential part is
/// taken as `R_i²` to avoid the subtraction.
pub fn lifted_hessian_apply(point: &LiftedPoint, dy: &Vec4) -> f64 {
    let b = &point.base;
    let (p1, p2) = point.projections(dy);
    let (r1, r2) = point.rotations(dy);
    b.b_uu * p1 * p1
        + 2.0 * b.b_uv() * p1 * p2
        + b.b_vv * p2 * p2
        + b.b_u / point.x1 * r1 * r1
        + b.b_v / point.x2 * r2 * r2
}

/// Central second difference of `f` along `dy` with step `h·min(x₁, x₂)/|dy|`.
pub fn fd_second_directional<F>(f: F, y: &Vec4, dy: &Vec4, h: f64) -> Result<f64>
where
    F: Fn(&Vec4) -> Result<f64>,
{
    let nd = norm4(dy);
    if nd == 0.0 {
        return Ok(0.0);
    }
    let (x1, x2) = norms(y)?;
    let step = h * x1.min(x2) / nd;
    let plus = f(&shift(y, dy, step))?;
    let minus = f(&shift(y, dy, -step))?;
    let mid = f(y)?;
    Ok((plus - 2.0 * mid + minus) / (step * step))
}

fn shift(y: &Vec4, dy: &Vec4, s: f64) -> Vec4 {
    std::array::from_fn(|i| y[i] + s * dy[i])
}

pub fn norm4(x: &Vec4) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `∇𝐁(y) = (B_u y₁/x₁, B_v y₂/x₂)`.
pub fn lifted_gradient(point: &LiftedPoint) -> Vec4 {
    let (gu, gv) = (point.base.b_u / point.x1, point.base.b_v / point.x2);
    let y = &point.y;
    [gu * y[0], gu * y[1], gv * y[2], gv * y[3]]
}

/// Sum of the absolute values of the terms of `d²𝐁(dy)`, the scale used for
/// relative finite-difference errors.
pub fn form_scale(point: &LiftedPoint, dy: &Vec4) -> f64 {
    let b = &point.base;
    let (p1, p2) = point.projections(dy);
    let (r1, r2) = point.rotations(dy);
    b.b_uu.abs() * p1 * p1
        + 2.0 * (b.b_uv() * p1 * p2).abs()
        + b.b_vv.abs() * p2 * p2
        + (b.b_u / point.x1).abs() * r1 * r1
        + (b.b_v / point.x2).abs() * r2 * r2
}

/// Relative gap between the analytic lifted form and the central difference
/// of `<∇𝐁(y + s dy), dy>` at `s = 0`, step `h·min(x₁, x₂)/|dy|`.
/// Differencing the analytic gradient keeps the check accurate where `x₁`
/// and `x₂` differ by orders of magnitude.
pub fn fd_error<F>(point: &LiftedPoint, dy: &Vec4, base: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<BellmanPoint>,
{
    let nd = norm4(dy);
    let scale = form_scale(point, dy);
    if nd == 0.0 || scale == 0.0 {
        return Ok(0.0);
    }
    let step = 1e-4 * point.x1.min(point.x2) / nd;
    let directional = |s: f64| -> Result<f64> {
        let shifted = LiftedPoint::with_base(point.p, shift(&point.y, dy, s), &base)?;
        let g = lifted_gradient(&shifted);
        Ok((0..4).map(|i| g[i] * dy[i]).sum())
    };
    let fd = (directional(step)? - directional(-step)?) / (2.0 * step);
    Ok((lifted_hessian_apply(point, dy) - fd).abs() / scale)
}

/// Same comparison against the second difference of the lifted value.
pub fn fd_value_error<F>(point: &LiftedPoint, dy: &Vec4, value: F) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let scale = form_scale(point, dy);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let fd = fd_second_directional(
        |y| value(y[0].hypot(y[1]), y[2].hypot(y[3])),
        &point.y,
        dy,
        1e-4,
    )?;
    Ok((lifted_hessian_apply(point, dy) - fd).abs() / scale)
}
