use serde::Serialize;

use super::{lifted_hessian_apply, LiftedPoint, Vec4};
use crate::bellman::{closed_p3_plus_point, eval_closed_p3_minus, solve_pogorelov_minus, Branch};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::pair::ConjugatePair;

/// The four nonnegative pieces of `d²𝐁(dy)` for the `p = 3` plus branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateBreakdown {
    /// `τ |dy₁|²`.
    pub term_tau: f64,
    /// `|dy₂|² / τ`.
    pub term_inv_tau: f64,
    /// `(3τ / 4x₂) R₂²`.
    pub term_rotational: f64,
    /// `(τ x₁ / √(x₁² + 3x₂)) (P₁ + P₂/τ)²`.
    pub term_square: f64,
}

impl CertificateBreakdown {
    pub fn total(&self) -> f64 {
        self.term_tau + self.term_inv_tau + self.term_rotational + self.term_square
    }

    pub fn all_nonnegative(&self) -> bool {
        [
            self.term_tau,
            self.term_inv_tau,
            self.term_rotational,
            self.term_square,
        ]
        .iter()
        .all(|&t| t >= 0.0)
    }
}

pub fn certificate_p3(point: &LiftedPoint, dy: &Vec4) -> Result<CertificateBreakdown> {
    if point.base.branch != Branch::Plus || (point.p - 3.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "certificate needs the p = 3 plus branch, got p = {} ({})",
            point.p, point.base.branch
        )));
    }
    let tau = point.base.tau;
    let (x1, x2) = (point.x1, point.x2);
    let (p1, p2) = point.projections(dy);
    let (_, r2) = point.rotations(dy);
    let dy1 = dy[0] * dy[0] + dy[1] * dy[1];
    let dy2 = dy[2] * dy[2] + dy[3] * dy[3];
    let sq = p1 + p2 / tau;
    Ok(CertificateBreakdown {
        term_tau: tau * dy1,
        term_inv_tau: dy2 / tau,
        term_rotational: 3.0 * tau / (4.0 * x2) * r2 * r2,
        term_square: tau * x1 / (x1 * x1 + 3.0 * x2).sqrt() * sq * sq,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauConditionReport {
    pub branch: Branch,
    /// Right-hand constant: 3 on the plus branch, `2 + C₂/C₁²` on the minus.
    pub c: f64,
    pub points: usize,
    pub min_slack: f64,
    pub worst_at: (f64, f64),
}

impl TauConditionReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_slack >= -tol
    }
}

/// Minimum over the grid of `3τ/(4x₂) + 2/τ - 3/τ` (plus branch) or
/// `3C₂τ/(4C₁²x₂) + 2/τ - c/τ` with `c = 2 + C₂/C₁²` (minus branch), both
/// at `p = 3`.
pub fn check_tau_condition(grid: &GridSpec, branch: Branch) -> Result<TauConditionReport> {
    grid.validate()?;
    let pair = ConjugatePair::from_p(3.0)?;
    let minus = match branch {
        Branch::Plus => None,
        Branch::Minus => Some(solve_pogorelov_minus(pair)?),
    };
    let c = minus.map_or(3.0, |s| s.improvement_c.unwrap_or(f64::NAN));
    let mut report = TauConditionReport {
        branch,
        c,
        points: 0,
        min_slack: f64::INFINITY,
        worst_at: (f64::NAN, f64::NAN),
    };
    for (x1, x2) in grid.points() {
        let slack = match &minus {
            None => {
                let tau = closed_p3_plus_point(x1, x2).tau;
                3.0 * tau / (4.0 * x2) + 2.0 / tau - 3.0 / tau
            }
            Some(sol) => {
                let tau = eval_closed_p3_minus(x1, x2, sol)?.tau;
                3.0 * sol.c2 * tau / (4.0 * sol.c1 * sol.c1 * x2) + 2.0 / tau - c / tau
            }
        };
        if slack < report.min_slack || slack.is_nan() {
            report.min_slack = slack;
            report.worst_at = (x1, x2);
        }
        report.points += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub xi1: f64,
    pub xi2: f64,
}

/// Checks `d²𝐁(dy) + d²𝐁(dy') >= 2√(p/2) ξ₁ ξ₂` for a direction pair whose
/// second blocks satisfy `dy₂₁dy₂₂ + dy'₂₁dy'₂₂ = 0` and
/// `dy₂₁² + dy'₂₁² = dy₂₂² + dy'₂₂²`.
pub fn key_inequality_pair(
    point: &LiftedPoint,
    dy: &Vec4,
    dy_prime: &Vec4,
) -> Result<KeyInequality> {
    let xi1 =
        (dy[0] * dy[0] + dy[1] * dy[1] + dy_prime[0] * dy_prime[0] + dy_prime[1] * dy_prime[1])
            .sqrt();
    let xi2_sq =
        dy[2] * dy[2] + dy[3] * dy[3] + dy_prime[2] * dy_prime[2] + dy_prime[3] * dy_prime[3];
    let tol = 1e-12 * xi2_sq.max(f64::MIN_POSITIVE);
    let cross = dy[2] * dy[3] + dy_prime[2] * dy_prime[3];
    if cross.abs() > tol {
        return Err(Error::Precondition(format!(
            "orthogonality dy21*dy22 + dy'21*dy'22 = 0 violated: {cross:e}"
        )));
    }
    let balance =
        dy[2] * dy[2] + dy_prime[2] * dy_prime[2] - dy[3] * dy[3] - dy_prime[3] * dy_prime[3];
    if balance.abs() > tol {
        return Err(Error::Precondition(format!(
            "equal norms dy21^2 + dy'21^2 = dy22^2 + dy'22^2 violated: {balance:e}"
        )));
    }
    let lhs = lifted_hessian_apply(point, dy) + lifted_hessian_apply(point, dy_prime);
    let xi2 = xi2_sq.sqrt();
    let rhs = 2.0 * (point.p / 2.0).sqrt() * xi1 * xi2;
    Ok(KeyInequality {
        lhs,
        rhs,
        slack: lhs - rhs,
        xi1,
        xi2,
    })
}

/// Completes `dy` to a constrained pair: `dy'` takes `first` as its first
/// block and the 90° rotation (or, with `reflect`, the reflection) of
/// `dy`'s second block.
pub fn orth_pair_from(dy: Vec4, first: [f64; 2], reflect: bool) -> (Vec4, Vec4) {
    let (a, b) = (dy[2], dy[3]);
    let second = if reflect { [b, -a] } else { [-b, a] };
    (dy, [first[0], first[1], second[0], second[1]])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthogonalityCheck {
    pub lhs: f64,
    pub rhs: f64,
}

/// `V²u₁² + U²v₁² + V²u₂² + U²v₂² = ½(U² + V²)(|u|² + |v|²)` for `u ⟂ v`,
/// `|u| = |v|`.
pub fn orthogonality_identity(
    big_u: f64,
    big_v: f64,
    u: [f64; 2],
    v: [f64; 2],
) -> Result<OrthogonalityCheck> {
    let nu = u[0] * u[0] + u[1] * u[1];
    let nv = v[0] * v[0] + v[1] * v[1];
    let tol = 1e-12 * nu.max(nv).max(f64::MIN_POSITIVE);
    let dot = u[0] * v[0] + u[1] * v[1];
    if dot.abs() > tol {
        return Err(Error::Precondition(format!("u.v = 0 violated: {dot:e}")));
    }
    if (nu - nv).abs() > tol {
        return Err(Error::Precondition(format!(
            "|u| = |v| violated: {nu} vs {nv}"
        )));
    }
    let (uu, vv) = (big_u * big_u, big_v * big_v);
    Ok(OrthogonalityCheck {
        lhs: vv * u[0] * u[0] + uu * v[0] * v[0] + vv * u[1] * u[1] + uu * v[1] * v[1],
        rhs: 0.5 * (uu + vv) * (nu + nv),
    })
}
