use serde::Serialize;

use super::{eval_bellman, upper_obstacle};
use crate::error::Result;
use crate::grid::GridSpec;
use crate::pair::ConjugatePair;

/// Free-boundary check for the plus branch (`γ = 1`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationReport {
    pub p: f64,
    pub curve_points: usize,
    pub off_curve_points: usize,
    /// `max |B - φ| / φ` on `v^q = u^p`.
    pub max_value_gap: f64,
    pub worst_value_at: (f64, f64),
    /// `max |B_u φ_v - B_v φ_u| / (|B_u φ_v| + |B_v φ_u|)` on the curve.
    pub max_tangent_gap: f64,
    pub worst_tangent_at: (f64, f64),
    /// `min (φ - B) / φ` over the grid.
    pub min_off_curve_slack: f64,
    pub worst_off_curve_at: (f64, f64),
}

impl SaturationReport {
    pub fn passes(&self, curve_tol: f64, off_tol: f64) -> bool {
        self.max_value_gap <= curve_tol
            && self.max_tangent_gap <= curve_tol
            && self.min_off_curve_slack >= -off_tol
    }
}

/// Samples the saturation curve at the grid's `u` nodes (`v = u^(p-1)`) and
/// the obstacle inequality on the full grid.
pub fn check_saturation(pair: ConjugatePair, grid: &GridSpec) -> Result<SaturationReport> {
    grid.validate()?;
    let (p, q) = (pair.p(), pair.q());
    let mut report = SaturationReport {
        p,
        curve_points: 0,
        off_curve_points: 0,
        max_value_gap: 0.0,
        worst_value_at: (f64::NAN, f64::NAN),
        max_tangent_gap: 0.0,
        worst_tangent_at: (f64::NAN, f64::NAN),
        min_off_curve_slack: f64::INFINITY,
        worst_off_curve_at: (f64::NAN, f64::NAN),
    };
    for u in grid.axis() {
        let v = u.powf(p - 1.0);
        let pt = eval_bellman(pair, u, v)?;
        let phi = upper_obstacle(pair, u, v);
        let gap = (pt.value - phi).abs() / phi;
        if gap >= report.max_value_gap {
            report.max_value_gap = gap;
            report.worst_value_at = (u, v);
        }
        let phi_u = (p - 1.0) * u.powf(p - 1.0);
        let phi_v = (p - 1.0) * v.powf(q - 1.0);
        let (lhs, rhs) = (pt.b_u * phi_v, pt.b_v * phi_u);
        let tangent = (lhs - rhs).abs() / (lhs.abs() + rhs.abs());
        if tangent >= report.max_tangent_gap {
            report.max_tangent_gap = tangent;
            report.worst_tangent_at = (u, v);
        }
        report.curve_points += 1;
    }
    for (u, v) in grid.points() {
        let b = eval_bellman(pair, u, v)?.value;
        let phi = upper_obstacle(pair, u, v);
        let slack = (phi - b) / phi;
        if slack < report.min_off_curve_slack {
            report.min_off_curve_slack = slack;
            report.worst_off_curve_at = (u, v);
        }
        report.off_curve_points += 1;
    }
    Ok(report)
}
