//! Two-variable Bellman functions.
//!
//! The plus branch is the implicit family `B_q(u, v) = A(u, v) - uv` whose
//! shifted Hessian `[[B_uu, B_uv + 1], [B_uv + 1, B_vv]]` is degenerate
//! everywhere in the open first quadrant. The minus branch keeps
//! `B_uv - 1` in the degenerate matrix instead; it is only carried to a full
//! surface at `p = 3`.

mod closed;
mod implicit;
mod pogorelov;
mod saturation;
mod scan;

use serde::{Deserialize, Serialize};

pub use closed::{closed_p3_plus_point, eval_closed_p3_minus, eval_closed_p3_plus};
pub use implicit::{bellman_value, eval_bellman, solve_t, t_residual, upper_obstacle};
pub use pogorelov::{
    p3_plus_gamma_scan, solve_pogorelov_minus, solve_pogorelov_plus, GammaScan, PogorelovSolution,
};
pub use saturation::{check_saturation, SaturationReport};
pub use scan::{grid_csv, scan_grid, GridRow, GridSummary, WorstPoint, GRID_CSV_HEADER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Branch {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "plus" => Ok(Branch::Plus),
            "minus" => Ok(Branch::Minus),
            other => Err(crate::Error::Usage(format!(
                "branch must be plus or minus, got {other:?}"
            ))),
        }
    }
}

/// Quantities that only exist for the implicit representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplicitParts {
    /// `S = p^(1/p) t^(1/q) u + p^(1/q) t^(1/p) v`.
    pub s: f64,
    /// `t'_u / t`.
    pub alpha: f64,
    /// `t'_v / t`.
    pub beta: f64,
}

/// A Bellman function evaluated at one point of the closed first quadrant,
/// with all derivatives from analytic formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellmanPoint {
    pub branch: Branch,
    pub u: f64,
    pub v: f64,
    pub t: f64,
    pub value: f64,
    pub b_u: f64,
    pub b_v: f64,
    pub b_uu: f64,
    /// `B_uv + 1`, the mixed entry of the plus-branch degenerate matrix.
    pub b_uv_plus1: f64,
    /// `B_uv - 1`, the mixed entry of the minus-branch degenerate matrix.
    pub b_uv_minus1: f64,
    pub b_vv: f64,
    pub tau: f64,
    pub implicit: Option<ImplicitParts>,
}

impl BellmanPoint {
    pub fn b_uv(&self) -> f64 {
        match self.branch {
            Branch::Plus => self.b_uv_plus1 - 1.0,
            Branch::Minus => self.b_uv_minus1 + 1.0,
        }
    }

    /// Determinant of the branch's shifted Hessian relative to `B_uu B_vv`.
    pub fn degeneracy_residual(&self) -> f64 {
        let mixed = match self.branch {
            Branch::Plus => self.b_uv_plus1,
            Branch::Minus => self.b_uv_minus1,
        };
        let diag = self.b_uu * self.b_vv;
        (diag - mixed * mixed) / diag.abs().max(f64::MIN_POSITIVE)
    }

    /// Residual of `B_v/v - β/α + 2/τ - p/τ - (p/q - 1) u/v`, relative to the
    /// largest term. `None` off the implicit branch or on the axis `v = 0`.
    pub fn identity_residual(&self, p: f64, q: f64) -> Option<f64> {
        let parts = self.implicit?;
        if self.v <= 0.0 {
            return None;
        }
        let terms = [
            self.b_v / self.v,
            -parts.beta / parts.alpha,
            2.0 / self.tau,
            -p / self.tau,
            -(p / q - 1.0) * self.u / self.v,
        ];
        let sum: f64 = terms.iter().sum();
        let scale = terms.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        Some(sum.abs() / scale)
    }
}
