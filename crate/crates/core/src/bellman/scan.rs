use rayon::prelude::*;
use serde::Serialize;

use super::{
    eval_bellman, eval_closed_p3_minus, solve_pogorelov_minus, upper_obstacle, BellmanPoint, Branch,
};
use crate::error::{Error, Result};
use crate::format::g10;
use crate::grid::GridSpec;
use crate::pair::ConjugatePair;

pub const GRID_CSV_HEADER: &str = "u,v,t,B,B_u,B_v,tau,det_residual,bound_slack";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub point: BellmanPoint,
    pub det_residual: f64,
    /// `min(B, φ - B) / φ`; negative means the bound chain `0 <= B <= φ` fails.
    pub bound_slack: f64,
    pub identity_residual: Option<f64>,
}

impl GridRow {
    pub fn csv_line(&self) -> String {
        let pt = &self.point;
        [
            pt.u,
            pt.v,
            pt.t,
            pt.value,
            pt.b_u,
            pt.b_v,
            pt.tau,
            self.det_residual,
            self.bound_slack,
        ]
        .iter()
        .map(|&x| g10(x))
        .collect::<Vec<_>>()
        .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPoint {
    pub metric: &'static str,
    pub u: f64,
    pub v: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub branch: Branch,
    pub p: f64,
    pub points: usize,
    pub max_det_residual: f64,
    pub min_bound_slack: f64,
    /// Plus branch only.
    pub max_identity_residual: Option<f64>,
    pub worst_points: Vec<WorstPoint>,
}

impl GridSummary {
    pub fn passes(&self, det_tol: f64, identity_tol: f64) -> bool {
        self.max_det_residual <= det_tol
            && self.min_bound_slack >= -1e-12
            && self.max_identity_residual.is_none_or(|r| r <= identity_tol)
    }
}

/// Evaluates a branch over the grid in parallel. Rows come back in grid
/// order regardless of scheduling.
pub fn scan_grid(
    pair: ConjugatePair,
    branch: Branch,
    grid: &GridSpec,
) -> Result<(Vec<GridRow>, GridSummary)> {
    grid.validate()?;
    let minus = match branch {
        Branch::Plus => None,
        Branch::Minus if pair.is_p3() => Some(solve_pogorelov_minus(pair)?),
        Branch::Minus => {
            return Err(Error::Usage(format!(
                "the minus-branch surface is only available at p = 3, got p = {}",
                pair.p()
            )))
        }
    };
    let (p, q) = (pair.p(), pair.q());
    let rows: Vec<GridRow> = grid
        .points()
        .par_iter()
        .map(|&(u, v)| -> Result<GridRow> {
            let point = match &minus {
                None => eval_bellman(pair, u, v)?,
                Some(sol) => eval_closed_p3_minus(u, v, sol)?,
            };
            let phi = upper_obstacle(pair, u, v);
            Ok(GridRow {
                point,
                det_residual: point.degeneracy_residual().abs(),
                bound_slack: point.value.min(phi - point.value) / phi,
                identity_residual: point.identity_residual(p, q),
            })
        })
        .collect::<Result<_>>()?;
    let summary = summarize(branch, p, &rows);
    Ok((rows, summary))
}

fn summarize(branch: Branch, p: f64, rows: &[GridRow]) -> GridSummary {
    let worst = |metric: &'static str, key: &dyn Fn(&GridRow) -> f64| {
        rows.iter()
            .map(|r| (key(r), r))
            .fold(None::<(f64, &GridRow)>, |best, (k, r)| match best {
                Some((bk, _)) if bk >= k => best,
                _ => Some((k, r)),
            })
            .map(|(k, r)| WorstPoint {
                metric,
                u: r.point.u,
                v: r.point.v,
                value: k,
            })
    };
    let det = worst("det_residual", &|r| r.det_residual);
    let slack = worst("bound_slack", &|r| -r.bound_slack).map(|w| WorstPoint {
        value: -w.value,
        ..w
    });
    let identity = worst("identity_residual", &|r| {
        r.identity_residual.unwrap_or(f64::NEG_INFINITY)
    })
    .filter(|w| w.value.is_finite());
    GridSummary {
        branch,
        p,
        points: rows.len(),
        max_det_residual: det.as_ref().map_or(0.0, |w| w.value),
        min_bound_slack: slack.as_ref().map_or(f64::INFINITY, |w| w.value),
        max_identity_residual: identity.as_ref().map(|w| w.value),
        worst_points: [det, slack, identity].into_iter().flatten().collect(),
    }
}

pub fn grid_csv(rows: &[GridRow]) -> String {
    let mut out = String::from(GRID_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}
