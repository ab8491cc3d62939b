use serde::Serialize;

use super::Branch;
use crate::error::{Error, Result};
use crate::pair::ConjugatePair;
use crate::roots::bisect;

/// Constants of one solution of the free-boundary system.
///
/// `t₁ = C₁ t^(1/q)`-type coefficients, the saturation curve
/// `v^q = γ^q u^p`, and the curve parameters `t^(1/q) ∝ a v`, `t^(1/p) ∝ b u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PogorelovSolution {
    pub branch: Branch,
    pub p: f64,
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
    pub gamma: f64,
    /// `γ^(q-1)`.
    pub delta: f64,
    pub a: f64,
    pub b: f64,
    /// `2 + C₂/C₁²`; minus branch only.
    pub improvement_c: Option<f64>,
}

impl PogorelovSolution {
    /// `2√2 / √c` for the minus branch.
    pub fn overall_constant(&self) -> Option<f64> {
        self.improvement_c.map(|c| 2.0 * 2f64.sqrt() / c.sqrt())
    }

    /// Relative residuals of the defining relations, by label.
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        let (p, q) = (self.p, self.q);
        let (c1, c2, g, a, b) = (self.c1, self.c2, self.gamma, self.a, self.b);
        let rel = |lhs: f64, rhs: f64| (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        match self.branch {
            Branch::Plus => vec![
                // On Γ with u = 1, v = γ^(q-1): the quotient form of the
                // tangency condition is (pC₁a - 1) γ^q = qC₂b - 1.
                ("G2", rel((p * c1 * a - 1.0) * g.powf(q), q * c2 * b - 1.0)),
                ("G3", rel(a.powf(q) / b.powf(p), 1.0 / g.powf(q))),
                ("G4", rel(a * b, p / q * c1 * a + q / p * c2 * b)),
                (
                    "G5",
                    rel(
                        c1 * a + c2 * b - 1.0,
                        (p - 1.0) * (1.0 / (p * g) + g.powf(q - 1.0) / q),
                    ),
                ),
                ("G6", rel(c1 * c2, 1.0 / q)),
            ],
            Branch::Minus => vec![
                ("N18", rel(c1 * c2, -p)),
                (
                    "N23",
                    rel(
                        a.powf(q) * c2.powf(q) / (b.abs().powf(p) * c1.abs().powf(p)),
                        1.0 / g.powf(q),
                    ),
                ),
                (
                    "N24",
                    rel(
                        (g / p - 1.0 / q).powf(q) * c2.powf(q),
                        (g.powf(q - 1.0) / q - 1.0 / p).powf(p) * c1.abs().powf(p),
                    ),
                ),
                ("N26", rel(a * b, a / q + b / p)),
                ("N28", rel(g.powf(q - 1.0) - (q - 1.0) * g, q - 2.0)),
            ],
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().into_iter().fold(0.0, |m, (_, r)| m.max(r))
    }
}

/// The explicit plus-branch solution `γ = 1`, `C₁ = p^(1/p)/p`,
/// `C₂ = p^(1/q)/q`, `a = qC₂`, `b = pC₁`.
pub fn solve_pogorelov_plus(pair: ConjugatePair) -> PogorelovSolution {
    let (p, q) = (pair.p(), pair.q());
    let c1 = p.powf(1.0 / p) / p;
    let c2 = p.powf(1.0 / q) / q;
    PogorelovSolution {
        branch: Branch::Plus,
        p,
        q,
        c1,
        c2,
        gamma: 1.0,
        delta: 1.0,
        a: q * c2,
        b: p * c1,
        improvement_c: None,
    }
}

/// Sign scan of `h(γ) = 2√γ + 1 - 4 + 1/γ` on `(0, γ_max]`, the `p = 3`
/// reduction of the plus-branch system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaScan {
    pub step: f64,
    pub gamma_max: f64,
    pub sign_changes: usize,
    pub min_value: f64,
    pub argmin: f64,
    /// Smallest `h` outside `|γ - 1| <= 0.05`.
    pub min_away_from_one: f64,
}

impl GammaScan {
    /// `γ = 1` is the only positive zero: `h` never changes sign, its minimum
    /// sits next to `γ = 1` and is zero there, and `h > 0` elsewhere.
    pub fn unique_at_one(&self) -> bool {
        self.sign_changes == 0
            && (self.argmin - 1.0).abs() <= self.step
            && self.min_value.abs() <= 1e-6
            && self.min_away_from_one > 0.0
    }
}

/// Scans `h(γ) = 2√γ - 3 + 1/γ`. Note `γ h(γ) = (√γ - 1)²(2√γ + 1)`, so the
/// zero at `γ = 1` is double and a bare sign-change count cannot see it.
pub fn p3_plus_gamma_scan(step: f64, gamma_max: f64) -> GammaScan {
    let h = |g: f64| 2.0 * g.sqrt() + 1.0 - 4.0 + 1.0 / g;
    let n = (gamma_max / step).round() as usize;
    let mut sign_changes = 0;
    let mut min_value = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut min_away = f64::INFINITY;
    let mut prev: Option<f64> = None;
    for i in 1..=n {
        let g = step * i as f64;
        let value = h(g);
        if let Some(pv) = prev {
            if pv.signum() != value.signum() && pv != 0.0 && value != 0.0 {
                sign_changes += 1;
            }
        }
        if value < min_value {
            min_value = value;
            argmin = g;
        }
        if (g - 1.0).abs() > 0.05 {
            min_away = min_away.min(value);
        }
        prev = Some(value);
    }
    GammaScan {
        step,
        gamma_max,
        sign_changes,
        min_value,
        argmin,
        min_away_from_one: min_away,
    }
}

/// Minus-branch constants for `p > 2`.
///
/// Solves `δ^(p-1) - (p-1)δ + 2 - p = 0` for `δ > 1` by bisection, then
/// `γ = δ^(p-1)`, `C₂` from the closed expression, `C₁ = -p/C₂`.
pub fn solve_pogorelov_minus(pair: ConjugatePair) -> Result<PogorelovSolution> {
    let (p, q) = (pair.p(), pair.q());
    if p <= 2.0 {
        return Err(Error::BranchDegenerate(p));
    }
    let g = |d: f64| d.powf(p - 1.0) - (p - 1.0) * d + 2.0 - p;
    let lo = 1.0 + 1e-9;
    if g(lo) >= 0.0 {
        return Err(Error::NoBracket(format!("delta equation at p = {p}")));
    }
    let mut hi = 2.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoBracket(format!("delta equation at p = {p}")));
        }
    }
    let delta = bisect(g, lo, hi, 0.0)?;
    let gamma = delta.powf(p - 1.0);
    let c2 = (p * ((p - 1.0) * delta - 1.0).powf(p - 1.0) / (gamma - (p - 1.0))).powf(1.0 / p);
    let c1 = -p / c2;
    let a = 1.0 / p - 1.0 / (q * gamma);
    let b = 1.0 / p - delta / q;
    Ok(PogorelovSolution {
        branch: Branch::Minus,
        p,
        q,
        c1,
        c2,
        gamma,
        delta,
        a,
        b,
        improvement_c: Some(2.0 + c2 / (c1 * c1)),
    })
}
