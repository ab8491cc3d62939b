use serde::Serialize;

use crate::error::{Error, Result};

/// `Q = A x² + 2B xy + C y²` written as
/// `D(τx² + y²/τ) + |B|τ(x + sign(B) y/τ)²` with `D = √(AC) - |B|`, `τ = √(A/C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFormDecomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub tau: f64,
}

impl QuadraticFormDecomposition {
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        self.a * x * x + 2.0 * self.b * x * y + self.c * y * y
    }

    pub fn reconstruct(&self, x: f64, y: f64) -> f64 {
        let tau = self.tau;
        let sq = x + self.b.signum() * y / tau;
        self.d * (tau * x * x + y * y / tau) + self.b.abs() * tau * sq * sq
    }

    /// `|Q - reconstruction|` relative to `A x² + 2|B xy| + C y²`.
    pub fn reconstruction_error(&self, x: f64, y: f64) -> f64 {
        let scale = self.a * x * x + 2.0 * (self.b * x * y).abs() + self.c * y * y;
        if scale == 0.0 {
            return 0.0;
        }
        (self.evaluate(x, y) - self.reconstruct(x, y)).abs() / scale
    }

    /// `min_t (A t ± 2B + C/t)/2` sampled at `t = √(C/A)`; equals `D`.
    pub fn ratio_minimum(&self) -> f64 {
        let t = (self.c / self.a).sqrt();
        (self.a * t - 2.0 * self.b.abs() + self.c / t) / 2.0
    }
}

pub fn decompose_form(a: f64, b: f64, c: f64) -> Result<QuadraticFormDecomposition> {
    if !(a > 0.0 && c > 0.0 && a * c >= b * b) || !b.is_finite() || !a.is_finite() || !c.is_finite()
    {
        return Err(Error::Domain(format!(
            "form ({a}, {b}, {c}) is not positive semidefinite with A, C > 0"
        )));
    }
    Ok(QuadraticFormDecomposition {
        a,
        b,
        c,
        d: (a * c).sqrt() - b.abs(),
        tau: (a / c).sqrt(),
    })
}
