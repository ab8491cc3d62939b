use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{transform_az, Mat2};
use crate::error::{Error, Result};

/// State visible to a construction before step `step` of `steps`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepState {
    pub z: [f64; 2],
    pub w: [f64; 2],
    pub step: usize,
    pub steps: usize,
}

/// Difference-process families. Each yields the `Z` and `W` difference
/// matrices from the current state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    /// `W` and `Z` both driven by the identity matrix.
    Identity,
    /// `u⃗ = r(cos θ, sin θ)`, `v⃗ = r(-sin θ, cos θ)` with
    /// `r = rate (1 + wobble tanh|W|)`, `θ = spin (W₁ + W₂)`;
    /// `Z` differences are `scale · Q(mix (Z₁ - Z₂)) · (u⃗, v⃗)` for the
    /// rotation `Q`.
    Rotation {
        rate: f64,
        wobble: f64,
        spin: f64,
        scale: f64,
        mix: f64,
    },
    /// Rotation-orthogonal `W` (`r = 1`, `θ = |W|`) and `Z = ±scale·W`
    /// differences, the sign flipping at each listed fraction of the horizon.
    SignSwitch { fractions: Vec<f64>, scale: f64 },
    /// `Z` differences `conformal(a, b) + anticonformal(c, d)` with
    /// `|(c, d)| = kappa |(a, b)|`, and `W = A⋆Z`. Subordination of `Z` to
    /// `W` needs `kappa <= √3`.
    AzDerived { kappa: f64, rate: f64 },
    /// `Z` differences from one construction, `W` differences from another.
    Split {
        z: Box<Construction>,
        w: Box<Construction>,
    },
}

pub const DEFAULT_BATTERY: &[&str] = &["identity", "rotation", "sign-switch", "az-derived"];

impl Construction {
    pub fn rotation_default() -> Self {
        Construction::Rotation {
            rate: 1.0,
            wobble: 0.5,
            spin: 1.0,
            scale: 1.0,
            mix: 1.0,
        }
    }

    /// Constant-rate rotation: `r = rate`, `θ = 0`, `Z = scale · W`.
    pub fn constant_rotation(rate: f64, scale: f64) -> Self {
        Construction::Rotation {
            rate,
            wobble: 0.0,
            spin: 0.0,
            scale,
            mix: 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Construction::Identity => "identity",
            Construction::Rotation { .. } => "rotation",
            Construction::SignSwitch { .. } => "sign-switch",
            Construction::AzDerived { .. } => "az-derived",
            Construction::Split { .. } => "split",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match self {
            Construction::Identity => Ok(()),
            Construction::Rotation {
                rate,
                wobble,
                spin,
                scale,
                mix,
            } => {
                if !(rate.is_finite() && *rate >= 0.0) {
                    return bad(format!("rotation rate must be finite and >= 0, got {rate}"));
                }
                if !(0.0..1.0).contains(wobble) {
                    return bad(format!("rotation wobble must lie in [0, 1), got {wobble}"));
                }
                if !(0.0..=1.0).contains(scale) {
                    return bad(format!("rotation scale must lie in [0, 1], got {scale}"));
                }
                if !spin.is_finite() || !mix.is_finite() {
                    return bad("rotation spin and mix must be finite".into());
                }
                Ok(())
            }
            Construction::SignSwitch { fractions, scale } => {
                if !(0.0..=1.0).contains(scale) {
                    return bad(format!("sign-switch scale must lie in [0, 1], got {scale}"));
                }
                if fractions.iter().any(|f| !(*f > 0.0 && *f < 1.0)) {
                    return bad("sign-switch fractions must lie in (0, 1)".into());
                }
                if fractions.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("sign-switch fractions must be strictly increasing".into());
                }
                Ok(())
            }
            Construction::AzDerived { kappa, rate } => {
                if !(kappa.is_finite() && *kappa >= 0.0 && *kappa <= 3f64.sqrt()) {
                    return bad(format!("az-derived kappa must lie in [0, √3], got {kappa}"));
                }
                if !(rate.is_finite() && *rate >= 0.0) {
                    return bad(format!(
                        "az-derived rate must be finite and >= 0, got {rate}"
                    ));
                }
                Ok(())
            }
            Construction::Split { z, w } => {
                z.validate()?;
                w.validate()
            }
        }
    }

    /// `(Z differences, W differences)` for the next step.
    pub(crate) fn matrices(&self, s: &StepState) -> (Mat2, Mat2) {
        match self {
            Construction::Identity => {
                let id = [[1.0, 0.0], [0.0, 1.0]];
                (id, id)
            }
            Construction::Rotation {
                rate,
                wobble,
                spin,
                scale,
                mix,
            } => {
                let norm = s.w[0].hypot(s.w[1]);
                let r = rate * (1.0 + wobble * norm.tanh());
                let w = rotation_block(r, spin * (s.w[0] + s.w[1]));
                let z = scaled_rotate(*scale, mix * (s.z[0] - s.z[1]), &w);
                (z, w)
            }
            Construction::SignSwitch { fractions, scale } => {
                let w = rotation_block(1.0, s.w[0].hypot(s.w[1]));
                let flips = fractions
                    .iter()
                    .filter(|&&f| s.step as f64 >= f * s.steps as f64)
                    .count();
                let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
                let z = [
                    [sign * scale * w[0][0], sign * scale * w[0][1]],
                    [sign * scale * w[1][0], sign * scale * w[1][1]],
                ];
                (z, w)
            }
            Construction::AzDerived { kappa, rate } => {
                let (psi, chi) = (s.z[0] + s.w[1], s.z[1] - s.w[0]);
                let (a, b) = (rate * psi.cos(), rate * psi.sin());
                let (c, d) = (kappa * rate * chi.cos(), kappa * rate * chi.sin());
                let x = [a + c, -b + d];
                let y = [b + d, a - c];
                let (u, v) = transform_az(x, y);
                ([x, y], [u, v])
            }
            Construction::Split { z, w } => (z.matrices(s).0, w.matrices(s).1),
        }
    }
}

fn rotation_block(r: f64, theta: f64) -> Mat2 {
    let (sn, cs) = theta.sin_cos();
    [[r * cs, r * sn], [-(r * sn), r * cs]]
}

fn scaled_rotate(scale: f64, phi: f64, m: &Mat2) -> Mat2 {
    let (sn, cs) = phi.sin_cos();
    let row = |i: usize| [cs * m[0][i] - sn * m[1][i], sn * m[0][i] + cs * m[1][i]];
    let (c0, c1) = (row(0), row(1));
    [
        [scale * c0[0], scale * c1[0]],
        [scale * c0[1], scale * c1[1]],
    ]
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Construction {
    type Err = Error;

    /// Named families with their default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Construction::Identity),
            "rotation" => Ok(Construction::rotation_default()),
            "sign-switch" => Ok(Construction::SignSwitch {
                fractions: vec![0.25, 0.5, 0.75],
                scale: 1.0,
            }),
            "az-derived" => Ok(Construction::AzDerived {
                kappa: 1.5,
                rate: 1.0,
            }),
            other => Err(Error::Usage(format!(
                "unknown construction {other:?}; expected one of {}",
                DEFAULT_BATTERY.join(", ")
            ))),
        }
    }
}
