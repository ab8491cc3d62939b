use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::construction::StepState;
use super::{frobenius_sq, Construction, Mat2};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSpec {
    pub steps: usize,
    pub dt: f64,
    pub construction: Construction,
    pub seed: u64,
    pub paths: usize,
}

impl MartingaleSpec {
    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Usage("steps must be at least 1".into()));
        }
        if self.paths == 0 {
            return Err(Error::Usage("paths must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Usage(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        self.construction.validate()
    }
}

/// Per-step conditions checked while simulating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `u⃗·v⃗ = 0` and `|u⃗| = |v⃗|` for the `W` differences.
    pub orthogonal_w: bool,
    /// `d⟨Z, Z⟩ <= d⟨W, W⟩`.
    pub subordinate: bool,
}

impl Hypotheses {
    pub const NONE: Self = Self {
        orthogonal_w: false,
        subordinate: false,
    };
    pub const ALL: Self = Self {
        orthogonal_w: true,
        subordinate: true,
    };
}

const HYPOTHESIS_TOL: f64 = 1e-12;

/// One simulated path: terminal values and accumulated covariations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathRecord {
    pub z: [f64; 2],
    pub w: [f64; 2],
    /// `⟨X, X⟩ + ⟨Y, Y⟩`.
    pub zz: f64,
    pub uu: f64,
    pub vv: f64,
    pub uv: f64,
    /// `Σ |dW-matrix|_F |dZ-matrix|_F dt`.
    pub cross: f64,
}

/// Immutable result of [`simulate`]. Path `i` used stream `i` of `seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEnsemble {
    pub spec: MartingaleSpec,
    pub paths: Vec<PathRecord>,
}

impl PathEnsemble {
    pub fn seed(&self) -> u64 {
        self.spec.seed
    }

    pub fn stream_ids(&self) -> std::ops::Range<u64> {
        0..self.paths.len() as u64
    }
}

/// Simulates without hypothesis checks.
pub fn simulate(spec: &MartingaleSpec) -> Result<PathEnsemble> {
    simulate_checked(spec, Hypotheses::NONE)
}

/// Simulates all paths in parallel; the first path (in index order) that
/// breaks a requested hypothesis turns into a construction error.
pub fn simulate_checked(spec: &MartingaleSpec, hyp: Hypotheses) -> Result<PathEnsemble> {
    spec.validate()?;
    let paths = (0..spec.paths)
        .into_par_iter()
        .map(|i| simulate_path(spec, i, hyp))
        .collect::<Result<Vec<_>>>()?;
    Ok(PathEnsemble {
        spec: spec.clone(),
        paths,
    })
}

fn check_step(z: &Mat2, w: &Mat2, hyp: Hypotheses) -> Option<String> {
    let ww = frobenius_sq(w);
    if hyp.orthogonal_w {
        let dot = w[0][0] * w[1][0] + w[0][1] * w[1][1];
        if dot.abs() > HYPOTHESIS_TOL * ww {
            return Some(format!("W differences not orthogonal: u.v = {dot:e}"));
        }
        let nu = w[0][0] * w[0][0] + w[0][1] * w[0][1];
        let nv = w[1][0] * w[1][0] + w[1][1] * w[1][1];
        if (nu - nv).abs() > HYPOTHESIS_TOL * ww {
            return Some(format!("W brackets differ: |u|^2 = {nu}, |v|^2 = {nv}"));
        }
    }
    if hyp.subordinate {
        let zz = frobenius_sq(z);
        if zz > ww * (1.0 + HYPOTHESIS_TOL) {
            return Some(format!(
                "subordination fails: d<Z,Z> = {zz} > d<W,W> = {ww}"
            ));
        }
    }
    None
}

fn apply(m: &Mat2, db: [f64; 2]) -> [f64; 2] {
    [
        m[0][0] * db[0] + m[0][1] * db[1],
        m[1][0] * db[0] + m[1][1] * db[1],
    ]
}

fn simulate_path(spec: &MartingaleSpec, index: usize, hyp: Hypotheses) -> Result<PathRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let sd = spec.dt.sqrt();
    let mut rec = PathRecord {
        z: [0.0; 2],
        w: [0.0; 2],
        zz: 0.0,
        uu: 0.0,
        vv: 0.0,
        uv: 0.0,
        cross: 0.0,
    };
    for step in 0..spec.steps {
        let state = StepState {
            z: rec.z,
            w: rec.w,
            step,
            steps: spec.steps,
        };
        let (mz, mw) = spec.construction.matrices(&state);
        if hyp != Hypotheses::NONE {
            if let Some(detail) = check_step(&mz, &mw, hyp) {
                return Err(Error::Construction {
                    path: index,
                    step,
                    detail,
                });
            }
        }
        let db = [
            sd * rng.sample::<f64, _>(StandardNormal),
            sd * rng.sample::<f64, _>(StandardNormal),
        ];
        let dz = apply(&mz, db);
        let dw = apply(&mw, db);
        rec.z = [rec.z[0] + dz[0], rec.z[1] + dz[1]];
        rec.w = [rec.w[0] + dw[0], rec.w[1] + dw[1]];
        let (u, v) = (mw[0], mw[1]);
        let zz = frobenius_sq(&mz);
        let ww = frobenius_sq(&mw);
        rec.zz += zz * spec.dt;
        rec.uu += (u[0] * u[0] + u[1] * u[1]) * spec.dt;
        rec.vv += (v[0] * v[0] + v[1] * v[1]) * spec.dt;
        rec.uv += (u[0] * v[0] + u[1] * v[1]) * spec.dt;
        rec.cross += (zz * ww).sqrt() * spec.dt;
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(construction: Construction, paths: usize, steps: usize) -> MartingaleSpec {
        MartingaleSpec {
            steps,
            dt: 1.0 / steps as f64,
            construction,
            seed: 42,
            paths,
        }
    }

    #[test]
    fn identity_single_step() {
        let s = MartingaleSpec {
            steps: 1,
            dt: 0.5,
            construction: Construction::Identity,
            seed: 9,
            paths: 1,
        };
        let e = simulate(&s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        rng.set_stream(0);
        let sd = 0.5f64.sqrt();
        let db = [
            sd * rng.sample::<f64, _>(StandardNormal),
            sd * rng.sample::<f64, _>(StandardNormal),
        ];
        assert_eq!(e.paths[0].z, db);
        assert_eq!(e.paths[0].zz, 1.0);
    }

    #[test]
    fn deterministic() {
        let s = spec(Construction::rotation_default(), 50, 20);
        assert_eq!(simulate(&s).unwrap(), simulate(&s).unwrap());
    }

    #[test]
    fn rotation_accumulators() {
        let e = simulate_checked(
            &spec(Construction::rotation_default(), 20, 50),
            Hypotheses::ALL,
        )
        .unwrap();
        for p in &e.paths {
            assert!((p.uu - p.vv).abs() <= 1e-12 * p.uu);
            assert!(p.uv.abs() <= 1e-12 * p.uu);
            assert!(p.zz <= (p.uu + p.vv) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn violation_names_the_step() {
        let bad = Construction::Split {
            z: Box::new(Construction::Identity),
            w: Box::new(Construction::constant_rotation(0.5, 1.0)),
        };
        let err = simulate_checked(&spec(bad, 3, 5), Hypotheses::ALL).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Construction {
                    path: 0,
                    step: 0,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn usage_errors() {
        let mut s = spec(Construction::Identity, 0, 5);
        assert!(matches!(simulate(&s), Err(Error::Usage(_))));
        s.paths = 1;
        s.dt = 0.0;
        assert!(matches!(simulate(&s), Err(Error::Usage(_))));
    }
}
