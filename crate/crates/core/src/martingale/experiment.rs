use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    frobenius_sq, simulate_checked, transform_az, Hypotheses, MartingaleSpec, PathEnsemble,
};
use crate::bellman::eval_closed_p3_plus;
use crate::error::{Error, Result};
use crate::format::g10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    Z,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

fn terminal_norms(ensemble: &PathEnsemble, which: Which) -> impl Iterator<Item = f64> + '_ {
    ensemble.paths.iter().map(move |p| {
        let x = match which {
            Which::Z => p.z,
            Which::W => p.w,
        };
        x[0].hypot(x[1])
    })
}

/// Sample mean and unbiased variance; the variance is 0 for a single sample.
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `(E|X_T|^p)^(1/p)` with a delta-method standard error.
pub fn estimate_norm(ensemble: &PathEnsemble, which: Which, p: f64) -> Result<NormEstimate> {
    if ensemble.paths.is_empty() {
        return Err(Error::Usage(
            "cannot estimate a norm from an empty ensemble".into(),
        ));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Usage(format!("norm exponent must be >= 1, got {p}")));
    }
    let xs: Vec<f64> = terminal_norms(ensemble, which).map(|x| x.powf(p)).collect();
    let (m, var) = mean_var(&xs);
    let estimate = m.powf(1.0 / p);
    let std_error = if m > 0.0 {
        estimate / (p * m) * (var / xs.len() as f64).sqrt()
    } else {
        0.0
    };
    Ok(NormEstimate {
        estimate,
        std_error,
    })
}

pub const EXPERIMENT_CSV_HEADER: &str =
    "q,paths,steps,dt,seed,construction,ratio,bound,margin,std_error";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub q: f64,
    pub paths: usize,
    pub steps: usize,
    pub dt: f64,
    pub seed: u64,
    pub construction: String,
    pub ratio: f64,
    pub bound: f64,
    pub margin: f64,
    pub std_error: f64,
}

impl ExperimentReport {
    /// No violation beyond three standard errors.
    pub fn passes(&self) -> bool {
        self.margin >= -3.0 * self.std_error
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            g10(self.q),
            self.paths,
            self.steps,
            g10(self.dt),
            self.seed,
            self.construction,
            g10(self.ratio),
            g10(self.bound),
            g10(self.margin),
            g10(self.std_error)
        )
    }
}

pub fn experiment_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from(EXPERIMENT_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// Estimates `‖Z‖_q / ‖W‖_q` against `√(2/(q² - q))`. Every step is checked
/// for orthogonality of `W` and subordination of `Z`. The ratio's standard
/// error uses the delta method on the pair of means, covariance included.
pub fn inequality_experiment(q: f64, spec: &MartingaleSpec) -> Result<ExperimentReport> {
    if !(q > 1.0 && q <= 2.0) {
        return Err(Error::Usage(format!("q must lie in (1, 2], got {q}")));
    }
    let ensemble = simulate_checked(spec, Hypotheses::ALL)?;
    let a: Vec<f64> = terminal_norms(&ensemble, Which::Z)
        .map(|x| x.powf(q))
        .collect();
    let b: Vec<f64> = terminal_norms(&ensemble, Which::W)
        .map(|x| x.powf(q))
        .collect();
    let n = a.len() as f64;
    let (ma, va) = mean_var(&a);
    let (mb, vb) = mean_var(&b);
    let cov = if a.len() < 2 {
        0.0
    } else {
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - ma) * (y - mb))
            .sum::<f64>()
            / (n - 1.0)
    };
    let ratio = (ma / mb).powf(1.0 / q);
    let rel_var = (va / (ma * ma) + vb / (mb * mb) - 2.0 * cov / (ma * mb)).max(0.0);
    let std_error = ratio / q * (rel_var / n).sqrt();
    let bound = (2.0 / (q * q - q)).sqrt();
    Ok(ExperimentReport {
        q,
        paths: spec.paths,
        steps: spec.steps,
        dt: spec.dt,
        seed: spec.seed,
        construction: spec.construction.name().to_string(),
        ratio,
        bound,
        margin: bound - ratio,
        std_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ItoReport {
    /// `√(3/2) E Σ |dW|_F |dF|_F dt`.
    pub lhs: f64,
    /// `E[(4/3)|W_T|^(3/2) + (2/3)|F_T|³]`.
    pub rhs: f64,
    pub slack: f64,
    pub std_error: f64,
    /// `E B(|F_T|, |W_T|)` for the explicit `p = 3` function; sits between
    /// the two sides when the chain holds.
    pub bellman_mean: f64,
}

impl ItoReport {
    pub fn passes(&self) -> bool {
        self.slack >= -3.0 * self.std_error
    }
}

/// The chain `√(3/2) E∫|dW||dF| <= E B(|F_T|, |W_T|) <= E φ` at `q = 3/2`.
/// `Z` of the spec plays the role of `F`; `W` must be orthogonal with equal
/// brackets at every step, `F` is unrestricted.
pub fn ito_chain_check(spec: &MartingaleSpec) -> Result<ItoReport> {
    let hyp = Hypotheses {
        orthogonal_w: true,
        subordinate: false,
    };
    let ensemble = simulate_checked(spec, hyp)?;
    let diffs: Vec<f64> = ensemble
        .paths
        .iter()
        .map(|p| {
            let (f, w) = (p.z[0].hypot(p.z[1]), p.w[0].hypot(p.w[1]));
            let rhs = 4.0 / 3.0 * w.powf(1.5) + 2.0 / 3.0 * f.powi(3);
            rhs - 1.5f64.sqrt() * p.cross
        })
        .collect();
    let n = diffs.len() as f64;
    let lhs = 1.5f64.sqrt() * ensemble.paths.iter().map(|p| p.cross).sum::<f64>() / n;
    let rhs = ensemble
        .paths
        .iter()
        .map(|p| {
            4.0 / 3.0 * p.w[0].hypot(p.w[1]).powf(1.5) + 2.0 / 3.0 * p.z[0].hypot(p.z[1]).powi(3)
        })
        .sum::<f64>()
        / n;
    let bellman_mean = ensemble
        .paths
        .iter()
        .map(|p| eval_closed_p3_plus(p.z[0].hypot(p.z[1]), p.w[0].hypot(p.w[1])))
        .sum::<f64>()
        / n;
    let (slack, var) = mean_var(&diffs);
    Ok(ItoReport {
        lhs,
        rhs,
        slack,
        std_error: (var / n).sqrt(),
        bellman_mean,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaReport {
    pub draws: usize,
    pub seed: u64,
    /// `max |u⃗·v⃗|` over the draws.
    pub max_abs_dot: f64,
    /// `max d⟨W, W⟩ / d⟨Z, Z⟩`.
    pub max_bracket_factor: f64,
    /// `max |u⃗|² / d⟨Z, Z⟩`.
    pub max_u_factor: f64,
    /// `max |u⃗|² - |v⃗|²` in absolute value.
    pub max_norm_gap: f64,
}

impl LemmaReport {
    pub fn passes(&self) -> bool {
        self.max_abs_dot <= 1e-14
            && self.max_bracket_factor <= 4.0 * (1.0 + 1e-14)
            && self.max_u_factor <= 2.0 * (1.0 + 1e-14)
    }
}

const LEMMA_CHUNK: usize = 1 << 16;

/// Runs `transform_az` on `draws` standard Gaussian difference pairs.
pub fn lemma_check(draws: usize, seed: u64) -> Result<LemmaReport> {
    if draws == 0 {
        return Err(Error::Usage("lemma check needs at least one draw".into()));
    }
    let chunks = draws.div_ceil(LEMMA_CHUNK);
    let parts: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = LEMMA_CHUNK.min(draws - c * LEMMA_CHUNK);
            let mut acc = [0.0_f64; 4];
            for _ in 0..len {
                let mut g = || rng.sample::<f64, _>(StandardNormal);
                let x = [g(), g()];
                let y = [g(), g()];
                let (u, v) = transform_az(x, y);
                let zz = frobenius_sq(&[x, y]);
                let nu = u[0] * u[0] + u[1] * u[1];
                let nv = v[0] * v[0] + v[1] * v[1];
                acc[0] = acc[0].max((u[0] * v[0] + u[1] * v[1]).abs());
                acc[1] = acc[1].max((nu + nv) / zz);
                acc[2] = acc[2].max(nu / zz);
                acc[3] = acc[3].max((nu - nv).abs());
            }
            acc
        })
        .collect();
    let max = |i: usize| parts.iter().map(|a| a[i]).fold(0.0, f64::max);
    Ok(LemmaReport {
        draws,
        seed,
        max_abs_dot: max(0),
        max_bracket_factor: max(1),
        max_u_factor: max(2),
        max_norm_gap: max(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{Construction, PathRecord};

    fn ensemble_of(points: &[[f64; 2]]) -> PathEnsemble {
        let spec = MartingaleSpec {
            steps: 1,
            dt: 1.0,
            construction: Construction::Identity,
            seed: 0,
            paths: points.len().max(1),
        };
        let paths = points
            .iter()
            .map(|&z| PathRecord {
                z,
                w: z,
                zz: 0.0,
                uu: 0.0,
                vv: 0.0,
                uv: 0.0,
                cross: 0.0,
            })
            .collect();
        PathEnsemble { spec, paths }
    }

    #[test]
    fn norm_examples() {
        let e = ensemble_of(&[[3.0, 4.0]; 10]);
        for p in [1.0, 1.5, 3.0] {
            let n = estimate_norm(&e, Which::Z, p).unwrap();
            assert!((n.estimate - 5.0).abs() < 1e-13 && n.std_error < 1e-12);
        }
        let one = estimate_norm(&ensemble_of(&[[1.0, 0.0]]), Which::W, 2.0).unwrap();
        assert_eq!(one.estimate, 1.0);
        assert!(matches!(
            estimate_norm(&ensemble_of(&[]), Which::Z, 2.0),
            Err(Error::Usage(_))
        ));
    }

    fn spec(construction: Construction, paths: usize, steps: usize) -> MartingaleSpec {
        MartingaleSpec {
            steps,
            dt: 1.0 / steps as f64,
            construction,
            seed: 5,
            paths,
        }
    }

    #[test]
    fn identity_ratio_is_exactly_one() {
        let r = inequality_experiment(1.5, &spec(Construction::Identity, 200, 10)).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!((r.bound - 1.632993161855452).abs() < 1e-12);
        assert!(r.passes());
        assert_eq!(r.csv_line().split(',').count(), 10);
    }

    #[test]
    fn q_two_bound_is_one() {
        let r =
            inequality_experiment(2.0, &spec(Construction::rotation_default(), 500, 20)).unwrap();
        assert_eq!(r.bound, 1.0);
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn ito_degenerate_cases() {
        let zero_f = Construction::constant_rotation(1.0, 0.0);
        let r = ito_chain_check(&spec(zero_f, 100, 10)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.rhs > 0.0 && r.passes());
        let zero_w = Construction::Split {
            z: Box::new(Construction::Identity),
            w: Box::new(Construction::constant_rotation(0.0, 1.0)),
        };
        let r = ito_chain_check(&spec(zero_w, 100, 10)).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.rhs > 0.0);
    }

    #[test]
    fn lemmas_hold_on_small_sample() {
        let r = lemma_check(10_000, 3).unwrap();
        assert!(r.passes(), "{r:?}");
        assert_eq!(r.max_abs_dot, 0.0);
        assert_eq!(r.max_norm_gap, 0.0);
    }
}
