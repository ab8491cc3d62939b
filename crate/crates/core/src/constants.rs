//! Bounded Laguerre functions and the sharp constants built from their
//! least positive roots.
//!
//! `L_p` is the solution of `s L'' + (1 - s) L' + p L = 0` that stays bounded
//! at `s = 0`, normalised by `L_p(0) = 1`. It is the Kummer series
//! `Σ (-p)_k / (k!)^2 s^k`, an entire function that reduces to the classical
//! Laguerre polynomial when `p` is a non-negative integer.

use serde::Serialize;

use crate::error::{ensure_finite, Error, Result};
use crate::format::g10;
use crate::pair::{conjugate, ConjugatePair};
use crate::roots::{bisect, scan_sign_change};

/// Hard cap on series terms.
pub const MAX_TERMS: usize = 500;
/// Relative size of a term below which the series is considered converged.
pub const SERIES_REL_TOL: f64 = 1e-16;

/// `L_p(s)` together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    /// Number of series terms summed.
    pub terms: usize,
}

impl LaguerreValue {
    /// `s L'' + (1 - s) L' + p L`, zero for an exact solution.
    pub fn ode_residual(&self, p: f64, s: f64) -> f64 {
        s * self.d2 + (1.0 - s) * self.d1 + p * self.value
    }
}

/// Sums the series for `L_p`, `L_p'` and `L_p''` at `s` term by term.
pub fn laguerre_series(p: f64, s: f64) -> Result<LaguerreValue> {
    ensure_finite("p", p)?;
    ensure_finite("s", s)?;
    if p <= 0.0 {
        return Err(Error::Domain(format!(
            "Laguerre index p must be > 0, got {p}"
        )));
    }
    if s < 0.0 {
        return Err(Error::Domain(format!(
            "Laguerre argument s must be >= 0, got {s}"
        )));
    }

    // t_k = c_k s^k with c_{k+1} = c_k (k - p) / (k + 1)^2. The derivative
    // series are generated from t_k directly so that s = 0 needs no division:
    //   k c_k s^(k-1)        at index k + 1 is t_k (k - p) / (k + 1)
    //   k (k-1) c_k s^(k-2)  at index k + 2 is t_k (k - p)(k + 1 - p) / ((k + 1)(k + 2))
    let mut t = 1.0_f64;
    let (mut sum0, mut sum1, mut sum2) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut mag0, mut mag1, mut mag2) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut quiet = 0;
    let mut terms = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let d = t * (kf - p) / (kf + 1.0);
        let e = t * (kf - p) * (kf + 1.0 - p) / ((kf + 1.0) * (kf + 2.0));
        sum0 += t;
        sum1 += d;
        sum2 += e;
        mag0 += t.abs();
        mag1 += d.abs();
        mag2 += e.abs();
        terms = k + 1;

        let small = |x: f64, mag: f64| x.abs() <= SERIES_REL_TOL * mag || x == 0.0;
        if kf > p && small(t, mag0) && small(d, mag1) && small(e, mag2) {
            quiet += 1;
            if quiet >= 2 {
                break;
            }
        } else {
            quiet = 0;
        }
        t *= (kf - p) / ((kf + 1.0) * (kf + 1.0)) * s;
        if !t.is_finite() {
            return Err(Error::Domain(format!(
                "Laguerre series overflow at p = {p}, s = {s}"
            )));
        }
    }
    Ok(LaguerreValue {
        value: sum0,
        d1: sum1,
        d2: sum2,
        terms,
    })
}

/// `L_p(s)`.
pub fn laguerre_eval(p: f64, s: f64) -> Result<f64> {
    laguerre_series(p, s).map(|v| v.value)
}

/// Scan and refinement settings for [`least_positive_root_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootConfig {
    pub scan_step: f64,
    pub x_tol: f64,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            scan_step: 1e-3,
            x_tol: 1e-12,
        }
    }
}

/// Least positive root of `L_p` in `(0, 1)` and the two constants it
/// determines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaguerreSolution {
    pub p: f64,
    pub z_p: f64,
    /// `(1/√2) z / (1 - z)`, the constant for the exponent below 2.
    pub c_left: f64,
    /// `√2 (1 - z) / z`, the constant for the exponent above 2.
    pub c_right: f64,
}

impl LaguerreSolution {
    fn from_root(p: f64, z: f64) -> Self {
        Self {
            p,
            z_p: z,
            c_left: std::f64::consts::FRAC_1_SQRT_2 * z / (1.0 - z),
            c_right: std::f64::consts::SQRT_2 * (1.0 - z) / z,
        }
    }
}

pub fn least_positive_root(p: f64) -> Result<LaguerreSolution> {
    least_positive_root_with(p, RootConfig::default())
}

pub fn least_positive_root_with(p: f64, config: RootConfig) -> Result<LaguerreSolution> {
    ensure_finite("p", p)?;
    if p <= 1.0 {
        return Err(Error::Domain(format!(
            "least_positive_root needs p > 1, got {p}"
        )));
    }
    // Evaluation errors cannot occur on [0, 1] for p > 1; NaN never brackets.
    let z = first_root_in_unit_interval(|s| laguerre_eval(p, s).unwrap_or(f64::NAN), config)
        .ok_or(Error::NoRootInUnitInterval {
            p,
            step: config.scan_step,
        })?;
    Ok(LaguerreSolution::from_root(p, z))
}

fn first_root_in_unit_interval<F: Fn(f64) -> f64>(f: F, config: RootConfig) -> Option<f64> {
    let (a, b) = scan_sign_change(&f, 0.0, 1.0, config.scan_step)?;
    let z = bisect(&f, a, b, config.x_tol).ok()?;
    (z > 0.0 && z < 1.0).then_some(z)
}

/// `(√((p² - p)/2), √(2/(q² - q)))`.
pub fn burkholder_constants(pair: ConjugatePair) -> (f64, f64) {
    let (p, q) = (pair.p(), pair.q());
    (((p * p - p) / 2.0).sqrt(), (2.0 / (q * q - q)).sqrt())
}

/// Values of one conjecture-table row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjectureValues {
    pub z_p: f64,
    pub z_q: f64,
    pub c_left: f64,
    pub c_right: f64,
    pub gap: f64,
}

/// A row compares `c_left` at the conjugate exponent with `c_right` at `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureRow {
    pub p: f64,
    pub q: f64,
    pub outcome: Result<ConjectureValues>,
}

impl ConjectureRow {
    pub fn is_ok(&self) -> bool {
        self.outcome.is_ok()
    }
}

pub const CONJECTURE_CSV_HEADER: &str = "p,q,z_p,z_q,c_left,c_right,gap";

/// One row per `p`. A failed row carries its error; the others still run.
pub fn conjecture_table(p_values: &[f64]) -> Vec<ConjectureRow> {
    p_values
        .iter()
        .map(|&p| {
            let q = conjugate(p);
            let outcome = conjecture_values(p, q);
            ConjectureRow { p, q, outcome }
        })
        .collect()
}

fn conjecture_values(p: f64, q: f64) -> Result<ConjectureValues> {
    ConjugatePair::from_p(p)?;
    let at_p = least_positive_root(p)?;
    let at_q = least_positive_root(q)?;
    Ok(ConjectureValues {
        z_p: at_p.z_p,
        z_q: at_q.z_p,
        c_left: at_q.c_left,
        c_right: at_p.c_right,
        gap: at_q.c_left - at_p.c_right,
    })
}

pub fn conjecture_csv(rows: &[ConjectureRow]) -> String {
    let mut out = String::from(CONJECTURE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = match &row.outcome {
            Ok(v) => [row.p, row.q, v.z_p, v.z_q, v.c_left, v.c_right, v.gap]
                .iter()
                .map(|&x| g10(x))
                .collect(),
            Err(_) => {
                let mut c = vec![g10(row.p), g10(row.q)];
                c.extend(std::iter::repeat_n("nan".to_string(), 5));
                c
            }
        };
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn conjecture_json(rows: &[ConjectureRow]) -> serde_json::Value {
    use serde_json::{json, Value};
    let round = |x: f64| -> Value {
        g10(x)
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number)
    };
    Value::Array(
        rows.iter()
            .map(|row| match &row.outcome {
                Ok(v) => json!({
                    "p": round(row.p), "q": round(row.q),
                    "z_p": round(v.z_p), "z_q": round(v.z_q),
                    "c_left": round(v.c_left), "c_right": round(v.c_right),
                    "gap": round(v.gap),
                }),
                Err(e) => json!({
                    "p": round(row.p), "q": round(row.q),
                    "z_p": null, "z_q": null, "c_left": null, "c_right": null, "gap": null,
                    "error": e.to_string(),
                }),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    // Horner evaluation of the classical Laguerre polynomial with explicit
    // coefficients (-1)^k C(n, k) / k!.
    fn laguerre_poly(n: u32, s: f64) -> f64 {
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| {
                let binom = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
                let fact = (1..=k).fold(1.0, |acc, i| acc * i as f64);
                if k % 2 == 0 {
                    binom / fact
                } else {
                    -binom / fact
                }
            })
            .collect();
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    #[test]
    fn linear_case() {
        assert!((laguerre_eval(1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn normalised_at_zero() {
        assert_eq!(laguerre_eval(2.0, 0.0).unwrap(), 1.0);
        assert_eq!(laguerre_eval(2.7, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn quadratic_root_is_a_zero() {
        // L_2(s) = 1 - 2s + s²/2 vanishes at 2 ± √2.
        let (a, b, c) = (0.5_f64, -2.0_f64, 1.0_f64);
        let root = (-b - (b * b - 4.0 * a * c).sqrt()) / (2.0 * a);
        assert!((root - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!(laguerre_eval(2.0, root).unwrap().abs() < 1e-12);
    }

    #[test]
    fn integer_index_matches_polynomial() {
        for n in 1..=4u32 {
            for i in 0..=40 {
                let s = 0.1 * i as f64;
                let series = laguerre_eval(n as f64, s).unwrap();
                assert!((series - laguerre_poly(n, s)).abs() < 1e-13, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(laguerre_eval(f64::NAN, 0.5).is_err());
        assert!(laguerre_eval(2.0, f64::INFINITY).is_err());
        assert!(laguerre_eval(-1.0, 0.5).is_err());
        assert!(laguerre_eval(2.0, -0.1).is_err());
    }

    #[test]
    fn root_at_p2() {
        let sol = least_positive_root(2.0).unwrap();
        assert!((sol.z_p - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        assert!((sol.c_right - 1.0).abs() < 1e-10);
        assert!((sol.c_left - 1.0).abs() < 1e-10);
    }

    #[test]
    fn root_at_p3_matches_cubic_bisection() {
        // Independent oracle: bisection on the explicit cubic 1 - 3s + 3s²/2 - s³/6.
        let cubic = |s: f64| 1.0 - 3.0 * s + 1.5 * s * s - s * s * s / 6.0;
        let (mut a, mut b) = (0.3_f64, 0.5_f64);
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            if cubic(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        let oracle = 0.5 * (a + b);
        let sol = least_positive_root(3.0).unwrap();
        assert!((sol.z_p - oracle).abs() < 1e-12);
        assert!((sol.z_p - 0.415775).abs() < 1e-6);
        // √2 (1 - z) / z at the frozen oracle root 0.41577455678347908.
        assert!((sol.c_right - 1.987181591081589).abs() < 1e-9);
    }

    #[test]
    fn roots_below_two_exist() {
        for &p in &[1.01, 1.25, 1.5, 1.9] {
            let sol = least_positive_root(p).unwrap();
            assert!(sol.z_p > 2.0 - 2f64.sqrt() && sol.z_p < 1.0, "p={p}");
        }
    }

    #[test]
    fn root_requires_p_above_one() {
        assert!(least_positive_root(1.0).is_err());
        assert!(least_positive_root(0.5).is_err());
    }

    #[test]
    fn scan_without_sign_change_finds_nothing() {
        let config = RootConfig::default();
        assert_eq!(first_root_in_unit_interval(|s| 1.0 + s, config), None);
        // A root sitting exactly on s = 1 is outside the open interval.
        assert_eq!(first_root_in_unit_interval(|s| 1.0 - s, config), None);
        let z = first_root_in_unit_interval(|s| 0.3 - s, config).unwrap();
        assert!((z - 0.3).abs() < 1e-12);
    }

    #[test]
    fn burkholder_values() {
        let (a, b) = burkholder_constants(ConjugatePair::from_p(2.0).unwrap());
        assert_eq!((a, b), (1.0, 1.0));
        let (a, b) = burkholder_constants(ConjugatePair::from_p(3.0).unwrap());
        assert!((a - 3f64.sqrt()).abs() < 1e-14);
        assert!((b - 2.0 * 2f64.sqrt() / 3f64.sqrt()).abs() < 1e-14);
        assert!((b - 1.632993).abs() < 1e-6);
    }

    #[test]
    fn conjecture_rows() {
        assert!(conjecture_table(&[]).is_empty());
        let rows = conjecture_table(&[2.0, 3.0, 1.5]);
        let v2 = rows[0].outcome.as_ref().unwrap();
        assert!(v2.gap.abs() < 1e-10);
        let v3 = rows[1].outcome.as_ref().unwrap();
        assert!((v3.c_right - 1.987181591081589).abs() < 1e-9);
        assert!(!rows[2].is_ok());
    }

    #[test]
    fn csv_shape() {
        let csv = conjecture_csv(&conjecture_table(&[2.0, 1.5]));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CONJECTURE_CSV_HEADER);
        assert!(lines[1].starts_with("2,2,0.5857864376,0.5857864376,1,1,"));
        assert!(lines[2].ends_with("nan,nan,nan,nan,nan"));
    }
}
