use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Hölder-conjugate exponents with `p >= 2 >= q > 1` and `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugatePair {
    p: f64,
    q: f64,
}

impl ConjugatePair {
    /// Builds the pair from the large exponent `p >= 2`.
    pub fn from_p(p: f64) -> Result<Self> {
        ensure_finite("p", p)?;
        if p < 2.0 {
            return Err(Error::Domain(format!(
                "p must be >= 2 (pass the small exponent through from_q), got {p}"
            )));
        }
        Ok(Self {
            p,
            q: p / (p - 1.0),
        })
    }

    /// Builds the pair from the small exponent `1 < q <= 2`.
    pub fn from_q(q: f64) -> Result<Self> {
        ensure_finite("q", q)?;
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::Domain(format!("q must lie in (1, 2], got {q}")));
        }
        Ok(Self {
            p: q / (q - 1.0),
            q,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_p3(&self) -> bool {
        (self.p - 3.0).abs() < 1e-12
    }
}

/// Conjugate exponent `x / (x - 1)` for any `x > 1`.
pub fn conjugate(x: f64) -> f64 {
    x / (x - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_sum_is_one() {
        for &p in &[2.0, 2.2, 3.0, 4.0, 6.0, 17.5] {
            let pair = ConjugatePair::from_p(p).unwrap();
            assert!((1.0 / pair.p() + 1.0 / pair.q() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn both_constructors_agree() {
        let a = ConjugatePair::from_p(3.0).unwrap();
        let b = ConjugatePair::from_q(1.5).unwrap();
        assert!((a.p() - b.p()).abs() < 1e-14 && (a.q() - b.q()).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_p_and_bad_q() {
        assert!(ConjugatePair::from_p(1.5).is_err());
        assert!(ConjugatePair::from_p(f64::NAN).is_err());
        assert!(ConjugatePair::from_q(1.0).is_err());
        assert!(ConjugatePair::from_q(2.5).is_err());
    }

    #[test]
    fn p_two_is_self_conjugate() {
        let pair = ConjugatePair::from_p(2.0).unwrap();
        assert_eq!(pair.q(), 2.0);
    }
}
