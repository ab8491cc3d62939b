use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Square grid, log-spaced on both axes: `n` points from `lo` to `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GridSpec {
    pub const fn new(lo: f64, hi: f64, n: usize) -> Self {
        Self { lo, hi, n }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.lo.is_finite() && self.hi.is_finite()) {
            return Err(Error::Usage(format!(
                "grid bounds must satisfy 0 < lo <= hi, got {}:{}",
                self.lo, self.hi
            )));
        }
        if self.n == 0 {
            return Err(Error::Usage("grid needs at least one point".into()));
        }
        Ok(())
    }

    /// Axis nodes; the end points are hit exactly.
    pub fn axis(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i + 1 == self.n {
                    self.hi
                } else {
                    (a + (b - a) * i as f64 / (self.n - 1) as f64).exp()
                }
            })
            .collect()
    }

    /// All `(u, v)` pairs, `u` varying slowest.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let axis = self.axis();
        axis.iter()
            .flat_map(|&u| axis.iter().map(move |&v| (u, v)))
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// Parses `lo:hi:n`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Usage(format!(
                "grid must look like lo:hi:n, got {s:?}"
            )));
        }
        let bad = |_| Error::Usage(format!("cannot parse grid {s:?}"));
        let grid = GridSpec {
            lo: parts[0].trim().parse().map_err(bad)?,
            hi: parts[1].trim().parse().map_err(bad)?,
            n: parts[2]
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("cannot parse grid size in {s:?}")))?,
        };
        grid.validate()?;
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_hits_end_points() {
        let g = GridSpec::new(1e-2, 1e2, 50);
        let axis = g.axis();
        assert_eq!(axis.len(), 50);
        assert_eq!(axis[0], 1e-2);
        assert_eq!(axis[49], 1e2);
        assert!(axis.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn parses_colon_form() {
        let g: GridSpec = "0.01:100:5".parse().unwrap();
        assert_eq!(g, GridSpec::new(0.01, 100.0, 5));
        assert!("1:2".parse::<GridSpec>().is_err());
        assert!("0:1:3".parse::<GridSpec>().is_err());
        assert!("1:2:0".parse::<GridSpec>().is_err());
    }
}
