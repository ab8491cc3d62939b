//! Discrete-time `R²`-valued martingales driven by planar Gaussian increments.
//!
//! A martingale `Z = (X, Y)` is stored through its difference matrix: the rows
//! `x⃗, y⃗ ∈ R²` give `dX = x⃗·dB`, `dY = y⃗·dB`, so
//! `d⟨Z, Z⟩ = (|x⃗|² + |y⃗|²) dt`. Every construction computes the next
//! difference matrices from the state before the step, which keeps them
//! predictable.

mod construction;
mod experiment;
mod simulate;

pub use construction::{Construction, DEFAULT_BATTERY};
pub use experiment::{
    estimate_norm, experiment_csv, inequality_experiment, ito_chain_check, lemma_check,
    ExperimentReport, ItoReport, LemmaReport, NormEstimate, Which, EXPERIMENT_CSV_HEADER,
};
pub use simulate::{
    simulate, simulate_checked, Hypotheses, MartingaleSpec, PathEnsemble, PathRecord,
};

/// Difference matrix, one row per coordinate of the martingale.
pub type Mat2 = [[f64; 2]; 2];

pub fn frobenius_sq(m: &Mat2) -> f64 {
    m[0][0] * m[0][0] + m[0][1] * m[0][1] + m[1][0] * m[1][0] + m[1][1] * m[1][1]
}

/// The transform `A⋆Z` for `A = [[-1, i], [i, 1]]` acting on the
/// complexified differences:
/// `u⃗ = (-x₁ - y₂, x₂ - y₁)`, `v⃗ = (x₂ - y₁, x₁ + y₂)`.
///
/// `u⃗·v⃗` vanishes exactly in floating point since both products are formed
/// from the same two rounded sums.
pub fn transform_az(x: [f64; 2], y: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let s = x[0] + y[1];
    let d = x[1] - y[0];
    ([-s, d], [d, s])
}
