//! Rotation-minimized approximation errors and selection confusion counts.
//!
//! The errors are defined with the rotation acting on the truth,
//! `min_H Σ ‖est − H·truth‖²`. The mirrored form `min_H Σ ‖truth − H·est‖²`
//! is available through [`Rotation::OnEstimate`]; unlike the defined form
//! it does not depend on how the estimate's columns are normalized.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::funcspace::VectorCurve;
use crate::linalg::{Mat, Qr};
use crate::selection::RankDecision;

/// Residual sum of squares of regressing every column of `est` on `truth`.
fn projection_residual(est: &Mat, truth: &Mat) -> Result<f64> {
    if est.rows() != truth.rows() {
        return Err(invalid("estimate and truth must have the same number of rows"));
    }
    let qr = Qr::new(truth).map_err(|_| Error::DegenerateTruth)?;
    let coef = qr.solve(est); // = H*ᵀ
    let fitted = truth.matmul(&coef);
    let r = est.sub(&fitted);
    Ok(r.as_slice().iter().map(|x| x * x).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rotation {
    /// `‖est − H·truth‖²`, the defined error.
    #[default]
    OnTruth,
    /// `‖truth − H·est‖²`.
    OnEstimate,
}

/// `min_H (1/(q·normalizer)) Σ_t ‖est_t − H truth_t‖²` with `q` the
/// number of estimated columns. Rows of `est` and `truth` are periods.
pub fn ae_factors(est: &Mat, truth: &Mat, normalizer: usize) -> Result<f64> {
    ae_factors_with(est, truth, normalizer, Rotation::OnTruth)
}

pub fn ae_factors_with(est: &Mat, truth: &Mat, normalizer: usize, rotation: Rotation) -> Result<f64> {
    if est.cols() == 0 || normalizer == 0 {
        return Err(invalid("need at least one factor and a positive normalizer"));
    }
    let rss = match rotation {
        Rotation::OnTruth => projection_residual(est, truth)?,
        Rotation::OnEstimate => projection_residual(truth, est)?,
    };
    Ok(rss / (est.cols() * normalizer) as f64)
}

/// Stacks the coefficient columns of all series: row `(i, j)` holds the
/// `q` component coefficients of `Λ_i` against basis function `j`.
fn stack(loadings: &[VectorCurve]) -> Mat {
    let q = loadings.first().map_or(0, |l| l.len());
    let rows: usize = loadings.iter().map(|l| l.basis().dim()).sum();
    let mut out = Mat::zeros(rows, q);
    let mut r = 0;
    for l in loadings {
        let c = l.coefs();
        for j in 0..c.cols() {
            for k in 0..q {
                out[(r, k)] = c[(k, j)];
            }
            r += 1;
        }
    }
    out
}

/// `min_H (1/(q·N)) Σ_i ‖est_i − H truth_i‖²` over functional loadings.
pub fn ae_loadings(est: &[VectorCurve], truth: &[VectorCurve]) -> Result<f64> {
    ae_loadings_with(est, truth, Rotation::OnTruth)
}

pub fn ae_loadings_with(est: &[VectorCurve], truth: &[VectorCurve], rotation: Rotation) -> Result<f64> {
    if est.len() != truth.len() || est.is_empty() {
        return Err(invalid("estimate and truth must hold the same, nonzero number of series"));
    }
    for (e, t) in est.iter().zip(truth) {
        if e.basis() != t.basis() {
            return Err(Error::IncompatibleBasis);
        }
        if e.len() != est[0].len() || t.len() != truth[0].len() {
            return Err(invalid("all series must carry the same number of components"));
        }
    }
    if est[0].len() == 0 {
        return Err(invalid("need at least one loading component"));
    }
    let (e, t) = (stack(est), stack(truth));
    let rss = match rotation {
        Rotation::OnTruth => projection_residual(&e, &t)?,
        Rotation::OnEstimate => projection_residual(&t, &e)?,
    };
    Ok(rss / (est[0].len() * est.len()) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Confusion {
    pub under: usize,
    pub correct: usize,
    pub over: usize,
}

impl Confusion {
    pub fn tally(chosen: impl IntoIterator<Item = usize>, truth: usize) -> Self {
        let mut c = Confusion::default();
        for v in chosen {
            match v.cmp(&truth) {
                core::cmp::Ordering::Less => c.under += 1,
                core::cmp::Ordering::Equal => c.correct += 1,
                core::cmp::Ordering::Greater => c.over += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.under + self.correct + self.over
    }

    pub fn correct_rate(&self) -> f64 {
        self.correct as f64 / self.total() as f64
    }
}

pub fn confusion_counts(decisions: &[RankDecision], truth: usize) -> Confusion {
    Confusion::tally(decisions.iter().map(|d| d.chosen).collect::<Vec<_>>(), truth)
}
