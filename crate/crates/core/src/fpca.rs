//! Functional PCA on levels.
//!
//! Trends are the leading eigenvectors of the `T × T` levels Gram matrix
//! scaled by `T`, so that `G̃ᵀG̃ / T² = I`. Loadings follow by least squares
//! given the trends: `Λ̃_i = T⁻² Σ_t Z_it G̃_t`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::funcspace::{Curve, VectorCurve};
use crate::linalg::{sym_eig, Mat};
use crate::panel::{gram, CurvePanel, GramMatrix, GramMode};
use crate::simulate::SimTruth;

/// Estimated factors, loadings and spectrum from either estimator.
#[derive(Debug, Clone)]
pub struct FactorFit {
    pub mode: GramMode,
    pub q: usize,
    /// `S × q`. Levels: `G̃_t` for `t = 1..T`. Differences: `ξ̂_t` for `t = 2..T`.
    pub factors: Mat,
    /// Full descending spectrum of the scaled Gram (`Ω/T²` or `Ω/(T−1)`).
    pub eigenvalues: Vec<f64>,
    pub loadings: Vec<VectorCurve>,
    /// PANIC only: `Ĝ_t = Σ_{s≤t} ξ̂_s`, `S × q`.
    pub trends: Option<Mat>,
    pub series_ids: Vec<String>,
    /// Length `T` of the level panel the fit came from.
    pub periods: usize,
}

impl FactorFit {
    /// Number of rows in `factors`.
    pub fn len(&self) -> usize {
        self.factors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.q == 0
    }

    /// `Λ_iᵀ F_s` for factor row `s`.
    pub fn common_component(&self, i: usize, s: usize) -> Curve {
        self.loadings[i].combine(self.factors.row(s))
    }

    /// `(1/N) Σ_i ⟨Λ_i, Λ_iᵀ⟩`.
    pub fn loading_gram(&self) -> Mat {
        let n = self.loadings.len();
        let mut acc = Mat::zeros(self.q, self.q);
        for l in &self.loadings {
            acc = acc.add(&l.gram());
        }
        acc.scale(1.0 / n as f64)
    }

    /// `G̃_t − G̃_{t−1}` for `t = 2..T` (levels fits).
    pub fn increments(&self) -> Mat {
        let s = self.factors.rows();
        Mat::from_fn(s.saturating_sub(1), self.q, |t, k| {
            self.factors[(t + 1, k)] - self.factors[(t, k)]
        })
    }

    /// Trends with origin at the first row, as used for `AE(Ĝ)`: for PANIC
    /// fits this is `Ĝ`, for levels fits `G̃_t − G̃_1`, `t = 2..T`.
    pub fn trends_from_origin(&self) -> Mat {
        match &self.trends {
            Some(g) => g.clone(),
            None => {
                let s = self.factors.rows();
                Mat::from_fn(s.saturating_sub(1), self.q, |t, k| {
                    self.factors[(t + 1, k)] - self.factors[(0, k)]
                })
            }
        }
    }
}

/// Shared eigen-step for both estimators.
///
/// `factor_scale` multiplies the unit eigenvectors, `eig_scale` divides the
/// Gram spectrum, and loadings are `Fᵀ C_i / eig_scale` reweighted by
/// `S / #available_i` when series `i` has gaps.
pub(crate) fn factor_step(
    panel: &CurvePanel,
    gram: &GramMatrix,
    q: usize,
    factor_scale: f64,
    eig_scale: f64,
    level_periods: usize,
) -> Result<FactorFit> {
    let s_len = gram.size();
    let n = panel.n_series();
    if q > n.min(s_len) {
        return Err(invalid(format!("q = {q} exceeds min(N, S) = {}", n.min(s_len))));
    }
    if let Some(s) = panel.series().iter().find(|s| s.available_count() == 0) {
        return Err(invalid(format!("series {} has no available periods", s.id())));
    }
    let eig = sym_eig(&gram.values)?;
    let eigenvalues: Vec<f64> = eig.eigenvalues.iter().map(|v| v / eig_scale).collect();
    let factors = eig.leading_vectors(q).scale(factor_scale);

    let mut loadings = Vec::with_capacity(n);
    for s in panel.series() {
        let weight = s_len as f64 / s.available_count() as f64 / eig_scale;
        let coefs = factors.t_matmul(s.coefs()).scale(weight);
        loadings.push(VectorCurve::new(*s.basis(), coefs)?);
    }
    Ok(FactorFit {
        mode: gram.mode,
        q,
        factors,
        eigenvalues,
        loadings,
        trends: None,
        series_ids: panel.series().iter().map(|s| String::from(s.id())).collect(),
        periods: level_periods,
    })
}

/// Levels functional PCA with `q` trends. `q = 0` yields an empty fit that
/// still carries the full spectrum.
pub fn fit_fpca(panel: &CurvePanel, q: usize) -> Result<FactorFit> {
    let t = panel.periods();
    let g = gram(panel, GramMode::Levels)?;
    let tf = t as f64;
    factor_step(panel, &g, q, tf, tf * tf, t)
}

/// `H = V⁻¹ (G̃ᵀG / T²) [(1/N) Σ ⟨Λ_i, Λ_iᵀ⟩]` for a levels fit against the
/// true trends and loadings of a simulated panel.
pub fn rotation_matrix(fit: &FactorFit, truth: &SimTruth) -> Result<Mat> {
    if fit.mode != GramMode::Levels {
        return Err(invalid("rotation matrix is defined for levels fits"));
    }
    let q = fit.q;
    if truth.trends.rows() != fit.factors.rows()
        || truth.trends.cols() != q
        || truth.loadings.len() != fit.loadings.len()
    {
        return Err(invalid("truth dimensions do not match the fit"));
    }
    let top = fit.eigenvalues.first().copied().unwrap_or(0.0);
    for k in 0..q {
        if !(fit.eigenvalues[k] >= 1e-12 * top) || top <= 0.0 {
            return Err(Error::DegenerateSpectrum { index: k });
        }
    }
    let t = fit.factors.rows() as f64;
    let cross = fit.factors.t_matmul(&truth.trends).scale(1.0 / (t * t));
    let n = truth.loadings.len() as f64;
    let mut lam = Mat::zeros(q, q);
    for l in &truth.loadings {
        lam = lam.add(&l.gram());
    }
    let lam = lam.scale(1.0 / n);
    let mut h = cross.matmul(&lam);
    for k in 0..q {
        let inv = 1.0 / fit.eigenvalues[k];
        h.row_mut(k).iter_mut().for_each(|x| *x *= inv);
    }
    Ok(h)
}
