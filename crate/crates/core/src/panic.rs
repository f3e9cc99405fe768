//! Functional PANIC: factor analysis of first-differenced curves, then
//! cumulation of the estimated stationary factors back into trends.
//!
//! Differencing removes the dependence on the integration order of both the
//! factors and the idiosyncratic curves, so the estimator stays consistent
//! when trends are cointegrated or idiosyncratic components have unit roots.
//! The level is lost: `Ĝ_t` estimates `G_t − G_1`.

use crate::error::Result;
use crate::fpca::{factor_step, FactorFit};
use crate::linalg::Mat;
use crate::panel::{difference, gram, CurvePanel, GramMode};

/// PANIC fit with `q` factors, `1 ≤ q ≤ min(N, T − 1)` (`q = 0` gives an
/// empty fit with the full spectrum).
///
/// Factors `ξ̂_t` (rows for `t = 2..T`) are the leading eigenvectors of the
/// differenced Gram scaled by `√(T−1)`; eigenvalues come from `Ω̂/(T−1)`;
/// loadings are `(T−1)⁻¹ Σ_t z_it ξ̂_t`; trends are `Ĝ_t = Σ_{s=2}^t ξ̂_s`.
pub fn fit_panic(panel: &CurvePanel, q: usize) -> Result<FactorFit> {
    let diffed = difference(panel)?;
    let mut g = gram(&diffed, GramMode::Levels)?;
    g.mode = GramMode::Differences;
    let s = g.size() as f64;
    let mut fit = factor_step(&diffed, &g, q, libm::sqrt(s), s, panel.periods())?;
    fit.trends = Some(cumulate(&fit.factors));
    Ok(fit)
}

/// Running sums down the rows.
pub fn cumulate(increments: &Mat) -> Mat {
    let mut out = increments.clone();
    for t in 1..out.rows() {
        for k in 0..out.cols() {
            out[(t, k)] += out[(t - 1, k)];
        }
    }
    out
}

/// Rows `Ĝ_{t−1}` aligned with `ξ̂_t` for `t = 2..T`: the first row is
/// `Ĝ_1 = 0` and row `r` is `Ĝ_{r+1}`.
pub fn lagged_trends(fit: &FactorFit) -> Mat {
    let trends = fit.trends_from_origin();
    let (s, q) = (trends.rows(), trends.cols());
    Mat::from_fn(s, q, |r, k| if r == 0 { 0.0 } else { trends[(r - 1, k)] })
}
