//! Choosing the number of trends and the cointegrating rank.
//!
//! The eigenvalue criteria minimize `ν_j + j·ρ` over `j = 1..q_max` and
//! report the argmin minus one: the first eigenvalue that falls below the
//! penalty slope marks the end of the factor block. The cointegrating rank
//! comes from BIC- or HQ-penalized log-determinants of reduced-rank VECM
//! residual covariances.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky, gen_sym_eig, logdet_spd, Mat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionMethod {
    LevelsIc,
    DiffIc,
    Bic,
    Hq,
}

impl SelectionMethod {
    pub fn name(self) -> &'static str {
        match self {
            SelectionMethod::LevelsIc => "levels-ic",
            SelectionMethod::DiffIc => "diff-ic",
            SelectionMethod::Bic => "bic",
            SelectionMethod::Hq => "hq",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankDecision {
    pub chosen: usize,
    /// `(candidate, criterion value)` for every candidate examined.
    pub criterion_path: Vec<(usize, f64)>,
    pub penalty_value: f64,
    pub method: SelectionMethod,
}

/// `4·log(min(N,T))·(1/T + 1/N)`.
pub fn default_levels_penalty(n: usize, t: usize) -> f64 {
    let (n, t) = (n as f64, t as f64);
    4.0 * libm::log(n.min(t)) * (1.0 / t + 1.0 / n)
}

/// `0.6·log(min(√N,√T))·(1/√T + 1/√N)`.
pub fn default_diff_penalty(n: usize, t: usize) -> f64 {
    let (rn, rt) = (libm::sqrt(n as f64), libm::sqrt(t as f64));
    0.6 * libm::log(rn.min(rt)) * (1.0 / rt + 1.0 / rn)
}

/// `min(20, N − 1, S − 1)`, at least 1.
pub fn default_q_max(n: usize, gram_size: usize) -> usize {
    20.min(n.saturating_sub(1)).min(gram_size.saturating_sub(1)).max(1)
}

/// First index of the minimum; ties go to the smaller index.
fn argmin(path: &[(usize, f64)]) -> usize {
    let mut best = 0;
    for (k, (_, v)) in path.iter().enumerate() {
        if *v < path[best].1 {
            best = k;
        }
    }
    path[best].0
}

fn eigenvalue_ic(
    eigenvalues: &[f64],
    q_max: usize,
    rho: f64,
    method: SelectionMethod,
) -> Result<RankDecision> {
    if q_max < 1 {
        return Err(invalid("q_max must be at least 1"));
    }
    if q_max > eigenvalues.len() {
        return Err(invalid(format!(
            "q_max = {q_max} exceeds the {} available eigenvalues",
            eigenvalues.len()
        )));
    }
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(invalid(format!("penalty must be finite and nonnegative, got {rho}")));
    }
    let path: Vec<(usize, f64)> =
        (1..=q_max).map(|j| (j, eigenvalues[j - 1] + j as f64 * rho)).collect();
    let chosen = argmin(&path) - 1;
    Ok(RankDecision { chosen, criterion_path: path, penalty_value: rho, method })
}

/// Number of trends from the spectrum of `Ω̃/T²`.
pub fn select_q_levels(
    eigenvalues: &[f64],
    n: usize,
    t: usize,
    q_max: usize,
    rho: Option<f64>,
) -> Result<RankDecision> {
    let rho = rho.unwrap_or_else(|| default_levels_penalty(n, t));
    eigenvalue_ic(eigenvalues, q_max, rho, SelectionMethod::LevelsIc)
}

/// Number of factors from the spectrum of `Ω̂/(T−1)`.
pub fn select_q_diff(
    eigenvalues: &[f64],
    n: usize,
    t: usize,
    q_max: usize,
    rho: Option<f64>,
) -> Result<RankDecision> {
    let rho = rho.unwrap_or_else(|| default_diff_penalty(n, t));
    eigenvalue_ic(eigenvalues, q_max, rho, SelectionMethod::DiffIc)
}

/// Reduced-rank VECM fit `ξ_t = α βᵀ G_{t−1} + v_t`.
#[derive(Debug, Clone)]
pub struct VecmFit {
    pub rank: usize,
    /// `q × j`
    pub alpha: Mat,
    /// `q × j`, normalized so `βᵀ S₁₁ β = I`.
    pub beta: Mat,
    /// Residual covariance `Σ̂(j)`.
    pub sigma: Mat,
    pub logdet: f64,
    /// Squared canonical correlations, descending.
    pub canonical: Vec<f64>,
}

/// Johansen reduced-rank regression of `xi` (rows `ξ̂_t`) on `lagged`
/// (rows `Ĝ_{t−1}`) with rank `j`.
///
/// `β` holds the leading generalized eigenvectors of
/// `(S₁₀ S₀₀⁻¹ S₀₁, S₁₁)`, `α = S₀₁ β (βᵀ S₁₁ β)⁻¹`, and `Σ̂(j)` is the
/// sample second moment of `ξ_t − α βᵀ G_{t−1}`.
pub fn rrr_fit(xi: &Mat, lagged: &Mat, j: usize) -> Result<VecmFit> {
    let (t_eff, q) = (xi.rows(), xi.cols());
    if lagged.rows() != t_eff || lagged.cols() != q {
        return Err(invalid("xi and lagged trends must have matching shapes"));
    }
    if j > q {
        return Err(invalid(format!("rank {j} exceeds dimension {q}")));
    }
    if t_eff == 0 || q == 0 {
        return Err(invalid("empty regression"));
    }
    let tf = t_eff as f64;
    let s00 = xi.t_matmul(xi).scale(1.0 / tf);
    let s11 = lagged.t_matmul(lagged).scale(1.0 / tf);
    let s01 = xi.t_matmul(lagged).scale(1.0 / tf);
    let c00 = cholesky(&s00).map_err(|_| Error::DegenerateMoments)?;
    cholesky(&s11).map_err(|_| Error::DegenerateMoments)?;

    // S₁₀ S₀₀⁻¹ S₀₁
    let s10 = s01.transpose();
    let pencil = s10.matmul(&c00.solve(&s01));
    let pencil = Mat::from_fn(q, q, |a, b| 0.5 * (pencil[(a, b)] + pencil[(b, a)]));
    let eig = gen_sym_eig(&pencil, &s11).map_err(|e| match e {
        Error::NotPositiveDefinite => Error::DegenerateMoments,
        other => other,
    })?;
    let beta = eig.leading_vectors(j);
    let alpha = if j == 0 {
        Mat::zeros(q, 0)
    } else {
        let btb = beta.t_matmul(&s11.matmul(&beta));
        let inv = cholesky(&btb).map_err(|_| Error::DegenerateMoments)?.inverse();
        s01.matmul(&beta).matmul(&inv)
    };

    let pi = alpha.matmul_t(&beta); // q × q, zero when j = 0
    let fitted = lagged.matmul_t(&pi);
    let resid = xi.sub(&fitted);
    let sigma = resid.t_matmul(&resid).scale(1.0 / tf);
    let sigma = Mat::from_fn(q, q, |a, b| 0.5 * (sigma[(a, b)] + sigma[(b, a)]));
    let logdet = logdet_spd(&sigma)?;
    Ok(VecmFit { rank: j, alpha, beta, sigma, logdet, canonical: eig.eigenvalues })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCriterion {
    /// `ρ = log T`
    Bic,
    /// `ρ = 2 log log T`
    Hq,
}

impl RankCriterion {
    pub fn penalty(self, t: usize) -> f64 {
        let lt = libm::log(t as f64);
        match self {
            RankCriterion::Bic => lt,
            RankCriterion::Hq => 2.0 * libm::log(lt),
        }
    }

    fn method(self) -> SelectionMethod {
        match self {
            RankCriterion::Bic => SelectionMethod::Bic,
            RankCriterion::Hq => SelectionMethod::Hq,
        }
    }
}

/// Cointegrating rank `argmin_{0≤j<q} log det Σ̂(j) + (ρ/T)(2qj − j²)`.
///
/// `t` is the length of the level panel.
pub fn select_coint_rank(xi: &Mat, lagged: &Mat, t: usize, criterion: RankCriterion) -> Result<RankDecision> {
    let q = xi.cols();
    if q < 1 {
        return Err(invalid("cointegrating rank needs at least one factor"));
    }
    let rho = criterion.penalty(t);
    let mut path = Vec::with_capacity(q);
    for j in 0..q {
        let fit = rrr_fit(xi, lagged, j)?;
        let jf = j as f64;
        let pen = rho / t as f64 * (2.0 * q as f64 * jf - jf * jf);
        path.push((j, fit.logdet + pen));
    }
    Ok(RankDecision {
        chosen: argmin(&path),
        criterion_path: path,
        penalty_value: rho,
        method: criterion.method(),
    })
}
