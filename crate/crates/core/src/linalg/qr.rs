use alloc::vec;
use alloc::vec::Vec;

use super::mat::dot;
use super::Mat;
use crate::error::{invalid, Error, Result};

/// Relative tolerance on `|R_kk|` against the largest column norm of `X`.
const RANK_TOL: f64 = 1e-10;

/// Thin Householder QR of a tall matrix with full column rank.
///
/// The factorization can be reused to solve many right-hand sides, which is
/// how per-grid smoothers amortize the cost over thousands of curves.
#[derive(Debug, Clone)]
pub struct Qr {
    m: usize,
    k: usize,
    /// Column-major working copy: below the diagonal the Householder vectors
    /// (unit norm, stored from the diagonal down), above it `R`.
    cols: Vec<Vec<f64>>,
    r_diag: Vec<f64>,
}

impl Qr {
    pub fn new(x: &Mat) -> Result<Self> {
        let (m, k) = (x.rows(), x.cols());
        if k == 0 {
            return Err(invalid("least squares with no columns"));
        }
        if m < k {
            return Err(Error::RankDeficientFit);
        }
        let mut cols: Vec<Vec<f64>> = (0..k).map(|j| x.col(j)).collect();
        let max_norm = cols.iter().map(|c| libm::sqrt(dot(c, c))).fold(0.0_f64, f64::max);
        if !(max_norm > 0.0) || !max_norm.is_finite() {
            return Err(Error::RankDeficientFit);
        }
        let mut r_diag = vec![0.0; k];
        for j in 0..k {
            let norm = libm::sqrt(dot(&cols[j][j..], &cols[j][j..]));
            if norm <= RANK_TOL * max_norm {
                return Err(Error::RankDeficientFit);
            }
            let alpha = if cols[j][j] > 0.0 { -norm } else { norm };
            // v = x - alpha e1, normalized
            cols[j][j] -= alpha;
            let vnorm = libm::sqrt(dot(&cols[j][j..], &cols[j][j..]));
            for v in &mut cols[j][j..] {
                *v /= vnorm;
            }
            let (head, tail) = cols.split_at_mut(j + 1);
            let v = &head[j][j..];
            for c in tail.iter_mut() {
                let s = 2.0 * dot(v, &c[j..]);
                for (ci, vi) in c[j..].iter_mut().zip(v) {
                    *ci -= s * vi;
                }
            }
            r_diag[j] = alpha;
        }
        Ok(Self { m, k, cols, r_diag })
    }

    pub fn nrows(&self) -> usize {
        self.m
    }

    pub fn ncols(&self) -> usize {
        self.k
    }

    /// Overwrites `y` (length `m`) with `Qᵀ y`.
    fn apply_qt(&self, y: &mut [f64]) {
        for j in 0..self.k {
            let v = &self.cols[j][j..];
            let s = 2.0 * dot(v, &y[j..]);
            for (yi, vi) in y[j..].iter_mut().zip(v) {
                *yi -= s * vi;
            }
        }
    }

    #[inline]
    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[i]
        } else {
            self.cols[j][i]
        }
    }

    /// Least-squares coefficients for a single right-hand side.
    pub fn solve_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.m);
        let mut w = y.to_vec();
        self.apply_qt(&mut w);
        let mut b = vec![0.0; self.k];
        for i in (0..self.k).rev() {
            let mut s = w[i];
            for j in (i + 1)..self.k {
                s -= self.r(i, j) * b[j];
            }
            b[i] = s / self.r_diag[i];
        }
        b
    }

    pub fn solve(&self, y: &Mat) -> Mat {
        assert_eq!(y.rows(), self.m);
        let mut out = Mat::zeros(self.k, y.cols());
        for c in 0..y.cols() {
            out.set_col(c, &self.solve_vec(&y.col(c)));
        }
        out
    }

    /// `(XᵀX)⁻¹ = R⁻¹ R⁻ᵀ`.
    pub fn gram_inverse(&self) -> Mat {
        let k = self.k;
        // Rinv is upper triangular.
        let mut rinv = Mat::zeros(k, k);
        for c in 0..k {
            rinv[(c, c)] = 1.0 / self.r_diag[c];
            for i in (0..c).rev() {
                let mut s = 0.0;
                for j in (i + 1)..=c {
                    s += self.r(i, j) * rinv[(j, c)];
                }
                rinv[(i, c)] = -s / self.r_diag[i];
            }
        }
        rinv.matmul_t(&rinv)
    }
}

/// Minimizes `‖Y − X·B‖_F` via Householder QR.
pub fn lstsq(x: &Mat, y: &Mat) -> Result<Mat> {
    if x.rows() != y.rows() {
        return Err(invalid("lstsq: X and Y row counts differ"));
    }
    Ok(Qr::new(x)?.solve(y))
}
