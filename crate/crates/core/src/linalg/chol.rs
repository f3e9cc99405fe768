use super::Mat;
use crate::error::{invalid, Error, Result};

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Mat,
}

pub fn cholesky(a: &Mat) -> Result<Cholesky> {
    if !a.is_square() {
        return Err(invalid("cholesky needs a square matrix"));
    }
    let n = a.rows();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    if a.asymmetry() > 1e-8 * scale {
        return Err(invalid("cholesky needs a symmetric matrix"));
    }
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        let ljj = libm::sqrt(d);
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(Cholesky { l })
}

impl Cholesky {
    pub fn factor(&self) -> &Mat {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn logdet(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| libm::log(self.l[(i, i)])).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &Mat) -> Mat {
        assert_eq!(b.rows(), self.dim());
        let mut x = Mat::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let mut col = b.col(j);
            self.forward(&mut col);
            self.backward(&mut col);
            x.set_col(j, &col);
        }
        x
    }

    pub fn inverse(&self) -> Mat {
        self.solve(&Mat::identity(self.dim()))
    }
}

pub fn cholesky_solve(a: &Mat, b: &Mat) -> Result<Mat> {
    Ok(cholesky(a)?.solve(b))
}

/// `log det A` for symmetric positive definite `A`, as twice the sum of the
/// log-diagonal of its Cholesky factor.
pub fn logdet_spd(a: &Mat) -> Result<f64> {
    Ok(cholesky(a)?.logdet())
}
