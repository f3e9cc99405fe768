use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{cholesky, hypot, Mat};
use crate::error::{invalid, Error, Result};

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
///
/// Column `k` of `eigenvectors` pairs with `eigenvalues[k]`. Each column is
/// signed so that its entry of largest magnitude is nonnegative (first such
/// entry on ties).
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// The leading `k` eigenvectors as an `n × k` matrix.
    pub fn leading_vectors(&self, k: usize) -> Mat {
        self.eigenvectors.leading_cols(k)
    }

    fn from_unsorted(values: Vec<f64>, vectors_by_col: Vec<Vec<f64>>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        // Stable sort keeps the solver's order on exact ties.
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let rows = vectors_by_col.first().map_or(0, Vec::len);
        let mut eigenvectors = Mat::zeros(rows, n);
        let mut eigenvalues = Vec::with_capacity(n);
        for (k, &src) in order.iter().enumerate() {
            let mut v = vectors_by_col[src].clone();
            fix_sign(&mut v);
            eigenvectors.set_col(k, &v);
            eigenvalues.push(values[src]);
        }
        Self { eigenvalues, eigenvectors }
    }
}

fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn check_symmetric(a: &Mat) -> Result<()> {
    if !a.is_square() {
        return Err(invalid(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    if !a.is_finite() {
        return Err(invalid("matrix has non-finite entries"));
    }
    let scale = a.max_abs();
    if a.asymmetry() > 1e-8 * scale {
        return Err(invalid("matrix is not symmetric"));
    }
    Ok(())
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Householder reduction to tridiagonal form followed by the implicit QL
/// iteration with Wilkinson-type shifts. Cost is `O(n³)` with a small
/// constant, which keeps `T ≈ 400` Gram matrices well under a second.
pub fn sym_eig(a: &Mat) -> Result<EigenDecomposition> {
    check_symmetric(a)?;
    let n = a.rows();
    if n == 0 {
        return Ok(EigenDecomposition { eigenvalues: Vec::new(), eigenvectors: Mat::zeros(0, 0) });
    }
    // Work on the symmetrized lower triangle so tiny asymmetries cannot leak in.
    let mut v = Mat::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] });
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    // QL rotates pairs of columns; transposing first makes those contiguous rows.
    let mut z = v.transpose();
    tridiagonal_ql(&mut z, &mut d, &mut e)?;
    let vectors = (0..n).map(|k| z.row(k).to_vec()).collect();
    Ok(EigenDecomposition::from_unsorted(d, vectors))
}

/// Householder tridiagonalization (EISPACK `tred2` ordering). On return `d`
/// holds the diagonal, `e[1..]` the subdiagonal, and `v` the accumulated
/// orthogonal transform.
fn tridiagonalize(v: &mut Mat, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = libm::sqrt(h);
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    let vkj = v[(k, j)];
                    g += vkj * d[k];
                    e[k] += vkj * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

/// Implicit QL on the tridiagonal `(d, e)`; `z` holds eigenvectors as rows.
fn tridiagonal_ql(z: &mut Mat, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    const MAX_ITER: usize = 60;
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_ITER {
                    return Err(Error::NumericalFailure(format!(
                        "tridiagonal QL did not converge for eigenvalue {l}"
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(z, i, s, c);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[inline]
fn rotate_rows(z: &mut Mat, i: usize, s: f64, c: f64) {
    let cols = z.cols();
    let data = z.as_mut_slice();
    let (lo, hi) = data.split_at_mut((i + 1) * cols);
    let zi = &mut lo[i * cols..];
    let zi1 = &mut hi[..cols];
    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Slower than [`sym_eig`] for large matrices but an entirely separate
/// algorithm, which makes it a useful cross-check. Sweeps stop once the
/// off-diagonal Frobenius mass is at most `1e-12·‖A‖_F` (at most 100 sweeps).
pub fn jacobi_eig(a: &Mat) -> Result<EigenDecomposition> {
    check_symmetric(a)?;
    let n = a.rows();
    let mut m = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut vt = Mat::identity(n); // rows are eigenvectors
    let norm = m.frobenius_norm();
    let off = |m: &Mat| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)] * m[(i, j)];
                }
            }
        }
        libm::sqrt(s)
    };
    let mut converged = off(&m) <= 1e-12 * norm;
    let mut sweep = 0;
    while !converged {
        if sweep == 100 {
            return Err(Error::NumericalFailure("Jacobi sweeps did not converge".into()));
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (theta.abs() + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vp = vt[(p, k)];
                    let vq = vt[(q, k)];
                    vt[(p, k)] = c * vp - s * vq;
                    vt[(q, k)] = s * vp + c * vq;
                }
            }
        }
        converged = off(&m) <= 1e-12 * norm;
    }
    let values = (0..n).map(|i| m[(i, i)]).collect();
    let vectors = (0..n).map(|k| vt.row(k).to_vec()).collect();
    Ok(EigenDecomposition::from_unsorted(values, vectors))
}

/// Solves `S v = λ M v` for symmetric `S` and SPD `M`, with `vᵀ M v = 1`.
///
/// Reduces through `M = L Lᵀ` to the standard problem for `L⁻¹ S L⁻ᵀ`.
pub fn gen_sym_eig(s: &Mat, m: &Mat) -> Result<EigenDecomposition> {
    check_symmetric(s)?;
    if m.rows() != s.rows() || m.cols() != s.cols() {
        return Err(invalid("gen_sym_eig: dimension mismatch"));
    }
    let chol = cholesky(m)?;
    let n = s.rows();
    // C = L⁻¹ S L⁻ᵀ, built column by column.
    let mut w = Mat::zeros(n, n); // W = L⁻¹ S
    for j in 0..n {
        let mut col = s.col(j);
        chol.forward(&mut col);
        w.set_col(j, &col);
    }
    let mut c = Mat::zeros(n, n); // C = W L⁻ᵀ = (L⁻¹ Wᵀ)ᵀ
    for i in 0..n {
        let mut row = w.row(i).to_vec();
        chol.forward(&mut row);
        c.row_mut(i).copy_from_slice(&row);
    }
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = sym_eig(&c)?;
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n {
        let mut y = eig.eigenvectors.col(k);
        chol.backward(&mut y);
        vectors.push(y);
    }
    Ok(EigenDecomposition::from_unsorted(eig.eigenvalues, vectors))
}
