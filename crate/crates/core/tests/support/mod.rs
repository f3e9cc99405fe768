//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the estimators under test beyond plain
//! data accessors.
#![allow(dead_code)]

use curvetrend::{BasisSpec, CurvePanel, Mat, Series, VectorCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_mat(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| normal(rng))
}

/// Random SPD matrix `AᵀA/n + shift·I`.
pub fn random_spd(rng: &mut impl Rng, n: usize, shift: f64) -> Mat {
    let a = random_mat(rng, n + 3, n);
    let mut s = a.t_matmul(&a).scale(1.0 / (n + 3) as f64);
    for i in 0..n {
        s[(i, i)] += shift;
    }
    s
}

/// Complete panel of random-walk coefficient curves on the unit domain.
pub fn random_panel(rng: &mut impl Rng, n: usize, t: usize, j: usize) -> CurvePanel {
    let basis = BasisSpec::unit_fourier(j).unwrap();
    let series = (0..n)
        .map(|i| {
            let mut c = random_mat(rng, t, j);
            for s in 1..t {
                for k in 0..j {
                    c[(s, k)] += c[(s - 1, k)];
                }
            }
            Series::complete(format!("s{i}"), basis, c).unwrap()
        })
        .collect();
    CurvePanel::new(series).unwrap()
}

/// Panel where every series but the first misses each period with
/// probability `p`.
pub fn random_gappy_panel(rng: &mut impl Rng, n: usize, t: usize, j: usize, p: f64) -> CurvePanel {
    let basis = BasisSpec::unit_fourier(j).unwrap();
    let series = (0..n)
        .map(|i| {
            let curves = (0..t)
                .map(|_| {
                    let v: Vec<f64> = (0..j).map(|_| normal(rng)).collect();
                    if i > 0 && rng.random::<f64>() < p {
                        None
                    } else {
                        Some(v)
                    }
                })
                .collect();
            Series::new(format!("s{i}"), basis, curves).unwrap()
        })
        .collect();
    CurvePanel::new(series).unwrap()
}

/// Gram by the textbook double loop: entry `(t, s)` is the average of
/// `Σ_k c_itk c_isk` over series observed at both periods.
pub fn naive_gram(panel: &CurvePanel) -> (Mat, Vec<Vec<u32>>) {
    let t = panel.periods();
    let mut g = Mat::zeros(t, t);
    let mut counts = vec![vec![0u32; t]; t];
    for a in 0..t {
        for b in 0..t {
            let mut sum = 0.0;
            for s in panel.series() {
                if let (Some(x), Some(y)) = (s.coef(a), s.coef(b)) {
                    sum += x.iter().zip(y).map(|(u, v)| u * v).sum::<f64>();
                    counts[a][b] += 1;
                }
            }
            g[(a, b)] = sum / counts[a][b] as f64;
        }
    }
    (g, counts)
}

/// Fourier basis function `j` on `[a, b]`, written out independently of
/// the library.
pub fn fourier(j: usize, a: f64, b: f64, x: f64) -> f64 {
    let len = b - a;
    let u = (x - a) / len;
    let k = ((j + 1) / 2) as f64;
    let v = match j {
        0 => 1.0,
        _ if j % 2 == 1 => 2f64.sqrt() * (2.0 * std::f64::consts::PI * k * u).cos(),
        _ => 2f64.sqrt() * (2.0 * std::f64::consts::PI * k * u).sin(),
    };
    v / len.sqrt()
}

pub fn reconstruct(coef: &[f64], a: f64, b: f64, x: f64) -> f64 {
    coef.iter().enumerate().map(|(j, c)| c * fourier(j, a, b, x)).sum()
}

/// Composite Simpson rule with `points` (odd) abscissae.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
    assert!(points % 2 == 1 && points >= 3);
    let h = (b - a) / (points - 1) as f64;
    let mut s = f(a) + f(b);
    for m in 1..points - 1 {
        let w = if m % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + m as f64 * h);
    }
    s * h / 3.0
}

/// Gaussian elimination with partial pivoting.
pub fn solve_linear(a: &Mat, b: &[f64]) -> Vec<f64> {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|c| m[i][c] * x[c]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    x
}

/// `(XᵀX)⁻¹Xᵀy`.
pub fn normal_equations(x: &Mat, y: &[f64]) -> Vec<f64> {
    let xtx = x.t_matmul(x);
    let xty: Vec<f64> = (0..x.cols()).map(|c| (0..x.rows()).map(|r| x[(r, c)] * y[r]).sum()).collect();
    solve_linear(&xtx, &xty)
}

/// Determinant by elimination, used for log-det cross checks.
pub fn det(a: &Mat) -> f64 {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs())).unwrap();
        if piv != col {
            m.swap(col, piv);
            d = -d;
        }
        d *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

/// Nelder–Mead simplex search, restarted from the incumbent until a
/// restart no longer improves the value.
pub fn minimize(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64) -> (Vec<f64>, f64) {
    let mut best = x0.to_vec();
    let mut fbest = f(&best);
    let mut step = step;
    for _ in 0..60 {
        let (x, fx) = nelder_mead(&f, &best, step, 20_000);
        let improved = fbest - fx;
        best = x;
        fbest = fx;
        if improved.abs() <= 1e-15 * (1.0 + fbest.abs()) {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }
    (best, fbest)
}

fn nelder_mead(f: &impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();
    for _ in 0..iters {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        if (vals[n] - vals[0]).abs() <= 1e-16 * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|k| simplex[..n].iter().map(|p| p[k]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                vals[n] = fe;
            } else {
                simplex[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            simplex[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                simplex[n] = xc;
                vals[n] = fc;
            } else {
                let x0 = simplex[0].clone();
                for i in 1..=n {
                    simplex[i] = x0.iter().zip(&simplex[i]).map(|(a, b)| a + 0.5 * (b - a)).collect();
                    vals[i] = f(&simplex[i]);
                }
            }
        }
    }
    let i = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[i].clone(), vals[i])
}

/// `Σ_t ‖est_t − H truth_t‖²` for `H` given row-major.
fn rotated_rss(est: &Mat, truth: &Mat, h: &[f64]) -> f64 {
    let (q_est, q_true) = (est.cols(), truth.cols());
    let mut s = 0.0;
    for t in 0..est.rows() {
        for a in 0..q_est {
            let fit: f64 = (0..q_true).map(|b| h[a * q_true + b] * truth[(t, b)]).sum();
            let r = est[(t, a)] - fit;
            s += r * r;
        }
    }
    s
}

/// Rotation-minimized factor error by direct search over `H`.
pub fn ae_factors_by_search(est: &Mat, truth: &Mat, normalizer: usize) -> f64 {
    let x0 = vec![0.0; est.cols() * truth.cols()];
    let (_, v) = minimize(|h| rotated_rss(est, truth, h), &x0, 1.0);
    v / (est.cols() * normalizer) as f64
}

/// Same search for functional loadings: one row per (series, coefficient).
pub fn ae_loadings_by_search(est: &[VectorCurve], truth: &[VectorCurve]) -> f64 {
    let rows = |ls: &[VectorCurve]| {
        let q = ls[0].len();
        let mut out = Vec::new();
        for l in ls {
            let c = l.coefs();
            for j in 0..c.cols() {
                out.extend((0..q).map(|k| c[(k, j)]));
            }
        }
        Mat::from_vec(out.len() / q, q, out)
    };
    let (e, t) = (rows(est), rows(truth));
    let x0 = vec![0.0; e.cols() * t.cols()];
    let (_, v) = minimize(|h| rotated_rss(&e, &t, h), &x0, 1.0);
    v / (est[0].len() * est.len()) as f64
}

/// Residual second moment `(1/T′) Σ (ξ_t − α βᵀ g_t)(…)ᵀ` for rank-one
/// `α βᵀ`, parameters `[α; β]`.
pub fn rank_one_sigma(xi: &Mat, lagged: &Mat, params: &[f64]) -> Mat {
    let q = xi.cols();
    let (alpha, beta) = params.split_at(q);
    let mut s = Mat::zeros(q, q);
    for t in 0..xi.rows() {
        let bg: f64 = (0..q).map(|k| beta[k] * lagged[(t, k)]).sum();
        let r: Vec<f64> = (0..q).map(|a| xi[(t, a)] - alpha[a] * bg).collect();
        for a in 0..q {
            for b in 0..q {
                s[(a, b)] += r[a] * r[b];
            }
        }
    }
    s.scale(1.0 / xi.rows() as f64)
}

/// Rows `y_t` whitened so that `(1/T′) Σ y_t y_tᵀ = I`.
pub fn whiten(y: &Mat) -> Mat {
    let q = y.cols();
    let s = y.t_matmul(y).scale(1.0 / y.rows() as f64);
    // Lower Cholesky by hand; y L⁻ᵀ has identity second moment.
    let mut l = Mat::zeros(q, q);
    for i in 0..q {
        for k in 0..=i {
            let mut v = s[(i, k)];
            for m in 0..k {
                v -= l[(i, m)] * l[(k, m)];
            }
            l[(i, k)] = if i == k { v.sqrt() } else { v / l[(k, k)] };
        }
    }
    let mut out = y.clone();
    for t in 0..y.rows() {
        let mut z = y.row(t).to_vec();
        for i in 0..q {
            let s: f64 = (0..i).map(|m| l[(i, m)] * z[m]).sum();
            z[i] = (z[i] - s) / l[(i, i)];
        }
        out.row_mut(t).copy_from_slice(&z);
    }
    out
}

/// Random orthogonal matrix from Gram–Schmidt on Gaussian columns.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Mat {
    let a = random_mat(rng, n, n);
    let mut q = Mat::zeros(n, n);
    for c in 0..n {
        let mut v = a.col(c);
        for p in 0..c {
            let d: f64 = (0..n).map(|r| q[(r, p)] * v[r]).sum();
            for r in 0..n {
                v[r] -= d * q[(r, p)];
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for r in 0..n {
            q[(r, c)] = v[r] / norm;
        }
    }
    q
}

/// Largest entry of `|(1/scale)·FᵀF − I|`.
pub fn identity_defect(f: &Mat, scale: f64) -> f64 {
    let g = f.t_matmul(f).scale(1.0 / scale);
    g.sub(&Mat::identity(g.rows())).max_abs()
}

/// Largest off-diagonal magnitude relative to the trace.
pub fn off_diagonal_mass(m: &Mat) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i != j {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst / m.trace().abs().max(f64::MIN_POSITIVE)
}
