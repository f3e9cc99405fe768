//! Ordinary least squares with classical inference, for regressing trend
//! increments on external factor series.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::linalg::{Mat, Qr};

#[derive(Debug, Clone, PartialEq)]
pub struct OlsSummary {
    /// Intercept first when one was added.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub t_stats: Vec<f64>,
    /// Two-sided p-values of the t statistics.
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
    /// Overall F statistic for the slopes; absent when there are none.
    pub f_stat: Option<f64>,
    pub f_p_value: Option<f64>,
    pub df_resid: usize,
    pub intercept: bool,
}

/// Regresses `y` on the columns of `x`, prepending a column of ones when
/// `intercept` is set. R² is centered with an intercept and uncentered
/// without one.
pub fn ols(y: &[f64], x: &Mat, intercept: bool) -> Result<OlsSummary> {
    let m = y.len();
    if x.rows() != m {
        return Err(invalid("y and X must have the same number of rows"));
    }
    let design = if intercept {
        Mat::from_fn(m, x.cols() + 1, |r, c| if c == 0 { 1.0 } else { x[(r, c - 1)] })
    } else {
        x.clone()
    };
    let k = design.cols();
    if k == 0 {
        return Err(invalid("design has no columns"));
    }
    if m <= k {
        return Err(invalid("need more observations than regressors"));
    }
    let qr = Qr::new(&design)?;
    let coefficients = qr.solve_vec(y);
    let fitted = design.matvec(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let df_resid = m - k;
    let sigma2 = rss / df_resid as f64;
    let xtx_inv = qr.gram_inverse();
    let std_errors: Vec<f64> = (0..k).map(|j| libm::sqrt(sigma2 * xtx_inv[(j, j)])).collect();
    let t_stats: Vec<f64> = coefficients.iter().zip(&std_errors).map(|(b, s)| b / s).collect();
    let p_values = t_stats.iter().map(|t| t_two_sided(*t, df_resid as f64)).collect();

    let tss = if intercept {
        let mean = y.iter().sum::<f64>() / m as f64;
        y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    let slopes = k - usize::from(intercept);
    let (f_stat, f_p_value) = if slopes == 0 {
        (None, None)
    } else {
        let d1 = slopes as f64;
        let d2 = df_resid as f64;
        let explained = (tss - rss).max(0.0);
        let f = if rss > 0.0 { (explained / d1) / (rss / d2) } else { f64::INFINITY };
        (Some(f), Some(f_sf(f, d1, d2)))
    };

    Ok(OlsSummary {
        coefficients,
        std_errors,
        t_stats,
        p_values,
        residuals,
        rss,
        r_squared,
        f_stat,
        f_p_value,
        df_resid,
        intercept,
    })
}

/// Upper tail `P(F > f)` of the F distribution with `(d1, d2)` degrees.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f.is_infinite() {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    inc_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f))
}

/// `P(|T| > |t|)` for Student's t with `df` degrees.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return f64::NAN;
    }
    if t.is_infinite() {
        return 0.0;
    }
    inc_beta(df / 2.0, 0.5, df / (df + t * t))
}

/// Regularized incomplete beta `I_x(a, b)` by Lentz's continued fraction.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log(1.0 - x);
    let front = libm::exp(ln_front);
    // The fraction converges fast only below the mean; use symmetry above it.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let (qab, qap, qam) = (a + b, a + 1.0, a - 1.0);
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
