//! Panels of curve time series and their cross-period Gram matrices.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::funcspace::{BasisSpec, Curve};
use crate::linalg::Mat;

/// One series: a basis and `T` optional curves.
///
/// Coefficients are kept as a `T × J` matrix; rows of unavailable periods
/// are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    id: String,
    basis: BasisSpec,
    coefs: Mat,
    available: Vec<bool>,
}

impl Series {
    pub fn new(id: impl Into<String>, basis: BasisSpec, curves: Vec<Option<Vec<f64>>>) -> Result<Self> {
        let id = id.into();
        let j = basis.dim();
        let mut coefs = Mat::zeros(curves.len(), j);
        let mut available = Vec::with_capacity(curves.len());
        for (t, c) in curves.into_iter().enumerate() {
            match c {
                Some(c) => {
                    if c.len() != j {
                        return Err(invalid(format!(
                            "series {id}: period {t} has {} coefficients, basis has {j}",
                            c.len()
                        )));
                    }
                    if c.iter().any(|x| !x.is_finite()) {
                        return Err(invalid(format!("series {id}: non-finite coefficient at period {t}")));
                    }
                    coefs.row_mut(t).copy_from_slice(&c);
                    available.push(true);
                }
                None => available.push(false),
            }
        }
        Ok(Self { id, basis, coefs, available })
    }

    /// A fully observed series from a `T × J` coefficient matrix.
    pub fn complete(id: impl Into<String>, basis: BasisSpec, coefs: Mat) -> Result<Self> {
        let id = id.into();
        if coefs.cols() != basis.dim() {
            return Err(invalid(format!(
                "series {id}: {} coefficient columns, basis has {}",
                coefs.cols(),
                basis.dim()
            )));
        }
        if !coefs.is_finite() {
            return Err(invalid(format!("series {id}: non-finite coefficients")));
        }
        let available = vec![true; coefs.rows()];
        Ok(Self { id, basis, coefs, available })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn basis(&self) -> &BasisSpec {
        &self.basis
    }

    pub fn periods(&self) -> usize {
        self.available.len()
    }

    pub fn is_available(&self, t: usize) -> bool {
        self.available[t]
    }

    pub fn availability(&self) -> &[bool] {
        &self.available
    }

    pub fn available_count(&self) -> usize {
        self.available.iter().filter(|a| **a).count()
    }

    pub fn coef(&self, t: usize) -> Option<&[f64]> {
        self.available[t].then(|| self.coefs.row(t))
    }

    pub fn curve(&self, t: usize) -> Option<Curve> {
        self.coef(t).map(|c| Curve::new(self.basis, c.to_vec()).expect("row length matches basis"))
    }

    /// `T × J` coefficients with zero rows where unavailable.
    pub fn coefs(&self) -> &Mat {
        &self.coefs
    }
}

/// `N` series observed over a common `T`-period time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePanel {
    periods: usize,
    series: Vec<Series>,
}

impl CurvePanel {
    pub fn new(series: Vec<Series>) -> Result<Self> {
        let first = series.first().ok_or_else(|| invalid("panel needs at least one series"))?;
        let periods = first.periods();
        if periods == 0 {
            return Err(invalid("panel needs at least one period"));
        }
        if let Some(s) = series.iter().find(|s| s.periods() != periods) {
            return Err(invalid(format!(
                "series {} has {} periods, expected {periods}",
                s.id(),
                s.periods()
            )));
        }
        Ok(Self { periods, series })
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn n_series(&self) -> usize {
        self.series.len()
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn is_available(&self, i: usize, t: usize) -> bool {
        self.series[i].available[t]
    }

    pub fn is_complete(&self) -> bool {
        self.series.iter().all(|s| s.available.iter().all(|a| *a))
    }

    /// `N × T` availability mask.
    pub fn availability(&self) -> Vec<Vec<bool>> {
        self.series.iter().map(|s| s.available.clone()).collect()
    }
}

/// First differences `Z_{i,t+1} − Z_{i,t}`; a difference is available only
/// when both levels are.
pub fn difference(panel: &CurvePanel) -> Result<CurvePanel> {
    let t = panel.periods();
    if t < 2 {
        return Err(Error::TooShort(t));
    }
    let series = panel
        .series
        .iter()
        .map(|s| {
            let j = s.basis.dim();
            let mut coefs = Mat::zeros(t - 1, j);
            let mut available = vec![false; t - 1];
            for k in 0..t - 1 {
                if s.available[k] && s.available[k + 1] {
                    available[k] = true;
                    let (a, b) = (s.coefs.row(k), s.coefs.row(k + 1));
                    for ((o, x), y) in coefs.row_mut(k).iter_mut().zip(a).zip(b) {
                        *o = y - x;
                    }
                }
            }
            Series { id: s.id.clone(), basis: s.basis, coefs, available }
        })
        .collect();
    Ok(CurvePanel { periods: t - 1, series })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramMode {
    Levels,
    Differences,
}

/// `S × S` matrix of cross-period inner products averaged over series.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub values: Mat,
    pub mode: GramMode,
    pair_counts: Vec<u32>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.values.rows()
    }

    /// Number of series observed at both periods `t` and `s`.
    pub fn pair_count(&self, t: usize, s: usize) -> u32 {
        self.pair_counts[t * self.size() + s]
    }
}

/// Gram matrix in levels (`S = T`) or first differences (`S = T − 1`).
///
/// Entry `(t, s)` averages `⟨Z_it, Z_is⟩` over exactly the series observed
/// at both periods. Only the upper triangle is computed and then mirrored.
pub fn gram(panel: &CurvePanel, mode: GramMode) -> Result<GramMatrix> {
    let diffed;
    let panel = match mode {
        GramMode::Levels => panel,
        GramMode::Differences => {
            diffed = difference(panel)?;
            &diffed
        }
    };
    let s_len = panel.periods();
    let n = panel.n_series();
    let width: usize = panel.series.iter().map(|s| s.basis.dim()).sum();

    // Stack each period's coefficients across series into one row; missing
    // curves are zero rows and so drop out of every sum automatically.
    let mut stacked = Mat::zeros(s_len, width);
    for t in 0..s_len {
        let row = stacked.row_mut(t);
        let mut off = 0;
        for s in &panel.series {
            let j = s.basis.dim();
            row[off..off + j].copy_from_slice(s.coefs.row(t));
            off += j;
        }
    }

    let mut pair_counts = vec![n as u32; s_len * s_len];
    if !panel.is_complete() {
        for t in 0..s_len {
            for u in t..s_len {
                let c = panel.series.iter().filter(|s| s.available[t] && s.available[u]).count() as u32;
                if c == 0 {
                    return Err(Error::IncompletePair(t, u));
                }
                pair_counts[t * s_len + u] = c;
                pair_counts[u * s_len + t] = c;
            }
        }
    }

    let mut values = stacked.outer_gram();
    for (v, c) in values.as_mut_slice().iter_mut().zip(&pair_counts) {
        *v /= *c as f64;
    }
    Ok(GramMatrix { values, mode, pair_counts })
}
