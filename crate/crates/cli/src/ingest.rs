//! The two panel input layouts.
//!
//! Raw long format, one sample per row (empty, `NA` or `NaN` values are
//! gaps):
//!
//! ```text
//! series_id,period_index,grid_point,value
//! ```
//!
//! Coefficient format, one curve per row (all coefficients empty marks a
//! missing curve):
//!
//! ```text
//! series_id,period_index,c1,c2,...,cJ
//! ```

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use curvetrend::{interpolate_gaps, BasisSpec, CurvePanel, Series, Smoother};
use rayon::prelude::*;

use crate::output::num;
use crate::{CliError, Result};

pub const RAW_HEADER: [&str; 4] = ["series_id", "period_index", "grid_point", "value"];
pub const DEFAULT_RAW_BASIS_DIM: usize = 51;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Raw,
    Coefficients(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    pub basis_dim: Option<usize>,
    pub min_obs: usize,
    pub domain: Option<(f64, f64)>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { basis_dim: None, min_obs: 200, domain: None }
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub panel: CurvePanel,
    /// Period labels, ascending; row `t` of every series is `periods[t]`.
    pub periods: Vec<i64>,
    pub layout: Layout,
    pub warnings: Vec<String>,
}

fn detect(header: &csv::StringRecord) -> Option<Layout> {
    let h: Vec<String> = header.iter().map(|s| s.trim().to_ascii_lowercase()).collect();
    if h == RAW_HEADER {
        return Some(Layout::Raw);
    }
    if h.len() >= 3 && h[0] == "series_id" && h[1] == "period_index" {
        let j = h.len() - 2;
        if h[2..].iter().enumerate().all(|(k, name)| *name == format!("c{}", k + 1)) {
            return Some(Layout::Coefficients(j));
        }
    }
    None
}

fn parse_value(s: &str) -> Option<Option<f64>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("na") || s.eq_ignore_ascii_case("nan") {
        return Some(None);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(Some(v)),
        _ => None,
    }
}

/// Series in order of first appearance, each mapping period to its rows.
struct Grouped<T> {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    by_series: Vec<HashMap<i64, T>>,
    periods: BTreeSet<i64>,
}

impl<T: Default> Grouped<T> {
    fn new() -> Self {
        Grouped { ids: Vec::new(), index: HashMap::new(), by_series: Vec::new(), periods: BTreeSet::new() }
    }

    fn entry(&mut self, id: &str, period: i64) -> (&mut T, bool) {
        let i = match self.index.get(id) {
            Some(i) => *i,
            None => {
                self.ids.push(id.to_string());
                self.index.insert(id.to_string(), self.ids.len() - 1);
                self.by_series.push(HashMap::new());
                self.ids.len() - 1
            }
        };
        self.periods.insert(period);
        let map = &mut self.by_series[i];
        let fresh = !map.contains_key(&period);
        (map.entry(period).or_default(), fresh)
    }
}

pub fn read_panel(path: &Path, opts: &IngestOptions) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header = rdr.headers()?.clone();
    let layout = detect(&header).ok_or_else(|| {
        CliError::Input(format!(
            "{}: unrecognized header; expected `series_id,period_index,grid_point,value` or `series_id,period_index,c1,...,cJ`",
            path.display()
        ))
    })?;
    match layout {
        Layout::Raw => read_raw(path, rdr, opts),
        Layout::Coefficients(j) => read_coefficients(path, rdr, j, opts),
    }
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

fn malformed(path: &Path, mut lines: Vec<u64>) -> CliError {
    lines.sort_unstable();
    lines.dedup();
    CliError::Malformed { path: PathBuf::from(path), lines }
}

type RawRows = Vec<(f64, Option<f64>, u64)>;

fn read_raw(path: &Path, mut rdr: csv::Reader<std::fs::File>, opts: &IngestOptions) -> Result<Ingested> {
    let j = opts.basis_dim.unwrap_or(DEFAULT_RAW_BASIS_DIM);
    let mut g: Grouped<RawRows> = Grouped::new();
    let mut bad = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != 4 {
            bad.push(line);
            continue;
        }
        let id = rec[0].trim();
        let period = rec[1].trim().parse::<i64>();
        let x = rec[2].trim().parse::<f64>();
        let v = parse_value(&rec[3]);
        match (id.is_empty(), period, x, v) {
            (false, Ok(p), Ok(x), Some(v)) if x.is_finite() => {
                lo = lo.min(x);
                hi = hi.max(x);
                g.entry(id, p).0.push((x, v, line));
            }
            _ => bad.push(line),
        }
    }
    // Repeated grid points within one curve are malformed too.
    for series in &mut g.by_series {
        for rows in series.values_mut() {
            rows.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in rows.windows(2) {
                if w[0].0 == w[1].0 {
                    bad.push(w[1].2);
                }
            }
        }
    }
    if !bad.is_empty() {
        return Err(malformed(path, bad));
    }
    if g.ids.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    let (a, b) = opts.domain.unwrap_or((lo, hi));
    if !(a < b) {
        return Err(CliError::Input("grid has a single point; pass --domain".into()));
    }
    let basis = BasisSpec::fourier(j, a, b)?;
    let periods: Vec<i64> = g.periods.iter().copied().collect();

    // One QR factorization per distinct grid.
    let mut smoothers: HashMap<Vec<u64>, Smoother> = HashMap::new();
    let mut jobs = Vec::new();
    let mut warnings = Vec::new();
    let mut short = 0usize;
    for (i, series) in g.by_series.iter().enumerate() {
        for (t, p) in periods.iter().enumerate() {
            let Some(rows) = series.get(p) else { continue };
            let observed = rows.iter().filter(|r| r.1.is_some()).count();
            if observed < opts.min_obs.max(2) {
                short += 1;
                continue;
            }
            let grid: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let key: Vec<u64> = grid.iter().map(|x| x.to_bits()).collect();
            if !smoothers.contains_key(&key) {
                smoothers.insert(key.clone(), Smoother::new(&grid, basis)?);
            }
            jobs.push((i, t, key, grid, rows.iter().map(|r| r.1).collect::<Vec<_>>()));
        }
    }
    if short > 0 {
        warnings.push(format!(
            "{short} curve(s) with fewer than {} observed values treated as missing",
            opts.min_obs.max(2)
        ));
    }
    let fitted: Vec<Result<(usize, usize, Vec<f64>)>> = jobs
        .par_iter()
        .map(|(i, t, key, grid, values)| {
            let filled = interpolate_gaps(grid, values)?;
            Ok((*i, *t, smoothers[key].fit(&filled)?.into_coef()))
        })
        .collect();
    let mut curves: Vec<Vec<Option<Vec<f64>>>> = vec![vec![None; periods.len()]; g.ids.len()];
    for f in fitted {
        let (i, t, c) = f?;
        curves[i][t] = Some(c);
    }
    finish(g.ids, curves, periods, basis, Layout::Raw, warnings)
}

fn read_coefficients(
    path: &Path,
    mut rdr: csv::Reader<std::fs::File>,
    j: usize,
    opts: &IngestOptions,
) -> Result<Ingested> {
    if let Some(d) = opts.basis_dim {
        if d != j {
            return Err(CliError::Input(format!("--basis-dim {d} does not match the {j} coefficient columns")));
        }
    }
    let (a, b) = opts.domain.unwrap_or((0.0, 1.0));
    let basis = BasisSpec::fourier(j, a, b)?;
    let mut g: Grouped<Option<Option<Vec<f64>>>> = Grouped::new();
    let mut bad = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if rec.len() != j + 2 {
            bad.push(line);
            continue;
        }
        let id = rec[0].trim();
        let Ok(period) = rec[1].trim().parse::<i64>() else {
            bad.push(line);
            continue;
        };
        let vals: Vec<Option<Option<f64>>> = rec.iter().skip(2).map(parse_value).collect();
        let curve = if vals.iter().all(|v| *v == Some(None)) {
            None
        } else if vals.iter().all(|v| matches!(v, Some(Some(_)))) {
            Some(vals.into_iter().map(|v| v.unwrap().unwrap()).collect())
        } else {
            bad.push(line);
            continue;
        };
        if id.is_empty() {
            bad.push(line);
            continue;
        }
        let (slot, fresh) = g.entry(id, period);
        if !fresh {
            bad.push(line);
            continue;
        }
        *slot = Some(curve);
    }
    if !bad.is_empty() {
        return Err(malformed(path, bad));
    }
    if g.ids.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    let periods: Vec<i64> = g.periods.iter().copied().collect();
    let curves = g
        .by_series
        .into_iter()
        .map(|mut m| periods.iter().map(|p| m.remove(p).flatten().flatten()).collect())
        .collect();
    finish(g.ids, curves, periods, basis, Layout::Coefficients(j), Vec::new())
}

fn finish(
    ids: Vec<String>,
    curves: Vec<Vec<Option<Vec<f64>>>>,
    periods: Vec<i64>,
    basis: BasisSpec,
    layout: Layout,
    mut warnings: Vec<String>,
) -> Result<Ingested> {
    let mut series = Vec::new();
    for (id, c) in ids.into_iter().zip(curves) {
        if c.iter().all(Option::is_none) {
            warnings.push(format!("series `{id}` has no usable periods and was dropped"));
            continue;
        }
        series.push(Series::new(id, basis, c)?);
    }
    if series.is_empty() {
        return Err(CliError::Input("no series with usable periods".into()));
    }
    if periods.len() < 2 {
        return Err(CliError::Input("need at least two periods".into()));
    }
    Ok(Ingested { panel: CurvePanel::new(series)?, periods, layout, warnings })
}

/// Writes `panel` in the coefficient layout.
pub fn write_coefficients(path: &Path, panel: &CurvePanel, periods: &[i64]) -> Result<()> {
    let j = panel.series().first().map_or(0, |s| s.basis().dim());
    let mut header = vec!["series_id".to_string(), "period_index".to_string()];
    header.extend((1..=j).map(|k| format!("c{k}")));
    let rows = panel.series().iter().flat_map(|s| {
        periods.iter().enumerate().map(move |(t, p)| {
            let mut r = vec![s.id().to_string(), p.to_string()];
            match s.coef(t) {
                Some(c) => r.extend(c.iter().map(|v| num(*v))),
                None => r.extend(std::iter::repeat_n(String::new(), j)),
            }
            r
        })
    });
    crate::output::write_csv(path, &header, rows)
}

/// Writes `panel` in the raw layout by evaluating every curve on `grid`.
pub fn write_raw(path: &Path, panel: &CurvePanel, periods: &[i64], grid: &[f64]) -> Result<()> {
    let rows = panel.series().iter().flat_map(|s| {
        periods.iter().enumerate().filter_map(move |(t, p)| s.curve(t).map(|c| (p, c))).flat_map(move |(p, c)| {
            grid.iter().map(move |x| vec![s.id().to_string(), p.to_string(), num(*x), num(c.eval(*x))])
        })
    });
    crate::output::write_csv(path, &RAW_HEADER, rows)
}
