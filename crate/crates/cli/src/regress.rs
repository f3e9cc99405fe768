//! `regress`: trend increments on external factor series.
//!
//! Both inputs are period-first CSVs (`period,<name>,<name>,...`). The
//! increment `ΔG_t = G_t − G_{t−1}` between consecutive trend rows carries
//! the later period's label and is matched to the factor row with that label.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use curvetrend::{ols, Mat, OlsSummary};

use crate::args::RegressArgs;
use crate::output::{ensure_dir, num, opt_num, write_csv, write_text};
use crate::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub periods: Vec<i64>,
    /// One row per period.
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(CliError::Input(format!("{}: need a period column and at least one value column", path.display())));
    }
    let names: Vec<String> = header.iter().skip(1).map(|s| s.trim().to_string()).collect();
    let (mut periods, mut rows, mut bad) = (Vec::new(), Vec::new(), Vec::new());
    let mut seen = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let period = rec.get(0).and_then(|s| s.trim().parse::<i64>().ok());
        let vals: Option<Vec<f64>> = (rec.len() == header.len())
            .then(|| rec.iter().skip(1).map(|s| s.trim().parse::<f64>().ok().filter(|v| v.is_finite())).collect())
            .flatten();
        match (period, vals) {
            (Some(p), Some(v)) if seen.insert(p, ()).is_none() => {
                periods.push(p);
                rows.push(v);
            }
            _ => bad.push(line),
        }
    }
    if !bad.is_empty() {
        return Err(CliError::Malformed { path: PathBuf::from(path), lines: bad });
    }
    if periods.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Input(format!("{}: periods must be increasing", path.display())));
    }
    Ok(Table { names, periods, rows })
}

#[derive(Debug, Clone)]
pub struct RegressOutcome {
    pub trend_names: Vec<String>,
    pub factor_names: Vec<String>,
    pub periods: Vec<i64>,
    pub fits: Vec<OlsSummary>,
    pub warnings: Vec<String>,
}

/// Aligns increments with factor rows and runs one regression per trend.
pub fn regress_tables(trends: &Table, factors: &Table, intercept: bool) -> Result<RegressOutcome> {
    if trends.periods.len() < 2 {
        return Err(CliError::Input("need at least two trend periods".into()));
    }
    let index: HashMap<i64, usize> = factors.periods.iter().enumerate().map(|(r, p)| (*p, r)).collect();
    let periods: Vec<i64> = trends.periods[1..].to_vec();
    let missing: Vec<String> = periods.iter().filter(|p| !index.contains_key(p)).map(|p| p.to_string()).collect();
    if !missing.is_empty() {
        let shown = missing.iter().take(10).cloned().collect::<Vec<_>>().join(", ");
        return Err(CliError::Misaligned(format!("no factor rows for increment periods {shown}")));
    }
    let mut warnings = Vec::new();
    let extra = factors.periods.len() - periods.len();
    if extra > 0 {
        warnings.push(format!("{extra} factor row(s) outside the increment periods were ignored"));
    }
    let x = Mat::from_fn(periods.len(), factors.names.len(), |r, c| factors.rows[index[&periods[r]]][c]);
    let mut fits = Vec::new();
    for k in 0..trends.names.len() {
        let y: Vec<f64> = (1..trends.rows.len()).map(|t| trends.rows[t][k] - trends.rows[t - 1][k]).collect();
        let fit = ols(&y, &x, intercept)
            .map_err(|e| CliError::Input(format!("regression for `{}`: {e}", trends.names[k])))?;
        fits.push(fit);
    }
    Ok(RegressOutcome {
        trend_names: trends.names.clone(),
        factor_names: factors.names.clone(),
        periods,
        fits,
        warnings,
    })
}

pub fn cmd_regress(args: &RegressArgs, out_dir: &Path) -> Result<Vec<String>> {
    let trends = read_table(&args.trends)?;
    let factors = read_table(&args.factors)?;
    let o = regress_tables(&trends, &factors, !args.no_intercept)?;
    write_regress(&o, out_dir)?;
    Ok(o.warnings)
}

fn terms(o: &RegressOutcome, fit: &OlsSummary) -> Vec<String> {
    let mut t = Vec::new();
    if fit.intercept {
        t.push("intercept".to_string());
    }
    t.extend(o.factor_names.iter().cloned());
    t
}

fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn write_regress(o: &RegressOutcome, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let mut rows = Vec::new();
    for (name, fit) in o.trend_names.iter().zip(&o.fits) {
        for (k, term) in terms(o, fit).into_iter().enumerate() {
            rows.push(vec![
                name.clone(),
                term,
                num(fit.coefficients[k]),
                num(fit.std_errors[k]),
                num(fit.t_stats[k]),
                num(fit.p_values[k]),
            ]);
        }
    }
    write_csv(
        &dir.join("regress.csv"),
        &["trend", "term", "coefficient", "std_error", "t_stat", "p_value"],
        rows,
    )?;
    write_csv(
        &dir.join("regress_fit.csv"),
        &["trend", "observations", "r_squared", "f_stat", "f_p_value", "df_resid"],
        o.trend_names.iter().zip(&o.fits).map(|(name, fit)| {
            vec![
                name.clone(),
                fit.residuals.len().to_string(),
                num(fit.r_squared),
                opt_num(fit.f_stat),
                opt_num(fit.f_p_value),
                fit.df_resid.to_string(),
            ]
        }),
    )?;
    write_text(&dir.join("regress.md"), &markdown(o))
}

/// Coefficients with standard errors below, one column per trend.
fn markdown(o: &RegressOutcome) -> String {
    let mut s = String::new();
    let first = o.periods.first().copied().unwrap_or_default();
    let last = o.periods.last().copied().unwrap_or_default();
    let _ = writeln!(s, "# Trend increments on factors\n");
    let _ = writeln!(s, "Periods {first}–{last}, {} observations.\n", o.periods.len());
    let _ = write!(s, "| |");
    for name in &o.trend_names {
        let _ = write!(s, " {name} |");
    }
    let _ = write!(s, "\n|---|");
    for _ in &o.trend_names {
        let _ = write!(s, "---:|");
    }
    s.push('\n');
    let Some(fit0) = o.fits.first() else { return s };
    for (k, term) in terms(o, fit0).iter().enumerate() {
        let _ = write!(s, "| {term} |");
        for fit in &o.fits {
            let _ = write!(s, " {:.4}{} |", fit.coefficients[k], stars(fit.p_values[k]));
        }
        let _ = write!(s, "\n| |");
        for fit in &o.fits {
            let _ = write!(s, " ({:.4}) |", fit.std_errors[k]);
        }
        s.push('\n');
    }
    let _ = write!(s, "| R² |");
    for fit in &o.fits {
        let _ = write!(s, " {:.3} |", fit.r_squared);
    }
    let _ = write!(s, "\n| F |");
    for fit in &o.fits {
        match (fit.f_stat, fit.f_p_value) {
            (Some(f), Some(p)) => {
                let _ = write!(s, " {f:.3}{} |", stars(p));
            }
            _ => s.push_str(" |"),
        }
    }
    s.push_str("\n\nStandard errors in parentheses; * p<0.1, ** p<0.05, *** p<0.01.\n");
    s
}
