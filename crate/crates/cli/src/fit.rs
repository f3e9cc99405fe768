//! `fit`: ingest a panel, pick the number of trends and write the estimates.

use std::path::Path;

use curvetrend::panic::lagged_trends;
use curvetrend::selection::default_q_max;
use curvetrend::{
    fit_fpca, fit_panic, select_coint_rank, select_q_diff, select_q_levels, FactorFit, Mat, RankCriterion,
    RankDecision,
};

use crate::args::{Criterion, FitArgs, Mode, QChoice};
use crate::ingest::{read_panel, IngestOptions, Ingested};
use crate::output::{ensure_dir, num, write_csv, write_text};
use crate::{svg, Result};

const SCREE_BARS: usize = 30;

#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub fit: FactorFit,
    /// Absent when `--q` was fixed.
    pub selection: Option<RankDecision>,
    pub q: usize,
    pub coint: Option<RankDecision>,
    pub periods: Vec<i64>,
    pub series_ids: Vec<String>,
    pub warnings: Vec<String>,
}

impl From<Criterion> for RankCriterion {
    fn from(c: Criterion) -> Self {
        match c {
            Criterion::Bic => RankCriterion::Bic,
            Criterion::Hq => RankCriterion::Hq,
        }
    }
}

fn estimate(mode: Mode, data: &Ingested, q: usize) -> Result<FactorFit> {
    Ok(match mode {
        Mode::Fpca => fit_fpca(&data.panel, q)?,
        Mode::Panic => fit_panic(&data.panel, q)?,
    })
}

/// Fits `args.data` and writes every output file to `out_dir`.
pub fn cmd_fit(args: &FitArgs, out_dir: &Path) -> Result<FitOutcome> {
    let opts = IngestOptions { basis_dim: args.basis_dim, min_obs: args.min_obs, domain: args.domain };
    let data = read_panel(&args.data, &opts)?;
    let outcome = fit_ingested(args, data)?;
    write_fit(&outcome, args.mode, out_dir)?;
    Ok(outcome)
}

/// The estimation part of [`cmd_fit`], without any file output.
pub fn fit_ingested(args: &FitArgs, data: Ingested) -> Result<FitOutcome> {
    let (n, t) = (data.panel.n_series(), data.panel.periods());
    let spectrum = estimate(args.mode, &data, 0)?;
    let gram_size = spectrum.eigenvalues.len();
    let (q, selection) = match args.q {
        QChoice::Fixed(q) => (q, None),
        QChoice::Auto => {
            let q_max = args.q_max.unwrap_or_else(|| default_q_max(n, gram_size));
            let d = match args.mode {
                Mode::Fpca => select_q_levels(&spectrum.eigenvalues, n, t, q_max, args.penalty)?,
                Mode::Panic => select_q_diff(&spectrum.eigenvalues, n, t, q_max, args.penalty)?,
            };
            (d.chosen, Some(d))
        }
    };
    let fit = if q == 0 { spectrum } else { estimate(args.mode, &data, q)? };
    let coint = match (args.mode, q) {
        (Mode::Panic, q) if q >= 1 => {
            Some(select_coint_rank(&fit.factors, &lagged_trends(&fit), t, args.rank_criterion.into())?)
        }
        _ => None,
    };
    let mut warnings = data.warnings;
    if q == 0 {
        warnings.push("no trends selected; only the spectrum is reported".into());
    }
    let series_ids = data.panel.series().iter().map(|s| s.id().to_string()).collect();
    Ok(FitOutcome { fit, selection, q, coint, periods: data.periods, series_ids, warnings })
}

fn period_rows<'a>(labels: &'a [i64], m: &'a Mat) -> impl Iterator<Item = Vec<String>> + 'a {
    labels.iter().enumerate().map(move |(r, p)| {
        let mut row = vec![p.to_string()];
        row.extend(m.row(r).iter().map(|v| num(*v)));
        row
    })
}

/// Trend levels labelled by period. PANIC trends start at zero in the first
/// period.
pub fn trend_table(outcome: &FitOutcome, mode: Mode) -> Mat {
    let f = &outcome.fit;
    match mode {
        Mode::Fpca => f.factors.clone(),
        Mode::Panic => {
            let g = f.trends_from_origin();
            Mat::from_fn(g.rows() + 1, f.q, |r, k| if r == 0 { 0.0 } else { g[(r - 1, k)] })
        }
    }
}

/// Period labels of the `factors` rows.
pub fn factor_periods(outcome: &FitOutcome, mode: Mode) -> &[i64] {
    match mode {
        Mode::Fpca => &outcome.periods,
        Mode::Panic => &outcome.periods[1..],
    }
}

fn write_fit(o: &FitOutcome, mode: Mode, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let f = &o.fit;
    write_csv(
        &dir.join("scree.csv"),
        &["index", "eigenvalue"],
        f.eigenvalues.iter().enumerate().map(|(k, v)| vec![(k + 1).to_string(), num(*v)]),
    )?;
    write_text(&dir.join("scree.svg"), &svg::scree(&f.eigenvalues, o.q, SCREE_BARS))?;

    if let Some(d) = &o.selection {
        write_csv(
            &dir.join("selection.csv"),
            &["method", "candidate", "criterion", "chosen"],
            d.criterion_path.iter().map(|(j, v)| {
                // The eigenvalue criteria report `argmin − 1`.
                let chosen = *j == d.chosen + 1;
                vec![d.method.name().to_string(), j.to_string(), num(*v), (chosen as u8).to_string()]
            }),
        )?;
    }

    if f.q == 0 {
        return Ok(());
    }
    let labels: Vec<String> = (1..=f.q).map(|k| format!("factor_{k}")).collect();
    let header: Vec<String> = std::iter::once("period".to_string()).chain(labels).collect();
    write_csv(&dir.join("factors.csv"), &header, period_rows(factor_periods(o, mode), &f.factors))?;

    let trends = trend_table(o, mode);
    let labels: Vec<String> = (1..=f.q).map(|k| format!("trend_{k}")).collect();
    let header: Vec<String> = std::iter::once("period".to_string()).chain(labels.iter().cloned()).collect();
    write_csv(&dir.join("trends.csv"), &header, period_rows(&o.periods, &trends))?;
    let x: Vec<f64> = o.periods.iter().map(|p| *p as f64).collect();
    let cols: Vec<Vec<f64>> = (0..f.q).map(|k| (0..trends.rows()).map(|r| trends[(r, k)]).collect()).collect();
    write_text(&dir.join("trends.svg"), &svg::lines("Estimated trends", &x, &cols, &labels))?;

    let j = f.loadings.first().map_or(0, |l| l.basis().dim());
    let header: Vec<String> =
        ["series_id", "component"].iter().map(|s| s.to_string()).chain((1..=j).map(|k| format!("c{k}"))).collect();
    let rows = o.series_ids.iter().zip(&f.loadings).flat_map(|(id, l)| {
        (0..f.q).map(move |k| {
            let mut r = vec![id.clone(), (k + 1).to_string()];
            r.extend(l.coefs().row(k).iter().map(|v| num(*v)));
            r
        })
    });
    write_csv(&dir.join("loadings.csv"), &header, rows)?;

    if let Some(d) = &o.coint {
        write_csv(
            &dir.join("coint_rank.csv"),
            &["criterion", "candidate", "value", "chosen"],
            d.criterion_path.iter().map(|(j, v)| {
                vec![d.method.name().to_string(), j.to_string(), num(*v), ((*j == d.chosen) as u8).to_string()]
            }),
        )?;
    }
    Ok(())
}

