//! `simulate`: Monte Carlo campaigns over a grid of cells.
//!
//! Replications run in parallel but every output is a pure function of the
//! plan: records are regrouped by cell and sorted by replication index
//! before anything is written.

use std::fmt::Write as _;
use std::path::Path;

use curvetrend::simulate::{Metric, ReplicationReport, DGP_REPAIRS, RNG_DESCRIPTION};
use curvetrend::{run_replication, Design, Rotation, SelectionMethod, SimConfig};
use rayon::prelude::*;

use crate::config::SimPlan;
use crate::output::{ensure_dir, num, opt_count, opt_num, write_csv, write_text};
use crate::{CliError, Result};

/// Share of replications that must succeed for a zero exit status.
pub const MIN_SUCCESS_RATE: f64 = 0.9;

#[derive(Debug, Clone)]
pub struct SimOutcome {
    /// One report per cell, in plan order.
    pub reports: Vec<ReplicationReport>,
}

impl SimOutcome {
    pub fn total(&self) -> usize {
        self.reports.iter().map(|r| r.records.len()).sum()
    }

    pub fn failed(&self) -> usize {
        self.reports.iter().map(|r| r.failures()).sum()
    }

    pub fn check(&self) -> Result<()> {
        let (failed, total) = (self.failed(), self.total());
        if total > 0 && ((total - failed) as f64) < MIN_SUCCESS_RATE * total as f64 {
            return Err(CliError::TooManyFailures { failed, total });
        }
        Ok(())
    }
}

pub fn run_plan(plan: &SimPlan) -> SimOutcome {
    let jobs: Vec<(usize, u64)> =
        (0..plan.cells.len()).flat_map(|c| (1..=plan.replications as u64).map(move |r| (c, r))).collect();
    let records: Vec<_> =
        jobs.par_iter().map(|&(c, r)| (c, run_replication(&plan.cells[c], &plan.recipe, r))).collect();
    let mut grouped: Vec<Vec<_>> = vec![Vec::new(); plan.cells.len()];
    for (c, rec) in records {
        grouped[c].push(rec);
    }
    let reports =
        plan.cells.iter().zip(grouped).map(|(cfg, recs)| ReplicationReport::from_records(*cfg, recs)).collect();
    SimOutcome { reports }
}

const ROTATIONS: [(Rotation, &str); 2] = [(Rotation::OnTruth, "defined"), (Rotation::OnEstimate, "mirrored")];

fn cell_columns(c: &SimConfig) -> Vec<String> {
    vec![
        c.design.name().to_string(),
        c.n.to_string(),
        c.t.to_string(),
        c.j.to_string(),
        c.q().to_string(),
        c.coint_rank().to_string(),
    ]
}

const CELL_HEADER: [&str; 6] = ["design", "n", "t", "j", "q", "coint_rank"];

fn header(extra: &[String]) -> Vec<String> {
    CELL_HEADER.iter().map(|s| s.to_string()).chain(extra.iter().cloned()).collect()
}

/// Metrics and selectors that any cell of the plan computes.
fn active(outcome: &SimOutcome) -> (Vec<Metric>, Vec<SelectionMethod>) {
    let ok = || outcome.reports.iter().flat_map(|r| r.successes());
    let metrics = Metric::ALL.into_iter().filter(|m| ok().any(|x| x.log_ae(*m).is_some())).collect();
    let sel = ReplicationReport::selectors().into_iter().filter(|s| ok().any(|x| x.chosen(*s).is_some())).collect();
    (metrics, sel)
}

pub fn write_outputs(plan: &SimPlan, outcome: &SimOutcome, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let (metrics, selectors) = active(outcome);

    let mut extra = vec!["replication".to_string(), "status".to_string(), "error".to_string()];
    for m in &metrics {
        extra.push(m.name().to_string());
        extra.push(format!("{}_mirrored", m.name()));
    }
    extra.extend(selectors.iter().map(|s| format!("chosen_{}", s.name())));
    let mut rows = Vec::new();
    for rep in &outcome.reports {
        for rec in &rep.records {
            let mut row = cell_columns(&rep.config);
            row.push(rec.index.to_string());
            match &rec.outcome {
                Ok(x) => {
                    row.extend(["ok".to_string(), String::new()]);
                    for m in &metrics {
                        for (r, _) in ROTATIONS {
                            row.push(opt_num(x.log_ae_with(*m, r)));
                        }
                    }
                    row.extend(selectors.iter().map(|s| opt_count(x.chosen(*s))));
                }
                Err(e) => {
                    row.extend(["failed".to_string(), e.to_string()]);
                    row.extend(std::iter::repeat_n(String::new(), 2 * metrics.len() + selectors.len()));
                }
            }
            rows.push(row);
        }
    }
    write_csv(&dir.join("replications.csv"), &header(&extra), rows)?;

    let mut rows = Vec::new();
    for rep in &outcome.reports {
        for m in &metrics {
            for (r, label) in ROTATIONS {
                if let Some(s) = rep.summary_with(*m, r) {
                    let mut row = cell_columns(&rep.config);
                    row.extend([m.name().to_string(), label.to_string(), num(s.mean), num(s.sd), s.count.to_string()]);
                    rows.push(row);
                }
            }
        }
    }
    let extra: Vec<String> = ["statistic", "rotation", "mean", "sd", "count"].iter().map(|s| s.to_string()).collect();
    write_csv(&dir.join("summary.csv"), &header(&extra), rows)?;

    if !selectors.is_empty() {
        let mut rows = Vec::new();
        for rep in &outcome.reports {
            for s in &selectors {
                if let Some(c) = rep.confusion(*s) {
                    let truth = match s {
                        SelectionMethod::LevelsIc | SelectionMethod::DiffIc => rep.config.q(),
                        _ => rep.config.coint_rank(),
                    };
                    let mut row = cell_columns(&rep.config);
                    row.extend([
                        s.name().to_string(),
                        truth.to_string(),
                        c.under.to_string(),
                        c.correct.to_string(),
                        c.over.to_string(),
                    ]);
                    rows.push(row);
                }
            }
        }
        let extra: Vec<String> =
            ["method", "truth", "under", "correct", "over"].iter().map(|s| s.to_string()).collect();
        write_csv(&dir.join("selection.csv"), &header(&extra), rows)?;
    }

    write_text(&dir.join("summary.md"), &markdown(plan, outcome, &metrics, &selectors))
}

/// `q` for ex61 cells, the cointegrating rank for ex62 cells.
fn row_key(c: &SimConfig) -> (&'static str, usize) {
    match c.design {
        Design::Example61 { q } => ("q", q),
        Design::Example62 { scenario } => ("q‡", scenario),
    }
}

fn sorted_unique(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

fn markdown(plan: &SimPlan, outcome: &SimOutcome, metrics: &[Metric], selectors: &[SelectionMethod]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Simulation summary\n");
    let _ = writeln!(s, "- seed: {}", plan.seed);
    let _ = writeln!(s, "- replications per cell: {}", plan.replications);
    let _ = writeln!(s, "- failed replications: {} of {}", outcome.failed(), outcome.total());
    let _ = writeln!(s, "- RNG: {RNG_DESCRIPTION}");
    for d in DGP_REPAIRS {
        let _ = writeln!(s, "- DGP note: {d}");
    }
    s.push('\n');

    let reports = &outcome.reports;
    let ts = sorted_unique(reports.iter().map(|r| r.config.t).collect());
    let ns = sorted_unique(reports.iter().map(|r| r.config.n).collect());
    let keys = sorted_unique(reports.iter().map(|r| row_key(&r.config).1).collect());
    let key_name = reports.first().map_or("q", |r| row_key(&r.config).0);
    let find = |k: usize, n: usize, t: usize| {
        reports.iter().find(|r| row_key(&r.config).1 == k && r.config.n == n && r.config.t == t)
    };

    for m in metrics {
        for (rot, label) in ROTATIONS {
            let title = match rot {
                Rotation::OnTruth => format!("## {}\n", m.name()),
                Rotation::OnEstimate => {
                    format!("## {} (mirrored rotation, diagnostic only)\n", m.name())
                }
            };
            let _ = writeln!(s, "{title}");
            let _ = write!(s, "| {key_name} | N |");
            for t in &ts {
                let _ = write!(s, " T={t} |");
            }
            let _ = write!(s, "\n|---|---|");
            for _ in &ts {
                s.push_str("---:|");
            }
            s.push('\n');
            for k in &keys {
                for n in &ns {
                    let _ = write!(s, "| {k} | {n} |");
                    for t in &ts {
                        match find(*k, *n, *t).and_then(|r| r.summary_with(*m, rot)) {
                            Some(x) => {
                                let _ = write!(s, " {:.3} ({:.3}) |", x.mean, x.sd);
                            }
                            None => s.push_str(" |"),
                        }
                    }
                    s.push('\n');
                }
            }
            let _ = writeln!(s, "\nCells: mean ({label} log AE) with standard deviation in parentheses.\n");
        }
    }

    for sel in selectors {
        let _ = writeln!(s, "## Selection: {}\n", sel.name());
        let _ = write!(s, "| T | {key_name} |");
        for n in &ns {
            let _ = write!(s, " N={n} |");
        }
        let _ = write!(s, "\n|---|---|");
        for _ in &ns {
            s.push_str("---:|");
        }
        s.push('\n');
        for t in &ts {
            for k in &keys {
                let _ = write!(s, "| {t} | {k} |");
                for n in &ns {
                    match find(*k, *n, *t).and_then(|r| r.confusion(*sel)) {
                        Some(c) => {
                            let _ = write!(s, " [{}] {} ({}) |", c.under, c.correct, c.over);
                        }
                        None => s.push_str(" |"),
                    }
                }
                s.push('\n');
            }
        }
        s.push_str("\nCells: [under] correct (over) counts.\n\n");
    }
    s
}
