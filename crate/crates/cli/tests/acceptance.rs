//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Run with
//! `cargo test --release -p curvetrend --test acceptance`.

#[path = "../../core/tests/support/mod.rs"]
#[allow(dead_code)]
mod support;

use std::time::Instant;

use curvetrend_cli::args::{FitArgs, QChoice};
use curvetrend_cli::config::SimPlan;
use curvetrend_cli::fit::fit_ingested;
use curvetrend_cli::ingest::{read_panel, write_raw, IngestOptions};
use curvetrend_cli::simulate::{run_plan, write_outputs};
use curvetrend::linalg::sym_eig;
use curvetrend::panic::cumulate;
use curvetrend::selection::rrr_fit;
use curvetrend::simulate::{Metric, MetricSummary};
use curvetrend::*;
use rayon::prelude::*;
use support::*;

const SEED: u64 = 2024;

struct Verdict {
    pass: bool,
    detail: String,
}

fn check(cond: bool, msg: String, notes: &mut Vec<String>) -> bool {
    notes.push(format!("{}{msg}", if cond { "" } else { "NOT " }));
    cond
}

fn cell(cfg: SimConfig, recipe: Recipe) -> ReplicationReport {
    let records: Vec<_> =
        (1..=cfg.replications as u64).into_par_iter().map(|r| run_replication(&cfg, &recipe, r)).collect();
    ReplicationReport::from_records(cfg, records)
}

fn mean(rep: &ReplicationReport, m: Metric, r: Rotation) -> f64 {
    rep.summary_with(m, r).map_or(f64::NAN, |s: MetricSummary| s.mean)
}

fn estimators() -> Recipe {
    Recipe { fpca: true, panic: true, ..Recipe::default() }
}

fn criterion_1() -> Verdict {
    let mut r = rng(101);
    let mut worst = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..50 {
        let n = 2 + (normal(&mut r).abs() * 20.0) as usize % 49;
        let t = 4 + (normal(&mut r).abs() * 40.0) as usize % 97;
        let j = 1 + (normal(&mut r).abs() * 5.0) as usize % 11;
        let q = (1 + (normal(&mut r).abs() * 2.0) as usize % 4).min(n).min(t - 1);
        let panel = random_panel(&mut r, n, t, j);
        let f = fit_fpca(&panel, q).unwrap();
        let p = fit_panic(&panel, q).unwrap();
        let rel = |m: &Mat| {
            let diag = (0..m.rows()).map(|k| m[(k, k)].abs()).fold(1.0_f64, f64::max);
            let mut off = 0.0_f64;
            for a in 0..m.rows() {
                for b in 0..m.cols() {
                    if a != b {
                        off = off.max(m[(a, b)].abs());
                    }
                }
            }
            off / diag
        };
        worst.0 = worst.0.max(identity_defect(&f.factors, (t * t) as f64));
        worst.1 = worst.1.max(rel(&f.loading_gram()));
        worst.2 = worst.2.max(identity_defect(&p.factors, (t - 1) as f64));
        worst.3 = worst.3.max(rel(&p.loading_gram()));
    }
    let pass = worst.0 < 1e-6 && worst.1 < 1e-6 && worst.2 < 1e-6 && worst.3 < 1e-6;
    Verdict {
        pass,
        detail: format!(
            "50 random panels: fpca factor defect {:.1e}, loading off-diag {:.1e}; panic {:.1e}, {:.1e} (tol 1e-6)",
            worst.0, worst.1, worst.2, worst.3
        ),
    }
}

/// `T′ = 50` rows of a cointegrated pair: `ξ_t = α βᵀ G_{t−1} + noise`.
fn vecm_instance(seed: u64) -> (Mat, Mat) {
    let mut r = rng(seed);
    let t = 50;
    let mut g = [0.0; 2];
    let mut xi = Mat::zeros(t, 2);
    let mut lagged = Mat::zeros(t, 2);
    for s in 0..t {
        lagged.row_mut(s).copy_from_slice(&g);
        let ect = g[0] - g[1];
        let row = [-0.3 * ect + normal(&mut r), 0.2 * ect + normal(&mut r)];
        xi.row_mut(s).copy_from_slice(&row);
        g[0] += row[0];
        g[1] += row[1];
    }
    (xi, lagged)
}

fn criterion_2(info: &mut Vec<String>) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;

    let mut r = rng(201);
    let mut gram_err = 0.0_f64;
    for (n, t, j, p) in [(4, 6, 5, 0.0), (7, 9, 3, 0.3), (10, 12, 11, 0.2)] {
        let panel = if p > 0.0 { random_gappy_panel(&mut r, n, t, j, p) } else { random_panel(&mut r, n, t, j) };
        let g = gram(&panel, GramMode::Levels).unwrap();
        let (naive, counts) = naive_gram(&panel);
        gram_err = gram_err.max(g.values.sub(&naive).max_abs());
        for a in 0..t {
            for b in 0..t {
                ok &= g.pair_count(a, b) == counts[a][b];
            }
        }
    }
    ok &= check(gram_err < 1e-12, format!("gram vs double loop {gram_err:.1e} < 1e-12"), &mut notes);

    let mut ae_err = 0.0_f64;
    for q in 1..=2 {
        let truth = random_mat(&mut r, 12, q);
        let est = truth.matmul(&random_mat(&mut r, q, q)).add(&random_mat(&mut r, 12, q).scale(0.3));
        ae_err = ae_err.max((ae_factors(&est, &truth, 12).unwrap() - ae_factors_by_search(&est, &truth, 12)).abs());
    }
    let b = BasisSpec::unit_fourier(3).unwrap();
    let truth: Vec<VectorCurve> = (0..4).map(|_| VectorCurve::new(b, random_mat(&mut r, 2, 3)).unwrap()).collect();
    let h = random_mat(&mut r, 2, 2);
    let est: Vec<VectorCurve> = truth
        .iter()
        .map(|l| VectorCurve::new(b, h.matmul(l.coefs()).add(&random_mat(&mut r, 2, 3).scale(0.2))).unwrap())
        .collect();
    let ae_l = (ae_loadings(&est, &truth).unwrap() - ae_loadings_by_search(&est, &truth)).abs();
    ok &= check(ae_err < 1e-6, format!("ae_factors vs search {ae_err:.1e} < 1e-6"), &mut notes);
    ok &= check(ae_l < 1e-6, format!("ae_loadings vs search {ae_l:.1e} < 1e-6"), &mut notes);

    // rrr_fit minimizes log det Σ(j); on responses with identity second
    // moment that coincides with minimizing tr Σ(j).
    let (mut det_err, mut trace_err, mut raw_trace_gap) = (0.0_f64, 0.0_f64, 0.0_f64);
    for seed in [211, 212, 213] {
        let (xi, lagged) = vecm_instance(seed);
        let fit = rrr_fit(&xi, &lagged, 1).unwrap();
        let (_, best) = minimize(|p| det(&rank_one_sigma(&xi, &lagged, p)).ln(), &[0.1, 0.1, 0.1, -0.1], 0.5);
        det_err = det_err.max((fit.logdet - best).abs());
        let (_, best_tr) = minimize(|p| rank_one_sigma(&xi, &lagged, p).trace(), &[0.1, 0.1, 0.1, -0.1], 0.5);
        raw_trace_gap = raw_trace_gap.max(fit.sigma.trace() - best_tr);
        let w = whiten(&xi);
        let fit = rrr_fit(&w, &lagged, 1).unwrap();
        let (_, best) = minimize(|p| rank_one_sigma(&w, &lagged, p).trace(), &[0.1, 0.1, 0.1, -0.1], 0.5);
        trace_err = trace_err.max((fit.sigma.trace() - best).abs());
    }
    ok &= check(det_err < 1e-4, format!("rrr log det vs search {det_err:.1e} < 1e-4"), &mut notes);
    ok &= check(trace_err < 1e-4, format!("rrr trace vs search (whitened) {trace_err:.1e} < 1e-4"), &mut notes);
    info.push(format!(
        "criterion 2: on unwhitened responses the likelihood solution exceeds the trace minimum by up to {raw_trace_gap:.2e}"
    ));

    let x = random_mat(&mut r, 80, 3);
    let y: Vec<f64> = (0..80).map(|t| 0.5 + 0.8 * x[(t, 0)] - 0.2 * x[(t, 2)] + normal(&mut r)).collect();
    let s = ols(&y, &x, true).unwrap();
    let design = Mat::from_fn(80, 4, |t, c| if c == 0 { 1.0 } else { x[(t, c - 1)] });
    let oracle = normal_equations(&design, &y);
    let ols_err = (0..4).map(|k| (s.coefficients[k] - oracle[k]).abs()).fold(0.0, f64::max);
    ok &= check(ols_err < 1e-8, format!("ols vs normal equations {ols_err:.1e} < 1e-8"), &mut notes);
    Verdict { pass: ok, detail: notes.join("; ") }
}

struct Ex61 {
    n100: ReplicationReport,
}

fn criterion_3(info: &mut Vec<String>) -> (Verdict, Ex61) {
    let n100 = cell(SimConfig::example_61(100, 200, 5, SEED, 200), estimators());
    let n300 = cell(SimConfig::example_61(300, 200, 5, SEED, 200), Recipe { fpca: true, ..Recipe::default() });
    let mut notes = Vec::new();
    let mut ok = true;
    let g_tilde = mean(&n100, Metric::GTilde, Rotation::OnTruth);
    let g_hat = mean(&n100, Metric::GHat, Rotation::OnTruth);
    ok &= check((g_tilde - -4.140).abs() <= 0.15, format!("mean log AE(G~) {g_tilde:.3} in -4.140±0.15"), &mut notes);
    ok &= check((g_hat - -3.948).abs() <= 0.20, format!("mean log AE(G^) {g_hat:.3} in -3.948±0.20"), &mut notes);
    let wins = |r: Rotation| {
        let pairs: Vec<bool> = n100
            .successes()
            .filter_map(|x| Some(x.log_ae_with(Metric::GTilde, r)? < x.log_ae_with(Metric::GHat, r)?))
            .collect();
        pairs.iter().filter(|w| **w).count() as f64 / pairs.len().max(1) as f64
    };
    let share = wins(Rotation::OnTruth);
    ok &= check(share >= 0.8, format!("AE(G~) < AE(G^) in {:.0}% >= 80%", 100.0 * share), &mut notes);
    let gap = g_tilde - mean(&n300, Metric::GTilde, Rotation::OnTruth);
    ok &= check(gap >= 0.8, format!("N=100→300 drop in mean log AE(G~) {gap:.3} >= 0.8"), &mut notes);
    let fails = n100.failures() + n300.failures();
    if fails > 0 {
        notes.push(format!("{fails} failed replications"));
    }

    let m = Rotation::OnEstimate;
    info.push(format!(
        "criterion 3, mirrored rotation: G~ {:.3}, G^ {:.3}, AE(G~)<AE(G^) in {:.0}%, N gap {:.3}",
        mean(&n100, Metric::GTilde, m),
        mean(&n100, Metric::GHat, m),
        100.0 * wins(m),
        mean(&n100, Metric::GTilde, m) - mean(&n300, Metric::GTilde, m)
    ));
    (Verdict { pass: ok, detail: notes.join("; ") }, Ex61 { n100 })
}

fn criterion_4(ex: &Ex61, info: &mut Vec<String>) -> Verdict {
    let t300 = cell(SimConfig::example_61(100, 300, 5, SEED, 200), Recipe { fpca: true, ..Recipe::default() });
    let gap = |r| mean(&ex.n100, Metric::LambdaTilde, r) - mean(&t300, Metric::LambdaTilde, r);
    let g = gap(Rotation::OnTruth);
    info.push(format!("criterion 4, mirrored rotation: T gap {:.3}", gap(Rotation::OnEstimate)));
    Verdict {
        pass: g >= 0.6,
        detail: format!(
            "mean log AE(Λ~) {:.3} at T=200, {:.3} at T=300, drop {g:.3} >= 0.6",
            mean(&ex.n100, Metric::LambdaTilde, Rotation::OnTruth),
            mean(&t300, Metric::LambdaTilde, Rotation::OnTruth)
        ),
    }
}

fn criterion_5() -> Verdict {
    let recipe = Recipe { select_levels: true, select_diff: true, ..Recipe::default() };
    let rep = cell(SimConfig::example_61(200, 300, 5, SEED, 200), recipe);
    let mut notes = Vec::new();
    let mut ok = true;
    for m in [SelectionMethod::LevelsIc, SelectionMethod::DiffIc] {
        let c = rep.confusion(m).unwrap_or_default();
        let rate = c.correct as f64 / c.total().max(1) as f64;
        ok &= check(
            rate >= 0.93 && c.under == 0,
            format!("{}: [{}] {} ({}) correct {rate:.3} >= 0.93, no under", m.name(), c.under, c.correct, c.over),
            &mut notes,
        );
    }
    Verdict { pass: ok, detail: notes.join("; ") }
}

fn criterion_6(info: &mut Vec<String>) -> Verdict {
    let a = cell(SimConfig::example_62(100, 200, 1, SEED, 100), estimators());
    let b = cell(SimConfig::example_62(300, 200, 1, SEED, 100), estimators());
    let gap = |m, r| mean(&b, m, r) - mean(&a, m, r);
    let (g, l) = (gap(Metric::GHat, Rotation::OnTruth), gap(Metric::LambdaTilde, Rotation::OnTruth));
    let mut notes = Vec::new();
    let mut ok = check(g <= -0.5, format!("N=300 minus N=100 mean log AE(G^) {g:.3} <= -0.5"), &mut notes);
    ok &= check(l >= -0.1, format!("same for AE(Λ~) {l:.3} >= -0.1"), &mut notes);
    info.push(format!(
        "criterion 6, mirrored rotation: G^ gap {:.3}, Λ~ gap {:.3}",
        gap(Metric::GHat, Rotation::OnEstimate),
        gap(Metric::LambdaTilde, Rotation::OnEstimate)
    ));
    Verdict { pass: ok, detail: notes.join("; ") }
}

fn criterion_7() -> Verdict {
    let recipe = Recipe { coint: true, ..Recipe::default() };
    let three = cell(SimConfig::example_62(300, 400, 3, SEED, 200), recipe);
    let zero = cell(SimConfig::example_62(300, 400, 0, SEED, 200), recipe);
    let rate = |rep: &ReplicationReport, m| {
        let c = rep.confusion(m).unwrap_or_default();
        (c.correct as f64 / c.total().max(1) as f64, c)
    };
    let (hq, c3) = rate(&three, SelectionMethod::Hq);
    let (bic, c0) = rate(&zero, SelectionMethod::Bic);
    let mut notes = Vec::new();
    let mut ok = check(hq >= 0.95, format!("HQ q‡=3 [{}] {} ({}) rate {hq:.3} >= 0.95", c3.under, c3.correct, c3.over), &mut notes);
    ok &= check(bic >= 0.70, format!("BIC q‡=0 [{}] {} ({}) rate {bic:.3} >= 0.70", c0.under, c0.correct, c0.over), &mut notes);
    Verdict { pass: ok, detail: notes.join("; ") }
}

fn criterion_8() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut r = rng(801);
    let (mut rot, mut psd, mut tele, mut remix, mut eig) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..40 {
        let (n, t, j) = (5, 12, 6);
        let panel = random_panel(&mut r, n, t, j);
        let rotated: Vec<Series> = panel
            .series()
            .iter()
            .map(|s| Series::complete(s.id(), *s.basis(), s.coefs().matmul(&random_orthogonal(&mut r, j))).unwrap())
            .collect();
        let a = gram(&panel, GramMode::Levels).unwrap();
        let b = gram(&CurvePanel::new(rotated).unwrap(), GramMode::Levels).unwrap();
        rot = rot.max(a.values.sub(&b.values).max_abs() / (1.0 + a.values.max_abs()));
        let e = sym_eig(&a.values).unwrap();
        psd = psd.max(-e.eigenvalues.last().unwrap() / a.values.trace());

        let d = difference(&panel).unwrap();
        for (lev, dif) in panel.series().iter().zip(d.series()) {
            let back = cumulate(dif.coefs());
            for s in 0..t - 1 {
                for k in 0..j {
                    let expect = lev.coefs()[(s + 1, k)] - lev.coefs()[(0, k)];
                    tele = tele.max((back[(s, k)] - expect).abs() / (1.0 + expect.abs()));
                }
            }
        }
        let fit = fit_panic(&panel, 2).unwrap();
        let g = fit.trends.unwrap();
        let c = cumulate(&fit.factors);
        tele = tele.max(g.sub(&c).max_abs() / (1.0 + c.max_abs()));

        let est = random_mat(&mut r, 20, 2);
        let truth = random_mat(&mut r, 20, 2);
        let m = random_orthogonal(&mut r, 2).matmul(&Mat::diag(&[0.7, 1.6]));
        let a0 = ae_factors(&est, &truth, 20).unwrap();
        remix = remix.max((a0 - ae_factors(&est, &truth.matmul(&m), 20).unwrap()).abs() / (1.0 + a0));

        let x = random_mat(&mut r, 9, 9);
        let s = Mat::from_fn(9, 9, |i, k| x[(i, k)] + x[(k, i)]);
        let e = sym_eig(&s).unwrap();
        let rebuilt = e.eigenvectors.matmul(&Mat::diag(&e.eigenvalues)).matmul_t(&e.eigenvectors);
        eig = eig.max(rebuilt.sub(&s).max_abs() / s.frobenius_norm());
    }
    ok &= check(rot < 1e-10, format!("gram rotation invariance {rot:.1e}"), &mut notes);
    ok &= check(psd < 1e-8, format!("levels gram PSD {psd:.1e}"), &mut notes);
    ok &= check(tele < 1e-12, format!("telescoping {tele:.1e}"), &mut notes);
    ok &= check(remix < 1e-8, format!("AE remixing {remix:.1e}"), &mut notes);
    ok &= check(eig < 1e-8, format!("eigen reconstruction {eig:.1e}"), &mut notes);

    let plan = SimPlan::parse(
        "design = ex62\nn = 20\nt = 30\nscenario = 1, 3\nj = 7\nreplications = 6\nestimators = fpca, panic\nselect = levels, diff, bic, hq\n",
        Some(SEED),
    )
    .unwrap();
    let runs: Vec<(Vec<u8>, Vec<u8>)> = [1, 2, 4]
        .iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(*threads).build().unwrap();
            let out = pool.install(|| run_plan(&plan));
            let dir = tempfile::tempdir().unwrap();
            write_outputs(&plan, &out, dir.path()).unwrap();
            (
                std::fs::read(dir.path().join("replications.csv")).unwrap(),
                std::fs::read(dir.path().join("summary.csv")).unwrap(),
            )
        })
        .collect();
    let same = runs.windows(2).all(|w| w[0] == w[1]);
    ok &= check(same, "byte-identical output on 1, 2 and 4 threads".into(), &mut notes);
    Verdict { pass: ok, detail: notes.join("; ") }
}

fn criterion_9() -> Verdict {
    let mut cfg = SimConfig::example_61(30, 40, 2, SEED, 1);
    cfg.j = 11;
    let (panel, _) = generate(&cfg, 1).unwrap();
    let periods: Vec<i64> = (1..=40).collect();
    let grid: Vec<f64> = (0..64).map(|k| k as f64 / 64.0).collect();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("raw.csv");
    write_raw(&file, &panel, &periods, &grid).unwrap();
    let opts = IngestOptions { basis_dim: Some(11), min_obs: 64, domain: Some((0.0, 1.0)) };
    let mut notes = Vec::new();
    let mut ok = true;
    for (mode, name) in [(curvetrend_cli::args::Mode::Fpca, "fpca"), (curvetrend_cli::args::Mode::Panic, "panic")] {
        let data = read_panel(&file, &opts).unwrap();
        let mut args = FitArgs::new(&file);
        args.mode = mode;
        args.q = QChoice::Fixed(2);
        let got = fit_ingested(&args, data).unwrap().fit;
        let want = match mode {
            curvetrend_cli::args::Mode::Fpca => fit_fpca(&panel, 2).unwrap(),
            curvetrend_cli::args::Mode::Panic => fit_panic(&panel, 2).unwrap(),
        };
        let f = got.factors.sub(&want.factors).max_abs();
        let l = got
            .loadings
            .iter()
            .zip(&want.loadings)
            .map(|(a, b)| a.coefs().sub(b.coefs()).max_abs())
            .fold(0.0, f64::max);
        ok &= check(f < 1e-8 && l < 1e-8, format!("{name}: factors {f:.1e}, loadings {l:.1e} < 1e-8"), &mut notes);
    }
    Verdict { pass: ok, detail: notes.join("; ") }
}

fn main() {
    let mut info = Vec::new();
    let mut results: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut timed = |k: usize, name: &'static str, f: &mut dyn FnMut(&mut Vec<String>) -> Verdict| {
        let start = Instant::now();
        let v = f(&mut info);
        let secs = start.elapsed().as_secs_f64();
        println!("{} {k} {name} ({secs:.1}s): {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((k, name, v, secs));
    };
    timed(1, "identification", &mut |_| criterion_1());
    timed(2, "oracles", &mut |i| criterion_2(i));
    let mut ex = None;
    timed(3, "levels vs differences, ex61", &mut |i| {
        let (v, e) = criterion_3(i);
        ex = Some(e);
        v
    });
    let ex = ex.unwrap();
    timed(4, "loading error falls with T", &mut |i| criterion_4(&ex, i));
    timed(5, "trend-count selection", &mut |_| criterion_5());
    timed(6, "cointegrated trends, ex62", &mut |i| criterion_6(i));
    timed(7, "cointegrating rank", &mut |_| criterion_7());
    timed(8, "properties and determinism", &mut |_| criterion_8());
    timed(9, "raw CSV round trip", &mut |_| criterion_9());
    for line in &info {
        println!("INFO {line}");
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
