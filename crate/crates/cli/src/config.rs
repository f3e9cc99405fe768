//! Flat `key = value` simulation configs.
//!
//! ```text
//! # lines starting with # are comments
//! design = ex61            # or ex62
//! n = 100, 200, 300        # lists expand into a grid of cells
//! t = 200
//! q = 5                    # ex61 only
//! scenario = 0, 1          # ex62 only (cointegrating rank, 0..=3)
//! j = 51
//! replications = 100
//! seed = 2024
//! estimators = fpca, panic
//! select = levels, diff, bic, hq
//! q_max = 20
//! preset = table1          # table1 .. table7; explicit keys override
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use curvetrend::simulate::{Design, Recipe, SimConfig, DEFAULT_BASIS_DIM};

use crate::{CliError, Result};

pub const KEYS: [&str; 12] =
    ["preset", "design", "n", "t", "q", "scenario", "j", "replications", "seed", "estimators", "select", "q_max"];

const DEFAULT_SEED: u64 = 2024;
const DEFAULT_REPLICATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub cells: Vec<SimConfig>,
    pub recipe: Recipe,
    pub seed: u64,
    pub replications: usize,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Preset grids as `key = value` pairs.
fn preset(name: &str) -> Result<Vec<(&'static str, &'static str)>> {
    let grid = [("n", "100, 200, 300"), ("t", "200, 300, 400")];
    let mut kv: Vec<(&str, &str)> = grid.to_vec();
    let extra: &[(&str, &str)] = match name {
        "table1" | "table2" => &[("design", "ex61"), ("q", "5, 10, 15"), ("estimators", "fpca, panic")],
        "table3" => &[("design", "ex61"), ("q", "5, 10, 15"), ("estimators", ""), ("select", "levels, diff")],
        "table4" | "table5" | "table6" => {
            &[("design", "ex62"), ("scenario", "0, 1, 2, 3"), ("estimators", "fpca, panic")]
        }
        "table7" => &[("design", "ex62"), ("scenario", "0, 1, 2, 3"), ("estimators", ""), ("select", "bic, hq")],
        other => return Err(bad(format!("unknown preset `{other}` (expected table1 .. table7)"))),
    };
    kv.extend_from_slice(extra);
    kv.push(("replications", "1000"));
    Ok(kv)
}

/// Parses config text into `key → (line, value)`.
fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| bad(format!("line {line_no}: expected `key = value`")))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(bad(format!("line {line_no}: unknown key `{key}`")));
        }
        if out.insert(key.clone(), (line_no, v.trim().to_string())).is_some() {
            return Err(bad(format!("line {line_no}: duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if items.is_empty() {
        return Err(bad(format!("`{key}` needs at least one value")));
    }
    items.iter().map(|s| s.parse().map_err(|_| bad(format!("`{key}`: cannot parse `{s}`")))).collect()
}

fn single<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    let mut l = list(key, v)?;
    if l.len() != 1 {
        return Err(bad(format!("`{key}` takes a single value")));
    }
    Ok(l.remove(0))
}

fn words(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_ascii_lowercase()).filter(|s| !s.is_empty()).collect()
}

impl SimPlan {
    pub fn from_file(path: &Path, seed_override: Option<u64>) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, seed_override)
    }

    pub fn parse(text: &str, seed_override: Option<u64>) -> Result<Self> {
        let explicit = parse_pairs(text)?;
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        if let Some((_, p)) = explicit.get("preset") {
            for (k, v) in preset(p.trim())? {
                kv.insert(k.to_string(), v.to_string());
            }
        }
        for (k, (_, v)) in &explicit {
            if k != "preset" {
                kv.insert(k.clone(), v.clone());
            }
        }
        let get = |k: &str| kv.get(k).map(String::as_str);

        let design = get("design").ok_or_else(|| bad("missing `design` (ex61 or ex62)"))?;
        let ns: Vec<usize> = list("n", get("n").ok_or_else(|| bad("missing `n`"))?)?;
        let ts: Vec<usize> = list("t", get("t").ok_or_else(|| bad("missing `t`"))?)?;
        let j: usize = get("j").map(|v| single("j", v)).transpose()?.unwrap_or(DEFAULT_BASIS_DIM);
        let replications: usize =
            get("replications").map(|v| single("replications", v)).transpose()?.unwrap_or(DEFAULT_REPLICATIONS);
        if replications == 0 {
            return Err(bad("`replications` must be at least 1"));
        }
        let seed = match seed_override {
            Some(s) => s,
            None => get("seed").map(|v| single("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED),
        };
        let q_max: Option<usize> = get("q_max").map(|v| single("q_max", v)).transpose()?;

        let designs: Vec<Design> = match design.trim().to_ascii_lowercase().as_str() {
            "ex61" => {
                if get("scenario").is_some() {
                    return Err(bad("`scenario` applies to ex62 only"));
                }
                let qs: Vec<usize> = list("q", get("q").ok_or_else(|| bad("ex61 needs `q`"))?)?;
                qs.into_iter().map(|q| Design::Example61 { q }).collect()
            }
            "ex62" => {
                if get("q").is_some() {
                    return Err(bad("`q` is fixed at 4 for ex62; use `scenario`"));
                }
                let ss: Vec<usize> = list("scenario", get("scenario").ok_or_else(|| bad("ex62 needs `scenario`"))?)?;
                ss.into_iter().map(|scenario| Design::Example62 { scenario }).collect()
            }
            other => return Err(bad(format!("unknown design `{other}` (expected ex61 or ex62)"))),
        };

        let mut recipe = Recipe { q_max, ..Recipe::default() };
        for e in words(get("estimators").unwrap_or("fpca, panic")) {
            match e.as_str() {
                "fpca" => recipe.fpca = true,
                "panic" => recipe.panic = true,
                other => return Err(bad(format!("unknown estimator `{other}` (expected fpca, panic)"))),
            }
        }
        for s in words(get("select").unwrap_or("")) {
            match s.as_str() {
                "levels" => recipe.select_levels = true,
                "diff" => recipe.select_diff = true,
                "bic" | "hq" => recipe.coint = true,
                other => return Err(bad(format!("unknown selector `{other}` (expected levels, diff, bic, hq)"))),
            }
        }
        if recipe == (Recipe { q_max, ..Recipe::default() }) {
            return Err(bad("nothing to compute: set `estimators` and/or `select`"));
        }

        let mut cells = Vec::new();
        for d in &designs {
            for &n in &ns {
                for &t in &ts {
                    let cell = SimConfig { design: *d, n, t, j, seed, replications };
                    cell.validate().map_err(|e| bad(format!("cell {} N={n} T={t}: {e}", d.name())))?;
                    cells.push(cell);
                }
            }
        }
        Ok(SimPlan { cells, recipe, seed, replications })
    }
}
