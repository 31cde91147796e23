use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use enclose_core::exact::exact_solve;
use enclose_core::io::{parse_instance, Method};
use enclose_core::solution::{solve, SolveOptions};
use enclose_core::{Error, Instance, ObstacleSet};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Row {
    pub file: String,
    pub kind: String,
    pub method: Method,
    pub obstacles: usize,
    pub points: usize,
    /// "ok" or "infeasible".
    pub status: &'static str,
    pub size: Option<usize>,
    pub optimum: Option<usize>,
    pub ratio: Option<f64>,
    pub millis: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub with_optimum: usize,
    pub max_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub rows: Vec<Row>,
    pub summary: BTreeMap<String, Summary>,
}

fn median(sorted: &[f64]) -> Option<f64> {
    match sorted.len() {
        0 => None,
        n if n % 2 == 1 => Some(sorted[n / 2]),
        n => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

fn bench_one(name: String, inst: &Instance, budget: usize, seed: u64) -> Row {
    let method = match inst.obstacles {
        ObstacleSet::UnitDisks(_) => Method::Mincut,
        ObstacleSet::Segments(_) => Method::Lp,
    };
    let opts = SolveOptions { seed, ..SolveOptions::default() };
    let start = Instant::now();
    let result = solve(inst, method, &opts);
    let millis = start.elapsed().as_secs_f64() * 1e3;
    let mut row = Row {
        file: name,
        kind: inst.kind().to_string(),
        method,
        obstacles: inst.obstacles.len(),
        points: inst.points.len(),
        status: "ok",
        size: None,
        optimum: None,
        ratio: None,
        millis,
    };
    match result {
        Ok(sol) => row.size = Some(sol.objective),
        Err(Error::Infeasible(_)) => {
            row.status = "infeasible";
            return row;
        }
        Err(e) => {
            log::error!("{}: {e}", row.file);
            row.status = "error";
            return row;
        }
    }
    if inst.obstacles.len() <= budget {
        if let Ok(r) = exact_solve(&inst.points, &inst.obstacles, budget) {
            row.optimum = r.optimum.map(|(k, _)| k);
            row.ratio = match (row.size, row.optimum) {
                (Some(s), Some(o)) if o > 0 => Some(s as f64 / o as f64),
                (Some(0), Some(0)) => Some(1.0),
                _ => None,
            };
        }
    }
    row
}

pub fn run(dir: &Path, budget: usize, seed: u64) -> anyhow::Result<Report> {
    let mut files: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for path in files {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let inst: Instance = match fs::read_to_string(&path).map_err(|e| Error::Parse(e.to_string())).and_then(|t| parse_instance(&t)) {
            Ok(i) => i,
            Err(e) => {
                log::warn!("skipping {name}: {e}");
                continue;
            }
        };
        rows.push(bench_one(name, &inst, budget, seed));
    }
    let mut summary = BTreeMap::new();
    for method in [Method::Mincut, Method::Lp] {
        let mine: Vec<&Row> = rows.iter().filter(|r| r.method == method).collect();
        if mine.is_empty() {
            continue;
        }
        let mut ratios: Vec<f64> = mine.iter().filter_map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        summary.insert(
            method.to_string(),
            Summary { instances: mine.len(), with_optimum: ratios.len(), max_ratio: ratios.last().copied(), median_ratio: median(&ratios) },
        );
    }
    Ok(Report { rows, summary })
}
