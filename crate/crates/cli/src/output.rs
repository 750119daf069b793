//! results.csv, per-run grid CSVs and summary.json.
//!
//! `results.csv` columns, in order:
//!
//! `problem, method, seed, sweep_axis, sweep_value, n_neurons, n_collocation,
//! n_boundary, n_data, noise_sigma, weight_range, status, mae, max_ae,
//! coverage, eta, sigma2, iterations, converged, rank, lambda, lambda_std,
//! lambda_abs_error, wall_time_s`
//!
//! `status` is `ok` or `failed: <message>`; numeric columns of a failed run
//! are empty. `lambda*` columns hold `;`-separated values. Floats use the
//! shortest representation that parses back to the same value.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bpielm::metrics::median;
use serde::Serialize;

use crate::runner::{GridPoint, RunRecord};

pub const RESULTS_HEADER: [&str; 24] = [
    "problem",
    "method",
    "seed",
    "sweep_axis",
    "sweep_value",
    "n_neurons",
    "n_collocation",
    "n_boundary",
    "n_data",
    "noise_sigma",
    "weight_range",
    "status",
    "mae",
    "max_ae",
    "coverage",
    "eta",
    "sigma2",
    "iterations",
    "converged",
    "rank",
    "lambda",
    "lambda_std",
    "lambda_abs_error",
    "wall_time_s",
];

fn num(v: f64) -> String {
    // `Display` for f64 prints the shortest round-trip representation.
    format!("{v}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn joined(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

/// One results.csv row as strings, in [`RESULTS_HEADER`] order.
pub fn result_row(record: &RunRecord) -> Vec<String> {
    let s = &record.settings;
    let mut row = vec![
        s.problem.name().to_string(),
        record.solver.name().to_string(),
        s.seed.to_string(),
        opt(s.sweep.map(|(a, _)| a.name())),
        opt(s.sweep.map(|(_, v)| num(v))),
        s.n_neurons.to_string(),
        s.n_collocation.to_string(),
        s.n_boundary.to_string(),
        s.n_data.to_string(),
        num(s.noise_sigma),
        num(s.weight_range),
    ];
    match &record.outcome {
        Ok(o) => {
            let finite =
                o.metrics.mae.is_finite() && o.metrics.max_ae.is_finite() && o.lambda.iter().all(|v| v.is_finite());
            row.push(if finite {
                "ok".into()
            } else {
                "failed: non-finite metrics".into()
            });
            row.push(num(o.metrics.mae));
            row.push(num(o.metrics.max_ae));
            row.push(opt(o.metrics.two_sigma_coverage.map(num)));
            row.push(opt(o.bayes.as_ref().map(|b| num(b.eta))));
            row.push(opt(o.bayes.as_ref().map(|b| num(b.sigma2))));
            row.push(opt(o.bayes.as_ref().map(|b| b.iterations)));
            row.push(opt(o.bayes.as_ref().map(|b| b.converged)));
            row.push(opt(o.rank));
            row.push(joined(&o.lambda));
            row.push(joined(&o.lambda_std));
            row.push(joined(o.metrics.parameter_errors.as_deref().unwrap_or(&[])));
            row.push(num(o.metrics.wall_time_seconds));
        }
        Err(msg) => {
            row.push(format!("failed: {msg}"));
            row.extend(std::iter::repeat_n(String::new(), RESULTS_HEADER.len() - row.len()));
        }
    }
    row
}

pub fn write_results<W: Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record(result_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// File name of the grid CSV for one record.
pub fn grid_file_name(record: &RunRecord) -> String {
    let s = &record.settings;
    match s.sweep {
        Some((axis, v)) => format!("{}_seed{}_{}{}.csv", record.solver.name(), s.seed, axis.name(), num(v)),
        None => format!("{}_seed{}.csv", record.solver.name(), s.seed),
    }
}

pub fn write_grid<W: Write>(grid: &[GridPoint], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "exact", "mean", "std", "abs_error"])?;
    for g in grid {
        w.write_record([
            num(g.point.x),
            num(g.point.y),
            num(g.exact),
            num(g.mean),
            opt(g.std_dev.map(num)),
            num((g.mean - g.exact).abs()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub method: String,
    pub sweep_axis: Option<String>,
    pub sweep_value: Option<f64>,
    pub runs: usize,
    pub failed: usize,
    pub median_mae: Option<f64>,
    pub median_max_ae: Option<f64>,
    pub median_coverage: Option<f64>,
    pub median_lambda: Vec<f64>,
    pub median_wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub groups: Vec<GroupSummary>,
}

fn finite_median(values: Vec<f64>) -> Option<f64> {
    let m = median(&values);
    m.is_finite().then_some(m)
}

/// Per-method (and per-sweep-value) medians over seeds.
pub fn summarize(records: &[RunRecord]) -> Summary {
    // Key by first appearance so groups follow the run order.
    let mut order: Vec<(String, Option<u64>)> = Vec::new();
    let mut groups: BTreeMap<(String, Option<u64>), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.solver.name().to_string(), r.settings.sweep.map(|(_, v)| v.to_bits()));
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    let problem = records
        .first()
        .map(|r| r.settings.problem.name().to_string())
        .unwrap_or_default();
    let groups = order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let ok: Vec<_> = members.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let n_lambda = ok.first().map_or(0, |o| o.lambda.len());
            let sweep = members[0].settings.sweep;
            GroupSummary {
                method: key.0.clone(),
                sweep_axis: sweep.map(|(a, _)| a.name().to_string()),
                sweep_value: sweep.map(|(_, v)| v),
                runs: members.len(),
                failed: members.len() - ok.len(),
                median_mae: finite_median(ok.iter().map(|o| o.metrics.mae).collect()),
                median_max_ae: finite_median(ok.iter().map(|o| o.metrics.max_ae).collect()),
                median_coverage: finite_median(ok.iter().filter_map(|o| o.metrics.two_sigma_coverage).collect()),
                median_lambda: (0..n_lambda)
                    .map(|k| median(&ok.iter().map(|o| o.lambda[k]).collect::<Vec<_>>()))
                    .collect(),
                median_wall_time_s: finite_median(ok.iter().map(|o| o.metrics.wall_time_seconds).collect()),
            }
        })
        .collect();
    Summary { problem, groups }
}

/// Writes results.csv, summary.json and (optionally) grids/ under `dir`.
pub fn write_all(records: &[RunRecord], dir: &Path, grids: bool) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    let results = dir.join("results.csv");
    write_results(records, BufWriter::new(File::create(&results)?)).map_err(io::Error::other)?;
    written.push(results);

    let summary = dir.join("summary.json");
    let mut f = BufWriter::new(File::create(&summary)?);
    serde_json::to_writer_pretty(&mut f, &summarize(records)).map_err(io::Error::other)?;
    writeln!(f)?;
    f.flush()?;
    written.push(summary);

    if grids {
        let grid_dir = dir.join("grids");
        fs::create_dir_all(&grid_dir)?;
        for r in records {
            if let Ok(o) = &r.outcome {
                let path = grid_dir.join(grid_file_name(r));
                write_grid(&o.grid, BufWriter::new(File::create(&path)?)).map_err(io::Error::other)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
