//! Sweep execution and the three output tables.
//!
//! | file | header |
//! |------|--------|
//! | `results.csv` | `dataset,algorithm,K,d,seed,objective,iterations,runtime_ms,ari` |
//! | `aggregate.csv` | `dataset,algorithm,K,d,trials,objective_mean,objective_ci95,iterations_mean,runtime_ms_mean,runtime_ms_ci95,ari_mean,ari_ci95` |
//! | `errors.csv` | `dataset,algorithm,K,d,seed,error` |
//!
//! `*_ci95` columns hold the half-width of a two-sided 95% Student-t interval
//! and are blank for a single trial.

use std::path::{Path, PathBuf};

use cohort::{partition_similarity, PartitionConfig};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::algo::{run_algorithm, Algorithm};
use crate::error::CliResult;
use crate::plan::{ExperimentPlan, LoadedDataset};

pub const RESULTS_HEADER: [&str; 9] = [
    "dataset",
    "algorithm",
    "K",
    "d",
    "seed",
    "objective",
    "iterations",
    "runtime_ms",
    "ari",
];

pub const AGGREGATE_HEADER: [&str; 12] = [
    "dataset",
    "algorithm",
    "K",
    "d",
    "trials",
    "objective_mean",
    "objective_ci95",
    "iterations_mean",
    "runtime_ms_mean",
    "runtime_ms_ci95",
    "ari_mean",
    "ari_ci95",
];

pub const ERRORS_HEADER: [&str; 6] = ["dataset", "algorithm", "K", "d", "seed", "error"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Cell {
    algorithm: Algorithm,
    k: usize,
    d: usize,
    seed: u64,
}

struct Measured {
    cell: Cell,
    objective: f64,
    iterations: usize,
    runtime_ms: f64,
    ari: Option<f64>,
}

type Outcome = Result<Measured, (Cell, String)>;

pub struct RunSummary {
    pub out_dir: PathBuf,
    pub rows: usize,
    pub errors: usize,
}

fn cells(plan: &ExperimentPlan, ds: &LoadedDataset) -> Vec<Cell> {
    let mut out = Vec::new();
    for &algorithm in &plan.algorithms {
        for &k in &plan.k {
            for deadline in &plan.d {
                let d = deadline.resolve(&ds.matrix);
                for seed in plan.trial_seeds() {
                    out.push(Cell {
                        algorithm,
                        k,
                        d,
                        seed,
                    });
                }
            }
        }
    }
    out
}

fn measure(plan: &ExperimentPlan, ds: &LoadedDataset, cell: Cell) -> Outcome {
    let cfg = PartitionConfig::new(cell.k, cell.d, cell.seed)
        .with_restarts(plan.restarts)
        .with_sample_multiplier(plan.sample_c);
    let run = run_algorithm(cell.algorithm, &ds.matrix, &cfg).map_err(|e| (cell, e.to_string()))?;
    let ari = match &ds.labels {
        Some(labels) => {
            Some(partition_similarity(labels, &run.assignment).map_err(|e| (cell, e.to_string()))?)
        }
        None => None,
    };
    Ok(Measured {
        cell,
        objective: run.objective,
        iterations: run.iterations,
        runtime_ms: run.runtime_ms,
        ari,
    })
}

pub fn execute(plan: &ExperimentPlan, out_dir: &Path) -> CliResult<RunSummary> {
    plan.validate()?;
    let ds = plan.load_dataset()?;
    let cells = cells(plan, &ds);
    // `collect` keeps input order, so output does not depend on scheduling.
    let outcomes: Vec<Outcome> = cells.par_iter().map(|&c| measure(plan, &ds, c)).collect();

    std::fs::create_dir_all(out_dir)?;
    let (ok, failed): (Vec<_>, Vec<_>) = outcomes.into_iter().partition(Result::is_ok);
    let ok: Vec<Measured> = ok.into_iter().filter_map(Result::ok).collect();
    let failed: Vec<(Cell, String)> = failed.into_iter().filter_map(Result::err).collect();

    write_results(&out_dir.join("results.csv"), &ds.name, &ok)?;
    write_aggregate(&out_dir.join("aggregate.csv"), &ds.name, &ok)?;
    write_errors(&out_dir.join("errors.csv"), &ds.name, &failed)?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        rows: ok.len(),
        errors: failed.len(),
    })
}

fn key_fields(dataset: &str, c: &Cell) -> Vec<String> {
    vec![
        dataset.to_string(),
        c.algorithm.to_string(),
        c.k.to_string(),
        c.d.to_string(),
    ]
}

fn write_results(path: &Path, dataset: &str, rows: &[Measured]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RESULTS_HEADER)?;
    for m in rows {
        let mut rec = key_fields(dataset, &m.cell);
        rec.extend([
            m.cell.seed.to_string(),
            m.objective.to_string(),
            m.iterations.to_string(),
            format!("{:.3}", m.runtime_ms),
            m.ari.map(|a| a.to_string()).unwrap_or_default(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_errors(path: &Path, dataset: &str, rows: &[(Cell, String)]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ERRORS_HEADER)?;
    for (cell, msg) in rows {
        let mut rec = key_fields(dataset, cell);
        rec.extend([cell.seed.to_string(), msg.clone()]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean and 95% half-width; the half-width is `None` for fewer than two values.
pub fn mean_ci95(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = StudentsT::new(0.0, 1.0, n - 1.0)
        .expect("positive degrees of freedom")
        .inverse_cdf(0.975);
    (mean, Some(t * (var / n).sqrt()))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn write_aggregate(path: &Path, dataset: &str, rows: &[Measured]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(AGGREGATE_HEADER)?;
    let mut start = 0;
    while start < rows.len() {
        let head = rows[start].cell;
        let same = |m: &Measured| {
            m.cell.algorithm == head.algorithm && m.cell.k == head.k && m.cell.d == head.d
        };
        let end = start + rows[start..].iter().take_while(|m| same(m)).count();
        let group = &rows[start..end];
        let col = |f: fn(&Measured) -> f64| group.iter().map(f).collect::<Vec<f64>>();
        let (obj, obj_ci) = mean_ci95(&col(|m| m.objective));
        let (iters, _) = mean_ci95(&col(|m| m.iterations as f64));
        let (rt, rt_ci) = mean_ci95(&col(|m| m.runtime_ms));
        let aris: Vec<f64> = group.iter().filter_map(|m| m.ari).collect();
        let (ari, ari_ci) = if aris.is_empty() {
            (None, None)
        } else {
            let (m, ci) = mean_ci95(&aris);
            (Some(m), ci)
        };
        let mut rec = key_fields(dataset, &head);
        rec.extend([
            group.len().to_string(),
            format!("{obj:.6}"),
            fmt_opt(obj_ci),
            format!("{iters:.6}"),
            format!("{rt:.3}"),
            rt_ci.map(|v| format!("{v:.3}")).unwrap_or_default(),
            fmt_opt(ari),
            fmt_opt(ari_ci),
        ]);
        w.write_record(&rec)?;
        start = end;
    }
    w.flush()?;
    Ok(())
}
