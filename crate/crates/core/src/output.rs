//! CSV outputs and figure-data orchestration.
//!
//! Schemas:
//!
//! * `results.csv`: `sweep_value,algo,seed,metric,value`, one row per run and metric.
//! * `summary.csv`: `sweep_value,algo,metric,mean,std,n`.
//! * `trace.csv`: `iteration,uav,action,utility,estimate_error`.
//! * `fig3.csv` ... `fig6.csv`: `figure,algo,x,metric,mean,std,n`. `x` is the
//!   UAV count, except in fig5 where it is the iteration.
//! * utility tables: `joint_index,uav0_action,...,uav0_utility,...`.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::{Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::sim::{mean_std, summarize, sweep, RunRecord, SweepSpec, TraceRow, METRICS};

pub const RESULTS_HEADER: [&str; 5] = ["sweep_value", "algo", "seed", "metric", "value"];
pub const SUMMARY_HEADER: [&str; 6] = ["sweep_value", "algo", "metric", "mean", "std", "n"];
pub const TRACE_HEADER: [&str; 5] = ["iteration", "uav", "action", "utility", "estimate_error"];
pub const FIGURE_HEADER: [&str; 7] = ["figure", "algo", "x", "metric", "mean", "std", "n"];

pub fn write_results_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        for metric in METRICS {
            let v = r.metrics.scalar(metric).expect("known metric");
            w.write_record([
                r.sweep_value.to_string(),
                r.algo.to_string(),
                r.seed.to_string(),
                metric.to_string(),
                v.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for s in summarize(records) {
        w.write_record([
            s.sweep_value.to_string(),
            s.algo.to_string(),
            s.metric.to_string(),
            s.mean.to_string(),
            s.std.to_string(),
            s.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in rows {
        w.write_record([
            r.iteration.to_string(),
            r.uav.to_string(),
            r.action.to_string(),
            r.utility.to_string(),
            r.estimate_error.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One point of a figure curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub figure: u8,
    pub algo: Algorithm,
    pub x: usize,
    pub metric: &'static str,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

/// The figures this crate knows how to produce.
pub const FIGURES: [u8; 4] = [3, 4, 5, 6];

fn figure_metric(figure: u8) -> Option<&'static str> {
    match figure {
        3 => Some("avg_delay"),
        4 | 5 => Some("total_qoe"),
        6 => Some("pct_meeting_deadline"),
        _ => None,
    }
}

/// Curves of a metric against the UAV count, one per algorithm.
pub fn sweep_figure(figure: u8, records: &[RunRecord]) -> Result<Vec<FigureRow>> {
    let metric = figure_metric(figure).ok_or_else(|| Error::contract("sweep_figure", format!("unknown figure {figure}")))?;
    Ok(summarize(records)
        .into_iter()
        .filter(|s| s.metric == metric)
        .map(|s| FigureRow {
            figure,
            algo: s.algo,
            x: s.sweep_value,
            metric,
            mean: s.mean,
            std: s.std,
            n: s.n,
        })
        .collect())
}

/// Mean total QoE per iteration across runs at UAV count `b`.
pub fn convergence_figure(records: &[RunRecord], b: usize) -> Vec<FigureRow> {
    let mut algos: Vec<Algorithm> = vec![];
    for r in records.iter().filter(|r| r.sweep_value == b) {
        if !algos.contains(&r.algo) {
            algos.push(r.algo);
        }
    }
    let mut rows = vec![];
    for algo in algos {
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.sweep_value == b && r.algo == algo).collect();
        let horizon = runs.iter().map(|r| r.metrics.per_iteration_total_qoe.len()).min().unwrap_or(0);
        for t in 0..horizon {
            let (mean, std, n) = mean_std(runs.iter().map(|r| r.metrics.per_iteration_total_qoe[t]));
            rows.push(FigureRow {
                figure: 5,
                algo,
                x: t,
                metric: "total_qoe",
                mean,
                std,
                n,
            });
        }
    }
    rows
}

pub fn write_figure_csv<W: Write>(rows: &[FigureRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIGURE_HEADER)?;
    for r in rows {
        w.write_record([
            r.figure.to_string(),
            r.algo.to_string(),
            r.x.to_string(),
            r.metric.to_string(),
            r.mean.to_string(),
            r.std.to_string(),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `path` through a buffered file, creating parent directories.
pub fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

/// Runs what the requested figures need and writes `figN.csv` into `out_dir`.
/// Figures 3, 4 and 6 share one sweep over the configured UAV counts; figure 5
/// reuses it when it contains the configured UAV count.
pub fn run_figures(cfg: &ExperimentConfig, only: &[u8], out_dir: &Path) -> Result<Vec<PathBuf>> {
    for f in only {
        if !FIGURES.contains(f) {
            return Err(Error::contract("run_figures", format!("unknown figure {f}; expected one of 3, 4, 5, 6")));
        }
    }
    let wanted: Vec<u8> = FIGURES.into_iter().filter(|f| only.is_empty() || only.contains(f)).collect();
    let spec = SweepSpec::from_config(cfg);
    let fig5_b = cfg.experiment.fig5_uavs;
    let needs_sweep = wanted.iter().any(|&f| f != 5);
    let mut records = if needs_sweep { sweep(cfg, &spec)? } else { vec![] };
    if wanted.contains(&5) && !records.iter().any(|r| r.sweep_value == fig5_b) {
        let extra = SweepSpec {
            uav_counts: vec![fig5_b],
            ..spec.clone()
        };
        records.extend(sweep(cfg, &extra)?);
    }
    let mut written = vec![];
    for f in wanted {
        let rows = if f == 5 {
            convergence_figure(&records, fig5_b)
        } else {
            let in_sweep: Vec<RunRecord> = records
                .iter()
                .filter(|r| spec.uav_counts.contains(&r.sweep_value))
                .cloned()
                .collect();
            sweep_figure(f, &in_sweep)?
        };
        let path = out_dir.join(format!("fig{f}.csv"));
        write_file(&path, |w| write_figure_csv(&rows, w))?;
        written.push(path);
    }
    Ok(written)
}
