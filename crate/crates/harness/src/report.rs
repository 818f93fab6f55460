//! Metric tables: per-run IGD/MIGD rows, MSS per optimizer-run and the
//! ranking derived from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use etmof_core::metrics::{igd_with, mean_std, migd, mss, Distance};
use etmof_core::suite::MultiTaskProblem;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fronts::FrontCache;
use crate::rundir::{read_run, StoredRun};

pub const METRICS_FILE: &str = "metrics.csv";
pub const MSS_FILE: &str = "mss.csv";
pub const RANKING_FILE: &str = "ranking.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub optimizer: String,
    pub instance: usize,
    pub task: usize,
    pub run: usize,
    pub seed: u64,
    pub metric_name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MssRow {
    pub optimizer: String,
    pub instance: usize,
    pub run: usize,
    pub mss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRow {
    pub instance: usize,
    pub optimizer: String,
    pub mean_mss: f64,
    pub std_mss: f64,
    pub rank: usize,
}

/// Run directories below `<root>/runs`, in sorted order.
pub fn run_dirs(root: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let runs = root.join("runs");
    if !runs.is_dir() {
        bail!("{} has no runs directory", root.display());
    }
    let mut out = Vec::new();
    let mut stack = vec![runs];
    while let Some(d) = stack.pop() {
        if d.join("meta").is_file() {
            out.push(d);
            continue;
        }
        for e in fs::read_dir(&d)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// IGD of the final checkpoint per static task, MIGD over the change
/// snapshots per dynamic task.
pub fn run_metrics(run: &StoredRun, fronts: &FrontCache, distance: Distance) -> anyhow::Result<Vec<MetricRow>> {
    let problem = MultiTaskProblem::instantiate(run.cell.instance)?;
    let mut rows = Vec::new();
    for st in &run.tasks {
        let task = problem.task(st.task)?;
        let (name, value) = if task.is_dynamic() {
            if st.changes.is_empty() {
                bail!("dynamic task T{} has no change snapshots", st.task);
            }
            let igds = st
                .changes
                .iter()
                .map(|c| {
                    let f = fronts.get(task, Some((c.change_index, c.t)))?;
                    Ok(igd_with(&c.points, &f, distance)?)
                })
                .collect::<anyhow::Result<Vec<f64>>>()?;
            ("migd", migd(&igds, igds.len())?)
        } else {
            let last = st
                .checkpoints
                .last()
                .ok_or_else(|| anyhow!("task T{} has no checkpoints", st.task))?;
            let f = fronts.get(task, None)?;
            ("igd", igd_with(&last.points, &f, distance)?)
        };
        rows.push(MetricRow {
            optimizer: run.cell.optimizer.clone(),
            instance: run.cell.instance,
            task: st.task,
            run: run.cell.run,
            seed: run.cell.seed,
            metric_name: name.to_string(),
            value,
        });
    }
    Ok(rows)
}

pub fn compute_metrics(root: &Path, distance: Distance, front_size: Option<usize>) -> anyhow::Result<Vec<MetricRow>> {
    let dirs = run_dirs(root)?;
    let fronts = FrontCache::new(front_size);
    let per_run: Vec<Vec<MetricRow>> = dirs
        .par_iter()
        .map(|d| {
            let run = read_run(d)?;
            run_metrics(&run, &fronts, distance).with_context(|| format!("metrics for {}", d.display()))
        })
        .collect::<anyhow::Result<_>>()?;
    let mut rows: Vec<MetricRow> = per_run.into_iter().flatten().collect();
    rows.sort_by(|a, b| (a.instance, &a.optimizer, a.run, a.task).cmp(&(b.instance, &b.optimizer, b.run, b.task)));
    Ok(rows)
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

/// MSS per (optimizer, run) cell of every instance with at least two cells.
pub fn compute_mss(rows: &[MetricRow]) -> anyhow::Result<Vec<MssRow>> {
    let mut by_instance: BTreeMap<usize, Vec<&MetricRow>> = BTreeMap::new();
    for r in rows {
        by_instance.entry(r.instance).or_default().push(r);
    }
    let mut out = Vec::new();
    for (instance, rs) in by_instance {
        let cells: BTreeSet<(String, usize)> = rs.iter().map(|r| (r.optimizer.clone(), r.run)).collect();
        if cells.len() < 2 {
            continue;
        }
        let tasks: BTreeSet<usize> = rs.iter().map(|r| r.task).collect();
        let lookup: BTreeMap<(usize, &str, usize), f64> = rs
            .iter()
            .map(|r| ((r.task, r.optimizer.as_str(), r.run), r.value))
            .collect();
        let mut per_task = Vec::with_capacity(tasks.len());
        for &t in &tasks {
            let row = cells
                .iter()
                .map(|(o, run)| {
                    lookup
                        .get(&(t, o.as_str(), *run))
                        .copied()
                        .ok_or_else(|| anyhow!("ETMOF{instance} T{t}: no value for {o} run {run}"))
                })
                .collect::<anyhow::Result<Vec<f64>>>()?;
            per_task.push(row);
        }
        let scores = mss(&per_task)?;
        for ((optimizer, run), s) in cells.into_iter().zip(scores) {
            out.push(MssRow {
                optimizer,
                instance,
                run,
                mss: s,
            });
        }
    }
    Ok(out)
}

/// Mean and spread of MSS per optimizer, ranked within each instance
/// (1 = lowest mean MSS).
pub fn ranking(rows: &[MssRow]) -> Vec<RankRow> {
    let mut groups: BTreeMap<(usize, String), Vec<f64>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.instance, r.optimizer.clone())).or_default().push(r.mss);
    }
    let mut out: Vec<RankRow> = groups
        .into_iter()
        .map(|((instance, optimizer), v)| {
            let (mean_mss, std_mss) = mean_std(&v);
            RankRow {
                instance,
                optimizer,
                mean_mss,
                std_mss,
                rank: 0,
            }
        })
        .collect();
    let instances: BTreeSet<usize> = out.iter().map(|r| r.instance).collect();
    for inst in instances {
        let mut idx: Vec<usize> = (0..out.len()).filter(|&i| out[i].instance == inst).collect();
        idx.sort_by(|&a, &b| {
            out[a]
                .mean_mss
                .partial_cmp(&out[b].mean_mss)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(out[a].optimizer.cmp(&out[b].optimizer))
        });
        for (r, i) in idx.into_iter().enumerate() {
            out[i].rank = r + 1;
        }
    }
    out.sort_by_key(|r| (r.instance, r.rank));
    out
}

pub fn render_ranking(rows: &[RankRow]) -> String {
    let mut s = format!(
        "{:<10} {:<16} {:>12} {:>12} {:>5}\n",
        "instance", "optimizer", "mean_mss", "std_mss", "rank"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<10} {:<16} {:>12.4} {:>12.4} {:>5}\n",
            format!("ETMOF{}", r.instance),
            r.optimizer,
            r.mean_mss,
            r.std_mss,
            r.rank
        ));
    }
    s
}

/// Recomputes `metrics.csv` for a campaign directory.
pub fn metrics_command(root: &Path, distance: Distance, front_size: Option<usize>) -> anyhow::Result<Vec<MetricRow>> {
    let rows = compute_metrics(root, distance, front_size)?;
    write_csv(&root.join(METRICS_FILE), &rows)?;
    Ok(rows)
}

/// Derives `mss.csv` and `ranking.csv` from `metrics.csv`.
pub fn rank_command(root: &Path) -> anyhow::Result<Vec<RankRow>> {
    let rows: Vec<MetricRow> = read_csv(&root.join(METRICS_FILE))?;
    let m = compute_mss(&rows)?;
    write_csv(&root.join(MSS_FILE), &m)?;
    let r = ranking(&m);
    write_csv(&root.join(RANKING_FILE), &r)?;
    Ok(r)
}
