//! On-disk layout of one run:
//!
//! ```text
//! <run>/meta
//! <run>/T<k>/checkpoint_<pct>.front
//! <run>/T<k>/change_<idx>.front      (dynamic tasks)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use etmof_core::optimizer::RunRecord;
use etmof_core::shapefn::{parse_points, write_points};

/// Identity of a campaign cell as echoed in `meta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellId {
    pub instance: usize,
    pub optimizer: String,
    pub run: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredCheckpoint {
    pub percent: usize,
    pub evaluations: u64,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredChange {
    pub change_index: usize,
    pub t: f64,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredTask {
    pub task: usize,
    pub evaluations: u64,
    pub checkpoints: Vec<StoredCheckpoint>,
    pub changes: Vec<StoredChange>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoredRun {
    pub cell: CellId,
    pub meta: BTreeMap<String, String>,
    pub tasks: Vec<StoredTask>,
}

fn task_dir(dir: &Path, task: usize) -> PathBuf {
    dir.join(format!("T{task}"))
}

fn write_front(path: &Path, header: &[String], points: &[Vec<f64>]) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    for h in header {
        writeln!(buf, "# {h}")?;
    }
    write_points(&mut buf, points)?;
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
}

/// Writes `record` under `dir`, which must not exist yet.
pub fn write_run(dir: &Path, cell: &CellId, optimizer_mode: &str, record: &RunRecord) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut meta = String::new();
    let mut kv = |k: &str, v: String| {
        meta.push_str(k);
        meta.push_str(" = ");
        meta.push_str(&v);
        meta.push('\n');
    };
    kv("instance", cell.instance.to_string());
    kv("optimizer", cell.optimizer.clone());
    kv("mode", optimizer_mode.to_string());
    kv("run", cell.run.to_string());
    kv("seed", cell.seed.to_string());
    kv("population", record.population.to_string());
    kv("budget", record.budget.to_string());
    kv("rmp", record.rmp.to_string());
    kv("generations", record.generations.to_string());
    kv("cross_task_matings", record.cross_task_matings.to_string());
    kv("tasks", record.tasks.len().to_string());
    for t in &record.tasks {
        kv(&format!("T{}.evaluations", t.task), t.evaluations.to_string());
        kv(&format!("T{}.reevaluations", t.task), t.reevaluations.to_string());
        kv(
            &format!("T{}.archive_truncations", t.task),
            t.archive_truncations.to_string(),
        );
    }
    fs::write(dir.join("meta"), meta)?;
    for t in &record.tasks {
        let td = task_dir(dir, t.task);
        fs::create_dir_all(&td)?;
        for c in &t.checkpoints {
            write_front(
                &td.join(format!("checkpoint_{:03}.front", c.percent)),
                &[
                    format!("checkpoint {}", c.percent),
                    format!("evaluations {}", c.evaluations),
                ],
                &c.front,
            )?;
        }
        for c in &t.changes {
            write_front(
                &td.join(format!("change_{:02}.front", c.change_index)),
                &[format!("change {}", c.change_index), format!("t {}", c.t)],
                &c.front,
            )?;
        }
    }
    Ok(())
}

fn parse_meta(text: &str) -> anyhow::Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("meta line {}: expected key = value", no + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str) -> anyhow::Result<T> {
    meta.get(key)
        .ok_or_else(|| anyhow!("meta is missing {key}"))?
        .parse()
        .map_err(|_| anyhow!("meta value for {key} is malformed"))
}

fn sorted_files(dir: &Path, prefix: &str) -> anyhow::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with(prefix) && n.ends_with(".front"))
        })
        .collect();
    files.sort();
    Ok(files)
}

pub fn read_run(dir: &Path) -> anyhow::Result<StoredRun> {
    if !dir.is_dir() {
        bail!("run directory {} does not exist", dir.display());
    }
    let meta_path = dir.join("meta");
    let meta =
        parse_meta(&fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?)?;
    let cell = CellId {
        instance: get(&meta, "instance")?,
        optimizer: get(&meta, "optimizer")?,
        run: get(&meta, "run")?,
        seed: get(&meta, "seed")?,
    };
    let ntasks: usize = get(&meta, "tasks")?;
    let mut tasks = Vec::with_capacity(ntasks);
    for task in 1..=ntasks {
        let td = task_dir(dir, task);
        let mut checkpoints = Vec::new();
        for f in sorted_files(&td, "checkpoint_")? {
            let text = fs::read_to_string(&f)?;
            let parse = |k: &str| -> anyhow::Result<u64> {
                header_value(&text, k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| anyhow!("{} lacks a {k} header", f.display()))
            };
            checkpoints.push(StoredCheckpoint {
                percent: parse("checkpoint")? as usize,
                evaluations: parse("evaluations")?,
                points: parse_points(&text)?,
            });
        }
        checkpoints.sort_by_key(|c| c.percent);
        let mut changes = Vec::new();
        for f in sorted_files(&td, "change_")? {
            let text = fs::read_to_string(&f)?;
            let change_index = header_value(&text, "change")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| anyhow!("{} lacks a change header", f.display()))?;
            let t = header_value(&text, "t")
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| anyhow!("{} lacks a t header", f.display()))?;
            changes.push(StoredChange {
                change_index,
                t,
                points: parse_points(&text)?,
            });
        }
        changes.sort_by_key(|c| c.change_index);
        tasks.push(StoredTask {
            task,
            evaluations: get(&meta, &format!("T{task}.evaluations"))?,
            checkpoints,
            changes,
        });
    }
    Ok(StoredRun { cell, meta, tasks })
}
