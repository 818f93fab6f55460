//! Campaign execution: every (instance, optimizer, run) cell, then metrics
//! and the MSS ranking.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{anyhow, Context};
use etmof_core::optimizer::run;
use etmof_core::suite::MultiTaskProblem;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::report::{self, write_csv, RankRow};
use crate::rundir::{write_run, CellId};
use crate::{instance_name, Failure, HResult};

pub const SEEDS_FILE: &str = "seeds.csv";
pub const CELLS_FILE: &str = "cells.csv";

/// FNV-1a over `master|instance|optimizer|run`.
pub fn derive_seed(master: u64, instance: usize, optimizer: &str, run: usize) -> u64 {
    let key = format!("{master}|{instance}|{optimizer}|{run}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone)]
pub struct Cell {
    pub id: CellId,
    pub optimizer_index: usize,
    pub dir: PathBuf,
}

#[derive(Debug, Serialize)]
struct SeedRow<'a> {
    optimizer: &'a str,
    instance: usize,
    run: usize,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct CellRow {
    optimizer: String,
    instance: usize,
    run: usize,
    seed: u64,
    status: String,
    message: String,
}

pub fn run_dir(root: &Path, instance: usize, optimizer: &str, seed: u64) -> PathBuf {
    root.join("runs")
        .join(instance_name(instance))
        .join(optimizer)
        .join(seed.to_string())
}

/// Cells in instance, optimizer, run order.
pub fn cells(cfg: &CampaignConfig, root: &Path) -> Vec<Cell> {
    let mut out = Vec::new();
    for &instance in &cfg.instances {
        for (oi, o) in cfg.optimizers.iter().enumerate() {
            for r in 0..cfg.runs {
                let seed = derive_seed(cfg.master_seed, instance, &o.name, r);
                out.push(Cell {
                    id: CellId {
                        instance,
                        optimizer: o.name.clone(),
                        run: r,
                        seed,
                    },
                    optimizer_index: oi,
                    dir: run_dir(root, instance, &o.name, seed),
                });
            }
        }
    }
    out
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub cells: usize,
    pub failed: usize,
    pub ranking: Vec<RankRow>,
}

fn run_cell(cfg: &CampaignConfig, cell: &Cell) -> anyhow::Result<()> {
    let o = &cfg.optimizers[cell.optimizer_index];
    let problem = MultiTaskProblem::instantiate(cell.id.instance)?;
    let solver = o.solver(cell.id.seed, cfg.budget);
    let record = run(&problem, &solver, o.mode()?)?;
    write_run(&cell.dir, &cell.id, &o.mode, &record)
}

/// Runs the campaign into `root`. Existing run directories are refused
/// unless `force`, in which case they are replaced.
pub fn run_campaign(cfg: &CampaignConfig, root: &Path, force: bool) -> HResult<CampaignOutcome> {
    cfg.validate().map_err(Failure::bad)?;
    let distance = cfg.distance().map_err(Failure::bad)?;
    let cells = cells(cfg, root);
    let existing: Vec<&Cell> = cells.iter().filter(|c| c.dir.exists()).collect();
    if !existing.is_empty() {
        if !force {
            return Err(Failure::Exists(existing[0].dir.display().to_string()));
        }
        for c in existing {
            fs::remove_dir_all(&c.dir)
                .with_context(|| format!("removing {}", c.dir.display()))
                .map_err(Failure::failed)?;
        }
    }
    fs::create_dir_all(root)
        .with_context(|| format!("creating {}", root.display()))
        .map_err(Failure::failed)?;

    let seeds: Vec<SeedRow> = cells
        .iter()
        .map(|c| SeedRow {
            optimizer: &c.id.optimizer,
            instance: c.id.instance,
            run: c.id.run,
            seed: c.id.seed,
        })
        .collect();
    write_csv(&root.join(SEEDS_FILE), &seeds).map_err(Failure::failed)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.unwrap_or(0))
        .build()
        .map_err(Failure::failed)?;
    let results: Mutex<Vec<Option<String>>> = Mutex::new(vec![None; cells.len()]);
    pool.install(|| {
        cells.par_iter().enumerate().for_each(|(i, c)| {
            let err = run_cell(cfg, c).err().map(|e| format!("{e:#}"));
            results.lock().expect("cell results")[i] = err;
        })
    });
    let results = results.into_inner().expect("cell results");

    let rows: Vec<CellRow> = cells
        .iter()
        .zip(&results)
        .map(|(c, e)| CellRow {
            optimizer: c.id.optimizer.clone(),
            instance: c.id.instance,
            run: c.id.run,
            seed: c.id.seed,
            status: if e.is_some() { "failed" } else { "ok" }.to_string(),
            message: e.clone().unwrap_or_default(),
        })
        .collect();
    write_csv(&root.join(CELLS_FILE), &rows).map_err(Failure::failed)?;
    let failed = results.iter().filter(|e| e.is_some()).count();
    if failed > 0 {
        // failed cells leave partial directories that metrics must not read
        for (c, e) in cells.iter().zip(&results) {
            if e.is_some() && c.dir.exists() {
                let _ = fs::remove_dir_all(&c.dir);
            }
        }
        return Err(Failure::Failed(anyhow!(
            "{failed} of {} cells failed; see {CELLS_FILE}",
            cells.len()
        )));
    }

    pool.install(|| report::metrics_command(root, distance, cfg.front_size))
        .map_err(Failure::failed)?;
    let ranking = report::rank_command(root).map_err(Failure::failed)?;
    Ok(CampaignOutcome {
        cells: cells.len(),
        failed,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_distinct_and_stable() {
        let a = derive_seed(0, 1, "mfea", 0);
        assert_eq!(a, derive_seed(0, 1, "mfea", 0));
        assert_ne!(a, derive_seed(0, 1, "mfea", 1));
        assert_ne!(a, derive_seed(1, 1, "mfea", 0));
        assert_ne!(a, derive_seed(0, 2, "mfea", 0));
        assert_ne!(a, derive_seed(0, 1, "single", 0));
    }
}
