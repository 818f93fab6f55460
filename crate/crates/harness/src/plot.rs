//! Plain-text plot data for one run directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use etmof_core::metrics::{igd_with, Distance};
use etmof_core::shapefn::write_points;
use etmof_core::suite::MultiTaskProblem;

use crate::fronts::FrontCache;
use crate::rundir::read_run;

/// Writes, per task, one scatter file per checkpoint, the IGD-vs-evaluations
/// series and, for dynamic tasks, the per-change IGD series. Returns the
/// files written.
pub fn plotdata(run_dir: &Path, out: &Path, distance: Distance) -> anyhow::Result<Vec<PathBuf>> {
    if !run_dir.is_dir() {
        bail!("run directory {} does not exist", run_dir.display());
    }
    let run = read_run(run_dir)?;
    let problem = MultiTaskProblem::instantiate(run.cell.instance)?;
    let fronts = FrontCache::new(None);
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut written = Vec::new();
    let mut emit = |name: String, body: Vec<u8>| -> anyhow::Result<()> {
        let p = out.join(name);
        fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        written.push(p);
        Ok(())
    };
    for st in &run.tasks {
        let task = problem.task(st.task)?;
        let k = st.task;
        for c in &st.checkpoints {
            let mut buf = Vec::new();
            write_points(&mut buf, &c.points)?;
            emit(format!("T{k}_checkpoint_{:03}.dat", c.percent), buf)?;
        }
        if task.is_dynamic() {
            let mut s = String::from("# change_index t igd\n");
            for c in &st.changes {
                let f = fronts.get(task, Some((c.change_index, c.t)))?;
                writeln!(s, "{} {} {:e}", c.change_index, c.t, igd_with(&c.points, &f, distance)?)?;
            }
            emit(format!("T{k}_migd.dat"), s.into_bytes())?;
        } else {
            let f = fronts.get(task, None)?;
            let mut s = String::from("# evaluations igd\n");
            for c in &st.checkpoints {
                writeln!(s, "{} {:e}", c.evaluations, igd_with(&c.points, &f, distance)?)?;
            }
            emit(format!("T{k}_igd.dat"), s.into_bytes())?;
        }
    }
    Ok(written)
}
