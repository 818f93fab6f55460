use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use etmof_core::dynamics::time_instant;
use etmof_core::metrics::{Distance, STANDARD_CHANGES};
use etmof_core::shapefn::parse_points;
use etmof_core::suite::{MultiTaskProblem, TaskKind};
use etmof_core::EtmoError;
use etmof_harness::config::CampaignConfig;
use etmof_harness::fronts::{front_file_name, reference_front};
use etmof_harness::{campaign, catalog, instance_name, plot, report, Failure, HResult};

#[derive(Parser)]
#[command(name = "etmof", version, about = "ETMOF benchmark suite harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the instance metadata table.
    Catalog,
    /// Evaluate one decision vector.
    Eval {
        #[arg(long)]
        instance: usize,
        #[arg(long)]
        task: usize,
        /// File holding n whitespace-separated reals.
        #[arg(long)]
        x: PathBuf,
        /// Time instant, required for dynamic instances.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Write a reference front.
    ReferenceFront {
        #[arg(long)]
        instance: usize,
        #[arg(long)]
        task: usize,
        /// Change index of a dynamic task; without it (and without --t) all
        /// 30 per-change fronts are written to --out-dir.
        #[arg(long, conflicts_with = "t")]
        change_index: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        count: Option<usize>,
        /// Output file; stdout when absent.
        #[arg(long, conflicts_with = "out_dir")]
        out: Option<PathBuf>,
        /// Directory receiving files named after the instance and task.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Execute a campaign described by a TOML file.
    RunCampaign {
        #[arg(long)]
        config: PathBuf,
        /// Replace existing run directories.
        #[arg(long)]
        force: bool,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        /// Evaluations per task.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Campaign directory; defaults to the config's output_dir under the
        /// output root.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, env = "ETMOF_OUTPUT_ROOT", default_value = ".")]
        output_root: PathBuf,
    },
    /// Recompute metrics.csv for a campaign directory.
    Metrics {
        #[arg(long)]
        campaign: PathBuf,
        #[arg(long, default_value = "manhattan")]
        distance: Distance,
        #[arg(long)]
        front_size: Option<usize>,
    },
    /// Derive mss.csv and ranking.csv from metrics.csv.
    Rank {
        #[arg(long)]
        campaign: PathBuf,
    },
    /// Emit plot data for one run directory.
    Plotdata {
        #[arg(long)]
        run_dir: PathBuf,
        /// Defaults to <run-dir>/plot.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "manhattan")]
        distance: Distance,
    },
}

fn core_err(e: EtmoError) -> Failure {
    Failure::bad(e)
}

fn problem_task(instance: usize, task: usize) -> HResult<MultiTaskProblem> {
    let p = MultiTaskProblem::instantiate(instance).map_err(core_err)?;
    p.task(task).map_err(core_err)?;
    Ok(p)
}

fn eval(instance: usize, task: usize, x: &Path, t: Option<f64>) -> HResult<()> {
    let p = problem_task(instance, task)?;
    let text = fs::read_to_string(x)
        .with_context(|| format!("reading {}", x.display()))
        .map_err(Failure::bad)?;
    let rows = parse_points(&text).map_err(core_err)?;
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    let f = p.evaluate(task, &values, t).map_err(core_err)?;
    let line: Vec<String> = f.iter().map(|v| format!("{v:.11e}")).collect();
    println!("{}", line.join(" "));
    Ok(())
}

fn write_front_to(path: Option<&Path>, text: &str) -> HResult<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(Failure::failed)?;
            }
            fs::write(p, text)
                .with_context(|| format!("writing {}", p.display()))
                .map_err(Failure::failed)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn reference_front_cmd(
    instance: usize,
    task: usize,
    change_index: Option<usize>,
    t: Option<f64>,
    count: Option<usize>,
    out: Option<PathBuf>,
    out_dir: Option<PathBuf>,
) -> HResult<()> {
    let p = problem_task(instance, task)?;
    let spec = p.task(task).map_err(core_err)?;
    if matches!(count, Some(c) if c < 100) {
        return Err(Failure::bad(anyhow!("--count must be at least 100")));
    }
    let target = |change: Option<usize>| {
        out_dir
            .as_ref()
            .map(|d| d.join(front_file_name(instance, task, change)))
    };
    match spec.kind() {
        TaskKind::Static(_) => {
            if change_index.is_some() || t.is_some() {
                return Err(Failure::bad(anyhow!(
                    "{} T{task} is static; drop --t/--change-index",
                    instance_name(instance)
                )));
            }
            let f = reference_front(spec, None, count).map_err(core_err)?;
            write_front_to(out.or_else(|| target(None)).as_deref(), &f.to_text())
        }
        TaskKind::Dynamic(d) => {
            let single = match (change_index, t) {
                (Some(c), _) => Some((Some(c), time_instant(c * d.spec().tau_t, d.spec()).t)),
                (None, Some(t)) => Some((None, t)),
                (None, None) => None,
            };
            match single {
                Some((c, t)) => {
                    let f = reference_front(spec, Some(t), count).map_err(core_err)?;
                    write_front_to(out.or_else(|| target(c)).as_deref(), &f.to_text())
                }
                None => {
                    let dir = out_dir.ok_or_else(|| {
                        Failure::bad(anyhow!(
                            "dynamic task: give --t, --change-index or --out-dir for all changes"
                        ))
                    })?;
                    for c in 0..STANDARD_CHANGES {
                        let t = time_instant(c * d.spec().tau_t, d.spec()).t;
                        let f = reference_front(spec, Some(t), count).map_err(core_err)?;
                        write_front_to(Some(&dir.join(front_file_name(instance, task, Some(c)))), &f.to_text())?;
                    }
                    Ok(())
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_campaign_cmd(
    config: &Path,
    force: bool,
    seed: Option<u64>,
    runs: Option<usize>,
    budget: Option<u64>,
    workers: Option<usize>,
    output: Option<PathBuf>,
    output_root: PathBuf,
) -> HResult<()> {
    let mut cfg = CampaignConfig::load(config).map_err(Failure::bad)?;
    if let Some(s) = seed {
        cfg.master_seed = s;
    }
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if budget.is_some() {
        cfg.budget = budget;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    let root = match output {
        Some(o) => o,
        None => output_root.join(cfg.output_dir.clone().unwrap_or_else(|| "campaign".into())),
    };
    let outcome = campaign::run_campaign(&cfg, &root, force)?;
    println!("{} cells completed in {}", outcome.cells, root.display());
    print!("{}", report::render_ranking(&outcome.ranking));
    Ok(())
}

fn dispatch(cli: Cli) -> HResult<()> {
    match cli.command {
        Command::Catalog => {
            print!("{}", catalog::render().map_err(Failure::failed)?);
            Ok(())
        }
        Command::Eval { instance, task, x, t } => eval(instance, task, &x, t),
        Command::ReferenceFront {
            instance,
            task,
            change_index,
            t,
            count,
            out,
            out_dir,
        } => reference_front_cmd(instance, task, change_index, t, count, out, out_dir),
        Command::RunCampaign {
            config,
            force,
            seed,
            runs,
            budget,
            workers,
            output,
            output_root,
        } => run_campaign_cmd(&config, force, seed, runs, budget, workers, output, output_root),
        Command::Metrics {
            campaign,
            distance,
            front_size,
        } => {
            if !campaign.is_dir() {
                return Err(Failure::bad(anyhow!("{} is not a directory", campaign.display())));
            }
            let rows = report::metrics_command(&campaign, distance, front_size).map_err(Failure::failed)?;
            println!(
                "{} metric rows written to {}",
                rows.len(),
                campaign.join(report::METRICS_FILE).display()
            );
            Ok(())
        }
        Command::Rank { campaign } => {
            if !campaign.join(report::METRICS_FILE).is_file() {
                return Err(Failure::bad(anyhow!(
                    "{} has no {}",
                    campaign.display(),
                    report::METRICS_FILE
                )));
            }
            let r = report::rank_command(&campaign).map_err(Failure::failed)?;
            print!("{}", report::render_ranking(&r));
            Ok(())
        }
        Command::Plotdata { run_dir, out, distance } => {
            if !run_dir.is_dir() {
                return Err(Failure::bad(anyhow!(
                    "run directory {} does not exist",
                    run_dir.display()
                )));
            }
            let out = out.unwrap_or_else(|| run_dir.join("plot"));
            let files = plot::plotdata(&run_dir, &out, distance).map_err(Failure::failed)?;
            println!("{} files written to {}", files.len(), out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("etmof: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
