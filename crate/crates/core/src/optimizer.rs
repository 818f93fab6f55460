//! Baseline solvers: a multifactorial transfer EA over a unified `[0, 1]^D`
//! space and an independent per-task control.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::time_instant;
use crate::error::{invalid, Result};
use crate::pareto::{crowding_distance, dominates, nondominated, nondominated_ranks, truncate_by_crowding};
use crate::suite::{MultiTaskProblem, TaskKind, TaskSpec};

/// Evaluations per static task.
pub const STATIC_BUDGET: u64 = 100_000;
pub const STATIC_POPULATION: usize = 100;
pub const DYNAMIC_POPULATION: usize = 150;
/// Number of progress checkpoints (10%, 20%, ..., 100%).
pub const CHECKPOINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Transfer,
    Independent,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Transfer => "transfer",
            Mode::Independent => "independent",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = crate::error::EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "transfer" => Ok(Mode::Transfer),
            "independent" => Ok(Mode::Independent),
            _ => Err(crate::error::EtmoError::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub population: usize,
    pub dynamic_population: usize,
    /// Probability that a mating pair spans two tasks.
    pub rmp: f64,
    pub eta_c: f64,
    pub eta_m: f64,
    /// Per-gene mutation probability; `None` means `1 / D`.
    pub mutation_rate: Option<f64>,
    pub seed: u64,
    /// Evaluations per task; `None` selects the protocol budget.
    pub budget: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            population: STATIC_POPULATION,
            dynamic_population: DYNAMIC_POPULATION,
            rmp: 0.3,
            eta_c: 20.0,
            eta_m: 20.0,
            mutation_rate: None,
            seed: 0,
            budget: None,
        }
    }
}

impl SolverConfig {
    pub fn population_for(&self, problem: &MultiTaskProblem) -> usize {
        if problem.is_dynamic() {
            self.dynamic_population
        } else {
            self.population
        }
    }

    /// Per-task budget: 100000 for static tasks, `population * 31 * tau_t` for dynamic ones.
    pub fn budget_for(&self, problem: &MultiTaskProblem) -> u64 {
        if let Some(b) = self.budget {
            return b;
        }
        match problem.tasks().iter().find_map(|t| match t.kind() {
            TaskKind::Dynamic(d) => Some(d.spec()),
            _ => None,
        }) {
            Some(spec) => (self.dynamic_population * 31 * spec.tau_t) as u64,
            None => STATIC_BUDGET,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population < 4
            || !self.population.is_multiple_of(2)
            || self.dynamic_population < 4
            || !self.dynamic_population.is_multiple_of(2)
        {
            return Err(invalid("population sizes must be even and at least 4"));
        }
        if !(0.0..=1.0).contains(&self.rmp) {
            return Err(invalid("rmp must lie in [0, 1]"));
        }
        if self.eta_c < 0.0 || self.eta_m < 0.0 {
            return Err(invalid("distribution indices must be nonnegative"));
        }
        if let Some(p) = self.mutation_rate {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid("mutation rate must lie in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Maps the first `task.n` genes onto the task's bounds.
pub fn decode(genes: &[f64], task: &TaskSpec) -> Vec<f64> {
    (0..task.n())
        .map(|j| {
            let (lo, hi) = task.bounds(j);
            (lo + genes[j] * (hi - lo)).clamp(lo, hi)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub percent: usize,
    pub evaluations: u64,
    pub front: Vec<Vec<f64>>,
}

/// Nondominated set held just before an environment change.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeSnapshot {
    pub change_index: usize,
    pub t: f64,
    pub front: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskRecord {
    pub task: usize,
    pub evaluations: u64,
    /// Re-evaluations of survivors after environment changes; not budgeted.
    pub reevaluations: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub changes: Vec<ChangeSnapshot>,
    /// Times the archive exceeded its cap and was thinned.
    pub archive_truncations: u64,
}

impl TaskRecord {
    pub fn final_front(&self) -> &[Vec<f64>] {
        self.checkpoints.last().map(|c| c.front.as_slice()).unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: usize,
    pub mode: Mode,
    pub seed: u64,
    pub population: usize,
    pub budget: u64,
    pub rmp: f64,
    pub generations: usize,
    pub cross_task_matings: u64,
    pub tasks: Vec<TaskRecord>,
}

#[derive(Debug, Clone)]
struct Individual {
    genes: Vec<f64>,
    f: Vec<f64>,
    rank: usize,
    crowd: f64,
}

/// Exact nondominated archive with a size cap.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    points: Vec<Vec<f64>>,
    cap: usize,
    truncations: u64,
}

impl Archive {
    pub fn new(cap: usize) -> Self {
        Self {
            points: Vec::new(),
            cap,
            truncations: 0,
        }
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn truncations(&self) -> u64 {
        self.truncations
    }

    pub fn clear(&mut self) {
        self.points.clear();
    }

    /// Inserts `p` unless it is dominated by or equal to a member; drops
    /// members it dominates.
    pub fn insert(&mut self, p: &[f64]) -> bool {
        if p.iter().any(|v| !v.is_finite()) {
            return false;
        }
        if self.points.iter().any(|q| q.as_slice() == p || dominates(q, p)) {
            return false;
        }
        self.points.retain(|q| !dominates(p, q));
        self.points.push(p.to_vec());
        if self.points.len() > 2 * self.cap {
            truncate_by_crowding(&mut self.points, self.cap);
            self.truncations += 1;
        }
        true
    }

    /// Current members thinned to at most `cap`.
    pub fn snapshot(&self) -> Vec<Vec<f64>> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        truncate_by_crowding(&mut pts, self.cap);
        pts
    }
}

fn assign_rank_crowding(pop: &mut [Individual]) {
    let pts: Vec<Vec<f64>> = pop.iter().map(|i| i.f.clone()).collect();
    let ranks = nondominated_ranks(&pts);
    let max_rank = ranks.iter().copied().max().unwrap_or(0);
    for r in 0..=max_rank {
        let members: Vec<usize> = (0..pop.len()).filter(|&i| ranks[i] == r).collect();
        let cd = crowding_distance(&pts, &members);
        for (&i, d) in members.iter().zip(cd) {
            pop[i].rank = r;
            pop[i].crowd = d;
        }
    }
}

/// NSGA-II environmental selection.
fn select(mut pool: Vec<Individual>, size: usize) -> Vec<Individual> {
    assign_rank_crowding(&mut pool);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| {
        pool[a]
            .rank
            .cmp(&pool[b].rank)
            .then(
                pool[b]
                    .crowd
                    .partial_cmp(&pool[a].crowd)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
            .then(a.cmp(&b))
    });
    let keep: Vec<usize> = order.into_iter().take(size).collect();
    let mut out: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    let mut next: Vec<Individual> = keep.iter().map(|&i| out[i].take().unwrap()).collect();
    assign_rank_crowding(&mut next);
    next
}

fn tournament<'a>(pop: &'a [Individual], rng: &mut ChaCha8Rng) -> &'a Individual {
    let a = &pop[rng.gen_range(0..pop.len())];
    let b = &pop[rng.gen_range(0..pop.len())];
    if a.rank < b.rank || (a.rank == b.rank && a.crowd > b.crowd) {
        a
    } else {
        b
    }
}

fn sbx(p1: &[f64], p2: &[f64], eta: f64, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for j in 0..p1.len() {
        if rng.gen::<f64>() > 0.5 {
            continue;
        }
        let (a, b) = (p1[j], p2[j]);
        if (a - b).abs() < 1e-14 {
            continue;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let u: f64 = rng.gen();
        let spread = |beta: f64| {
            let alpha = 2.0 - beta.powf(-(eta + 1.0));
            if u <= 1.0 / alpha {
                (u * alpha).powf(1.0 / (eta + 1.0))
            } else {
                (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
            }
        };
        let d = hi - lo;
        let bq1 = spread(1.0 + 2.0 * lo / d);
        let bq2 = spread(1.0 + 2.0 * (1.0 - hi) / d);
        let mut v1 = (0.5 * ((lo + hi) - bq1 * d)).clamp(0.0, 1.0);
        let mut v2 = (0.5 * ((lo + hi) + bq2 * d)).clamp(0.0, 1.0);
        if rng.gen::<bool>() {
            std::mem::swap(&mut v1, &mut v2);
        }
        c1[j] = v1;
        c2[j] = v2;
    }
    (c1, c2)
}

fn polynomial_mutation(x: &mut [f64], rate: f64, eta: f64, rng: &mut ChaCha8Rng) {
    for v in x.iter_mut() {
        if rng.gen::<f64>() >= rate {
            continue;
        }
        let u: f64 = rng.gen();
        let y = *v;
        let delta = if u < 0.5 {
            let xy = 1.0 - y;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(1.0 / (eta + 1.0)) - 1.0
        } else {
            let xy = y;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(1.0 / (eta + 1.0))
        };
        *v = (y + delta).clamp(0.0, 1.0);
    }
}

struct TaskState {
    pop: Vec<Individual>,
    archive: Archive,
    evaluations: u64,
    reevaluations: u64,
    checkpoints: Vec<Checkpoint>,
    changes: Vec<ChangeSnapshot>,
}

fn evaluate_batch(
    problem: &MultiTaskProblem,
    task: &TaskSpec,
    genes: Vec<Vec<f64>>,
    t: Option<f64>,
    counted: bool,
) -> Result<Vec<Individual>> {
    genes
        .into_par_iter()
        .map(|g| {
            let x = decode(&g, task);
            let f = if counted {
                problem.evaluate(task.index(), &x, t)?
            } else {
                task.evaluate(&x, t)?
            };
            Ok(Individual {
                genes: g,
                f,
                rank: 0,
                crowd: 0.0,
            })
        })
        .collect()
}

/// Runs one seeded optimisation of every task of `problem`.
pub fn run(problem: &MultiTaskProblem, cfg: &SolverConfig, mode: Mode) -> Result<RunRecord> {
    cfg.validate()?;
    let pop_size = cfg.population_for(problem);
    let budget = cfg.budget_for(problem);
    if budget < pop_size as u64 {
        return Err(invalid(format!(
            "budget {budget} is below the population size {pop_size}"
        )));
    }
    let rmp = match mode {
        Mode::Transfer if problem.task_count() > 1 => cfg.rmp,
        _ => 0.0,
    };
    let dim = problem.unified_dim();
    let rate = cfg.mutation_rate.unwrap_or(1.0 / dim as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tasks = problem.tasks();
    let ntasks = tasks.len();
    let dynamic_spec = tasks.iter().find_map(|t| match t.kind() {
        TaskKind::Dynamic(d) => Some(d.spec()),
        _ => None,
    });
    let time_at = |tau: usize| dynamic_spec.map(|s| time_instant(tau, s));
    let max_generations = match dynamic_spec {
        Some(_) => (budget / pop_size as u64) as usize,
        None => usize::MAX,
    };
    let thresholds: Vec<u64> = (1..=CHECKPOINTS)
        .map(|c| (budget as f64 * c as f64 / CHECKPOINTS as f64).round() as u64)
        .collect();

    let mut tau = 0usize;
    let mut now = time_at(tau);
    let mut states: Vec<TaskState> = Vec::with_capacity(ntasks);
    for task in tasks {
        let genes: Vec<Vec<f64>> = (0..pop_size).map(|_| (0..dim).map(|_| rng.gen()).collect()).collect();
        let pop = evaluate_batch(problem, task, genes, now.map(|n| n.t), true)?;
        let mut archive = Archive::new(10 * pop_size);
        for ind in &pop {
            archive.insert(&ind.f);
        }
        let mut pop = pop;
        assign_rank_crowding(&mut pop);
        states.push(TaskState {
            pop,
            archive,
            evaluations: pop_size as u64,
            reevaluations: 0,
            checkpoints: Vec::new(),
            changes: Vec::new(),
        });
    }
    let record_checkpoints = |st: &mut TaskState| {
        while st.checkpoints.len() < CHECKPOINTS && st.evaluations >= thresholds[st.checkpoints.len()] {
            let c = st.checkpoints.len();
            st.checkpoints.push(Checkpoint {
                percent: (c + 1) * 100 / CHECKPOINTS,
                evaluations: st.evaluations,
                front: st.archive.snapshot(),
            });
        }
    };
    states.iter_mut().for_each(record_checkpoints);

    let mut generations = 1usize;
    let mut cross = 0u64;
    loop {
        let done = match dynamic_spec {
            Some(_) => generations >= max_generations,
            None => states.iter().all(|s| s.evaluations >= budget),
        };
        if done {
            break;
        }
        tau += 1;
        let next = time_at(tau);
        if let (Some(prev), Some(cur)) = (now, next) {
            if cur.change_index != prev.change_index {
                for (st, task) in states.iter_mut().zip(tasks) {
                    st.changes.push(ChangeSnapshot {
                        change_index: prev.change_index,
                        t: prev.t,
                        front: st.archive.snapshot(),
                    });
                    st.archive.clear();
                    let genes: Vec<Vec<f64>> = st.pop.drain(..).map(|i| i.genes).collect();
                    st.reevaluations += genes.len() as u64;
                    st.pop = evaluate_batch(problem, task, genes, Some(cur.t), false)?;
                    for ind in &st.pop {
                        st.archive.insert(&ind.f);
                    }
                    assign_rank_crowding(&mut st.pop);
                }
            }
        }
        now = next;

        // offspring genes grouped by skill
        let mut offspring: Vec<Vec<Vec<f64>>> = vec![Vec::new(); ntasks];
        for i in 0..ntasks {
            if states[i].evaluations >= budget {
                continue;
            }
            for _ in 0..pop_size / 2 {
                let pa = tournament(&states[i].pop, &mut rng);
                let partner_task = if rmp > 0.0 && rng.gen::<f64>() < rmp {
                    let mut j = rng.gen_range(0..ntasks - 1);
                    if j >= i {
                        j += 1;
                    }
                    j
                } else {
                    i
                };
                let pb = tournament(&states[partner_task].pop, &mut rng);
                let (mut c1, mut c2) = sbx(&pa.genes, &pb.genes, cfg.eta_c, &mut rng);
                polynomial_mutation(&mut c1, rate, cfg.eta_m, &mut rng);
                polynomial_mutation(&mut c2, rate, cfg.eta_m, &mut rng);
                if partner_task == i {
                    offspring[i].push(c1);
                    offspring[i].push(c2);
                } else {
                    cross += 1;
                    for c in [c1, c2] {
                        let skill = if rng.gen::<bool>() { i } else { partner_task };
                        offspring[skill].push(c);
                    }
                }
            }
        }

        let t = now.map(|n| n.t);
        for ((st, task), genes) in states.iter_mut().zip(tasks).zip(offspring) {
            let room = budget.saturating_sub(st.evaluations) as usize;
            let genes: Vec<Vec<f64>> = genes.into_iter().take(room).collect();
            if genes.is_empty() {
                continue;
            }
            st.evaluations += genes.len() as u64;
            let children = evaluate_batch(problem, task, genes, t, true)?;
            for c in &children {
                st.archive.insert(&c.f);
            }
            let mut pool = std::mem::take(&mut st.pop);
            pool.extend(children);
            st.pop = select(pool, pop_size);
            record_checkpoints(st);
        }
        generations += 1;
    }
    Ok(RunRecord {
        instance: problem.instance(),
        mode,
        seed: cfg.seed,
        population: pop_size,
        budget,
        rmp,
        generations,
        cross_task_matings: cross,
        tasks: states
            .into_iter()
            .enumerate()
            .map(|(i, mut st)| {
                if st.checkpoints.len() < CHECKPOINTS {
                    // dynamic runs stop on the generation count; close the series
                    while st.checkpoints.len() < CHECKPOINTS {
                        let c = st.checkpoints.len();
                        st.checkpoints.push(Checkpoint {
                            percent: (c + 1) * 100 / CHECKPOINTS,
                            evaluations: st.evaluations,
                            front: st.archive.snapshot(),
                        });
                    }
                }
                TaskRecord {
                    task: i + 1,
                    evaluations: st.evaluations,
                    reevaluations: st.reevaluations,
                    checkpoints: st.checkpoints,
                    changes: st.changes,
                    archive_truncations: st.archive.truncations(),
                }
            })
            .collect(),
    })
}

/// Nondominated set of `budget` uniformly random solutions of a static task.
pub fn random_sampling(task: &TaskSpec, budget: u64, seed: u64, cap: usize) -> Result<Vec<Vec<f64>>> {
    if task.is_dynamic() {
        return Err(invalid("random sampling oracle is for static tasks"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut archive = Archive::new(cap);
    let chunk = 1000u64;
    let mut left = budget;
    while left > 0 {
        let take = left.min(chunk);
        let xs: Vec<Vec<f64>> = (0..take)
            .map(|_| (0..task.n()).map(|_| rng.gen()).collect::<Vec<f64>>())
            .collect();
        let fs: Vec<Vec<f64>> = xs
            .into_par_iter()
            .map(|g| task.evaluate(&decode(&g, task), None))
            .collect::<Result<_>>()?;
        for f in &fs {
            archive.insert(f);
        }
        left -= take;
    }
    Ok(nondominated(&archive.snapshot()))
}
