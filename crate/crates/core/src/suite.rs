//! Registry of the 40 benchmark instances.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::basefn::BasicFn;
use crate::dynamics::{DynamicFamily, DynamicTask, DynamicsSpec};
use crate::error::{EtmoError, Result};
use crate::formulation::{Landscape, Model, StaticTask, Unit};
use crate::grouping::build_grouping;
use crate::linkfn::{LinkageFn, LinkageOperator};
use crate::shapefn::ShapeFn;
use crate::transform::{bundle_seed, make_rotation, make_shift, TransformBundle, TransformKind};

pub const INSTANCE_COUNT: usize = 40;

/// Position variable bounds of static tasks.
pub const STATIC_POSITION_BOUNDS: (f64, f64) = (-1.0, 1.0);

/// Problem category of an instance, by id block.
pub fn category(instance: usize) -> &'static str {
    match instance {
        1..=8 => "multiobjective",
        9..=16 => "many-objective",
        17..=24 => "large-scale",
        25..=32 => "many-task",
        _ => "dynamic",
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskKind {
    Static(StaticTask),
    Dynamic(DynamicTask),
}

/// One fully resolved task of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    instance: usize,
    index: usize,
    position_bounds: (f64, f64),
    distance_bounds: (f64, f64),
    landscape: String,
    kind: TaskKind,
}

impl TaskSpec {
    pub fn instance(&self) -> usize {
        self.instance
    }

    /// 1-based task index.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn kind(&self) -> &TaskKind {
        &self.kind
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self.kind, TaskKind::Dynamic(_))
    }

    pub fn m(&self) -> usize {
        match &self.kind {
            TaskKind::Static(s) => s.m(),
            TaskKind::Dynamic(d) => d.m(),
        }
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            TaskKind::Static(s) => s.n(),
            TaskKind::Dynamic(d) => d.n(),
        }
    }

    pub fn k(&self) -> usize {
        match &self.kind {
            TaskKind::Static(s) => s.plan().k(),
            TaskKind::Dynamic(d) => d.k(),
        }
    }

    pub fn l(&self) -> usize {
        self.n() - self.k()
    }

    pub fn model_label(&self) -> String {
        match &self.kind {
            TaskKind::Static(s) => s.model().to_string(),
            TaskKind::Dynamic(_) => "dynamic".into(),
        }
    }

    pub fn shape_label(&self) -> String {
        match &self.kind {
            TaskKind::Static(s) => s.shape().to_string(),
            TaskKind::Dynamic(d) => d.family().to_string(),
        }
    }

    /// Distinct landscapes in group order, e.g. `L4(rotation(x))|L5(rotation(x))`.
    pub fn landscape_label(&self) -> &str {
        &self.landscape
    }

    pub fn position_bounds(&self) -> (f64, f64) {
        self.position_bounds
    }

    pub fn distance_bounds(&self) -> (f64, f64) {
        self.distance_bounds
    }

    /// Bounds of 0-based variable `j`.
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        match &self.kind {
            TaskKind::Dynamic(d) => d.bounds(j),
            TaskKind::Static(_) if j < self.k() => self.position_bounds,
            TaskKind::Static(_) => self.distance_bounds,
        }
    }

    pub fn lower_bounds(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.bounds(j).0).collect()
    }

    pub fn upper_bounds(&self) -> Vec<f64> {
        (0..self.n()).map(|j| self.bounds(j).1).collect()
    }

    /// Evaluates without touching any counter. `t` must be given exactly for
    /// dynamic tasks.
    pub fn evaluate(&self, x: &[f64], t: Option<f64>) -> Result<Vec<f64>> {
        match (&self.kind, t) {
            (TaskKind::Static(s), None) => s.evaluate(x),
            (TaskKind::Dynamic(d), Some(t)) => d.evaluate(x, t),
            (TaskKind::Static(_), Some(_)) => Err(EtmoError::TimeMismatch(format!(
                "ETMOF{} T{} is static and takes no time instant",
                self.instance, self.index
            ))),
            (TaskKind::Dynamic(_), None) => Err(EtmoError::TimeMismatch(format!(
                "ETMOF{} T{} is dynamic and needs a time instant",
                self.instance, self.index
            ))),
        }
    }

    /// Solution on the optimal set for the given position variables.
    pub fn optimal_solution(&self, position: &[f64], t: Option<f64>) -> Result<Vec<f64>> {
        match &self.kind {
            TaskKind::Static(s) => s.optimal_solution(position),
            TaskKind::Dynamic(d) => d.optimal_solution(position, t.unwrap_or(0.0)),
        }
    }
}

/// A multi-task instance with per-task evaluation counters.
#[derive(Debug)]
pub struct MultiTaskProblem {
    instance: usize,
    tasks: Vec<TaskSpec>,
    counters: Vec<AtomicU64>,
}

impl Clone for MultiTaskProblem {
    fn clone(&self) -> Self {
        Self {
            instance: self.instance,
            tasks: self.tasks.clone(),
            counters: self
                .counters
                .iter()
                .map(|c| AtomicU64::new(c.load(Ordering::Relaxed)))
                .collect(),
        }
    }
}

impl MultiTaskProblem {
    pub fn instantiate(instance: usize) -> Result<Self> {
        let tasks = build_instance(instance)?;
        Ok(Self {
            instance,
            counters: tasks.iter().map(|_| AtomicU64::new(0)).collect(),
            tasks,
        })
    }

    pub fn instance(&self) -> usize {
        self.instance
    }

    pub fn name(&self) -> String {
        format!("ETMOF{}", self.instance)
    }

    pub fn tasks(&self) -> &[TaskSpec] {
        &self.tasks
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// 1-based task lookup.
    pub fn task(&self, index: usize) -> Result<&TaskSpec> {
        index
            .checked_sub(1)
            .and_then(|i| self.tasks.get(i))
            .ok_or(EtmoError::UnknownTask {
                instance: self.instance,
                task: index,
            })
    }

    pub fn unified_dim(&self) -> usize {
        self.tasks.iter().map(TaskSpec::n).max().unwrap_or(0)
    }

    pub fn is_dynamic(&self) -> bool {
        self.tasks.iter().any(TaskSpec::is_dynamic)
    }

    /// Evaluates task `index` (1-based) and counts the call.
    pub fn evaluate(&self, index: usize, x: &[f64], t: Option<f64>) -> Result<Vec<f64>> {
        let f = self.task(index)?.evaluate(x, t)?;
        self.counters[index - 1].fetch_add(1, Ordering::Relaxed);
        Ok(f)
    }

    pub fn evaluations(&self, index: usize) -> u64 {
        self.counters[index - 1].load(Ordering::Relaxed)
    }

    pub fn reset_counters(&self) {
        self.counters.iter().for_each(|c| c.store(0, Ordering::Relaxed));
    }
}

impl fmt::Display for TaskSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.distance_bounds;
        write!(
            f,
            "T{} m={} n={} K={} model={} shape={} landscape={} xd=[{lo},{hi}]",
            self.index,
            self.m(),
            self.n(),
            self.k(),
            self.model_label(),
            self.shape_label(),
            self.landscape
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tr {
    None,
    Rot,
    Shift,
    ShiftRot,
}

/// Landscape recipe before transforms are materialised.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Land {
    B(BasicFn, Tr),
    L(LinkageFn, Tr),
    Lg(BasicFn, LinkageOperator),
}

fn b(n: usize) -> BasicFn {
    BasicFn::from_number(n).expect("basic function number")
}

struct StaticDef {
    model: Model,
    m: usize,
    n: usize,
    k: usize,
    shape: ShapeFn,
    bounds: (f64, f64),
    /// Landscape per 1-based group index; lists shorter than m repeat cyclically.
    cases: Vec<Land>,
}

fn def(model: usize, m: usize, n: usize, k: usize, shape: usize, bounds: f64, cases: Vec<Land>) -> StaticDef {
    StaticDef {
        model: Model::ALL[model - 1],
        m,
        n,
        k,
        shape: ShapeFn::ALL[shape - 1],
        bounds: (-bounds, bounds),
        cases,
    }
}

fn lfn(n: usize) -> LinkageFn {
    LinkageFn::ALL[n - 1]
}

fn rot_l(n: usize) -> Land {
    Land::L(lfn(n), Tr::Rot)
}

fn materialise(
    instance: usize,
    task: usize,
    unit: usize,
    land: Land,
    dim: usize,
    bounds: (f64, f64),
) -> Result<Landscape> {
    let bundle = |tr: Tr| -> Result<TransformBundle> {
        let rot = match tr {
            Tr::Rot | Tr::ShiftRot => Some(make_rotation(
                bundle_seed(instance, task, unit, TransformKind::Rotation),
                dim,
            )?),
            _ => None,
        };
        let shift = match tr {
            Tr::Shift | Tr::ShiftRot => Some(make_shift(
                bundle_seed(instance, task, unit, TransformKind::Shift),
                dim,
                bounds.0,
                bounds.1,
            )?),
            _ => None,
        };
        TransformBundle::new(dim, rot, shift)
    };
    Ok(match land {
        Land::B(f, tr) => Landscape::Basic {
            f,
            transform: bundle(tr)?,
        },
        Land::L(f, tr) => Landscape::Linkage {
            f,
            transform: bundle(tr)?,
        },
        Land::Lg(f, op) => Landscape::LinkedBasic { f, op, upper: bounds.1 },
    })
}

fn build_static(instance: usize, task: usize, d: StaticDef) -> Result<TaskSpec> {
    let plan = build_grouping(d.n, d.k, d.m, 0)?;
    let case = |i: usize| d.cases[i % d.cases.len()];
    let mut unit_id = 0usize;
    let mut next_unit = |range: std::ops::Range<usize>, land: Land| -> Result<Unit> {
        let l = materialise(instance, task, unit_id, land, range.len(), d.bounds)?;
        unit_id += 1;
        Unit::new(range, l)
    };
    let groups: Vec<Vec<Unit>> = if d.model.single_landscape() {
        vec![vec![next_unit(plan.distance_range(), case(0))?]]
    } else {
        let mut groups = Vec::with_capacity(d.m);
        for i in 0..d.m {
            let ranges: Vec<_> = if d.model.uses_subgroups() {
                plan.subgroups(i).to_vec()
            } else {
                vec![plan.distance_groups()[i].clone()]
            };
            let units = ranges
                .into_iter()
                .map(|r| next_unit(r, case(i)))
                .collect::<Result<Vec<_>>>()?;
            groups.push(units);
        }
        groups
    };
    let mut labels: Vec<String> = Vec::new();
    for g in &groups {
        let s = g[0].landscape().to_string();
        if !labels.contains(&s) {
            labels.push(s);
        }
    }
    let st = StaticTask::new(d.model, d.shape, plan, groups)?;
    Ok(TaskSpec {
        instance,
        index: task,
        position_bounds: STATIC_POSITION_BOUNDS,
        distance_bounds: d.bounds,
        landscape: labels.join("|"),
        kind: TaskKind::Static(st),
    })
}

fn build_dynamic(instance: usize, task: usize, family: DynamicFamily, n: usize) -> Result<TaskSpec> {
    let d = DynamicTask::new(family, n, DynamicsSpec::default())?;
    let landscape = match family {
        DynamicFamily::Df2 { g } | DynamicFamily::Df5Basic { g } | DynamicFamily::Df6Basic { g } => {
            format!("{g}(x-G(t))")
        }
        _ => "closed-form".into(),
    };
    Ok(TaskSpec {
        instance,
        index: task,
        position_bounds: (0.0, 1.0),
        distance_bounds: family.distance_bounds(),
        landscape,
        kind: TaskKind::Dynamic(d),
    })
}

/// Landscape-per-group definitions of the static instances.
fn static_defs(instance: usize) -> Option<Vec<StaticDef>> {
    use Land::{Lg, B};
    use LinkageOperator::{Lg1, Lg2};
    use Tr::{None as Bare, Rot, Shift, ShiftRot};
    let defs = match instance {
        1 => vec![
            def(2, 2, 50, 1, 1, 10.0, vec![rot_l(1)]),
            def(3, 2, 50, 1, 2, 10.0, vec![rot_l(1)]),
        ],
        2 => vec![
            def(3, 2, 50, 1, 1, 10.0, vec![rot_l(2)]),
            def(3, 2, 50, 1, 1, 10.0, vec![rot_l(3)]),
        ],
        3 => vec![
            def(3, 2, 50, 1, 1, 10.0, vec![rot_l(4), rot_l(5)]),
            def(3, 3, 51, 2, 5, 10.0, vec![rot_l(6)]),
        ],
        4 => vec![
            def(
                4,
                3,
                51,
                2,
                3,
                100.0,
                vec![B(b(3), ShiftRot), B(b(9), ShiftRot), B(b(10), ShiftRot)],
            ),
            def(
                4,
                3,
                51,
                2,
                3,
                100.0,
                vec![B(b(5), ShiftRot), B(b(7), ShiftRot), B(b(8), ShiftRot)],
            ),
        ],
        5 => vec![
            def(
                4,
                3,
                51,
                2,
                4,
                100.0,
                vec![B(b(4), ShiftRot), B(b(6), ShiftRot), B(b(8), ShiftRot)],
            ),
            def(
                4,
                3,
                51,
                2,
                6,
                100.0,
                vec![B(b(1), ShiftRot), B(b(6), ShiftRot), B(b(9), ShiftRot)],
            ),
        ],
        6 => vec![
            def(1, 2, 50, 1, 5, 100.0, vec![B(b(13), ShiftRot)]),
            def(4, 2, 50, 1, 2, 100.0, vec![B(b(11), ShiftRot), B(b(12), ShiftRot)]),
        ],
        7 => vec![
            def(2, 2, 50, 1, 1, 50.0, vec![rot_l(2)]),
            def(3, 2, 50, 1, 2, 50.0, vec![rot_l(3)]),
            def(2, 2, 50, 1, 2, 50.0, vec![rot_l(8)]),
        ],
        8 => [5, 6, 8]
            .iter()
            .map(|&second| def(7, 3, 50, 7, 4, 10.0, vec![B(b(1), Bare), B(b(second), Bare)]))
            .collect(),
        9 => vec![
            def(1, 5, 25, 4, 4, 10.0, vec![B(b(13), Bare)]),
            def(1, 5, 53, 4, 6, 100.0, vec![B(b(13), Shift)]),
        ],
        10 => vec![
            def(2, 8, 56, 7, 9, 20.0, vec![B(b(14), Rot)]),
            def(3, 8, 56, 7, 9, 10.0, vec![B(b(9), Rot)]),
        ],
        11 => vec![
            def(2, 10, 50, 9, 7, 20.0, vec![Land::L(lfn(6), Bare)]),
            def(3, 10, 50, 9, 7, 10.0, vec![Land::L(lfn(7), Bare)]),
        ],
        12 => vec![
            def(2, 5, 53, 4, 3, 10.0, vec![rot_l(4), rot_l(5)]),
            def(2, 8, 56, 7, 5, 10.0, vec![rot_l(6)]),
            def(2, 10, 58, 9, 7, 10.0, vec![rot_l(7)]),
        ],
        13 => vec![
            def(1, 5, 53, 4, 8, 10.0, vec![B(b(9), Rot)]),
            def(3, 8, 56, 7, 5, 10.0, vec![rot_l(2)]),
            def(3, 10, 58, 9, 9, 10.0, vec![rot_l(3)]),
        ],
        14 => vec![
            def(5, 5, 53, 4, 10, 1.0, vec![B(b(1), Rot), B(b(5), Rot)]),
            def(5, 8, 56, 7, 10, 1.0, vec![B(b(14), Rot), B(b(9), Rot)]),
            def(4, 10, 58, 9, 10, 1.0, vec![B(b(1), Rot), B(b(14), Rot)]),
        ],
        15 => vec![
            def(6, 10, 99, 28, 5, 10.0, vec![B(b(1), Bare)]),
            def(7, 10, 99, 28, 5, 10.0, vec![B(b(14), Bare)]),
        ],
        16 => vec![
            def(6, 5, 80, 13, 3, 10.0, vec![B(b(5), Bare), B(b(8), Bare)]),
            def(7, 5, 80, 13, 3, 10.0, vec![B(b(5), Bare), B(b(9), Bare)]),
        ],
        17 => vec![
            def(6, 3, 256, 11, 3, 10.0, vec![Lg(b(1), Lg1)]),
            def(6, 3, 256, 11, 4, 10.0, vec![Lg(b(1), Lg2)]),
        ],
        18 => vec![
            def(7, 2, 512, 6, 5, 10.0, vec![Lg(b(1), Lg1)]),
            def(7, 2, 512, 6, 7, 10.0, vec![Lg(b(14), Lg1)]),
        ],
        19 => vec![
            def(6, 2, 1024, 6, 3, 10.0, vec![Lg(b(1), Lg1), Lg(b(5), Lg1)]),
            def(6, 2, 1024, 6, 3, 10.0, vec![Lg(b(1), Lg1), Lg(b(9), Lg1)]),
        ],
        20 => vec![
            def(7, 2, 256, 6, 2, 10.0, vec![Lg(b(1), Lg2)]),
            def(7, 2, 512, 6, 3, 10.0, vec![Lg(b(14), Lg2)]),
            def(7, 2, 1024, 6, 5, 10.0, vec![Lg(b(1), Lg2), Lg(b(14), Lg2)]),
        ],
        21 => [[1, 5, 6], [14, 5, 8], [1, 9, 6]]
            .iter()
            .map(|fs| def(6, 3, 512, 11, 5, 10.0, fs.iter().map(|&f| Lg(b(f), Lg2)).collect()))
            .collect(),
        22 => [(6, 256, Lg1), (7, 512, Lg2), (6, 1024, Lg2)]
            .iter()
            .map(|&(model, n, op)| {
                def(
                    model,
                    3,
                    n,
                    11,
                    4,
                    10.0,
                    [5, 6, 9].iter().map(|&f| Lg(b(f), op)).collect(),
                )
            })
            .collect(),
        23 => vec![
            def(6, 2, 2048, 6, 3, 10.0, vec![Lg(b(1), Lg1)]),
            def(6, 2, 4096, 6, 3, 10.0, vec![Lg(b(1), Lg1), Lg(b(5), Lg1)]),
        ],
        24 => vec![
            def(6, 2, 5000, 6, 3, 10.0, vec![Lg(b(1), Lg1), Lg(b(9), Lg1)]),
            def(6, 2, 10000, 6, 3, 10.0, vec![Lg(b(5), Lg1), Lg(b(9), Lg1)]),
        ],
        25 => [(1, 10.0), (2, 5.0), (3, 1.0), (5, 5.0), (7, 10.0)]
            .iter()
            .map(|&(l, bd)| def(3, 2, 50, 1, 1, bd, vec![rot_l(l)]))
            .collect(),
        26 => (1..=10)
            .map(|k| {
                let model = if k % 2 == 0 { 2 } else { 3 };
                let shape = [1, 2, 3][k % 3];
                let (l, bd) = [(1, 10.0), (2, 5.0), (3, 1.0), (4, 5.0), (7, 10.0)][k % 5];
                def(model, 2, 50, 1, shape, bd, vec![rot_l(l)])
            })
            .collect(),
        27 => (1..=10)
            .map(|k| {
                let (model, op) = if k <= 5 { (6, Lg1) } else { (7, Lg2) };
                let f = [5, 6, 7, 8, 9][k % 5];
                def(model, 3, 50, 7, 3, 10.0, vec![Lg(b(f), op)])
            })
            .collect(),
        28 => (1..=20)
            .map(|k| {
                let model = if k % 2 == 0 { 2 } else { 3 };
                let shape = [3, 5, 7][k % 3];
                let (f, bd) = [(1, 50.0), (5, 10.0), (6, 20.0), (8, 30.0), (9, 40.0)][k % 5];
                def(model, 3, 51, 2, shape, bd, vec![B(b(f), Rot)])
            })
            .collect(),
        29 => (1..=30)
            .map(|k| {
                let shape = if k % 2 == 0 { 4 } else { 6 };
                let (f, bd) = [(1, 50.0), (3, 100.0), (6, 0.5)][k % 3];
                def(1, 3, 51, 2, shape, bd, vec![B(b(f), ShiftRot)])
            })
            .collect(),
        30 => (1..=40)
            .map(|k| {
                let (f, bd) = [(5, 50.0), (6, 50.0), (9, 50.0), (7, 100.0), (8, 0.5)][k % 5];
                def(1, 2, 50, 1, 1, bd, vec![B(b(f), ShiftRot)])
            })
            .collect(),
        31 => (1..=50)
            .map(|k| {
                let (l, bd) = [(1, 60.0), (2, 50.0), (3, 40.0), (4, 30.0), (5, 20.0), (7, 10.0)][k % 6];
                def(3, 2, 50, 1, 2, bd, vec![rot_l(l)])
            })
            .collect(),
        32 => (1..=28)
            .map(|k| {
                let land = if k <= 14 { Lg(b(k), Lg1) } else { Lg(b(k - 14), Lg2) };
                def(6, 3, 80, 7, 5, 10.0, vec![land])
            })
            .collect(),
        _ => return None,
    };
    Some(defs)
}

fn dynamic_defs(instance: usize) -> Option<Vec<(DynamicFamily, usize)>> {
    use DynamicFamily::*;
    let defs = match instance {
        33 => vec![(Dmop2, 256), (Zjz, 256)],
        34 => vec![(Df2 { g: b(1) }, 50), (Df2 { g: b(9) }, 50)],
        35 => vec![(Df5, 512), (Df6, 512)],
        36 => vec![(Df8, 5000), (Df6, 10000)],
        37 => vec![(Df10, 50), (Df11, 50)],
        38 => vec![(Df12, 50), (Df11, 50)],
        39 => [1, 5, 8].iter().map(|&f| (Df5Basic { g: b(f) }, 50)).collect(),
        40 => [5, 6, 9].iter().map(|&f| (Df6Basic { g: b(f) }, 50)).collect(),
        _ => return None,
    };
    Some(defs)
}

fn build_instance(instance: usize) -> Result<Vec<TaskSpec>> {
    if let Some(defs) = static_defs(instance) {
        return defs
            .into_iter()
            .enumerate()
            .map(|(i, d)| build_static(instance, i + 1, d))
            .collect();
    }
    if let Some(defs) = dynamic_defs(instance) {
        return defs
            .into_iter()
            .enumerate()
            .map(|(i, (f, n))| build_dynamic(instance, i + 1, f, n))
            .collect();
    }
    Err(EtmoError::UnknownInstance(instance))
}
