//! Formulation models `F1..F7`: combine shape values `h` with landscape values
//! `g` computed over the distance-variable groups.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use crate::basefn::BasicFn;
use crate::error::{invalid, EtmoError, Result};
use crate::grouping::GroupingPlan;
use crate::linkfn::{linkage_operator_into, linkage_value, IndexedSlice, LinkageFn, LinkageOperator};
use crate::shapefn::{shape_into, ShapeFn};
use crate::transform::TransformBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    F1,
    F2,
    F3,
    F4,
    F5,
    F6,
    F7,
}

impl Model {
    pub const ALL: [Model; 7] = [
        Model::F1,
        Model::F2,
        Model::F3,
        Model::F4,
        Model::F5,
        Model::F6,
        Model::F7,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap() + 1
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, Model::F1 | Model::F2 | Model::F4 | Model::F6)
    }

    /// F1 evaluates one landscape over all distance variables.
    pub fn single_landscape(self) -> bool {
        self == Model::F1
    }

    /// F6 and F7 split every distance group into subgroups.
    pub fn uses_subgroups(self) -> bool {
        matches!(self, Model::F6 | Model::F7)
    }

    /// Combines shape values with the per-objective landscape terms.
    /// `terms` holds one value for F1 and one per objective otherwise
    /// (the subgroup mean for F6/F7).
    pub fn combine(self, h: &[f64], terms: &[f64], out: &mut [f64]) {
        match self {
            Model::F1 => {
                let s = 1.0 + terms[0];
                out.iter_mut().zip(h).for_each(|(f, h)| *f = h * s);
            }
            Model::F2 | Model::F6 => {
                for ((f, h), g) in out.iter_mut().zip(h).zip(terms) {
                    *f = h * (1.0 + g);
                }
            }
            Model::F3 | Model::F7 => {
                for ((f, h), g) in out.iter_mut().zip(h).zip(terms) {
                    *f = h + g;
                }
            }
            Model::F4 => {
                let s = 1.0 + terms.iter().sum::<f64>();
                out.iter_mut().zip(h).for_each(|(f, h)| *f = h * s);
            }
            Model::F5 => {
                let s: f64 = terms.iter().sum();
                out.iter_mut().zip(h).for_each(|(f, h)| *f = h + s);
            }
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}", self.number())
    }
}

impl FromStr for Model {
    type Err = EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('F')
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or_else(|| EtmoError::Parse(format!("not a formulation model id: {s:?}")))
    }
}

/// Landscape evaluated on one contiguous run of distance variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Landscape {
    Basic {
        f: BasicFn,
        transform: TransformBundle,
    },
    Linkage {
        f: LinkageFn,
        transform: TransformBundle,
    },
    /// Basic function after an index-dependent linkage operator; `upper` is the
    /// upper bound of the distance variables.
    LinkedBasic {
        f: BasicFn,
        op: LinkageOperator,
        upper: f64,
    },
}

fn transform_tag(t: &TransformBundle) -> &'static str {
    match (t.rotation().is_some(), t.shift().is_some()) {
        (true, true) => "shiftRotation",
        (true, false) => "rotation",
        (false, true) => "shift",
        (false, false) => "",
    }
}

fn wrap(f: &mut fmt::Formatter<'_>, name: &dyn fmt::Display, tag: &str) -> fmt::Result {
    if tag.is_empty() {
        write!(f, "{name}(x)")
    } else {
        write!(f, "{name}({tag}(x))")
    }
}

impl fmt::Display for Landscape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Landscape::Basic { f: b, transform } => wrap(f, b, transform_tag(transform)),
            Landscape::Linkage { f: l, transform } => wrap(f, l, transform_tag(transform)),
            Landscape::LinkedBasic { f: b, op, .. } => wrap(f, b, &op.to_string()),
        }
    }
}

/// A landscape bound to its variable range.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    range: Range<usize>,
    ordinals: Vec<usize>,
    landscape: Landscape,
}

impl Unit {
    pub fn new(range: Range<usize>, landscape: Landscape) -> Result<Self> {
        let len = range.len();
        let min_len = match &landscape {
            Landscape::Basic { f, transform } => {
                if transform.dim() != len {
                    return Err(EtmoError::DimensionMismatch {
                        expected: len,
                        got: transform.dim(),
                    });
                }
                f.min_len()
            }
            Landscape::Linkage { transform, .. } => {
                if transform.dim() != len {
                    return Err(EtmoError::DimensionMismatch {
                        expected: len,
                        got: transform.dim(),
                    });
                }
                if transform.shift().is_some() {
                    return Err(invalid("linkage landscapes take rotation only"));
                }
                1
            }
            Landscape::LinkedBasic { f, .. } => f.min_len(),
        };
        if len < min_len {
            return Err(invalid(format!(
                "{landscape} needs at least {min_len} variables, got {len}"
            )));
        }
        Ok(Self {
            ordinals: (range.start + 1..=range.end).collect(),
            range,
            landscape,
        })
    }

    pub fn range(&self) -> &Range<usize> {
        &self.range
    }

    pub fn landscape(&self) -> &Landscape {
        &self.landscape
    }

    fn value(&self, x: &[f64], y: &[f64], n: usize, buf: &mut Scratch) -> f64 {
        let xs = &x[self.range.clone()];
        match &self.landscape {
            Landscape::Basic { f, transform } => {
                buf.z.resize(xs.len(), 0.0);
                transform.apply_into(xs, &mut buf.shifted, &mut buf.z);
                f.value(&buf.z)
            }
            Landscape::Linkage { f, transform } => {
                buf.z.resize(xs.len(), 0.0);
                transform.apply_into(xs, &mut buf.shifted, &mut buf.z);
                let slice = IndexedSlice::new_unchecked(&buf.z, &self.ordinals, n);
                linkage_value(*f, &slice, y[0], y2_of(y))
            }
            Landscape::LinkedBasic { f, op, upper } => {
                let slice = IndexedSlice::new_unchecked(xs, &self.ordinals, n);
                linkage_operator_into(*op, &slice, y[0], std::iter::repeat(*upper), &mut buf.z);
                f.value(&buf.z)
            }
        }
    }

    /// Writes the distance values minimising this unit's landscape for
    /// aggregates `y` into `out` (length of the range).
    fn optimum(&self, y: &[f64], n: usize, out: &mut [f64]) -> Result<()> {
        match &self.landscape {
            Landscape::Basic { f, transform } => {
                let z = vec![f.minimizer_component(); self.range.len()];
                out.copy_from_slice(&transform.inverse(&z)?);
            }
            Landscape::Linkage { f, transform } => {
                let z: Vec<f64> = self.ordinals.iter().map(|&i| f.target(i, n, y[0], y2_of(y))).collect();
                out.copy_from_slice(&transform.inverse(&z)?);
            }
            Landscape::LinkedBasic { f, op, upper } => {
                let target = f.minimizer_component();
                for (o, &idx) in out.iter_mut().zip(&self.ordinals) {
                    let scale = op.scale(idx, n);
                    let mapped = |v: f64| scale * v - y[0] * upper;
                    *o = polish(op.preimage(target, idx, n, y[0], *upper), target, mapped);
                }
            }
        }
        Ok(())
    }
}

/// Second aggregate for `L6`; tasks with a single aggregate reuse the first.
fn y2_of(y: &[f64]) -> f64 {
    *y.get(1).unwrap_or(&y[0])
}

/// Walks `v` by single ulps towards a value whose image under `map` equals
/// `target` exactly, keeping the closest candidate seen.
fn polish(v: f64, target: f64, map: impl Fn(f64) -> f64) -> f64 {
    let mut best = v;
    let mut err = (map(v) - target).abs();
    for step in [f64::next_up, f64::next_down] {
        let mut cur = v;
        for _ in 0..64 {
            if err == 0.0 {
                return best;
            }
            cur = step(cur);
            let e = (map(cur) - target).abs();
            if e < err {
                best = cur;
                err = e;
            }
        }
    }
    best
}

#[derive(Default)]
struct Scratch {
    z: Vec<f64>,
    shifted: Vec<f64>,
}

/// One static task: model, shape, grouping and a landscape per group or subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticTask {
    model: Model,
    shape: ShapeFn,
    plan: GroupingPlan,
    groups: Vec<Vec<Unit>>,
}

/// Every intermediate quantity of one evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub y: Vec<f64>,
    /// Landscape values: one group for F1, one per objective otherwise, each
    /// holding one value per subgroup.
    pub g: Vec<Vec<f64>>,
    /// Per-objective term entering the model (subgroup means for F6/F7).
    pub terms: Vec<f64>,
    pub h: Vec<f64>,
    pub f: Vec<f64>,
}

impl StaticTask {
    /// `groups` holds one list of units for F1 or one per objective otherwise.
    pub fn new(model: Model, shape: ShapeFn, plan: GroupingPlan, groups: Vec<Vec<Unit>>) -> Result<Self> {
        let m = plan.m();
        if !shape.supports(m) {
            return Err(EtmoError::Unsupported(format!("{shape} with m = {m}")));
        }
        let expected = if model.single_landscape() { 1 } else { m };
        if groups.len() != expected || groups.iter().any(|g| g.is_empty()) {
            return Err(invalid(format!("{model} needs {expected} nonempty landscape groups")));
        }
        let mut covered: Vec<Range<usize>> = groups.iter().flatten().map(|u| u.range.clone()).collect();
        covered.sort_by_key(|r| r.start);
        let mut at = plan.k();
        for r in &covered {
            if r.start != at {
                return Err(invalid("landscape units must tile the distance variables"));
            }
            at = r.end;
        }
        if at != plan.n() {
            return Err(invalid("landscape units must tile the distance variables"));
        }
        Ok(Self {
            model,
            shape,
            plan,
            groups,
        })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn shape(&self) -> ShapeFn {
        self.shape
    }

    pub fn plan(&self) -> &GroupingPlan {
        &self.plan
    }

    pub fn groups(&self) -> &[Vec<Unit>] {
        &self.groups
    }

    pub fn m(&self) -> usize {
        self.plan.m()
    }

    pub fn n(&self) -> usize {
        self.plan.n()
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(EtmoError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(invalid("solution contains NaN"));
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.evaluate_detailed(x)?.f)
    }

    pub fn evaluate_detailed(&self, x: &[f64]) -> Result<Evaluation> {
        self.check_len(x)?;
        let m = self.m();
        let n = self.n();
        let mut y = vec![0.0; m - 1];
        self.plan.aggregate_into(x, &mut y);
        let mut buf = Scratch::default();
        let g: Vec<Vec<f64>> = self
            .groups
            .iter()
            .map(|units| units.iter().map(|u| u.value(x, &y, n, &mut buf)).collect())
            .collect();
        let terms: Vec<f64> = g.iter().map(|v| v.iter().sum::<f64>() / v.len() as f64).collect();
        let shape_g = terms.iter().sum::<f64>().max(0.0);
        let mut h = vec![0.0; m];
        shape_into(self.shape, &y, shape_g, &mut h);
        let mut f = vec![0.0; m];
        self.model.combine(&h, &terms, &mut f);
        Ok(Evaluation { y, g, terms, h, f })
    }

    /// Solution with the given position variables and every distance variable
    /// at its landscape optimum.
    pub fn optimal_solution(&self, position: &[f64]) -> Result<Vec<f64>> {
        if position.len() != self.plan.k() {
            return Err(EtmoError::DimensionMismatch {
                expected: self.plan.k(),
                got: position.len(),
            });
        }
        let n = self.n();
        let mut x = vec![0.0; n];
        x[..position.len()].copy_from_slice(position);
        let y = self.plan.aggregate_positions(&x)?;
        for unit in self.groups.iter().flatten() {
            let r = unit.range.clone();
            unit.optimum(&y, n, &mut x[r])?;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::build_grouping;
    use crate::linkfn::eval_linkage;
    use crate::shapefn::eval_shape;
    use crate::transform::{make_rotation, make_shift};

    fn plain(f: BasicFn, r: Range<usize>) -> Unit {
        let d = r.len();
        Unit::new(
            r,
            Landscape::Basic {
                f,
                transform: TransformBundle::identity(d),
            },
        )
        .unwrap()
    }

    #[test]
    fn combination_rules() {
        let h = [0.5, 0.25];
        let mut f = [0.0; 2];
        Model::F1.combine(&h, &[0.0], &mut f);
        assert_eq!(f, h);
        Model::F3.combine(&h, &[0.0, 0.0], &mut f);
        assert_eq!(f, h);
        Model::F6.combine(&h, &[6.0, 6.0], &mut f);
        assert_eq!(f, [3.5, 1.75]);
        Model::F4.combine(&h, &[1.0, 2.0], &mut f);
        assert_eq!(f, [2.0, 1.0]);
        Model::F5.combine(&h, &[1.0, 2.0], &mut f);
        assert_eq!(f, [3.5, 3.25]);
        Model::F2.combine(&h, &[1.0, 3.0], &mut f);
        assert_eq!(f, [1.0, 1.0]);
        Model::F7.combine(&h, &[1.0, 3.0], &mut f);
        assert_eq!(f, [1.5, 3.25]);
    }

    #[test]
    fn subgroup_mean_enters_f6() {
        // three subgroups with g = 6 each on the first objective
        let plan = build_grouping(17, 1, 2, 0).unwrap();
        let d0 = plan.distance_groups()[0].clone();
        let d1 = plan.distance_groups()[1].clone();
        let third = d0.len() / 3;
        let a = d0.start..d0.start + third;
        let b = a.end..a.end + third;
        let c = b.end..d0.end;
        let task = StaticTask::new(
            Model::F6,
            ShapeFn::H1,
            plan,
            vec![
                vec![
                    plain(BasicFn::Sphere, a),
                    plain(BasicFn::Sphere, b),
                    plain(BasicFn::Sphere, c),
                ],
                vec![plain(BasicFn::Sphere, d1)],
            ],
        )
        .unwrap();
        let mut x = vec![0.0; 17];
        x[0] = 0.25;
        // each first-group subgroup has `third` or more variables; set sphere = 6
        for u in &task.groups()[0] {
            let r = u.range().clone();
            let len = r.len() as f64;
            for v in &mut x[r] {
                *v = (6.0 / len).sqrt();
            }
        }
        let e = task.evaluate_detailed(&x).unwrap();
        for g in &e.g[0] {
            assert!((g - 6.0).abs() < 1e-12);
        }
        assert!((e.f[0] - 7.0 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn linkage_example_on_convex_front() {
        // F2/H1 with L1 on both groups; distance at the target manifold
        let n = 50;
        let plan = build_grouping(n, 1, 2, 0).unwrap();
        let groups: Vec<Vec<Unit>> = plan
            .distance_groups()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let t = TransformBundle::new(r.len(), Some(make_rotation(i as u64, r.len()).unwrap()), None).unwrap();
                vec![Unit::new(
                    r.clone(),
                    Landscape::Linkage {
                        f: LinkageFn::L1,
                        transform: t,
                    },
                )
                .unwrap()]
            })
            .collect();
        let task = StaticTask::new(Model::F2, ShapeFn::H1, plan, groups).unwrap();
        let x = task.optimal_solution(&[0.25]).unwrap();
        let f = task.evaluate(&x).unwrap();
        assert!((f[0] - 0.25).abs() < 1e-12);
        assert!((f[1] - 0.5).abs() < 1e-12);

        // oracle: rotate the slice and call the linkage function directly
        let r = task.plan().distance_groups()[0].clone();
        let rot = make_rotation(0, r.len()).unwrap();
        let b = TransformBundle::new(r.len(), Some(rot), None).unwrap();
        let z = b.apply(&x[r.clone()]).unwrap();
        let idx: Vec<usize> = (r.start + 1..=r.end).collect();
        let s = IndexedSlice::new(&z, &idx, n).unwrap();
        assert!(eval_linkage(LinkageFn::L1, &s, 0.25, None).unwrap() < 1e-20);
        let h = eval_shape(ShapeFn::H1, &[0.25], 2, None).unwrap();
        assert_eq!(h, vec![0.25, 0.5]);
    }

    #[test]
    fn shifted_optimum_and_degradation() {
        let plan = build_grouping(12, 2, 3, 0).unwrap();
        let groups: Vec<Vec<Unit>> = plan
            .distance_groups()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let d = r.len();
                let t = TransformBundle::new(
                    d,
                    Some(make_rotation(10 + i as u64, d).unwrap()),
                    Some(make_shift(20 + i as u64, d, -100.0, 100.0).unwrap()),
                )
                .unwrap();
                vec![Unit::new(
                    r.clone(),
                    Landscape::Basic {
                        f: BasicFn::Rastrigin,
                        transform: t,
                    },
                )
                .unwrap()]
            })
            .collect();
        let task = StaticTask::new(Model::F4, ShapeFn::H3, plan, groups).unwrap();
        let x = task.optimal_solution(&[0.5, -0.5]).unwrap();
        let e = task.evaluate_detailed(&x).unwrap();
        assert!(e.terms.iter().all(|g| g.abs() < 1e-9));
        let bare = eval_shape(ShapeFn::H3, &[0.5, 0.5], 3, None).unwrap();
        for (a, b) in e.f.iter().zip(&bare) {
            assert!((a - b).abs() < 1e-9);
        }
        let mut worse = x.clone();
        worse[5] += 0.3;
        let f2 = task.evaluate(&worse).unwrap();
        for (a, b) in f2.iter().zip(&e.f) {
            assert!(a >= b);
        }
    }

    #[test]
    fn linked_basic_optimum_is_exact() {
        let n = 40;
        let plan = build_grouping(n, 1, 2, 0).unwrap();
        for f in [
            BasicFn::HappyCat,
            BasicFn::Rosenbrock,
            BasicFn::Katsuura,
            BasicFn::Sphere,
        ] {
            for op in [LinkageOperator::Lg1, LinkageOperator::Lg2] {
                let groups: Vec<Vec<Unit>> = (0..2)
                    .map(|i| {
                        plan.subgroups(i)
                            .iter()
                            .map(|r| Unit::new(r.clone(), Landscape::LinkedBasic { f, op, upper: 10.0 }).unwrap())
                            .collect()
                    })
                    .collect();
                let task = StaticTask::new(Model::F6, ShapeFn::H2, plan.clone(), groups).unwrap();
                for p in [0.0, 0.3, 0.77, -0.9] {
                    let x = task.optimal_solution(&[p]).unwrap();
                    let e = task.evaluate_detailed(&x).unwrap();
                    // the quartic root in b12 turns a one-ulp miss of z = -1 into ~1e-4
                    let tol = if f == BasicFn::HappyCat { 1e-3 } else { 1e-9 };
                    assert!(e.terms.iter().all(|g| g.abs() < tol), "{f} {op}: {:?}", e.terms);
                }
            }
        }
    }

    #[test]
    fn construction_errors() {
        let plan = build_grouping(10, 1, 2, 0).unwrap();
        let d = plan.distance_groups().to_vec();
        assert!(StaticTask::new(
            Model::F2,
            ShapeFn::H1,
            plan.clone(),
            vec![vec![plain(BasicFn::Sphere, d[0].clone())]]
        )
        .is_err());
        assert!(StaticTask::new(
            Model::F1,
            ShapeFn::H1,
            plan.clone(),
            vec![vec![plain(BasicFn::Sphere, 1..9)]]
        )
        .is_err());
        assert!(StaticTask::new(
            Model::F1,
            ShapeFn::H3,
            build_grouping(10, 2, 3, 0).unwrap(),
            vec![vec![plain(BasicFn::Sphere, 2..10)]]
        )
        .is_ok());
        assert!(Unit::new(
            3..4,
            Landscape::Basic {
                f: BasicFn::Rosenbrock,
                transform: TransformBundle::identity(1)
            }
        )
        .is_err());
        assert!(Unit::new(
            3..5,
            Landscape::Basic {
                f: BasicFn::Sphere,
                transform: TransformBundle::identity(3)
            }
        )
        .is_err());
        let task = StaticTask::new(Model::F1, ShapeFn::H1, plan, vec![vec![plain(BasicFn::Sphere, 1..10)]]).unwrap();
        assert!(task.evaluate(&[0.0; 9]).is_err());
        assert!(task.evaluate(&[f64::NAN; 10]).is_err());
        assert!(task.optimal_solution(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn ids_round_trip() {
        for f in Model::ALL {
            assert_eq!(f.to_string().parse::<Model>().unwrap(), f);
        }
        assert!("F8".parse::<Model>().is_err());
    }
}
