//! Multi-task multiobjective benchmark suite: 40 composed test problems,
//! reference fronts, IGD/MIGD/MSS metrics and baseline transfer solvers.

pub mod basefn;
pub mod dynamics;
pub mod error;
pub mod formulation;
pub mod grouping;
pub mod linkfn;
pub mod metrics;
pub mod optimizer;
pub mod pareto;
pub mod shapefn;
pub mod suite;
pub mod transform;

pub use basefn::{eval_basic, BasicFn};
pub use dynamics::{time_instant, DynamicFamily, DynamicTask, DynamicsSpec, TimeInstant};
pub use error::{EtmoError, Result};
pub use formulation::{Evaluation, Landscape, Model, StaticTask, Unit};
pub use grouping::{build_grouping, GroupingPlan};
pub use linkfn::{apply_linkage_operator, eval_linkage, IndexedSlice, LinkageFn, LinkageOperator};
pub use metrics::{igd, igd_with, migd, mss, Distance};
pub use optimizer::{decode, run, Mode, RunRecord, SolverConfig};
pub use shapefn::{eval_shape, sample_reference_front, ReferenceFront, ShapeFn};
pub use suite::{category, MultiTaskProblem, TaskKind, TaskSpec};
pub use transform::{make_rotation, make_shift, TransformBundle};
