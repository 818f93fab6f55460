//! Reference fronts for static tasks and per-change fronts for dynamic ones.

use std::collections::HashMap;
use std::sync::Mutex;

use etmof_core::shapefn::default_front_size;
use etmof_core::suite::{TaskKind, TaskSpec};
use etmof_core::{sample_reference_front, ReferenceFront};

/// Reference front of `task`; dynamic tasks need the time instant.
pub fn reference_front(task: &TaskSpec, t: Option<f64>, count: Option<usize>) -> etmof_core::Result<ReferenceFront> {
    let count = count.unwrap_or_else(|| default_front_size(task.m()));
    match task.kind() {
        TaskKind::Static(s) => sample_reference_front(s.shape(), s.m(), count),
        TaskKind::Dynamic(d) => match t {
            Some(t) => d.pf_at_time(t, count),
            None => Err(etmof_core::EtmoError::TimeMismatch(format!(
                "ETMOF{} T{} is dynamic and needs a time instant",
                task.instance(),
                task.index()
            ))),
        },
    }
}

/// File name of a reference front: `ETMOF<i>_T<k>.front` or, per change,
/// `ETMOF<i>_T<k>_t<change>.front`.
pub fn front_file_name(instance: usize, task: usize, change: Option<usize>) -> String {
    match change {
        Some(c) => format!("ETMOF{instance}_T{task}_t{c}.front"),
        None => format!("ETMOF{instance}_T{task}.front"),
    }
}

type FrontMap = HashMap<(usize, usize, Option<usize>), std::sync::Arc<ReferenceFront>>;

/// Memoised fronts keyed by (instance, task, change index).
#[derive(Default)]
pub struct FrontCache {
    count: Option<usize>,
    fronts: Mutex<FrontMap>,
}

impl FrontCache {
    pub fn new(count: Option<usize>) -> Self {
        Self {
            count,
            fronts: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(
        &self,
        task: &TaskSpec,
        change: Option<(usize, f64)>,
    ) -> etmof_core::Result<std::sync::Arc<ReferenceFront>> {
        let key = (task.instance(), task.index(), change.map(|c| c.0));
        if let Some(f) = self.fronts.lock().expect("front cache").get(&key) {
            return Ok(f.clone());
        }
        let front = std::sync::Arc::new(reference_front(task, change.map(|c| c.1), self.count)?);
        self.fronts
            .lock()
            .expect("front cache")
            .entry(key)
            .or_insert_with(|| front.clone());
        Ok(front)
    }
}
