//! Instance metadata table.

use etmof_core::suite::{category, MultiTaskProblem, INSTANCE_COUNT};

use crate::instance_name;

pub const HEADER: &str = "# id\ttype\ttasks\tm\tn\tK\tmodel\tshape\tlandscape\txd_bounds";

fn fmt_bound(v: f64) -> String {
    format!("{v}")
}

/// One tab-separated row per instance; per-task values are joined with `,`
/// (landscapes with `;`).
pub fn row(id: usize) -> etmof_core::Result<String> {
    let p = MultiTaskProblem::instantiate(id)?;
    let join =
        |f: &dyn Fn(&etmof_core::TaskSpec) -> String, sep: &str| p.tasks().iter().map(f).collect::<Vec<_>>().join(sep);
    Ok(format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        instance_name(id),
        category(id),
        p.task_count(),
        join(&|t| t.m().to_string(), ","),
        join(&|t| t.n().to_string(), ","),
        join(&|t| t.k().to_string(), ","),
        join(&|t| t.model_label(), ","),
        join(&|t| t.shape_label(), ","),
        join(&|t| t.landscape_label().to_string(), ";"),
        join(
            &|t| {
                let (lo, hi) = t.distance_bounds();
                format!("[{},{}]", fmt_bound(lo), fmt_bound(hi))
            },
            ","
        ),
    ))
}

pub fn render() -> etmof_core::Result<String> {
    let mut out = String::from(HEADER);
    out.push('\n');
    for id in 1..=INSTANCE_COUNT {
        out.push_str(&row(id)?);
        out.push('\n');
    }
    Ok(out)
}
