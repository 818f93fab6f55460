//! Three-layer variable partition: position/distance split, per-objective
//! groups, and subgroups of each distance group.

use std::fmt;
use std::ops::Range;

use crate::error::{invalid, EtmoError, Result};

/// Default chunk size for third-layer subgroups.
pub const DEFAULT_SUBGROUP_SIZE: usize = 5;

/// Contiguous index ranges are stored 0-based; `Display` prints them 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingPlan {
    n: usize,
    k: usize,
    m: usize,
    position: Vec<Range<usize>>,
    distance: Vec<Range<usize>>,
    subgroups: Vec<Vec<Range<usize>>>,
}

fn split_even(start: usize, len: usize, parts: usize) -> Vec<Range<usize>> {
    let (base, extra) = (len / parts, len % parts);
    let mut out = Vec::with_capacity(parts);
    let mut at = start;
    for i in 0..parts {
        let size = base + usize::from(i < extra);
        out.push(at..at + size);
        at += size;
    }
    out
}

/// Builds the plan for `n` variables, `k` position variables and `m` objectives.
/// `subgroup_size` of 0 selects [`DEFAULT_SUBGROUP_SIZE`].
pub fn build_grouping(n: usize, k: usize, m: usize, subgroup_size: usize) -> Result<GroupingPlan> {
    if m < 2 {
        return Err(invalid("at least two objectives are required"));
    }
    if k == 0 || k >= n {
        return Err(invalid(format!("need 1 <= K < n, got K = {k}, n = {n}")));
    }
    if k < m - 1 {
        return Err(invalid(format!("K = {k} is smaller than m - 1 = {}", m - 1)));
    }
    let l = n - k;
    if l < m {
        return Err(invalid(format!("L = {l} is smaller than m = {m}")));
    }
    let position = split_even(0, k, m - 1);

    let total: usize = m * (m + 1) / 2;
    let mut sizes: Vec<usize> = (1..=m)
        .map(|i| ((l * i) as f64 / total as f64).round().max(1.0) as usize)
        .collect();
    let head: usize = sizes[..m - 1].iter().sum();
    if head + 1 > l {
        // rounding pushed the head past the budget; shrink the largest groups
        let mut excess = head + 1 - l;
        while excess > 0 {
            let i = (0..m - 1).max_by_key(|&i| (sizes[i], i)).unwrap();
            sizes[i] -= 1;
            excess -= 1;
        }
    }
    sizes[m - 1] = l - sizes[..m - 1].iter().sum::<usize>();
    let mut distance = Vec::with_capacity(m);
    let mut at = k;
    for s in sizes {
        distance.push(at..at + s);
        at += s;
    }

    let chunk = if subgroup_size > 0 {
        subgroup_size
    } else {
        DEFAULT_SUBGROUP_SIZE
    };
    let subgroups = distance
        .iter()
        .map(|r| split_even(r.start, r.len(), (r.len() / chunk).max(1)))
        .collect();

    Ok(GroupingPlan {
        n,
        k,
        m,
        position,
        distance,
        subgroups,
    })
}

impl GroupingPlan {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.n - self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn position_groups(&self) -> &[Range<usize>] {
        &self.position
    }

    pub fn distance_groups(&self) -> &[Range<usize>] {
        &self.distance
    }

    pub fn subgroups(&self, group: usize) -> &[Range<usize>] {
        &self.subgroups[group]
    }

    /// All distance variables as one range.
    pub fn distance_range(&self) -> Range<usize> {
        self.k..self.n
    }

    /// `y_i = |mean of x over position group i|`.
    pub fn aggregate_positions(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(EtmoError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let mut y = vec![0.0; self.m - 1];
        self.aggregate_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn aggregate_into(&self, x: &[f64], y: &mut [f64]) {
        for (out, r) in y.iter_mut().zip(&self.position) {
            let sum: f64 = x[r.clone()].iter().sum();
            *out = (sum / r.len() as f64).abs().min(1.0);
        }
    }
}

fn fmt_ranges(f: &mut fmt::Formatter<'_>, ranges: &[Range<usize>]) -> fmt::Result {
    let parts: Vec<String> = ranges
        .iter()
        .map(|r| {
            if r.len() == 1 {
                format!("{{{}}}", r.start + 1)
            } else {
                format!("{{{}..{}}}", r.start + 1, r.end)
            }
        })
        .collect();
    write!(f, "[{}]", parts.join(","))
}

impl fmt::Display for GroupingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "position=")?;
        fmt_ranges(f, &self.position)?;
        write!(f, " distance=")?;
        fmt_ranges(f, &self.distance)?;
        let q: Vec<String> = self.subgroups.iter().map(|s| s.len().to_string()).collect();
        write!(f, " q=[{}]", q.join(","))
    }
}
