//! Linkage landscapes: distance-variable functions whose optimum manifold moves
//! with the position aggregates, plus the index-dependent linkage operators used
//! by the large-scale tasks.
//!
//! Every target value depends on the variable's ordinal in the *whole* solution
//! vector (1-based), never on its position inside the evaluated slice.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, EtmoError, Result};

/// Identifier of a linkage landscape `L1..L8`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkageFn {
    L1,
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
}

impl LinkageFn {
    pub const ALL: [LinkageFn; 8] = [
        LinkageFn::L1,
        LinkageFn::L2,
        LinkageFn::L3,
        LinkageFn::L4,
        LinkageFn::L5,
        LinkageFn::L6,
        LinkageFn::L7,
        LinkageFn::L8,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap() + 1
    }

    /// Only `L6` reads the second aggregate.
    pub fn needs_y2(self) -> bool {
        self == LinkageFn::L6
    }

    fn uses_power_target(self) -> bool {
        matches!(self, LinkageFn::L2 | LinkageFn::L3 | LinkageFn::L8)
    }

    /// Closed-form optimum of the variable with 1-based ordinal `index` in a
    /// solution of `n_total` variables.
    pub fn target(self, index: usize, n_total: usize, y1: f64, y2: f64) -> f64 {
        let n = n_total as f64;
        let phase = index as f64 * PI / n;
        match self {
            LinkageFn::L1 => {
                (0.3 * y1 * y1 * (24.0 * PI * y1 + 4.0 * phase).cos() + 0.6 * y1) * (6.0 * PI * y1 + phase).sin()
            }
            LinkageFn::L2 | LinkageFn::L3 | LinkageFn::L8 => {
                let exponent = 0.5 * (1.0 + 3.0 * (index as f64 - 2.0) / (n - 2.0));
                pow0(y1, exponent)
            }
            LinkageFn::L4 => 0.8 * y1 * (6.0 * PI * y1 + phase).cos(),
            LinkageFn::L5 => 0.8 * y1 * (6.0 * PI * y1 + phase).sin(),
            LinkageFn::L6 => 2.0 * y2 * (2.0 * PI * y1 + phase).sin(),
            LinkageFn::L7 => (6.0 * PI * y1 + phase).sin(),
        }
    }
}

impl fmt::Display for LinkageFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.number())
    }
}

impl FromStr for LinkageFn {
    type Err = EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('L')
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or_else(|| EtmoError::Parse(format!("not a linkage function id: {s:?}")))
    }
}

/// `base^p` with `0^p = 0` for `p > 0` and `0^0 = 1`.
fn pow0(base: f64, p: f64) -> f64 {
    if base == 0.0 {
        if p > 0.0 {
            0.0
        } else if p == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        base.powf(p)
    }
}

/// A run of distance-variable values tagged with their ordinals in the full
/// solution vector.
#[derive(Debug, Clone, Copy)]
pub struct IndexedSlice<'a> {
    values: &'a [f64],
    global_index: &'a [usize],
    n_total: usize,
}

impl<'a> IndexedSlice<'a> {
    /// `global_index` holds 1-based ordinals, strictly increasing, within `1..=n_total`.
    pub fn new(values: &'a [f64], global_index: &'a [usize], n_total: usize) -> Result<Self> {
        if values.len() != global_index.len() {
            return Err(EtmoError::DimensionMismatch {
                expected: global_index.len(),
                got: values.len(),
            });
        }
        if global_index.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("slice ordinals must be strictly increasing"));
        }
        if global_index.iter().any(|&i| i == 0 || i > n_total) {
            return Err(invalid(format!("slice ordinals must lie in 1..={n_total}")));
        }
        Ok(Self::new_unchecked(values, global_index, n_total))
    }

    pub(crate) fn new_unchecked(values: &'a [f64], global_index: &'a [usize], n_total: usize) -> Self {
        Self {
            values,
            global_index,
            n_total,
        }
    }

    pub fn values(&self) -> &'a [f64] {
        self.values
    }

    pub fn global_index(&self) -> &'a [usize] {
        self.global_index
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn residuals(&self, f: LinkageFn, y1: f64, y2: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .zip(self.global_index)
            .map(move |(&v, &idx)| (idx, v - f.target(idx, self.n_total, y1, y2)))
    }
}

/// Evaluates linkage landscape `f` on `xd` for aggregates `y1` (and `y2` for `L6`).
pub fn eval_linkage(f: LinkageFn, xd: &IndexedSlice<'_>, y1: f64, y2: Option<f64>) -> Result<f64> {
    if xd.is_empty() {
        return Err(invalid(format!("{f} needs a nonempty slice")));
    }
    let y2 = match (f.needs_y2(), y2) {
        (true, Some(v)) => v,
        (true, None) => return Err(invalid("L6 requires the second aggregate y2")),
        (false, _) => 0.0,
    };
    if f.uses_power_target() && xd.n_total() < 3 {
        return Err(invalid(format!("{f} needs a solution of at least 3 variables")));
    }
    Ok(linkage_value(f, xd, y1, y2))
}

pub(crate) fn linkage_value(f: LinkageFn, xd: &IndexedSlice<'_>, y1: f64, y2: f64) -> f64 {
    let scale = 2.0 / xd.len() as f64;
    match f {
        LinkageFn::L3 => {
            let mut sq = 0.0;
            let mut prod = 1.0;
            for (idx, r) in xd.residuals(f, y1, y2) {
                sq += r * r;
                prod *= (20.0 * PI * r / (idx as f64).sqrt()).cos();
            }
            scale * (4.0 * sq - 2.0 * prod + 2.0)
        }
        LinkageFn::L8 => {
            let sum: f64 = xd
                .residuals(f, y1, y2)
                .map(|(_, r)| 4.0 * r * r - (8.0 * PI * r).cos() + 1.0)
                .sum();
            scale * sum
        }
        _ => scale * xd.residuals(f, y1, y2).map(|(_, r)| r * r).sum::<f64>(),
    }
}

/// Index-dependent variable transformation applied before a basic function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkageOperator {
    /// Linear scaling `1 + idx / n`.
    Lg1,
    /// Nonlinear scaling `1 + cos(0.5 pi idx / n)`.
    Lg2,
}

impl LinkageOperator {
    pub fn scale(self, index: usize, n_total: usize) -> f64 {
        let r = index as f64 / n_total as f64;
        match self {
            LinkageOperator::Lg1 => 1.0 + r,
            LinkageOperator::Lg2 => 1.0 + (0.5 * PI * r).cos(),
        }
    }

    /// Value of `x_j` whose transformed coordinate equals `z`.
    pub fn preimage(self, z: f64, index: usize, n_total: usize, y1: f64, upper: f64) -> f64 {
        (z + y1 * upper) / self.scale(index, n_total)
    }
}

impl fmt::Display for LinkageOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkageOperator::Lg1 => f.write_str("Lg1"),
            LinkageOperator::Lg2 => f.write_str("Lg2"),
        }
    }
}

/// Applies `op` to `xd`: `z_j = scale(idx_j) * x_j - y1 * hi_j`, where `hi_j`
/// is the upper bound of variable `j`.
pub fn apply_linkage_operator(
    op: LinkageOperator,
    xd: &IndexedSlice<'_>,
    y1: f64,
    bounds: &[(f64, f64)],
) -> Result<Vec<f64>> {
    if xd.is_empty() {
        return Err(invalid("linkage operator needs a nonempty slice"));
    }
    if bounds.len() != xd.len() {
        return Err(EtmoError::DimensionMismatch {
            expected: xd.len(),
            got: bounds.len(),
        });
    }
    let mut out = Vec::with_capacity(xd.len());
    linkage_operator_into(op, xd, y1, bounds.iter().map(|b| b.1), &mut out);
    Ok(out)
}

pub(crate) fn linkage_operator_into(
    op: LinkageOperator,
    xd: &IndexedSlice<'_>,
    y1: f64,
    upper: impl Iterator<Item = f64>,
    out: &mut Vec<f64>,
) {
    out.clear();
    out.extend(
        xd.values()
            .iter()
            .zip(xd.global_index())
            .zip(upper)
            .map(|((&x, &idx), hi)| op.scale(idx, xd.n_total()) * x - y1 * hi),
    );
}
