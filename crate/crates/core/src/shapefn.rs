//! Shape functions `H1..H10` mapping position aggregates to front geometry,
//! plus reference front sampling and the plain-text front format.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{invalid, EtmoError, Result};
use crate::pareto;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeFn {
    H1,
    H2,
    H3,
    H4,
    H5,
    H6,
    H7,
    H8,
    H9,
    H10,
}

impl ShapeFn {
    pub const ALL: [ShapeFn; 10] = [
        ShapeFn::H1,
        ShapeFn::H2,
        ShapeFn::H3,
        ShapeFn::H4,
        ShapeFn::H5,
        ShapeFn::H6,
        ShapeFn::H7,
        ShapeFn::H8,
        ShapeFn::H9,
        ShapeFn::H10,
    ];

    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&s| s == self).unwrap() + 1
    }

    /// Degenerate and disconnected shapes read the landscape value.
    pub fn needs_g(self) -> bool {
        matches!(self, ShapeFn::H8 | ShapeFn::H10)
    }

    pub fn supports(self, m: usize) -> bool {
        match self {
            ShapeFn::H1 | ShapeFn::H2 => m == 2,
            _ => m >= 2,
        }
    }
}

impl fmt::Display for ShapeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{}", self.number())
    }
}

impl FromStr for ShapeFn {
    type Err = EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('H')
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(|n| n.checked_sub(1))
            .and_then(|i| Self::ALL.get(i).copied())
            .ok_or_else(|| EtmoError::Parse(format!("not a shape function id: {s:?}")))
    }
}

/// Evaluates shape `shape` at aggregates `y` (length `m - 1`).
pub fn eval_shape(shape: ShapeFn, y: &[f64], m: usize, g: Option<f64>) -> Result<Vec<f64>> {
    if !shape.supports(m) {
        return Err(EtmoError::Unsupported(format!("{shape} with m = {m}")));
    }
    if y.len() + 1 != m {
        return Err(EtmoError::DimensionMismatch {
            expected: m - 1,
            got: y.len(),
        });
    }
    if y.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(invalid("position aggregates must lie in [0, 1]"));
    }
    let g = match (shape.needs_g(), g) {
        (true, Some(v)) if v >= 0.0 => v,
        (true, Some(_)) => return Err(invalid("landscape value must be nonnegative")),
        (true, None) => return Err(invalid(format!("{shape} needs the landscape value g"))),
        (false, _) => 0.0,
    };
    let mut out = vec![0.0; m];
    shape_into(shape, y, g, &mut out);
    Ok(out)
}

/// Spherical coordinates: `h_1 = prod cos(theta)`, ..., `h_m = sin(theta_1)`.
fn spherical(theta: impl Fn(usize) -> f64, m: usize, out: &mut [f64]) {
    let mut prefix = 1.0;
    for i in 0..m - 1 {
        let (s, c) = theta(i).sin_cos();
        out[m - 1 - i] = prefix * s;
        prefix *= c;
    }
    out[0] = prefix;
}

fn simplex(y: &[f64], m: usize, out: &mut [f64]) {
    let mut prefix = 1.0;
    for i in 0..m - 1 {
        out[m - 1 - i] = prefix * (1.0 - y[i]);
        prefix *= y[i];
    }
    out[0] = prefix;
}

pub(crate) fn shape_into(shape: ShapeFn, y: &[f64], g: f64, out: &mut [f64]) {
    let m = out.len();
    match shape {
        ShapeFn::H1 => {
            out[0] = y[0];
            out[1] = 1.0 - y[0].sqrt();
        }
        ShapeFn::H2 => {
            out[0] = y[0];
            out[1] = 1.0 - y[0] * y[0];
        }
        ShapeFn::H3 => simplex(y, m, out),
        ShapeFn::H4 => {
            simplex(y, m, out);
            out.iter_mut().for_each(|h| *h = 1.0 - *h);
        }
        ShapeFn::H5 => spherical(|i| FRAC_PI_2 * y[i], m, out),
        ShapeFn::H6 => {
            spherical(|i| FRAC_PI_2 * y[i], m, out);
            out.iter_mut().for_each(|h| *h = 1.0 - *h);
        }
        ShapeFn::H7 => {
            spherical(|i| FRAC_PI_2 * y[i], m, out);
            for h in &mut out[..m - 1] {
                *h = h.powi(4);
            }
            out[m - 1] = out[m - 1].powi(2);
        }
        ShapeFn::H8 => spherical(
            |i| {
                if i == 0 {
                    FRAC_PI_2 * y[0]
                } else {
                    PI / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * y[i])
                }
            },
            m,
            out,
        ),
        ShapeFn::H9 => spherical(|i| FRAC_PI_2 * (0.5 * y[i] + 0.25), m, out),
        ShapeFn::H10 => {
            let mut tail = 0.0;
            for i in 0..m - 1 {
                out[i] = y[i] / (1.0 + g);
                tail += y[i] * (1.0 + (3.0 * PI * y[i]).sin());
            }
            out[m - 1] = m as f64 - tail / (1.0 + g);
        }
    }
}

/// Simplex lattice points with `divisions` steps (each point sums to 1).
pub fn das_dennis(m: usize, divisions: usize) -> Vec<Vec<f64>> {
    fn rec(m: usize, left: usize, h: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / h as f64).collect());
            cur.pop();
            return;
        }
        for c in (0..=left).rev() {
            cur.push(c);
            rec(m, left - c, h, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        return out;
    }
    if divisions == 0 {
        out.push(vec![1.0 / m as f64; m]);
        return out;
    }
    rec(m, divisions, divisions, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Number of lattice points for `m` objectives and `divisions` steps.
pub fn das_dennis_count(m: usize, divisions: usize) -> usize {
    let (n, k) = (divisions + m - 1, (m - 1).min(divisions));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128) as usize
}

/// Lattice of roughly `target` points on the unit simplex. Adds a second,
/// half-scaled layer when one layer cannot get close to the target.
pub fn simplex_points(m: usize, target: usize) -> Vec<Vec<f64>> {
    let mut h = 1;
    while das_dennis_count(m, h + 1) <= target {
        h += 1;
    }
    let outer = das_dennis_count(m, h);
    let mut points = das_dennis(m, h);
    if 4 * outer < 3 * target {
        let mut h2 = 1;
        while outer + das_dennis_count(m, h2 + 1) <= target {
            h2 += 1;
        }
        let centre = 1.0 / m as f64;
        for w in das_dennis(m, h2) {
            points.push(w.iter().map(|v| 0.5 * v + 0.5 * centre).collect());
        }
    }
    points
}

/// Sampled true front of one task, with its ideal and nadir.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFront {
    points: Vec<Vec<f64>>,
    ideal: Vec<f64>,
    nadir: Vec<f64>,
    label: String,
}

impl ReferenceFront {
    /// Filters `points` to their nondominated subset and derives ideal/nadir.
    pub fn new(points: Vec<Vec<f64>>, label: impl Into<String>) -> Result<Self> {
        let m = match points.first() {
            Some(p) if !p.is_empty() => p.len(),
            _ => return Err(invalid("a reference front needs at least one point")),
        };
        if points.iter().any(|p| p.len() != m || p.iter().any(|v| !v.is_finite())) {
            return Err(invalid("reference points must be finite and of equal length"));
        }
        let points = pareto::nondominated(&points);
        let mut ideal = vec![f64::INFINITY; m];
        let mut nadir = vec![f64::NEG_INFINITY; m];
        for p in &points {
            for k in 0..m {
                ideal[k] = ideal[k].min(p[k]);
                nadir[k] = nadir[k].max(p[k]);
            }
        }
        Ok(Self {
            points,
            ideal,
            nadir,
            label: label.into(),
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn ideal(&self) -> &[f64] {
        &self.ideal
    }

    pub fn nadir(&self) -> &[f64] {
        &self.nadir
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn m(&self) -> usize {
        self.ideal.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Width used to normalise objective `k`; falls back to 1 on a flat axis.
    pub fn span(&self, k: usize) -> f64 {
        let w = self.nadir[k] - self.ideal[k];
        if w > 1e-12 {
            w
        } else {
            1.0
        }
    }

    pub fn write_to(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "# front {}", self.label)?;
        writeln!(w, "# m {}", self.m())?;
        writeln!(w, "# count {}", self.len())?;
        write_points(&mut w, &self.points)
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut label = String::new();
        for line in text.lines() {
            if let Some(rest) = line.trim().strip_prefix("# front") {
                label = rest.trim().to_string();
            }
        }
        Self::new(parse_points(text)?, label)
    }
}

/// Writes one point per line with shortest round-trip formatting.
pub fn write_points(mut w: impl Write, points: &[Vec<f64>]) -> io::Result<()> {
    for p in points {
        let line: Vec<String> = p.iter().map(|v| format!("{v:e}")).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Reads whitespace-separated rows, skipping blank and `#` lines.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|e| EtmoError::Parse(format!("line {}: {e}", no + 1)))?;
        if let Some(first) = out.first() {
            let first: &Vec<f64> = first;
            if first.len() != row.len() {
                return Err(EtmoError::Parse(format!(
                    "line {}: expected {} values, found {}",
                    no + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Default reference front size for `m` objectives.
pub fn default_front_size(m: usize) -> usize {
    match m {
        2 => 1000,
        3 => 990,
        4 | 5 => 1001,
        _ => 1500,
    }
}

fn grid(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| i as f64 / (count - 1) as f64)
}

/// Radical-inverse low-discrepancy point `index` in `dim` dimensions.
fn halton(index: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d];
            let (mut i, mut f, mut r) = (index, 1.0, 0.0);
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// Angles in `[0, pi/2]` of a point on the positive unit sphere, in the order
/// used by [`spherical`].
fn sphere_angles(s: &[f64]) -> Vec<f64> {
    let m = s.len();
    let mut theta = Vec::with_capacity(m - 1);
    let mut radius = 1.0f64;
    for i in 0..m - 1 {
        let v = s[m - 1 - i];
        let t = if radius <= 0.0 {
            0.0
        } else {
            (v / radius).clamp(-1.0, 1.0).asin()
        };
        theta.push(t);
        radius *= t.cos();
    }
    theta
}

fn disconnected_candidates(m: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(count);
    let mut h = vec![0.0; m];
    if m == 2 {
        for y in grid(count) {
            shape_into(ShapeFn::H10, &[y], 0.0, &mut h);
            out.push(h.clone());
        }
    } else {
        for i in 0..count {
            let y = halton(i + 1, m - 1);
            shape_into(ShapeFn::H10, &y, 0.0, &mut h);
            out.push(h.clone());
        }
    }
    out
}

/// Samples the true front (landscape at zero) of `shape` with `m` objectives.
pub fn sample_reference_front(shape: ShapeFn, m: usize, target: usize) -> Result<ReferenceFront> {
    if target < 100 {
        return Err(invalid("reference fronts need at least 100 points"));
    }
    if !shape.supports(m) {
        return Err(EtmoError::Unsupported(format!("{shape} with m = {m}")));
    }
    let label = format!("{shape} m={m}");
    let mut h = vec![0.0; m];
    let points: Vec<Vec<f64>> = if shape == ShapeFn::H10 {
        let mut count = target;
        loop {
            let front = ReferenceFront::new(disconnected_candidates(m, count), label.clone())?;
            let got = front.len();
            if (4 * got >= 3 * target && 4 * got <= 5 * target) || count > 64 * target {
                return Ok(front);
            }
            count = ((count as f64) * target as f64 / got.max(1) as f64).ceil() as usize;
        }
    } else if m == 2 || shape == ShapeFn::H8 {
        grid(target)
            .map(|y| {
                let mut ys = vec![y];
                ys.resize(m - 1, 0.0);
                shape_into(shape, &ys, 0.0, &mut h);
                h.clone()
            })
            .collect()
    } else {
        simplex_points(m, target)
            .into_iter()
            .map(|w| match shape {
                ShapeFn::H3 => w,
                ShapeFn::H4 => w.iter().map(|v| 1.0 - v).collect(),
                _ => {
                    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let s: Vec<f64> = w.iter().map(|v| v / norm).collect();
                    match shape {
                        ShapeFn::H5 => s,
                        ShapeFn::H6 => s.iter().map(|v| 1.0 - v).collect(),
                        ShapeFn::H7 => {
                            let mut p: Vec<f64> = s.iter().map(|v| v.powi(4)).collect();
                            p[m - 1] = s[m - 1].powi(2);
                            p
                        }
                        _ => {
                            let y: Vec<f64> = sphere_angles(&s)
                                .iter()
                                .map(|t| (t / FRAC_PI_2).clamp(0.0, 1.0))
                                .collect();
                            shape_into(ShapeFn::H9, &y, 0.0, &mut h);
                            h.clone()
                        }
                    }
                }
            })
            .collect()
    };
    ReferenceFront::new(points, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_y(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
        (0..m - 1).map(|_| rng.gen::<f64>()).collect()
    }

    #[test]
    fn printed_examples() {
        assert_eq!(
            eval_shape(ShapeFn::H5, &[0.0, 0.0], 3, None).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        assert_eq!(
            eval_shape(ShapeFn::H3, &[0.5, 0.5], 3, None).unwrap(),
            vec![0.25, 0.25, 0.5]
        );
        assert_eq!(eval_shape(ShapeFn::H1, &[1.0], 2, None).unwrap(), vec![1.0, 0.0]);
        assert_eq!(
            eval_shape(ShapeFn::H6, &[0.0, 0.0], 3, None).unwrap(),
            vec![0.0, 1.0, 1.0]
        );
    }

    #[test]
    fn irregular_concave_by_hand() {
        // pi/2 * (0.5/2 + 1/4) = pi/4
        let t: f64 = PI / 4.0;
        let want = [t.cos() * t.cos(), t.cos() * t.sin(), t.sin()];
        let got = eval_shape(ShapeFn::H9, &[0.5, 0.5], 3, None).unwrap();
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-12);
        }
        assert!((got.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_disconnected_by_hand() {
        // theta_1 = pi/2 * 0.4, theta_2 = pi / (4 * 1.5) * (1 + 2 * 0.5 * 0.3)
        let g = 0.5;
        let t1 = FRAC_PI_2 * 0.4;
        let t2 = PI / 6.0 * 1.3;
        let got = eval_shape(ShapeFn::H8, &[0.4, 0.3], 3, Some(g)).unwrap();
        let want = [t1.cos() * t2.cos(), t1.cos() * t2.sin(), t1.sin()];
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() < 1e-12);
        }
        let got = eval_shape(ShapeFn::H10, &[0.2, 0.7], 3, Some(1.0)).unwrap();
        let tail = 0.2 * (1.0 + (0.6 * PI).sin()) + 0.7 * (1.0 + (2.1 * PI).sin());
        assert!((got[0] - 0.1).abs() < 1e-15);
        assert!((got[1] - 0.35).abs() < 1e-15);
        assert!((got[2] - (3.0 - tail / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn argument_errors() {
        assert!(eval_shape(ShapeFn::H1, &[0.5, 0.5], 3, None).is_err());
        assert!(eval_shape(ShapeFn::H5, &[0.5], 3, None).is_err());
        assert!(eval_shape(ShapeFn::H8, &[0.5, 0.5], 3, None).is_err());
        assert!(eval_shape(ShapeFn::H10, &[0.5], 2, Some(-1.0)).is_err());
        assert!(eval_shape(ShapeFn::H3, &[1.5], 2, None).is_err());
        assert!(eval_shape(ShapeFn::H7, &[0.5], 2, None).is_ok());
    }

    #[test]
    fn identities_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let m = rng.gen_range(2..=10);
            let y = random_y(&mut rng, m);
            let h3 = eval_shape(ShapeFn::H3, &y, m, None).unwrap();
            let h4 = eval_shape(ShapeFn::H4, &y, m, None).unwrap();
            let h5 = eval_shape(ShapeFn::H5, &y, m, None).unwrap();
            let h6 = eval_shape(ShapeFn::H6, &y, m, None).unwrap();
            let h7 = eval_shape(ShapeFn::H7, &y, m, None).unwrap();
            let h9 = eval_shape(ShapeFn::H9, &y, m, None).unwrap();
            assert!((h3.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((h4.iter().sum::<f64>() - (m as f64 - 1.0)).abs() < 1e-9);
            assert!((h4[m - 1] - y[0]).abs() < 1e-12);
            assert!((h5.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9);
            assert!((h9.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9);
            for k in 0..m {
                assert!((h6[k] - (1.0 - h5[k])).abs() < 1e-9);
                assert!((h4[k] - (1.0 - h3[k])).abs() < 1e-9);
                let p = if k + 1 < m { 4 } else { 2 };
                assert!((h7[k] - h5[k].powi(p)).abs() < 1e-9);
            }
            for s in ShapeFn::ALL {
                if !s.supports(m) {
                    continue;
                }
                let g = rng.gen_range(0.0..3.0);
                let h = eval_shape(s, &y, m, Some(g)).unwrap();
                let last_floor = if s == ShapeFn::H10 { -(m as f64) } else { 0.0 };
                assert!(h[..m - 1].iter().all(|v| (0.0..=m as f64).contains(v)), "{s}");
                assert!(h[m - 1] <= m as f64 && h[m - 1] >= last_floor, "{s}");
            }
        }
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(das_dennis(3, 43).len(), 990);
        assert_eq!(das_dennis_count(3, 43), 990);
        assert_eq!(das_dennis_count(5, 10), 1001);
        assert_eq!(simplex_points(3, 990).len(), 990);
        assert_eq!(simplex_points(5, 1001).len(), 1001);
        for m in [8, 10] {
            let n = simplex_points(m, 1500).len();
            assert!((1000..=1500).contains(&n), "m={m}: {n}");
        }
        for w in das_dennis(4, 6) {
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_fronts_satisfy_identities() {
        let lin = sample_reference_front(ShapeFn::H3, 3, 990).unwrap();
        assert_eq!(lin.len(), 990);
        for p in lin.points() {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|&v| v >= 0.0));
        }
        let sph = sample_reference_front(ShapeFn::H5, 3, 990).unwrap();
        for p in sph.points() {
            assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sampled_front_counts() {
        for s in ShapeFn::ALL {
            for m in [2usize, 3, 5, 8, 10] {
                if !s.supports(m) {
                    continue;
                }
                let target = default_front_size(m);
                let f = sample_reference_front(s, m, target).unwrap();
                assert!(f.len() * 2 >= target && f.len() <= 2 * target, "{s} m={m}: {}", f.len());
                for k in 0..m {
                    assert!(f.nadir()[k] > f.ideal()[k], "{s} m={m} axis {k}");
                }
            }
        }
    }

    #[test]
    fn disconnected_front_is_mutually_nondominated() {
        let f = sample_reference_front(ShapeFn::H10, 5, 5000).unwrap();
        assert!(f.len() >= 2500 && f.len() <= 10000);
        let pts = f.points();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                assert!(!pareto::dominates(&pts[i], &pts[j]));
            }
        }
    }

    #[test]
    fn front_text_round_trip() {
        let f = sample_reference_front(ShapeFn::H2, 2, 100).unwrap();
        let text = f.to_text();
        assert!(text.starts_with("# front H2 m=2\n# m 2\n# count 100\n"));
        let back = ReferenceFront::parse(&text).unwrap();
        assert_eq!(back, f);
        assert!(parse_points("1 2\n3").is_err());
        assert!(parse_points("1 x").is_err());
    }
}
