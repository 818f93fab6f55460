//! The fourteen single-objective component functions that shape the fitness
//! landscape of every static task.
//!
//! All functions are evaluated on the raw input without clamping, so rotated or
//! shifted points outside the nominal box are accepted as-is.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, EtmoError, Result};

/// Offset added to every coordinate by the modified Schwefel function.
const SCHWEFEL_OFFSET: f64 = 4.209687462275036e2;
/// Per-dimension constant of the modified Schwefel function, at the precision
/// used by the CEC 2014 reference code; it equals `u(SCHWEFEL_OFFSET)` so the
/// minimum at the origin is exactly zero.
const SCHWEFEL_CONSTANT: f64 = 4.189828872724338e2;

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: usize = 20;

/// Identifier of a basic landscape function `b1..b14`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasicFn {
    Sphere,
    Elliptic,
    BentCigar,
    Discus,
    Rosenbrock,
    Ackley,
    Weierstrass,
    Griewank,
    Rastrigin,
    ModSchwefel,
    Katsuura,
    HappyCat,
    ExpGriewRosen,
    AbsMean,
}

impl BasicFn {
    pub const ALL: [BasicFn; 14] = [
        BasicFn::Sphere,
        BasicFn::Elliptic,
        BasicFn::BentCigar,
        BasicFn::Discus,
        BasicFn::Rosenbrock,
        BasicFn::Ackley,
        BasicFn::Weierstrass,
        BasicFn::Griewank,
        BasicFn::Rastrigin,
        BasicFn::ModSchwefel,
        BasicFn::Katsuura,
        BasicFn::HappyCat,
        BasicFn::ExpGriewRosen,
        BasicFn::AbsMean,
    ];

    /// Looks up `b<number>` (1-based).
    pub fn from_number(number: usize) -> Option<Self> {
        number.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }

    /// The 1-based number of this function, `b<number>`.
    pub fn number(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap() + 1
    }

    /// Minimum input length the formula accepts.
    pub fn min_len(self) -> usize {
        match self {
            BasicFn::Rosenbrock | BasicFn::ExpGriewRosen => 2,
            _ => 1,
        }
    }

    /// Coordinate value of the global minimizer; the minimizer is this value
    /// repeated in every coordinate.
    pub fn minimizer_component(self) -> f64 {
        match self {
            BasicFn::Rosenbrock | BasicFn::ExpGriewRosen => 1.0,
            BasicFn::HappyCat => -1.0,
            _ => 0.0,
        }
    }

    /// Evaluates the function without validating the input.
    pub fn value(self, x: &[f64]) -> f64 {
        match self {
            BasicFn::Sphere => sphere(x),
            BasicFn::Elliptic => elliptic(x),
            BasicFn::BentCigar => bent_cigar(x),
            BasicFn::Discus => discus(x),
            BasicFn::Rosenbrock => rosenbrock(x),
            BasicFn::Ackley => ackley(x),
            BasicFn::Weierstrass => weierstrass(x),
            BasicFn::Griewank => griewank(x),
            BasicFn::Rastrigin => rastrigin(x),
            BasicFn::ModSchwefel => mod_schwefel(x),
            BasicFn::Katsuura => katsuura(x),
            BasicFn::HappyCat => happy_cat(x),
            BasicFn::ExpGriewRosen => expanded_griewank_rosenbrock(x),
            BasicFn::AbsMean => abs_mean(x),
        }
    }
}

impl fmt::Display for BasicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.number())
    }
}

impl FromStr for BasicFn {
    type Err = EtmoError;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('b')
            .and_then(|n| n.parse().ok())
            .and_then(BasicFn::from_number)
            .ok_or_else(|| EtmoError::Parse(format!("not a basic function id: {s:?}")))
    }
}

/// Evaluates basic function `f` on `x`, rejecting short or NaN inputs.
pub fn eval_basic(f: BasicFn, x: &[f64]) -> Result<f64> {
    if x.len() < f.min_len() {
        return Err(invalid(format!(
            "{f} needs at least {} variables, got {}",
            f.min_len(),
            x.len()
        )));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(invalid(format!("{f} input contains NaN")));
    }
    Ok(f.value(x))
}

fn sphere(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn elliptic(x: &[f64]) -> f64 {
    let n = x.len();
    if n == 1 {
        return x[0] * x[0];
    }
    let denom = (n - 1) as f64;
    x.iter()
        .enumerate()
        .map(|(i, v)| 10f64.powf(6.0 * i as f64 / denom) * v * v)
        .sum()
}

fn bent_cigar(x: &[f64]) -> f64 {
    x[0] * x[0] + 1e6 * x[1..].iter().map(|v| v * v).sum::<f64>()
}

fn discus(x: &[f64]) -> f64 {
    1e6 * x[0] * x[0] + x[1..].iter().map(|v| v * v).sum::<f64>()
}

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| {
            let a = w[0] * w[0] - w[1];
            let b = w[0] - 1.0;
            100.0 * a * a + b * b
        })
        .sum()
}

fn ackley(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq = x.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = x.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    20.0 - 20.0 * (-0.2 * sq.sqrt()).exp() + E - cs.exp()
}

fn weierstrass_term(v: f64) -> f64 {
    let mut sum = 0.0;
    let mut ak = 1.0;
    let mut bk = 1.0;
    for _ in 0..=WEIERSTRASS_KMAX {
        sum += ak * (2.0 * PI * bk * (v + 0.5)).cos();
        ak *= WEIERSTRASS_A;
        bk *= WEIERSTRASS_B;
    }
    sum
}

fn weierstrass(x: &[f64]) -> f64 {
    // the subtracted constant is the per-coordinate sum at v = 0
    let offset = weierstrass_term(0.0);
    x.iter().map(|&v| weierstrass_term(v) - offset).sum()
}

fn griewank(x: &[f64]) -> f64 {
    let sum = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| (v / ((i + 1) as f64).sqrt()).cos())
        .product();
    sum - prod + 1.0
}

fn rastrigin(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v - 10.0 * (2.0 * PI * v).cos() + 10.0).sum()
}

fn schwefel_u(z: f64, n: f64) -> f64 {
    if z.abs() <= 500.0 {
        z * z.abs().sqrt().sin()
    } else if z > 500.0 {
        let r = 500.0 - z % 500.0;
        r * r.abs().sqrt().sin() - (z - 500.0).powi(2) / (10000.0 * n)
    } else {
        let r = z.abs() % 500.0 - 500.0;
        r * r.abs().sqrt().sin() - (z + 500.0).powi(2) / (10000.0 * n)
    }
}

fn mod_schwefel(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    SCHWEFEL_CONSTANT * n - x.iter().map(|v| schwefel_u(v + SCHWEFEL_OFFSET, n)).sum::<f64>()
}

fn katsuura(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let exponent = 10.0 / n.powf(1.2);
    let scale = 10.0 / (n * n);
    let prod: f64 = x
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut s = 0.0;
            let mut p = 1.0;
            for _ in 1..=32 {
                p *= 2.0;
                let t = p * v;
                s += (t - t.round()).abs() / p;
            }
            (1.0 + (i + 1) as f64 * s).powf(exponent)
        })
        .product();
    scale * prod - scale
}

fn happy_cat(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let s: f64 = x.iter().sum();
    (sq - n).abs().powf(0.25) + (0.5 * sq + s) / n + 0.5
}

fn expanded_griewank_rosenbrock(x: &[f64]) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let pair = [x[i], x[(i + 1) % n]];
            griewank(&[rosenbrock(&pair)])
        })
        .sum()
}

fn abs_mean(x: &[f64]) -> f64 {
    9.0 / x.len() as f64 * x.iter().map(|v| v.abs()).sum::<f64>()
}
