//! Dynamic tasks: piecewise-constant time model and the closed-form
//! time-varying objectives.

use std::f64::consts::PI;
use std::fmt;

use crate::basefn::BasicFn;
use crate::error::{invalid, EtmoError, Result};
use crate::shapefn::ReferenceFront;

/// Severity and change frequency of a dynamic task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynamicsSpec {
    pub n_t: usize,
    pub tau_t: usize,
}

impl Default for DynamicsSpec {
    fn default() -> Self {
        Self { n_t: 10, tau_t: 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeInstant {
    pub tau: usize,
    pub change_index: usize,
    pub t: f64,
}

/// `t = floor(tau / tau_t) / n_t`.
pub fn time_instant(tau: usize, spec: DynamicsSpec) -> TimeInstant {
    let change_index = tau / spec.tau_t;
    TimeInstant {
        tau,
        change_index,
        t: change_index as f64 / spec.n_t as f64,
    }
}

/// Closed-form dynamic problem templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynamicFamily {
    Dmop2,
    Zjz,
    /// Position index switching; `g` is the basic function over the others.
    Df2 {
        g: BasicFn,
    },
    Df5,
    /// DF6 with the |G|-scaled Rastrigin landscape.
    Df6,
    Df8,
    Df10,
    Df11,
    Df12,
    /// DF5 front template with `(1 + g)` and a basic landscape.
    Df5Basic {
        g: BasicFn,
    },
    /// DF6 front template with `(1 + g)` and a basic landscape.
    Df6Basic {
        g: BasicFn,
    },
}

impl DynamicFamily {
    pub fn m(self) -> usize {
        match self {
            DynamicFamily::Df10 | DynamicFamily::Df11 | DynamicFamily::Df12 => 3,
            _ => 2,
        }
    }

    pub fn k(self) -> usize {
        self.m() - 1
    }

    pub fn distance_bounds(self) -> (f64, f64) {
        match self {
            DynamicFamily::Zjz => (-1.0, 2.0),
            DynamicFamily::Df2 { .. } | DynamicFamily::Df11 => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }
}

impl fmt::Display for DynamicFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicFamily::Dmop2 => f.write_str("dMOP2"),
            DynamicFamily::Zjz => f.write_str("ZJZ"),
            DynamicFamily::Df2 { g } => write!(f, "DF2[{g}]"),
            DynamicFamily::Df5 => f.write_str("DF5"),
            DynamicFamily::Df6 => f.write_str("DF6"),
            DynamicFamily::Df8 => f.write_str("DF8"),
            DynamicFamily::Df10 => f.write_str("DF10"),
            DynamicFamily::Df11 => f.write_str("DF11"),
            DynamicFamily::Df12 => f.write_str("DF12"),
            DynamicFamily::Df5Basic { g } => write!(f, "DF5[{g}]"),
            DynamicFamily::Df6Basic { g } => write!(f, "DF6[{g}]"),
        }
    }
}

/// Time-varying parameters at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    pub t: f64,
    /// `sin(0.5 pi t)`.
    pub g_signed: f64,
}

impl TimeParams {
    pub fn at(t: f64) -> Self {
        // reduce to one period so t and t + 4 give identical parameters
        let phase = t.rem_euclid(4.0);
        Self {
            t,
            g_signed: (0.5 * PI * phase).sin(),
        }
    }

    fn phase(&self) -> f64 {
        self.t.rem_euclid(4.0)
    }

    pub fn g_abs(&self) -> f64 {
        self.g_signed.abs()
    }

    /// dMOP2 exponent.
    pub fn h_dmop2(&self) -> f64 {
        0.75 * self.g_signed + 1.25
    }

    /// ZJZ exponent.
    pub fn h_zjz(&self) -> f64 {
        1.5 + self.g_signed
    }

    /// DF5 ripple count `floor(10 G)`.
    pub fn w(&self) -> f64 {
        (10.0 * self.g_signed).floor()
    }

    /// DF6 exponent.
    pub fn alpha_df6(&self) -> f64 {
        0.2 + 0.28 * self.g_abs()
    }

    pub fn alpha_df8(&self) -> f64 {
        2.25 + 2.0 * (2.0 * PI * self.phase()).cos()
    }

    pub fn beta_df8(&self) -> f64 {
        100.0 * self.g_signed * self.g_signed
    }

    pub fn h_df10(&self) -> f64 {
        2.25 + 2.0 * (0.5 * PI * self.phase()).cos()
    }

    pub fn k_df12(&self) -> f64 {
        10.0 * (PI * self.phase()).sin()
    }
}

/// `sin(q pi / 2)` for integer `q`, exactly.
fn quarter_sin(q: f64) -> f64 {
    match (q as i64).rem_euclid(4) {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

fn shifted(xd: impl Iterator<Item = f64>, by: f64) -> Vec<f64> {
    xd.map(|v| v - by).collect()
}

/// A dynamic task: family, dimension and time model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicTask {
    family: DynamicFamily,
    n: usize,
    spec: DynamicsSpec,
}

impl DynamicTask {
    pub fn new(family: DynamicFamily, n: usize, spec: DynamicsSpec) -> Result<Self> {
        if n < family.k() + 2 {
            return Err(invalid(format!("{family} needs more than {n} variables")));
        }
        if spec.n_t == 0 || spec.tau_t == 0 {
            return Err(invalid("n_t and tau_t must be positive"));
        }
        Ok(Self { family, n, spec })
    }

    pub fn family(&self) -> DynamicFamily {
        self.family
    }

    pub fn spec(&self) -> DynamicsSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.family.m()
    }

    pub fn k(&self) -> usize {
        self.family.k()
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        match self.family {
            DynamicFamily::Df2 { .. } => (0.0, 1.0),
            _ if j < self.k() => (0.0, 1.0),
            f => f.distance_bounds(),
        }
    }

    /// 0-based index of the position variable of DF2 at time `t`.
    pub fn switching_index(&self, t: f64) -> usize {
        let g = TimeParams::at(t).g_abs();
        (((self.n - 1) as f64 * g).floor() as usize).min(self.n - 1)
    }

    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(EtmoError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if !t.is_finite() || t < 0.0 {
            return Err(EtmoError::TimeMismatch(format!("t = {t} is not a valid time instant")));
        }
        if x.iter().any(|v| v.is_nan()) {
            return Err(invalid("solution contains NaN"));
        }
        let p = TimeParams::at(t);
        let g_signed = p.g_signed;
        let g_abs = p.g_abs();
        let xd = &x[self.k()..];
        let sq = |target: &dyn Fn(usize) -> f64| -> f64 {
            xd.iter().enumerate().map(|(i, v)| (v - target(i)).powi(2)).sum()
        };
        let f = match self.family {
            DynamicFamily::Dmop2 | DynamicFamily::Zjz => {
                let xp = x[0];
                let (g, h) = if self.family == DynamicFamily::Dmop2 {
                    (sq(&|_| g_abs), p.h_dmop2())
                } else {
                    let h = p.h_zjz();
                    let c = g_signed + xp.powf(h);
                    (sq(&|_| c), h)
                };
                vec![xp, (1.0 + g) * (1.0 - (xp / (1.0 + g)).powf(h))]
            }
            DynamicFamily::Df2 { g: b } => {
                let r = self.switching_index(t);
                let rest: Vec<f64> = x
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != r)
                    .map(|(_, v)| v - g_abs)
                    .collect();
                let g = b.value(&rest);
                let f1 = x[r];
                vec![f1, (1.0 + g) * (1.0 - (f1 / (1.0 + g)).sqrt())]
            }
            DynamicFamily::Df5 | DynamicFamily::Df5Basic { .. } => {
                let xp = x[0];
                let scale = match self.family {
                    DynamicFamily::Df5Basic { g } => 1.0 + g.value(&shifted(xd.iter().copied(), g_signed)),
                    _ => 1.0 + sq(&|_| g_signed),
                };
                let ripple = 0.02 * (p.w() * PI * xp).sin();
                vec![scale * (xp + ripple), scale * (1.0 - xp + ripple)]
            }
            DynamicFamily::Df6 | DynamicFamily::Df6Basic { .. } => {
                let xp = x[0];
                let scale = match self.family {
                    DynamicFamily::Df6Basic { g } => 1.0 + g.value(&shifted(xd.iter().copied(), g_signed)),
                    _ => {
                        1.0 + xd
                            .iter()
                            .map(|v| {
                                let y = v - g_signed;
                                g_abs * y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
                            })
                            .sum::<f64>()
                    }
                };
                let a = p.alpha_df6();
                let wave = 0.1 * (3.0 * PI * xp).sin();
                vec![
                    scale * (xp + wave).max(0.0).powf(a),
                    scale * (1.0 - xp + wave).max(0.0).powf(a),
                ]
            }
            DynamicFamily::Df8 => {
                let xp = x[0];
                let c = g_signed * (4.0 * PI * xp.powf(p.beta_df8())).sin() / (1.0 + g_abs);
                let g = 1.0 + sq(&|_| c);
                let wave = 0.1 * (3.0 * PI * xp).sin();
                vec![g * (xp + wave), g * (1.0 - xp + wave).max(0.0).powf(p.alpha_df8())]
            }
            DynamicFamily::Df10 => {
                let (x1, x2) = (x[0], x[1]);
                let c = (2.0 * PI * (x1 + x2)).sin() / (1.0 + g_abs);
                let s = 1.0 + sq(&|_| c);
                let h = p.h_df10();
                let (s1, c1) = (0.5 * PI * x1).sin_cos();
                let (s2, c2) = (0.5 * PI * x2).sin_cos();
                vec![s * s1.powf(h), s * (s2 * c1).powf(h), s * (c2 * c1).powf(h)]
            }
            DynamicFamily::Df11 => {
                let (x1, x2) = (x[0], x[1]);
                let c = 0.5 * g_abs * x1;
                let s = 1.0 + g_abs + sq(&|_| c);
                let z = |v: f64| PI / 6.0 * g_abs + (PI / 2.0 - PI / 3.0 * g_abs) * v;
                let (sz1, cz1) = z(x1).sin_cos();
                let (sz2, cz2) = z(x2).sin_cos();
                vec![s * sz1, s * sz2 * cz1, s * cz2 * cz1]
            }
            DynamicFamily::Df12 => {
                let (x1, x2) = (x[0], x[1]);
                let c = (t * x1).sin();
                let k = p.k_df12();
                let product: f64 = [x1, x2]
                    .iter()
                    .map(|&v| quarter_sin((k * (2.0 * v - 1.0)).floor()))
                    .product();
                let s = 1.0 + sq(&|_| c) + product.abs();
                let (s1, c1) = (0.5 * PI * x1).sin_cos();
                let (s2, c2) = (0.5 * PI * x2).sin_cos();
                vec![s * c1 * c2, s * c1 * s2, s * s1]
            }
        };
        Ok(f)
    }

    /// Solution with the given position values (in `[0, 1]`) and distance
    /// variables at the landscape optimum for time `t`.
    pub fn optimal_solution(&self, position: &[f64], t: f64) -> Result<Vec<f64>> {
        if position.len() != self.k() {
            return Err(EtmoError::DimensionMismatch {
                expected: self.k(),
                got: position.len(),
            });
        }
        let p = TimeParams::at(t);
        let (gs, ga) = (p.g_signed, p.g_abs());
        let mut x = vec![0.0; self.n];
        let k = self.k();
        if let DynamicFamily::Df2 { g } = self.family {
            let r = self.switching_index(t);
            x.iter_mut().for_each(|v| *v = ga + g.minimizer_component());
            x[r] = position[0];
            return Ok(x);
        }
        x[..k].copy_from_slice(position);
        let target = match self.family {
            DynamicFamily::Dmop2 => ga,
            DynamicFamily::Zjz => gs + position[0].powf(p.h_zjz()),
            DynamicFamily::Df5 | DynamicFamily::Df6 => gs,
            DynamicFamily::Df5Basic { g } | DynamicFamily::Df6Basic { g } => gs + g.minimizer_component(),
            DynamicFamily::Df8 => gs * (4.0 * PI * position[0].powf(p.beta_df8())).sin() / (1.0 + ga),
            DynamicFamily::Df10 => (2.0 * PI * (position[0] + position[1])).sin() / (1.0 + ga),
            DynamicFamily::Df11 => 0.5 * ga * position[0],
            DynamicFamily::Df12 => (t * position[0]).sin(),
            DynamicFamily::Df2 { .. } => unreachable!(),
        };
        x[k..].iter_mut().for_each(|v| *v = target);
        Ok(x)
    }

    /// Samples the true front at time `t` by sweeping the position variables
    /// with optimal distance variables, then filtering dominated points.
    pub fn pf_at_time(&self, t: f64, count: usize) -> Result<ReferenceFront> {
        if count < 2 {
            return Err(invalid("need at least two sample points"));
        }
        let positions: Vec<Vec<f64>> = if self.k() == 1 {
            (0..count).map(|i| vec![i as f64 / (count - 1) as f64]).collect()
        } else {
            let side = (count as f64).sqrt().ceil() as usize;
            let step = |i: usize| i as f64 / (side - 1) as f64;
            (0..side)
                .flat_map(|i| (0..side).map(move |j| vec![step(i), step(j)]))
                .collect()
        };
        let mut points = Vec::with_capacity(positions.len());
        for pos in positions {
            let x = self.optimal_solution(&pos, t)?;
            points.push(self.evaluate(&x, t)?);
        }
        ReferenceFront::new(points, format!("{} t={t}", self.family))
    }
}
