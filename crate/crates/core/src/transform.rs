//! Seeded rotations and shifts applied to distance variables.
//!
//! All randomness comes from SplitMix64 so that other implementations can
//! reproduce every instance bit for bit.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{invalid, EtmoError, Result};

/// Tag mixed into every bundle seed; bump it if instance generation changes.
pub const SUITE_TAG: &str = "etmof-v1";

/// Dimensions above this use block-diagonal rotations.
pub const DENSE_ROTATION_LIMIT: usize = 1024;
pub const ROTATION_BLOCK: usize = 64;

/// First ten SplitMix64 outputs for seed 0.
pub const SPLITMIX64_SEED0: [u64; 10] = [
    0xe220a8397b1dcdaf,
    0x6e789e6aa1b965f4,
    0x06c45d188009454f,
    0xf88bb8a8724c81ec,
    0x1b39896a51a8749b,
    0x53cb9f0c747ea2ea,
    0x2c829abe1f4532e1,
    0xc584133ac916ab3c,
    0x3ee5789041c98ac3,
    0xf3b8488c368cb0a6,
];

/// The portable generator used for instance construction.
pub fn generator(seed: u64) -> SplitMix64 {
    SplitMix64::from_seed(seed.to_le_bytes())
}

/// Checks the generator against [`SPLITMIX64_SEED0`].
pub fn generator_self_test() -> bool {
    let mut g = generator(0);
    SPLITMIX64_SEED0.iter().all(|&want| g.next_u64() == want)
}

fn uniform(g: &mut SplitMix64) -> f64 {
    (g.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn normal(g: &mut SplitMix64) -> f64 {
    let u1 = 1.0 - uniform(g);
    let u2 = uniform(g);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf29ce484222325u64, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x100000001b3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Rotation,
    Shift,
}

impl TransformKind {
    fn tag(self) -> &'static str {
        match self {
            TransformKind::Rotation => "rot",
            TransformKind::Shift => "shift",
        }
    }
}

/// Seed of the transform of `kind` for one group of one task.
pub fn bundle_seed(instance: usize, task: usize, group: usize, kind: TransformKind) -> u64 {
    fnv1a64(format!("{SUITE_TAG}|{instance}|{task}|{group}|{}", kind.tag()).as_bytes())
}

/// Orthogonal matrix, stored as dense row-major blocks along the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    blocks: Vec<(usize, usize, Vec<f64>)>,
}

/// Gram-Schmidt QR of a Gaussian matrix, columns normalised so R has a positive
/// diagonal; returns Q in row-major order.
fn haar_block(g: &mut SplitMix64, d: usize) -> Vec<f64> {
    // columns of the Gaussian matrix, filled column by column
    let mut cols: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| normal(g)).collect()).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for i in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let q = &done[i];
                let c = &mut rest[0];
                let dot: f64 = q.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
                c.iter_mut().zip(q).for_each(|(v, qv)| *v -= dot * qv);
            }
        }
        let norm = cols[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    let mut q = vec![0.0; d * d];
    for (j, c) in cols.iter().enumerate() {
        for (i, &v) in c.iter().enumerate() {
            q[i * d + j] = v;
        }
    }
    q
}

/// Seeded Haar-distributed orthogonal matrix. Dimensions above
/// [`DENSE_ROTATION_LIMIT`] get independent blocks of [`ROTATION_BLOCK`].
pub fn make_rotation(seed: u64, dim: usize) -> Result<Rotation> {
    if dim == 0 {
        return Err(invalid("rotation dimension must be positive"));
    }
    let mut g = generator(seed);
    let block = if dim > DENSE_ROTATION_LIMIT {
        ROTATION_BLOCK
    } else {
        dim
    };
    let mut blocks = Vec::new();
    let mut at = 0;
    while at < dim {
        let d = block.min(dim - at);
        blocks.push((at, d, haar_block(&mut g, d)));
        at += d;
    }
    Ok(Rotation { dim, blocks })
}

impl Rotation {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_block_diagonal(&self) -> bool {
        self.blocks.len() > 1
    }

    /// Entry `(i, j)` of the full matrix.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        for (at, d, q) in &self.blocks {
            if (*at..at + d).contains(&i) {
                return if (*at..at + d).contains(&j) {
                    q[(i - at) * d + (j - at)]
                } else {
                    0.0
                };
            }
        }
        0.0
    }

    fn mul_into(&self, v: &[f64], out: &mut [f64], transpose: bool) {
        for (at, d, q) in &self.blocks {
            let (at, d) = (*at, *d);
            let src = &v[at..at + d];
            for i in 0..d {
                out[at + i] = if transpose {
                    (0..d).map(|j| q[j * d + i] * src[j]).sum()
                } else {
                    q[i * d..(i + 1) * d].iter().zip(src).map(|(a, b)| a * b).sum()
                };
            }
        }
    }
}

/// Componentwise uniform over the central 80% of `[lo, hi]`.
pub fn make_shift(seed: u64, dim: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(invalid(format!("shift range [{lo}, {hi}] is empty")));
    }
    let mut g = generator(seed);
    let (a, w) = (lo + 0.1 * (hi - lo), 0.8 * (hi - lo));
    Ok((0..dim).map(|_| a + w * uniform(&mut g)).collect())
}

/// `z = R (x - o)` with either part optional.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformBundle {
    dim: usize,
    rotation: Option<Rotation>,
    shift: Option<Vec<f64>>,
}

impl TransformBundle {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            rotation: None,
            shift: None,
        }
    }

    pub fn new(dim: usize, rotation: Option<Rotation>, shift: Option<Vec<f64>>) -> Result<Self> {
        if rotation.as_ref().is_some_and(|r| r.dim != dim) || shift.as_ref().is_some_and(|s| s.len() != dim) {
            return Err(invalid("transform parts must match the bundle dimension"));
        }
        Ok(Self { dim, rotation, shift })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        self.rotation.as_ref()
    }

    pub fn shift(&self) -> Option<&[f64]> {
        self.shift.as_deref()
    }

    pub fn is_identity(&self) -> bool {
        self.rotation.is_none() && self.shift.is_none()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(EtmoError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let mut out = vec![0.0; self.dim];
        let mut scratch = Vec::new();
        self.apply_into(x, &mut scratch, &mut out);
        Ok(out)
    }

    pub(crate) fn apply_into(&self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [f64]) {
        let centred: &[f64] = match &self.shift {
            Some(o) => {
                scratch.clear();
                scratch.extend(x.iter().zip(o).map(|(a, b)| a - b));
                scratch
            }
            None => x,
        };
        match &self.rotation {
            Some(r) => r.mul_into(centred, out, false),
            None => out.copy_from_slice(centred),
        }
    }

    /// The `x` with `apply(x) = z`.
    pub fn inverse(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.dim {
            return Err(EtmoError::DimensionMismatch {
                expected: self.dim,
                got: z.len(),
            });
        }
        let mut x = z.to_vec();
        if let Some(r) = &self.rotation {
            r.mul_into(z, &mut x, true);
        }
        if let Some(o) = &self.shift {
            x.iter_mut().zip(o).for_each(|(v, s)| *v += s);
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn dense(r: &Rotation) -> DMatrix<f64> {
        DMatrix::from_fn(r.dim(), r.dim(), |i, j| r.get(i, j))
    }

    #[test]
    fn generator_reference_vector() {
        assert!(generator_self_test());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn rotation_is_orthogonal() {
        for (seed, dim) in [(1u64, 3usize), (2, 5), (3, 49), (4, 71)] {
            let q = dense(&make_rotation(seed, dim).unwrap());
            let err = (q.transpose() * &q - DMatrix::identity(dim, dim)).abs().max();
            assert!(err <= 1e-10, "dim {dim}: {err}");
        }
    }

    #[test]
    fn rotation_determinant_is_unit() {
        let q = dense(&make_rotation(99, 5).unwrap());
        assert!((q.determinant().abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rotation_is_deterministic() {
        assert_eq!(make_rotation(7, 3).unwrap(), make_rotation(7, 3).unwrap());
        assert_ne!(make_rotation(7, 3).unwrap(), make_rotation(8, 3).unwrap());
        let one = make_rotation(5, 1).unwrap();
        assert_eq!(one.get(0, 0).abs(), 1.0);
        assert_eq!(one, make_rotation(5, 1).unwrap());
        assert!(make_rotation(5, 0).is_err());
    }

    #[test]
    fn large_rotation_is_block_diagonal() {
        let r = make_rotation(3, 1100).unwrap();
        assert!(r.is_block_diagonal());
        assert_eq!(r.get(0, 100), 0.0);
        let x: Vec<f64> = (0..1100).map(|i| (i as f64).sin()).collect();
        let b = TransformBundle::new(1100, Some(r), None).unwrap();
        let z = b.apply(&x).unwrap();
        let nx: f64 = x.iter().map(|v| v * v).sum();
        let nz: f64 = z.iter().map(|v| v * v).sum();
        assert!((nx - nz).abs() < 1e-9 * nx);
    }

    #[test]
    fn shift_ranges() {
        let s = make_shift(1, 10, -100.0, 100.0).unwrap();
        assert!(s.iter().all(|v| (-80.0..=80.0).contains(v)));
        assert_eq!(s, make_shift(1, 10, -100.0, 100.0).unwrap());
        let s = make_shift(2, 1, 0.0, 1.0).unwrap();
        assert!((0.1..=0.9).contains(&s[0]));
        assert!(make_shift(2, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn bundle_examples() {
        let x = vec![1.0, -2.0, 3.0];
        assert_eq!(TransformBundle::identity(3).apply(&x).unwrap(), x);
        let o = make_shift(4, 3, -10.0, 10.0).unwrap();
        let b = TransformBundle::new(3, None, Some(o.clone())).unwrap();
        assert_eq!(b.apply(&o).unwrap(), vec![0.0; 3]);
        let r = TransformBundle::new(3, Some(make_rotation(4, 3).unwrap()), None).unwrap();
        let z = r.apply(&x).unwrap();
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nz: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((nx - nz).abs() < 1e-9);
        assert!(r.apply(&x[..2]).is_err());
    }

    #[test]
    fn bundle_seeds_differ_across_tasks_and_kinds() {
        let a = bundle_seed(1, 1, 0, TransformKind::Rotation);
        assert_ne!(a, bundle_seed(1, 2, 0, TransformKind::Rotation));
        assert_ne!(a, bundle_seed(1, 1, 1, TransformKind::Rotation));
        assert_ne!(a, bundle_seed(1, 1, 0, TransformKind::Shift));
        assert_ne!(a, bundle_seed(2, 1, 0, TransformKind::Rotation));
    }

    proptest! {
        #[test]
        fn apply_is_an_isometry(
            seed in any::<u64>(),
            x in prop::collection::vec(-50.0f64..50.0, 6),
            y in prop::collection::vec(-50.0f64..50.0, 6),
        ) {
            let b = TransformBundle::new(
                6,
                Some(make_rotation(seed, 6).unwrap()),
                Some(make_shift(seed ^ 1, 6, -50.0, 50.0).unwrap()),
            ).unwrap();
            let (bx, by) = (b.apply(&x).unwrap(), b.apply(&y).unwrap());
            let d0: f64 = x.iter().zip(&y).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
            let d1: f64 = bx.iter().zip(&by).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
            prop_assert!((d0 - d1).abs() < 1e-9 * (1.0 + d0));
            let back = b.inverse(&bx).unwrap();
            for (a, c) in back.iter().zip(&x) {
                prop_assert!((a - c).abs() < 1e-9);
            }
        }
    }
}
