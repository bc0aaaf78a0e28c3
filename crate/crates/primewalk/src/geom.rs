//! Counting `n⃗` in a box with `d_i | (M n⃗ + c⃗)_i` for every `i`.

use alloc::vec::Vec;

use num_traits::Zero;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{determinant, to_big};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityInstance {
    m: Vec<Vec<i64>>,
    c: Vec<i64>,
    d: Vec<u64>,
    boxes: Vec<u64>,
    entry_bound: u64,
    floor: u64,
}

impl DivisibilityInstance {
    /// Rejects singular `M`, entries above `entry_bound`, and moduli or box
    /// sizes below `floor`.
    pub fn new(
        m: Vec<Vec<i64>>,
        c: Vec<i64>,
        d: Vec<u64>,
        boxes: Vec<u64>,
        entry_bound: u64,
        floor: u64,
    ) -> Result<Self> {
        let k = m.len();
        for got in [c.len(), d.len(), boxes.len()] {
            if got != k {
                return Err(Error::LengthMismatch { expected: k, got });
            }
        }
        if m.iter().flatten().any(|x| x.unsigned_abs() > entry_bound) {
            return Err(Error::InvalidArgument("matrix entry exceeds C".into()));
        }
        if floor == 0 || d.iter().chain(&boxes).any(|&x| x < floor) {
            return Err(Error::InvalidArgument("moduli and box sizes must be at least D >= 1".into()));
        }
        match determinant(&to_big(&m)) {
            None => return Err(Error::InvalidArgument("matrix must be square".into())),
            Some(det) if det.is_zero() => return Err(Error::Singular),
            Some(_) => {}
        }
        Ok(Self { m, c, d, boxes, entry_bound, floor })
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Draws `M` with entries in `[−C, C]`, `d_i ∈ [D, 3D]` and
    /// `N_i ∈ [D, max(D, n_max)]`; singular draws are rejected, not repaired.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, dim: usize, entry_bound: u64, floor: u64, n_max: u64) -> Option<Self> {
        let cb = entry_bound as i64;
        let m = (0..dim).map(|_| (0..dim).map(|_| rng.random_range(-cb..=cb)).collect()).collect();
        let c = (0..dim).map(|_| rng.random_range(-100..=100)).collect();
        let d = (0..dim).map(|_| rng.random_range(floor..=3 * floor)).collect();
        let boxes = (0..dim).map(|_| rng.random_range(floor..=floor.max(n_max))).collect();
        Self::new(m, c, d, boxes, entry_bound, floor).ok()
    }
}

/// Exact count over `N_i ≤ n_i ≤ 2N_i`.
pub fn count_solutions_bruteforce(inst: &DivisibilityInstance, budget: u64) -> Result<u64> {
    let size = inst.boxes.iter().try_fold(1u64, |acc, &n| acc.checked_mul(n + 1)).unwrap_or(u64::MAX);
    if size > budget {
        return Err(Error::Budget { what: "box enumeration", count: size, limit: budget });
    }
    let k = inst.dim();
    let mut n: Vec<i64> = inst.boxes.iter().map(|&b| b as i64).collect();
    let mut count = 0;
    loop {
        let ok = (0..k).all(|i| {
            let v: i128 =
                inst.m[i].iter().zip(&n).map(|(&a, &x)| a as i128 * x as i128).sum::<i128>() + inst.c[i] as i128;
            v.rem_euclid(inst.d[i] as i128) == 0
        });
        count += u64::from(ok);
        let mut j = 0;
        loop {
            if j == k {
                return Ok(count);
            }
            if n[j] < 2 * inst.boxes[j] as i64 {
                n[j] += 1;
                break;
            }
            n[j] = inst.boxes[j] as i64;
            j += 1;
        }
    }
}

/// `(2Cm/D)^m Π N_i`.
pub fn lemma_bound(inst: &DivisibilityInstance) -> f64 {
    let m = inst.dim() as f64;
    let base = 2.0 * inst.entry_bound as f64 * m / inst.floor as f64;
    libm::pow(base, m) * inst.boxes.iter().map(|&n| n as f64).product::<f64>()
}
