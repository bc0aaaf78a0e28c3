//! Closed walks and the trace of `A^{2k}`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{CompensatedSum, PrimeSet};
use crate::divgraph::{DiffOperator, VertexMask, Which};
use crate::error::{Error, Result};

/// Steps `σ_i p_i` of a walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkSpec {
    sigma: Vec<i8>,
    primes: Vec<u64>,
}

impl WalkSpec {
    pub fn new(sigma: Vec<i8>, primes: Vec<u64>) -> Result<Self> {
        if sigma.len() != primes.len() {
            return Err(Error::LengthMismatch { expected: sigma.len(), got: primes.len() });
        }
        if sigma.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(Self { sigma, primes })
    }

    pub fn k2(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// `β_0 = 0, β_1, …, β_{2k}`.
    pub fn partial_sums(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.k2() + 1);
        let mut b = 0i64;
        out.push(b);
        for (&s, &p) in self.sigma.iter().zip(&self.primes) {
            b += i64::from(s) * p as i64;
            out.push(b);
        }
        out
    }

    pub fn is_closed(&self) -> bool {
        self.partial_sums().last() == Some(&0)
    }

    /// Some prime occurs exactly once.
    pub fn has_singleton(&self) -> bool {
        self.primes.iter().any(|p| self.primes.iter().filter(|&q| q == p).count() == 1)
    }

    /// `Π (1_{p_i | n + β_{i−1}} − 1/p_i)`.
    pub fn weight_at(&self, n: i64) -> f64 {
        let mut w = 1.0;
        let mut m = n;
        for (&s, &p) in self.sigma.iter().zip(&self.primes) {
            let d = if m.rem_euclid(p as i64) == 0 { 1.0 } else { 0.0 };
            w *= d - 1.0 / p as f64;
            m += i64::from(s) * p as i64;
        }
        w
    }
}

/// All closed walks of length `k2` with steps in `±P`; the last step is
/// forced by the first `k2 − 1`.
pub fn closed_walks(pset: &PrimeSet, k2: usize, budget: u64) -> Result<Vec<WalkSpec>> {
    if k2 == 0 {
        return Ok(vec![WalkSpec { sigma: Vec::new(), primes: Vec::new() }]);
    }
    let primes = pset.primes();
    if primes.is_empty() {
        return Ok(Vec::new());
    }
    let pmax = *primes.last().expect("non-empty") as i64;
    let mut out = Vec::new();
    let mut sigma = vec![0i8; k2];
    let mut ps = vec![0u64; k2];
    let mut visited = 0u64;
    struct Ctx<'a> {
        primes: &'a [u64],
        pmax: i64,
        k2: usize,
        budget: u64,
    }
    fn go(
        cx: &Ctx,
        i: usize,
        beta: i64,
        sigma: &mut [i8],
        ps: &mut [u64],
        visited: &mut u64,
        out: &mut Vec<WalkSpec>,
    ) -> Result<()> {
        *visited += 1;
        if *visited > cx.budget {
            return Err(Error::Budget { what: "walk tuples", count: *visited, limit: cx.budget });
        }
        if i + 1 == cx.k2 {
            let need = -beta;
            let p = need.unsigned_abs();
            if cx.primes.binary_search(&p).is_ok() {
                sigma[i] = if need > 0 { 1 } else { -1 };
                ps[i] = p;
                out.push(WalkSpec { sigma: sigma.to_vec(), primes: ps.to_vec() });
            }
            return Ok(());
        }
        let left = (cx.k2 - i - 1) as i64 * cx.pmax;
        for &p in cx.primes {
            for s in [1i8, -1] {
                let b = beta + i64::from(s) * p as i64;
                if b.abs() <= left {
                    sigma[i] = s;
                    ps[i] = p;
                    go(cx, i + 1, b, sigma, ps, visited, out)?;
                }
            }
        }
        Ok(())
    }
    let cx = Ctx { primes, pmax, k2, budget };
    go(&cx, 0, 0, &mut sigma, &mut ps, &mut visited, &mut out)?;
    for w in &out {
        assert!(w.is_closed(), "enumerated walk must close");
    }
    Ok(out)
}

/// Trace estimate; `stderr` is set in randomized mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// One basis probe per kept vertex.
    Exact,
    /// `probes` random sign vectors.
    Estimate { probes: usize, seed: u64 },
}

fn power_norm2(op: &DiffOperator, v: Vec<f64>, k: u32, mask: Option<&VertexMask>) -> Result<f64> {
    let mut v = v;
    let mut w = vec![0.0; v.len()];
    for _ in 0..k {
        op.apply_into(&v, Which::A, mask, &mut w)?;
        core::mem::swap(&mut v, &mut w);
    }
    Ok(v.iter().map(|x| x * x).sum())
}

/// `Tr (A|_X)^{2k}` via operator applications, as `Σ_n ‖A^k e_n‖²`.
pub fn trace_power_operator(
    op: &DiffOperator,
    k: u32,
    mask: Option<&VertexMask>,
    mode: TraceMode,
) -> Result<TraceValue> {
    let len = op.len();
    let kept: Vec<usize> = (0..len).filter(|&i| mask.is_none_or(|m| m.contains(i))).collect();
    if k == 0 {
        return Ok(TraceValue { value: kept.len() as f64, stderr: None });
    }
    match mode {
        TraceMode::Exact => {
            let mut acc = CompensatedSum::new();
            for &i in &kept {
                let mut e = vec![0.0; len];
                e[i] = 1.0;
                acc.add(power_norm2(op, e, k, mask)?);
            }
            let value = acc.value();
            assert!(value >= 0.0);
            Ok(TraceValue { value, stderr: None })
        }
        TraceMode::Estimate { probes, seed } => {
            if probes < 2 {
                return Err(Error::InvalidArgument("at least two probes are needed".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut xs = Vec::with_capacity(probes);
            for _ in 0..probes {
                let z: Vec<f64> = (0..len).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
                xs.push(power_norm2(op, z, k, mask)?);
            }
            let (mean, var) = mean_var(&xs);
            assert!(mean >= 0.0);
            Ok(TraceValue { value: mean, stderr: Some(libm::sqrt(var / probes as f64)) })
        }
    }
}

/// Dense oracle: trace of the explicit matrix power.
pub fn trace_power_dense(op: &DiffOperator, k: u32, mask: Option<&VertexMask>) -> f64 {
    let a = op.dense_matrix(Which::A, mask);
    let mut m = DMatrix::<f64>::identity(a.nrows(), a.ncols());
    if k == 0 {
        return (0..op.len()).filter(|&i| mask.is_none_or(|mk| mk.contains(i))).count() as f64;
    }
    let a2 = &a * &a;
    for _ in 0..k {
        m = &m * &a2;
    }
    m.trace()
}

/// Closed-walk sum split by whether a prime occurs exactly once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSum {
    pub with_singletons: f64,
    pub without_singletons: f64,
    pub tuples: usize,
}

impl WalkSum {
    pub fn total(&self) -> f64 {
        self.with_singletons + self.without_singletons
    }
}

/// `N_{2k}`: the sum over start vertices in `X` and closed walks of length
/// `2k` staying in `X` of the product of edge weights of `A`.
pub fn trace_power_walksum(op: &DiffOperator, k: u32, mask: Option<&VertexMask>, budget: u64) -> Result<WalkSum> {
    let walks = closed_walks(op.pset(), 2 * k as usize, budget)?;
    let window = op.window();
    let first = window.first() as i64;
    let len = op.len() as i64;
    let inside = |m: i64| {
        let i = m - first;
        i >= 0 && i < len && mask.is_none_or(|mk| mk.contains(i as usize))
    };
    let mut with = CompensatedSum::new();
    let mut without = CompensatedSum::new();
    for w in &walks {
        let betas = w.partial_sums();
        let lo = betas.iter().min().copied().unwrap_or(0);
        let hi = betas.iter().max().copied().unwrap_or(0);
        let mut acc = CompensatedSum::new();
        for n in first - lo..first + len - hi {
            if betas.iter().all(|&b| inside(n + b)) {
                acc.add(w.weight_at(n));
            }
        }
        if w.has_singleton() {
            with.add(acc.value());
        } else {
            without.add(acc.value());
        }
    }
    Ok(WalkSum { with_singletons: with.value(), without_singletons: without.value(), tuples: walks.len() })
}

/// `(with, without)` singleton parts of the closed-walk sum.
pub fn singleton_cancellation_check(
    op: &DiffOperator,
    k: u32,
    mask: Option<&VertexMask>,
    budget: u64,
) -> Result<(f64, f64)> {
    let s = trace_power_walksum(op, k, mask, budget)?;
    Ok((s.with_singletons, s.without_singletons))
}

/// Exact closed-walk sums per vertex on `ℤ/Qℤ`, `Q` the product of the
/// primes a walk uses, so there is no boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicWalkSum {
    pub with_singletons: BigRational,
    pub without_singletons: BigRational,
    pub tuples: usize,
}

/// Average over `n ∈ ℤ/Qℤ` of the closed-walk weight, summed over walks.
pub fn periodic_walksum(pset: &PrimeSet, k: u32, budget: u64) -> Result<PeriodicWalkSum> {
    let walks = closed_walks(pset, 2 * k as usize, budget)?;
    let mut with = BigRational::zero();
    let mut without = BigRational::zero();
    for w in &walks {
        let mut distinct = w.primes().to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let q = distinct.iter().try_fold(1i64, |a, &p| a.checked_mul(p as i64)).ok_or(Error::Overflow("period"))?;
        // each factor is (p·1_{p|m} − 1)/p
        let mut num = BigInt::zero();
        for n in 0..q {
            let mut prod = BigInt::one();
            let mut m = n;
            for (&s, &p) in w.sigma().iter().zip(w.primes()) {
                let d = i64::from(m.rem_euclid(p as i64) == 0);
                prod *= d * p as i64 - 1;
                if prod.is_zero() {
                    break;
                }
                m += i64::from(s) * p as i64;
            }
            num += prod;
        }
        let den = w.primes().iter().fold(BigInt::from(q), |a, &p| a * p);
        let term = BigRational::new(num, den);
        if w.has_singleton() {
            with += term;
        } else {
            without += term;
        }
    }
    Ok(PeriodicWalkSum { with_singletons: with, without_singletons: without, tuples: walks.len() })
}

/// `2^k C_k`: sign choices times matched-parenthesis patterns.
pub fn count_trivial_walks(k: u32) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        // C_{i+1} = C_i · 2(2i+1)/(i+2)
        c = c * (2 * (2 * i + 1)) / (i + 2);
    }
    c << k as usize
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkStats {
    pub k: u32,
    pub samples: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    /// Predicted variance `k Σ_p p/𝓛`.
    pub expected_variance: f64,
    /// Bin width, a quarter of `√k · E[p]`.
    pub bin_width: f64,
    /// `(lower edge, count)`; the end bins absorb the tails.
    pub histogram: Vec<(f64, u64)>,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var)
}

/// Endpoints of `k`-step walks, step `σp` with probability `1/(2𝓛p)`.
pub fn simulate_naive_walk(pset: &PrimeSet, k: u32, samples: u64, seed: u64) -> Result<WalkStats> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if pset.is_empty() {
        return Err(Error::InvalidArgument("empty prime set".into()));
    }
    let primes = pset.primes();
    let weights: Vec<f64> = primes.iter().map(|&p| 1.0 / p as f64).collect();
    let dist = WeightedIndex::new(&weights).map_err(|_| Error::InvalidArgument("bad step weights".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = pset.script_l();
    let mean_step = primes.len() as f64 / l;
    let scale = libm::sqrt(f64::from(k)) * mean_step;
    let bins = 32usize;
    let bin_width = if scale > 0.0 { scale / 4.0 } else { 1.0 };
    let lo = -(bins as f64 / 2.0) * bin_width;
    let mut hist = vec![0u64; bins];
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..samples {
        let mut x = 0i64;
        for _ in 0..k {
            let p = primes[dist.sample(&mut rng)] as i64;
            x += if rng.random::<bool>() { p } else { -p };
        }
        let xf = x as f64;
        sum += xf;
        sum2 += xf * xf;
        let b = libm::floor((xf - lo) / bin_width);
        hist[(b.max(0.0) as usize).min(bins - 1)] += 1;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = if samples > 1 { (sum2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
    let expected_variance = f64::from(k) * primes.iter().map(|&p| p as f64).sum::<f64>() / l;
    let histogram = hist.into_iter().enumerate().map(|(i, c)| (lo + i as f64 * bin_width, c)).collect();
    Ok(WalkStats {
        k,
        samples,
        mean,
        variance,
        stderr: libm::sqrt(variance / n),
        expected_variance,
        bin_width,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_window;

    #[test]
    fn trivial_counts() {
        assert_eq!(count_trivial_walks(0), BigUint::from(1u32));
        assert_eq!(count_trivial_walks(3), BigUint::from(40u32));
        assert_eq!(count_trivial_walks(10), BigUint::from(1024u32 * 16796));
    }

    #[test]
    fn one_prime_k1_by_hand() {
        let p = PrimeSet::from_list(&[7]).unwrap();
        let w = build_window(50, &p).unwrap();
        let op = DiffOperator::new(&w, &p);
        let s = trace_power_walksum(&op, 1, None, 1000).unwrap();
        assert_eq!(s.tuples, 2);
        // each edge {m, m+7} in the window is walked both ways
        let mut hand = 0.0;
        for m in 51..=93u64 {
            let x = if m % 7 == 0 { 1.0 } else { 0.0 } - 1.0 / 7.0;
            hand += 2.0 * x * x;
        }
        assert!((s.total() - hand).abs() < 1e-12);
        let t = trace_power_operator(&op, 1, None, TraceMode::Exact).unwrap().value;
        assert!((t - hand).abs() < 1e-10);
        assert!((trace_power_dense(&op, 1, None) - hand).abs() < 1e-10);
    }

    #[test]
    fn k0_and_empty() {
        let p = PrimeSet::from_list(&[11]).unwrap();
        let w = build_window(40, &p).unwrap();
        let op = DiffOperator::new(&w, &p);
        let mut bits = vec![true; 40];
        bits[3] = false;
        let m = VertexMask::from_bits(bits);
        assert_eq!(trace_power_operator(&op, 0, Some(&m), TraceMode::Exact).unwrap().value, 39.0);
        assert_eq!(trace_power_walksum(&op, 0, Some(&m), 10).unwrap().total(), 39.0);
    }

    #[test]
    fn three_methods_agree() {
        let p = PrimeSet::from_list(&[11, 13]).unwrap();
        let w = build_window(120, &p).unwrap();
        let op = DiffOperator::new(&w, &p);
        let bits: Vec<bool> = (0..120).map(|i| i % 17 != 5).collect();
        let m = VertexMask::from_bits(bits);
        for k in 1..=3 {
            let a = trace_power_operator(&op, k, Some(&m), TraceMode::Exact).unwrap().value;
            let b = trace_power_walksum(&op, k, Some(&m), 1 << 20).unwrap().total();
            let c = trace_power_dense(&op, k, Some(&m));
            assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{k}: {a} {b}");
            assert!((a - c).abs() <= 1e-8 * a.abs().max(1.0), "{k}: {a} {c}");
        }
    }

    #[test]
    fn estimate_is_close() {
        let p = PrimeSet::from_list(&[11, 13]).unwrap();
        let w = build_window(200, &p).unwrap();
        let op = DiffOperator::new(&w, &p);
        let exact = trace_power_operator(&op, 2, None, TraceMode::Exact).unwrap().value;
        let est = trace_power_operator(&op, 2, None, TraceMode::Estimate { probes: 200, seed: 3 }).unwrap();
        assert!((est.value - exact).abs() <= 5.0 * est.stderr.unwrap() + 1e-9);
    }

    #[test]
    fn periodic_singletons_vanish() {
        let p = PrimeSet::from_list(&[3, 5, 7, 11]).unwrap();
        let s = periodic_walksum(&p, 2, 1 << 20).unwrap();
        assert!(s.with_singletons.is_zero());
        assert!(s.without_singletons > BigRational::zero());
    }

    #[test]
    fn singleton_free_pair() {
        // with two primes 11 and 13 no closed walk of length 4 uses a prime once
        let p = PrimeSet::from_list(&[11, 13]).unwrap();
        for w in closed_walks(&p, 4, 1 << 16).unwrap() {
            assert!(!w.has_singleton());
        }
    }

    #[test]
    fn simulator_is_deterministic() {
        let p = PrimeSet::from_list(&[11, 13, 17]).unwrap();
        let a = simulate_naive_walk(&p, 4, 1000, 9).unwrap();
        let b = simulate_naive_walk(&p, 4, 1000, 9).unwrap();
        assert_eq!(a, b);
        let z = simulate_naive_walk(&p, 0, 10, 9).unwrap();
        assert_eq!((z.mean, z.variance), (0.0, 0.0));
    }
}
