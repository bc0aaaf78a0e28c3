//! Windowed integer arithmetic.
//!
//! Primes, the Liouville function on arbitrary ranges, the sieving set
//! `P ⊂ [H0, H]` with its reciprocal mass `L = Σ 1/p`, and the window
//! `(N, 2N]` together with the `P`-divisors of each of its elements.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of a sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// All primes `≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 2usize;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    out
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u64;
    while x.saturating_mul(x) > n {
        x -= 1;
    }
    while (x + 1).saturating_mul(x + 1) <= n {
        x += 1;
    }
    x
}

/// Primes in `[lo, hi]` by a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || lo > hi {
        return Vec::new();
    }
    let lo = lo.max(2);
    let base = primes_up_to(isqrt(hi));
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in &base {
        let mut m = (lo.div_ceil(p)).max(p) * p;
        while m <= hi {
            composite[(m - lo) as usize] = true;
            m += p;
        }
    }
    (0..len).filter(|&i| !composite[i]).map(|i| lo + i as u64).collect()
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Number of prime factors of `n` counted with multiplicity, by trial division.
pub fn big_omega(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            n /= d;
            count += 1;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        count += 1;
    }
    count
}

/// Liouville function by trial division.
pub fn liouville_naive(n: u64) -> i8 {
    if big_omega(n).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Distinct prime factors of `n`, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Values `λ(n)` for `n ∈ [lo, hi]`, using primes up to `√hi`.
pub fn liouville_range(lo: u64, hi: u64) -> Vec<i8> {
    if lo > hi {
        return Vec::new();
    }
    let lo = lo.max(1);
    let base = primes_up_to(isqrt(hi));
    liouville_segment(lo, hi, &base)
}

fn liouville_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<i8> {
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut parity = vec![0u8; len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
                parity[i] ^= 1;
            }
            m += p;
        }
    }
    (0..len)
        .map(|i| {
            let par = parity[i] ^ u8::from(rem[i] > 1);
            if par == 0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Streams `λ(n)` for `n ∈ [1, hi]` segment by segment.
pub fn for_each_liouville<F: FnMut(u64, i8)>(hi: u64, mut f: F) {
    const SEG: u64 = 1 << 18;
    let base = primes_up_to(isqrt(hi));
    let mut lo = 1;
    while lo <= hi {
        let top = (lo + SEG - 1).min(hi);
        for (i, l) in liouville_segment(lo, top, &base).into_iter().enumerate() {
            f(lo + i as u64, l);
        }
        lo = top + 1;
    }
}

/// `(1/log x) Σ_{n≤x} λ(n)λ(n+1)/n`.
pub fn log_chowla_sum(x: u64) -> Result<f64> {
    if x < 3 {
        return Err(Error::InvalidArgument("log_chowla_sum needs x >= 3".into()));
    }
    Ok(log_chowla_series(&[x])?[0])
}

/// `log_chowla_sum` at every point of an increasing schedule, in one pass.
pub fn log_chowla_series(xs: &[u64]) -> Result<Vec<f64>> {
    if xs.iter().any(|&x| x < 3) {
        return Err(Error::InvalidArgument("schedule points must be >= 3".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("schedule must be strictly increasing".into()));
    }
    let Some(&top) = xs.last() else {
        return Ok(Vec::new());
    };
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = CompensatedSum::new();
    let mut prev: i8 = 0;
    let mut next = 0;
    for_each_liouville(top + 1, |n, l| {
        if n >= 2 {
            let m = n - 1;
            acc.add(f64::from(prev * l) / m as f64);
            if next < xs.len() && xs[next] == m {
                out.push(acc.value() / libm::log(m as f64));
                next += 1;
            }
        }
        prev = l;
    });
    Ok(out)
}

/// `(1/log w) Σ_{x/w ≤ n ≤ x} λ(n)λ(n+1)/n`.
pub fn log_chowla_window_sum(x: u64, w: f64) -> Result<f64> {
    if w.is_nan() || w <= core::f64::consts::E || w > x as f64 {
        return Err(Error::InvalidArgument("need e < w <= x".into()));
    }
    let lo = libm::ceil(x as f64 / w).max(1.0) as u64;
    let lam = liouville_range(lo, x + 1);
    let s =
        compensated_sum((lo..=x).map(|n| f64::from(lam[(n - lo) as usize] * lam[(n + 1 - lo) as usize]) / n as f64));
    Ok(s / libm::log(w))
}

/// The sieving set `P ⊂ [H0, H]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeSet {
    primes: Vec<u64>,
    h0: u64,
    h: u64,
    script_l: f64,
}

/// All primes in `[h0, h]`.
pub fn build_prime_set(h0: u64, h: u64) -> Result<PrimeSet> {
    if h0 < 2 || h0 > h {
        return Err(Error::InvalidArgument("need 2 <= H0 <= H".into()));
    }
    PrimeSet::from_primes(primes_in_range(h0, h), h0, h)
}

impl PrimeSet {
    /// A prime set from an explicit list, validated against `[h0, h]`.
    pub fn from_primes(mut primes: Vec<u64>, h0: u64, h: u64) -> Result<Self> {
        primes.sort_unstable();
        primes.dedup();
        if primes.is_empty() {
            return Err(Error::EmptyPrimeSet { h0, h });
        }
        if let Some(&p) = primes.iter().find(|&&p| p < h0 || p > h || !is_prime(p)) {
            return Err(Error::InvalidArgument(alloc::format!("{p} is not a prime in [{h0}, {h}]")));
        }
        let script_l = compensated_sum(primes.iter().map(|&p| 1.0 / p as f64));
        Ok(Self { primes, h0, h, script_l })
    }

    /// An explicit list with the tightest bounds.
    pub fn from_list(primes: &[u64]) -> Result<Self> {
        let h0 = primes.iter().copied().min().unwrap_or(2);
        let h = primes.iter().copied().max().unwrap_or(2);
        Self::from_primes(primes.to_vec(), h0, h)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
    pub fn h0(&self) -> u64 {
        self.h0
    }
    pub fn h(&self) -> u64 {
        self.h
    }
    /// `L = Σ_{p∈P} 1/p`.
    pub fn script_l(&self) -> f64 {
        self.script_l
    }
    pub fn len(&self) -> usize {
        self.primes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
    pub fn contains(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }
    /// Largest prime in the set.
    pub fn max_prime(&self) -> u64 {
        *self.primes.last().expect("prime sets are non-empty")
    }
}

/// Parameters of a run and the regime they are meant to exercise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub n: u64,
    pub k: u32,
    pub big_k: f64,
    pub ell: u32,
    pub m: u32,
}

/// Which asymptotic-regime hypotheses hold for a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeReport {
    pub h0_large: bool,
    pub l_at_least_e: bool,
    pub h_small: bool,
    pub k_in_range: bool,
}

impl RegimeReport {
    pub fn all_hold(&self) -> bool {
        self.h0_large && self.l_at_least_e && self.h_small && self.k_in_range
    }

    /// Names of the hypotheses that fail.
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut w = Vec::new();
        if !self.h0_large {
            w.push("log H0 < (log H)^(1/2) (log log H)^2");
        }
        if !self.l_at_least_e {
            w.push("L < e");
        }
        if !self.h_small {
            w.push("log H > sqrt(log N / L)");
        }
        if !self.k_in_range {
            w.push("K > log N / (L (log H)^2)");
        }
        w
    }
}

impl RegimeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.k == 0 || self.ell == 0 || self.m == 0 || self.big_k.is_nan() || self.big_k <= 0.0 {
            return Err(Error::InvalidArgument("regime parameters must be positive".into()));
        }
        Ok(())
    }

    /// Reports the hypotheses without failing on violations.
    pub fn check(&self, p: &PrimeSet) -> RegimeReport {
        let lh = libm::log(p.h() as f64);
        let llh = libm::log(lh.max(f64::MIN_POSITIVE));
        let lh0 = libm::log(p.h0() as f64);
        let ln = libm::log(self.n as f64);
        let l = p.script_l();
        RegimeReport {
            h0_large: llh > 0.0 && lh0 >= libm::sqrt(lh) * llh * llh,
            l_at_least_e: l >= core::f64::consts::E,
            h_small: lh <= libm::sqrt(ln / l),
            k_in_range: self.big_k >= 1.0 && self.big_k <= ln / (l * lh * lh),
        }
    }
}

/// The window `(N, 2N]` with Liouville values and `P`-divisor lists.
#[derive(Debug, Clone)]
pub struct Window {
    n: u64,
    lam: Vec<i8>,
    offsets: Vec<u32>,
    divs: Vec<u32>,
}

/// Builds the window `(N, 2N]` for the prime set `P`.
pub fn build_window(n: u64, p: &PrimeSet) -> Result<Window> {
    if n == 0 {
        return Err(Error::InvalidArgument("window size N must be >= 1".into()));
    }
    let two_n = n.checked_mul(2).ok_or(Error::Overflow("2N"))?;
    if n > u32::MAX as u64 / 2 || p.max_prime() > u32::MAX as u64 {
        return Err(Error::Overflow("window index"));
    }
    let len = n as usize;
    let lam = liouville_range(n + 1, two_n);
    let mut counts = vec![0u32; len + 1];
    for &q in p.primes() {
        let mut m = (n + 1).div_ceil(q) * q;
        while m <= two_n {
            counts[(m - n - 1) as usize + 1] += 1;
            m += q;
        }
    }
    for i in 0..len {
        counts[i + 1] += counts[i];
    }
    let mut fill = counts.clone();
    let mut divs = vec![0u32; counts[len] as usize];
    for &q in p.primes() {
        let mut m = (n + 1).div_ceil(q) * q;
        while m <= two_n {
            let i = (m - n - 1) as usize;
            divs[fill[i] as usize] = q as u32;
            fill[i] += 1;
            m += q;
        }
    }
    Ok(Window { n, lam, offsets: counts, divs })
}

impl Window {
    /// The parameter `N`.
    pub fn n(&self) -> u64 {
        self.n
    }
    /// Number of vertices, `N`.
    pub fn len(&self) -> usize {
        self.lam.len()
    }
    pub fn is_empty(&self) -> bool {
        self.lam.is_empty()
    }
    /// Smallest element `N + 1`.
    pub fn first(&self) -> u64 {
        self.n + 1
    }
    pub fn contains(&self, m: i64) -> bool {
        m > self.n as i64 && m <= 2 * self.n as i64
    }
    /// Index of `m` in the window.
    pub fn index(&self, m: u64) -> usize {
        (m - self.n - 1) as usize
    }
    /// Liouville values, indexed from `N + 1`.
    pub fn lam(&self) -> &[i8] {
        &self.lam
    }
    /// `λ(m)` for `m` in the window.
    pub fn lambda(&self, m: u64) -> i8 {
        self.lam[self.index(m)]
    }
    /// Sorted primes of `P` dividing the element at index `i`.
    pub fn pdivs_at(&self, i: usize) -> &[u32] {
        &self.divs[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
    /// Sorted primes of `P` dividing `m`.
    pub fn pdivs(&self, m: u64) -> &[u32] {
        self.pdivs_at(self.index(m))
    }
    /// `ω_P(m)`.
    pub fn omega(&self, m: u64) -> usize {
        self.pdivs(m).len()
    }
    /// `ω_P` at every index.
    pub fn omegas(&self) -> Vec<u32> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }
    /// `Σ_n ω_P(n)` over the window.
    pub fn total_omega(&self) -> u64 {
        self.divs.len() as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_prime_sets() {
        let p = build_prime_set(11, 13).unwrap();
        assert_eq!(p.primes(), &[11, 13]);
        assert!((p.script_l() - (1.0 / 11.0 + 1.0 / 13.0)).abs() < 1e-15);
        let p = build_prime_set(2, 2).unwrap();
        assert_eq!(p.script_l(), 0.5);
        assert!(matches!(build_prime_set(24, 28), Err(Error::EmptyPrimeSet { .. })));
    }

    #[test]
    fn window_divisors_and_liouville() {
        let p = PrimeSet::from_list(&[2, 3]).unwrap();
        let w = build_window(10, &p).unwrap();
        assert_eq!(w.pdivs(12), &[2, 3]);
        assert!(w.pdivs(13).is_empty());
        assert_eq!(w.lambda(12), -1);
        assert_eq!(liouville_range(1, 4), vec![1, -1, -1, 1]);
    }

    #[test]
    fn chowla_at_three() {
        let v = log_chowla_sum(3).unwrap();
        let expect = (-1.0 + 0.5 - 1.0 / 3.0) / libm::log(3.0);
        assert!((v - expect).abs() < 1e-15);
    }

    #[test]
    fn regime_report_flags() {
        let p = build_prime_set(50, 1000).unwrap();
        let r = RegimeParams { n: 1_000_000, k: 4, big_k: 2.0, ell: 3, m: 2 };
        let rep = r.check(&p);
        assert!(!rep.l_at_least_e);
        assert!(!rep.all_hold());
        assert!(!rep.warnings().is_empty());
    }
}
