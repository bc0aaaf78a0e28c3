//! The graphs `Γ` (edges `{n, n+p}` with `p | n`) and `Γ′` (every edge of
//! length `p`, weight `1/p`) on the window `(N, 2N]`, their adjacency
//! operators, and the difference `A = Ad_Γ − Ad_Γ′`.
//!
//! Restriction to a vertex mask zeroes the excluded coordinates before and
//! after applying the operator, so vectors always have length `N`.
//! Inner products carry the `1/N` normalisation.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{compensated_sum, PrimeSet, Window};
use crate::error::{Error, Result};
use crate::sieve;

/// Which operator to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Gamma,
    GammaPrime,
    A,
}

/// Membership indicator over the window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMask {
    bits: Vec<bool>,
    excluded: usize,
}

impl VertexMask {
    pub fn full(len: usize) -> Self {
        Self { bits: vec![true; len], excluded: 0 }
    }

    pub fn empty(len: usize) -> Self {
        Self { bits: vec![false; len], excluded: len }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        let excluded = bits.iter().filter(|&&b| !b).count();
        Self { bits, excluded }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// `N − |X|`.
    pub fn excluded_count(&self) -> usize {
        self.excluded
    }

    /// `|X|`.
    pub fn kept_count(&self) -> usize {
        self.bits.len() - self.excluded
    }

    /// Intersection of two masks.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(Self::from_bits(self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect()))
    }

    /// Zeroes excluded coordinates in place.
    pub fn apply(&self, f: &mut [f64]) {
        for (x, &b) in f.iter_mut().zip(&self.bits) {
            if !b {
                *x = 0.0;
            }
        }
    }
}

/// `⟨f, g⟩ = (1/N) Σ f(n) g(n)`.
pub fn inner(f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: g.len() });
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    Ok(compensated_sum(f.iter().zip(g).map(|(a, b)| a * b)) / f.len() as f64)
}

fn dot(f: &[f64], g: &[f64]) -> f64 {
    f.iter().zip(g).map(|(a, b)| a * b).sum()
}

fn norm(f: &[f64]) -> f64 {
    libm::sqrt(dot(f, f))
}

/// Result of the extreme-eigenvalue probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate {
    /// Rayleigh quotient of the returned Ritz vector; `|value| ≤ ρ(Op)`.
    pub value: f64,
    /// `|Op x − value·x|₂ / |x|₂`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Per-interval Rayleigh quotient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalRayleigh {
    /// First element of the interval.
    pub start: u64,
    /// Last element of the interval.
    pub end: u64,
    /// `⟨f_I, Op f_I⟩ / ⟨f_I, f_I⟩`, zero when `f_I = 0`.
    pub quotient: f64,
    /// `⟨f_I, f_I⟩ / ⟨f, f⟩`.
    pub weight: f64,
}

/// Exclusion statistics for a mask.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskReport {
    pub mask: VertexMask,
    /// Vertices with `ω_P(n) > K·L`.
    pub excluded_omega: usize,
    /// Vertices outside `Y_ℓ`.
    pub excluded_yell: usize,
    /// `N e^{−K L log K} + N/√H0`.
    pub predicted: f64,
}

/// Outcome of one round of the interval extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRound {
    pub intervals: Vec<LocalRayleigh>,
    /// Intervals whose quotient met the threshold and were removed.
    pub extracted: usize,
}

/// The operators on a fixed window and prime set.
#[derive(Debug, Clone, Copy)]
pub struct DiffOperator<'a> {
    window: &'a Window,
    pset: &'a PrimeSet,
}

impl<'a> DiffOperator<'a> {
    pub fn new(window: &'a Window, pset: &'a PrimeSet) -> Self {
        Self { window, pset }
    }

    pub fn window(&self) -> &'a Window {
        self.window
    }

    pub fn pset(&self) -> &'a PrimeSet {
        self.pset
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }

    fn add_gamma(&self, f: &[f64], out: &mut [f64]) {
        let n = self.window.n();
        let len = f.len();
        for &p in self.pset.primes() {
            let p = p as usize;
            if p >= len {
                continue;
            }
            let first = (n + 1).div_ceil(p as u64) * p as u64;
            let mut i = (first - n - 1) as usize;
            while i + p < len {
                out[i] += f[i + p];
                out[i + p] += f[i];
                i += p;
            }
        }
    }

    fn sub_gamma_prime(&self, f: &[f64], out: &mut [f64]) {
        let len = f.len();
        for &p in self.pset.primes() {
            let p = p as usize;
            if p >= len {
                continue;
            }
            let w = 1.0 / p as f64;
            for (o, x) in out[..len - p].iter_mut().zip(&f[p..]) {
                *o -= w * x;
            }
            for (o, x) in out[p..].iter_mut().zip(&f[..len - p]) {
                *o -= w * x;
            }
        }
    }

    /// Applies `Op` (restricted to `mask` if given) to `f`.
    pub fn apply(&self, f: &[f64], which: Which, mask: Option<&VertexMask>) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.len()];
        self.apply_into(f, which, mask, &mut out)?;
        Ok(out)
    }

    /// As [`Self::apply`], writing into `out`.
    pub fn apply_into(&self, f: &[f64], which: Which, mask: Option<&VertexMask>, out: &mut [f64]) -> Result<()> {
        let len = self.len();
        for got in [f.len(), out.len()] {
            if got != len {
                return Err(Error::LengthMismatch { expected: len, got });
            }
        }
        if let Some(m) = mask {
            if m.len() != len {
                return Err(Error::LengthMismatch { expected: len, got: m.len() });
            }
        }
        let masked;
        let f = match mask {
            Some(m) => {
                let mut g = f.to_vec();
                m.apply(&mut g);
                masked = g;
                &masked[..]
            }
            None => f,
        };
        out.iter_mut().for_each(|x| *x = 0.0);
        match which {
            Which::Gamma => self.add_gamma(f, out),
            Which::GammaPrime => {
                self.sub_gamma_prime(f, out);
                out.iter_mut().for_each(|x| *x = -*x);
            }
            Which::A => {
                self.add_gamma(f, out);
                self.sub_gamma_prime(f, out);
            }
        }
        if let Some(m) = mask {
            m.apply(out);
        }
        Ok(())
    }

    /// Weight of the edge `{m, m+p}` under `Op`.
    pub fn edge_weight(which: Which, m: u64, p: u64) -> f64 {
        let divides = m.is_multiple_of(p);
        let g = if divides { 1.0 } else { 0.0 };
        let gp = 1.0 / p as f64;
        match which {
            Which::Gamma => g,
            Which::GammaPrime => gp,
            Which::A => g - gp,
        }
    }

    /// Visits every edge `(i, i+p, weight)` with both ends in the window.
    pub fn for_each_edge<F: FnMut(usize, usize, f64)>(&self, which: Which, mut visit: F) {
        let n = self.window.n();
        let len = self.len();
        for &p in self.pset.primes() {
            let pu = p as usize;
            for i in 0..len.saturating_sub(pu) {
                let w = Self::edge_weight(which, n + 1 + i as u64, p);
                if w != 0.0 {
                    visit(i, i + pu, w);
                }
            }
        }
    }

    /// Dense matrix of `Op` restricted to `mask`.
    pub fn dense_matrix(&self, which: Which, mask: Option<&VertexMask>) -> DMatrix<f64> {
        let len = self.len();
        let mut m = DMatrix::zeros(len, len);
        self.for_each_edge(which, |i, j, w| {
            if mask.is_none_or(|mk| mk.contains(i) && mk.contains(j)) {
                m[(i, j)] += w;
                m[(j, i)] += w;
            }
        });
        m
    }

    /// Largest-magnitude eigenvalue of the dense restricted matrix.
    pub fn dense_extreme_eigenvalue(&self, which: Which, mask: Option<&VertexMask>) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let eig = SymmetricEigen::new(self.dense_matrix(which, mask));
        eig.eigenvalues.iter().copied().fold(0.0, |best, x| if libm::fabs(x) > libm::fabs(best) { x } else { best })
    }

    /// `⟨f, Op f⟩ / ⟨f, f⟩`.
    pub fn rayleigh(&self, f: &[f64], which: Which, mask: Option<&VertexMask>) -> Result<f64> {
        let ff = inner(f, f)?;
        if ff == 0.0 {
            return Err(Error::ZeroVector);
        }
        let g = self.apply(f, which, mask)?;
        Ok(inner(f, &g)? / ff)
    }

    /// Lanczos probe of the spectral radius of `Op` restricted to `mask`.
    ///
    /// The start vector is a seeded random sign vector. The returned value
    /// is the Rayleigh quotient of the final Ritz vector, so it never
    /// exceeds the spectral radius in absolute value.
    pub fn estimate_extreme_eigenvalue(
        &self,
        which: Which,
        mask: Option<&VertexMask>,
        iters: usize,
        tol: f64,
        seed: u64,
    ) -> Result<EigenEstimate> {
        if iters == 0 {
            return Err(Error::InvalidArgument("iters must be >= 1".into()));
        }
        let len = self.len();
        let start = self.start_vector(mask, seed);
        if norm(&start) == 0.0 {
            return Ok(EigenEstimate { value: 0.0, residual: 0.0, converged: true, iterations: 0 });
        }
        let keep_basis = len.saturating_mul(iters.min(len)) <= 1 << 23;
        let iters = iters.min(len);
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut ritz = Vec::new();
        let mut v = start.clone();
        let mut v_prev = vec![0.0; len];
        let mut w = vec![0.0; len];
        let mut beta = 0.0;
        for j in 0..iters {
            if keep_basis {
                basis.push(v.clone());
            }
            self.apply_into(&v, which, mask, &mut w)?;
            for (wi, pi) in w.iter_mut().zip(&v_prev) {
                *wi -= beta * pi;
            }
            let alpha = dot(&w, &v);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= alpha * vi;
            }
            if keep_basis {
                for _ in 0..2 {
                    for b in &basis {
                        let c = dot(&w, b);
                        for (wi, bi) in w.iter_mut().zip(b) {
                            *wi -= c * bi;
                        }
                    }
                }
            }
            alphas.push(alpha);
            let beta_next = norm(&w);
            let last = j + 1 == iters;
            let breakdown = beta_next <= 1e-12 * (1.0 + libm::fabs(alpha));
            if last || breakdown || (j + 1) % 8 == 0 {
                let (theta, s) = extreme_ritz(&alphas, &betas);
                let est = beta_next * libm::fabs(s[s.len() - 1]);
                ritz = s;
                if last || breakdown || est <= tol * libm::fabs(theta).max(1e-300) {
                    break;
                }
            }
            betas.push(beta_next);
            core::mem::swap(&mut v_prev, &mut v);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / beta_next;
            }
            beta = beta_next;
        }
        let steps = ritz.len();
        let x = if keep_basis {
            let mut x = vec![0.0; len];
            for (c, b) in ritz.iter().zip(&basis) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += c * bi;
                }
            }
            x
        } else {
            self.replay_ritz(which, mask, start, &alphas, &betas, &ritz)?
        };
        let y = self.apply(&x, which, mask)?;
        let xx = dot(&x, &x);
        let value = dot(&x, &y) / xx;
        let residual = libm::sqrt(y.iter().zip(&x).map(|(a, b)| (a - value * b) * (a - value * b)).sum::<f64>() / xx);
        Ok(EigenEstimate {
            value,
            residual,
            converged: residual <= tol * libm::fabs(value).max(1e-12),
            iterations: steps,
        })
    }

    fn start_vector(&self, mask: Option<&VertexMask>, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..self.len()).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        if let Some(m) = mask {
            m.apply(&mut v);
        }
        let nv = norm(&v);
        if nv > 0.0 {
            v.iter_mut().for_each(|x| *x /= nv);
        }
        v
    }

    /// Regenerates the Lanczos vectors and accumulates `Σ s_j v_j`.
    fn replay_ritz(
        &self,
        which: Which,
        mask: Option<&VertexMask>,
        start: Vec<f64>,
        alphas: &[f64],
        betas: &[f64],
        s: &[f64],
    ) -> Result<Vec<f64>> {
        let len = self.len();
        let mut x = vec![0.0; len];
        let mut v = start;
        let mut v_prev = vec![0.0; len];
        let mut w = vec![0.0; len];
        let mut beta = 0.0;
        for (j, &c) in s.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&v) {
                *xi += c * vi;
            }
            if j + 1 == s.len() {
                break;
            }
            self.apply_into(&v, which, mask, &mut w)?;
            for ((wi, pi), vi) in w.iter_mut().zip(&v_prev).zip(&v) {
                *wi -= beta * pi + alphas[j] * vi;
            }
            let b = betas[j];
            core::mem::swap(&mut v_prev, &mut v);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / b;
            }
            beta = b;
        }
        Ok(x)
    }

    /// Splits the window into intervals of length `⌈10H/ρ⌉` and returns the
    /// Rayleigh quotient of `f` restricted to each one.
    pub fn extract_local_rayleigh(&self, f: &[f64], rho: f64, which: Which) -> Result<Vec<LocalRayleigh>> {
        self.local_rayleigh_with(f, rho, which, 0, None)
    }

    fn local_rayleigh_with(
        &self,
        f: &[f64],
        rho: f64,
        which: Which,
        offset: usize,
        alive: Option<&[bool]>,
    ) -> Result<Vec<LocalRayleigh>> {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::InvalidArgument("rho must lie in (0, 1]".into()));
        }
        let len = self.len();
        if f.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: f.len() });
        }
        let width = (libm::ceil(10.0 * self.pset.h() as f64 / rho) as usize).max(1);
        let mut cuts = Vec::new();
        if width >= len {
            cuts.push(0);
        } else {
            let offset = offset % width;
            cuts.push(0);
            let mut c = if offset == 0 { width } else { offset };
            while c < len {
                cuts.push(c);
                c += width;
            }
        }
        let block_of = |i: usize| cuts.partition_point(|&c| c <= i) - 1;
        let val = |i: usize| if alive.is_none_or(|a| a[i]) { f[i] } else { 0.0 };
        let mut num = vec![0.0; cuts.len()];
        self.for_each_edge(which, |i, j, w| {
            let b = block_of(i);
            if b == block_of(j) {
                num[b] += 2.0 * w * val(i) * val(j);
            }
        });
        let total = compensated_sum((0..len).map(|i| val(i) * val(i)));
        let first = self.window.first();
        let mut out = Vec::with_capacity(cuts.len());
        for (b, &c) in cuts.iter().enumerate() {
            let end = cuts.get(b + 1).copied().unwrap_or(len);
            let den = compensated_sum((c..end).map(|i| val(i) * val(i)));
            out.push(LocalRayleigh {
                start: first + c as u64,
                end: first + end as u64 - 1,
                quotient: if den > 0.0 { num[b] / den } else { 0.0 },
                weight: if total > 0.0 { den / total } else { 0.0 },
            });
        }
        Ok(out)
    }

    /// Repeated extraction: each round removes the intervals whose local
    /// quotient reaches `threshold` in absolute value and re-partitions the
    /// remainder with a shifted grid. Stops after `max_rounds` or when a
    /// round extracts nothing.
    pub fn extract_rounds(
        &self,
        f: &[f64],
        rho: f64,
        which: Which,
        threshold: f64,
        max_rounds: usize,
    ) -> Result<Vec<ExtractionRound>> {
        let len = self.len();
        let mut alive = vec![true; len];
        let width = (libm::ceil(10.0 * self.pset.h() as f64 / rho) as usize).max(1);
        let mut rounds = Vec::new();
        for r in 0..max_rounds {
            let offset = (r * width / 2) % width.max(1);
            let intervals = self.local_rayleigh_with(f, rho, which, offset, Some(&alive))?;
            let mut extracted = 0;
            for iv in &intervals {
                if iv.weight > 0.0 && libm::fabs(iv.quotient) >= threshold {
                    extracted += 1;
                    let lo = (iv.start - self.window.first()) as usize;
                    let hi = (iv.end - self.window.first()) as usize;
                    alive[lo..=hi].iter_mut().for_each(|a| *a = false);
                }
            }
            rounds.push(ExtractionRound { intervals, extracted });
            if extracted == 0 {
                break;
            }
        }
        Ok(rounds)
    }

    /// `X = {n : ω_P(n) ≤ K·L} ∩ Y_ℓ`.
    pub fn build_mask(&self, big_k: f64, ell: u32) -> Result<MaskReport> {
        if big_k.is_nan() || big_k < 0.0 {
            return Err(Error::InvalidArgument("K must be >= 0".into()));
        }
        let w = self.window;
        let cut = big_k * self.pset.script_l();
        let primes = self.pset.primes();
        let mut bits = vec![true; w.len()];
        let mut excluded_omega = 0;
        let mut excluded_yell = 0;
        let mut scratch = Vec::new();
        for (i, bit) in bits.iter_mut().enumerate() {
            let heavy = w.pdivs_at(i).len() as f64 > cut;
            let m = w.first() as i64 + i as i64;
            let outside = !sieve::is_in_yell_with(
                m,
                ell,
                |x, out: &mut Vec<u64>| {
                    out.clear();
                    if w.contains(x) {
                        out.extend(w.pdivs(x as u64).iter().map(|&p| p as u64));
                    } else {
                        out.extend(primes.iter().copied().filter(|&p| x.rem_euclid(p as i64) == 0));
                    }
                },
                &mut scratch,
            );
            excluded_omega += usize::from(heavy);
            excluded_yell += usize::from(outside);
            *bit = !heavy && !outside;
        }
        let nf = w.len() as f64;
        let klogk = if big_k > 0.0 { big_k * libm::log(big_k) } else { 0.0 };
        let predicted = nf * libm::exp(-klogk * self.pset.script_l()) + nf / libm::sqrt(self.pset.h0() as f64);
        Ok(MaskReport { mask: VertexMask::from_bits(bits), excluded_omega, excluded_yell, predicted })
    }
}

/// Extreme (largest magnitude) eigenpair of the Lanczos tridiagonal.
fn extreme_ritz(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut best = 0;
    for i in 1..m {
        if libm::fabs(eig.eigenvalues[i]) > libm::fabs(eig.eigenvalues[best]) {
            best = i;
        }
    }
    (eig.eigenvalues[best], eig.eigenvectors.column(best).iter().copied().collect())
}
