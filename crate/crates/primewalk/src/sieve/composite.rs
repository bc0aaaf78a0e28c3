use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use super::Progression;
use crate::error::{Error, Result};

/// Both sides of the abstract sieve identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveIdentity {
    /// `Σ_T g(T) (−1)^{|T|}`.
    pub main: i64,
    /// `Σ_{S ∋ min} (−1)^{|S|} (g(S ∖ {min}) − g(S))`.
    pub remainder: i64,
}

impl SieveIdentity {
    pub fn total(&self) -> i64 {
        self.main + self.remainder
    }
}

/// Evaluates the abstract sieve identity for a condition set of `size`
/// elements in a fixed linear order; subsets are bitmasks and bit 0 is the
/// minimum.
pub fn abstract_sieve_identity<G: Fn(u64) -> bool>(size: u32, g: G) -> Result<SieveIdentity> {
    if size > 24 {
        return Err(Error::Budget { what: "abstract sieve", count: 1 << size.min(63), limit: 1 << 24 });
    }
    if !g(0) {
        return Err(Error::GEmptyNotOne);
    }
    let sign = |s: u64| if s.count_ones().is_multiple_of(2) { 1 } else { -1 };
    let mut main = 0;
    let mut remainder = 0;
    for t in 0..1u64 << size {
        if g(t) {
            main += sign(t);
        }
        if t & 1 == 1 {
            remainder += sign(t) * (i64::from(g(t & !1)) - i64::from(g(t)));
        }
    }
    let out = SieveIdentity { main, remainder };
    debug_assert_eq!(out.total(), i64::from(size == 0));
    Ok(out)
}

/// `Σ_{S ⊆ C, ∪S = X} (−1)^{|S|}` with `X = {0, …, x_size − 1}` and each
/// member of `C` a bitmask.
pub fn cross_cut_sum(x_size: u32, c: &[u32]) -> Result<i64> {
    if x_size > 20 {
        return Err(Error::Budget { what: "cross-cut", count: 1 << x_size.min(63), limit: 1 << 20 });
    }
    let full = ((1u64 << x_size) - 1) as u32;
    if c.iter().any(|&s| s & !full != 0) {
        return Err(Error::InvalidArgument("subset outside X".into()));
    }
    // dp[u] = signed count of subcollections with union u
    let mut dp = vec![0i64; 1 << x_size];
    dp[0] = 1;
    for &s in c {
        for u in (0..dp.len()).rev() {
            let v = dp[u];
            if v != 0 {
                dp[u | s as usize] -= v;
            }
        }
    }
    let out = dp[full as usize];
    debug_assert!(out.unsigned_abs() <= 1 << x_size);
    Ok(out)
}

/// A truncated inclusion–exclusion over progressions: `F_𝔇(n) = Σ_R c_R 1_{n∈R}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveApprox {
    family: Vec<Progression>,
    members: Vec<Progression>,
    coeffs: BTreeMap<Progression, i64>,
    boundary: Vec<Progression>,
    outer_boundary: Vec<Progression>,
}

/// Evaluation of both sides and both error terms at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SieveError {
    /// `|1_{n ∉ ∪Q} − F_𝔇(n)|`.
    pub actual: f64,
    /// `Σ_{R ∈ ∂𝔇} 2^{ω(q(R))} 1_{n∈R}`.
    pub inner: f64,
    /// `Σ_{D ∈ ∂_out 𝔇} 3^{ω(q(D))} 1_{n∈D}`.
    pub outer: f64,
}

impl SieveError {
    pub fn holds(&self) -> bool {
        self.actual <= self.inner.min(self.outer)
    }
}

const DEFAULT_BUDGET: u64 = 1 << 24;

/// `𝔇 = {R ∈ Q^∩ : ω(q(R)) ≤ m}`.
pub fn build_fd(family: &[Progression], m: u32) -> Result<SieveApprox> {
    build_approx(family, |r| r.omega() <= m, DEFAULT_BUDGET)
}

/// As [`build_fd`] for an arbitrary ideal; fails unless the ideal is
/// closed under containment within `Q^∩`.
pub fn build_with_ideal<D: Fn(&Progression) -> bool>(
    family: &[Progression],
    ideal: D,
    budget: u64,
) -> Result<SieveApprox> {
    let all = intersection_closure(family, budget)?;
    for r in all.iter().filter(|r| ideal(r)) {
        if all.iter().any(|s| r.is_subset_of(s) && !ideal(s)) {
            return Err(Error::InvalidArgument("ideal is not closed under containment".into()));
        }
    }
    build_approx(family, ideal, budget)
}

/// All non-empty members of `Q^∩`, including `ℤ`.
pub fn intersection_closure(family: &[Progression], budget: u64) -> Result<Vec<Progression>> {
    let mut seen = BTreeSet::new();
    seen.insert(Progression::ALL);
    let mut frontier = vec![Progression::ALL];
    while let Some(r) = frontier.pop() {
        for p in family {
            if let Some(d) = r.intersect(p)? {
                if seen.insert(d) {
                    if seen.len() as u64 > budget {
                        return Err(Error::Budget {
                            what: "intersection closure",
                            count: seen.len() as u64,
                            limit: budget,
                        });
                    }
                    frontier.push(d);
                }
            }
        }
    }
    Ok(seen.into_iter().collect())
}

fn build_approx<D: Fn(&Progression) -> bool>(family: &[Progression], ideal: D, budget: u64) -> Result<SieveApprox> {
    let mut fam = family.to_vec();
    fam.sort();
    fam.dedup();
    let mut coeffs = BTreeMap::new();
    if ideal(&Progression::ALL) {
        coeffs.insert(Progression::ALL, 1i64);
        let mut visited = 0u64;
        let mut stack = vec![(0usize, Progression::ALL, 1i64)];
        while let Some((start, cur, sign)) = stack.pop() {
            for (j, p) in fam.iter().enumerate().skip(start) {
                let Some(r) = cur.intersect(p)? else { continue };
                if !ideal(&r) {
                    continue;
                }
                visited += 1;
                if visited > budget {
                    return Err(Error::Budget { what: "sieve coefficients", count: visited, limit: budget });
                }
                *coeffs.entry(r).or_insert(0) -= sign;
                stack.push((j + 1, r, -sign));
            }
        }
    }
    let members: Vec<Progression> = coeffs.keys().copied().collect();
    for (r, c) in &coeffs {
        assert!(c.unsigned_abs() <= 1u64 << r.omega(), "|c_R| exceeds 2^omega for {r}");
    }
    let mut boundary = Vec::new();
    let mut outer = BTreeSet::new();
    for r in &members {
        let mut on_boundary = false;
        for p in &fam {
            match r.intersect(p)? {
                None => on_boundary = true,
                Some(d) if !ideal(&d) => {
                    on_boundary = true;
                    outer.insert(d);
                }
                Some(_) => {}
            }
        }
        if on_boundary {
            boundary.push(*r);
        }
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(SieveApprox { family: fam, members, coeffs, boundary, outer_boundary: outer.into_iter().collect() })
}

impl SieveApprox {
    /// The deduplicated family `Q`.
    pub fn family(&self) -> &[Progression] {
        &self.family
    }

    /// `𝔇`, every non-empty intersection admitted by the ideal.
    pub fn members(&self) -> &[Progression] {
        &self.members
    }

    /// Non-zero coefficients `c_R`.
    pub fn coeffs(&self) -> &BTreeMap<Progression, i64> {
        &self.coeffs
    }

    /// `∂𝔇`.
    pub fn boundary(&self) -> &[Progression] {
        &self.boundary
    }

    /// `∂_out 𝔇`.
    pub fn outer_boundary(&self) -> &[Progression] {
        &self.outer_boundary
    }

    /// `F_𝔇(n)`.
    pub fn eval(&self, n: i64) -> i64 {
        self.coeffs.iter().filter(|(r, _)| r.contains(n)).map(|(_, c)| c).sum()
    }

    /// `1_{n ∉ ∪Q}`.
    pub fn indicator(&self, n: i64) -> i64 {
        i64::from(!self.family.iter().any(|p| p.contains(n)))
    }

    /// Least common multiple of the family's moduli.
    pub fn period(&self) -> Result<u64> {
        let mut l = Progression::ALL;
        for p in &self.family {
            l = l.intersect(&Progression::new(0, p.modulus())?)?.ok_or(Error::Overflow("period"))?;
        }
        Ok(l.modulus())
    }
}

/// Both boundary sums at `n`, with the actual approximation error.
pub fn sieve_error_bound(approx: &SieveApprox, n: i64) -> SieveError {
    let weigh = |set: &[Progression], base: f64| -> f64 {
        set.iter().filter(|r| r.contains(n)).map(|r| libm::pow(base, f64::from(r.omega()))).sum()
    };
    let out = SieveError {
        actual: (approx.indicator(n) - approx.eval(n)).unsigned_abs() as f64,
        inner: weigh(&approx.boundary, 2.0),
        outer: weigh(&approx.outer_boundary, 3.0),
    };
    debug_assert!(out.holds(), "sieve error bound fails at {n}: {out:?}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(a: i64, q: u64) -> Progression {
        Progression::new(a, q).unwrap()
    }

    #[test]
    fn identity_small_cases() {
        let all = abstract_sieve_identity(3, |_| true).unwrap();
        assert_eq!((all.main, all.remainder), (0, 0));
        let only_empty = abstract_sieve_identity(2, |t| t == 0).unwrap();
        assert_eq!((only_empty.main, only_empty.remainder), (1, -1));
        assert_eq!(abstract_sieve_identity(0, |_| true).unwrap().total(), 1);
        assert_eq!(abstract_sieve_identity(2, |t| t != 0), Err(Error::GEmptyNotOne));
    }

    #[test]
    fn cross_cut_trivial() {
        assert_eq!(cross_cut_sum(1, &[1]).unwrap(), -1);
        assert_eq!(cross_cut_sum(0, &[]).unwrap(), 1);
        assert_eq!(cross_cut_sum(2, &[1, 2, 3]).unwrap(), 1);
    }

    #[test]
    fn full_inclusion_exclusion() {
        let a = build_fd(&[prog(0, 2), prog(0, 3)], 2).unwrap();
        assert_eq!(a.coeffs().get(&prog(0, 6)), Some(&1));
        for n in 0..60 {
            assert_eq!(a.eval(n), i64::from(n % 2 != 0 && n % 3 != 0));
            let e = sieve_error_bound(&a, n);
            assert_eq!((e.actual, e.inner, e.outer), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn omega_one_truncation() {
        let a = build_fd(&[prog(0, 2), prog(0, 3), prog(0, 5)], 1).unwrap();
        assert_eq!(a.members().len(), 4);
        assert_eq!(a.outer_boundary(), &[prog(0, 6), prog(0, 10), prog(0, 15)]);
        for n in 1..=210 {
            assert!(sieve_error_bound(&a, n).holds());
        }
        let e = sieve_error_bound(&a, 30);
        assert_eq!((e.actual, e.inner, e.outer), (2.0, 6.0, 27.0));
    }

    #[test]
    fn rejects_non_closed_ideal() {
        let fam = [prog(0, 2), prog(0, 3)];
        let r = build_with_ideal(&fam, |r| r.modulus() != 2, 1000);
        assert!(r.is_err());
    }
}
