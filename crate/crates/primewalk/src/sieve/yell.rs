//! Short chains `p₁ | n`, `p₂ | n + β₁`, …, `p_l | n + β_{l−1}` with
//! `β_i = σ₁p₁ + ⋯ + σ_i p_i` and `l < ℓ` that close up early, either
//! through a further prime `p₀ ∈ P` dividing both `n` and `n + β_l`, or
//! through `β_l = 0`. `Y_ℓ` is the set of `n` admitting no such chain.
//!
//! A prime may repeat only as the immediately preceding prime with the
//! same sign.

use alloc::vec;
use alloc::vec::Vec;

use super::Progression;
use crate::arith::PrimeSet;
use crate::error::{Error, Result};

/// How a chain closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Closure {
    /// A prime `p₀` outside the chain dividing `n` and `n + β_l`.
    Witness(u64),
    /// `β_l = 0`.
    Zero,
}

/// One closing chain with the progression of all `n` that admit it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YellChain {
    pub primes: Vec<u64>,
    pub signs: Vec<i8>,
    pub closure: Closure,
    pub progression: Progression,
}

fn may_extend(primes: &[u64], signs: &[i8], p: u64, s: i8) -> bool {
    match (primes.last(), signs.last()) {
        (Some(&q), Some(&t)) if q == p => s == t,
        _ => !primes.contains(&p),
    }
}

/// Every closing chain over `P` with fewer than `ℓ` steps.
pub fn yell_chains(pset: &PrimeSet, ell: u32, budget: u64) -> Result<Vec<YellChain>> {
    let np = pset.len() as u64;
    let est = (2 * np).saturating_pow(ell.saturating_sub(1)).saturating_mul(np.max(1));
    if est > budget {
        return Err(Error::Budget { what: "Y_ell chains", count: est, limit: budget });
    }
    let mut out = Vec::new();
    let mut primes = Vec::new();
    let mut signs = Vec::new();
    chains_rec(pset.primes(), ell as usize, &mut primes, &mut signs, 0, &mut out)?;
    Ok(out)
}

fn chains_rec(
    all: &[u64],
    ell: usize,
    primes: &mut Vec<u64>,
    signs: &mut Vec<i8>,
    beta: i64,
    out: &mut Vec<YellChain>,
) -> Result<()> {
    if !primes.is_empty() {
        let mut base = Progression::new(0, primes[0])?;
        let mut b = 0i64;
        for i in 1..primes.len() {
            b += i64::from(signs[i - 1]) * primes[i - 1] as i64;
            let c = Progression::new(-b, primes[i])?;
            base = base.intersect(&c)?.expect("distinct primes are coprime");
        }
        if beta == 0 {
            out.push(YellChain {
                primes: primes.clone(),
                signs: signs.clone(),
                closure: Closure::Zero,
                progression: base,
            });
        } else {
            for &p0 in all {
                if !primes.contains(&p0) && beta % p0 as i64 == 0 {
                    let r = base.intersect(&Progression::new(0, p0)?)?.expect("coprime moduli");
                    out.push(YellChain {
                        primes: primes.clone(),
                        signs: signs.clone(),
                        closure: Closure::Witness(p0),
                        progression: r,
                    });
                }
            }
        }
    }
    if primes.len() + 1 >= ell {
        return Ok(());
    }
    for &p in all {
        for s in [1i8, -1] {
            if !may_extend(primes, signs, p, s) {
                continue;
            }
            primes.push(p);
            signs.push(s);
            chains_rec(all, ell, primes, signs, beta + i64::from(s) * p as i64, out)?;
            primes.pop();
            signs.pop();
        }
    }
    Ok(())
}

/// The distinct progressions `R − β` over all closing chains `R` and all
/// `β ∈ shifts` (an empty `shifts` means `[0]`), sorted.
pub fn build_yell_conditions(pset: &PrimeSet, ell: u32, shifts: &[i64], budget: u64) -> Result<Vec<Progression>> {
    let chains = yell_chains(pset, ell, budget)?;
    let shifts = if shifts.is_empty() { &[0][..] } else { shifts };
    let mut out: Vec<Progression> =
        shifts.iter().flat_map(|&b| chains.iter().map(move |c| c.progression.shift(b))).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `n ∈ Y_ℓ`, trial-dividing by the primes of `P`.
pub fn is_in_yell(n: i64, pset: &PrimeSet, ell: u32) -> bool {
    let primes = pset.primes();
    let mut scratch = Vec::new();
    is_in_yell_with(
        n,
        ell,
        |x, out: &mut Vec<u64>| {
            out.clear();
            out.extend(primes.iter().copied().filter(|&p| x.rem_euclid(p as i64) == 0));
        },
        &mut scratch,
    )
}

/// `n ∈ Y_ℓ`, with `divisors(x, out)` filling `out` with the primes of `P`
/// dividing `x`.
pub fn is_in_yell_with<F: FnMut(i64, &mut Vec<u64>)>(
    n: i64,
    ell: u32,
    mut divisors: F,
    scratch: &mut Vec<u64>,
) -> bool {
    if ell < 2 {
        return true;
    }
    divisors(n, scratch);
    if scratch.is_empty() {
        return true;
    }
    let d0 = scratch.clone();
    let mut st = Search {
        ell: ell as usize,
        d0: &d0,
        primes: Vec::new(),
        signs: Vec::new(),
        bufs: vec![Vec::new(); ell as usize],
    };
    !st.closes(&mut divisors, n, 0)
}

struct Search<'a> {
    ell: usize,
    d0: &'a [u64],
    primes: Vec<u64>,
    signs: Vec<i8>,
    bufs: Vec<Vec<u64>>,
}

impl Search<'_> {
    /// Whether some extension of the current chain, ending at `x = n + β`,
    /// closes.
    fn closes<F: FnMut(i64, &mut Vec<u64>)>(&mut self, divisors: &mut F, x: i64, beta: i64) -> bool {
        if !self.primes.is_empty() {
            if beta == 0 {
                return true;
            }
            if self.d0.iter().any(|&p0| beta % p0 as i64 == 0 && !self.primes.contains(&p0)) {
                return true;
            }
        }
        let depth = self.primes.len();
        if depth + 1 >= self.ell {
            return false;
        }
        let mut buf = core::mem::take(&mut self.bufs[depth]);
        if depth == 0 {
            buf.clear();
            buf.extend_from_slice(self.d0);
        } else {
            divisors(x, &mut buf);
        }
        let mut found = false;
        'outer: for &p in &buf {
            for s in [1i8, -1] {
                if !may_extend(&self.primes, &self.signs, p, s) {
                    continue;
                }
                let step = i64::from(s) * p as i64;
                self.primes.push(p);
                self.signs.push(s);
                found = self.closes(divisors, x + step, beta + step);
                self.primes.pop();
                self.signs.pop();
                if found {
                    break 'outer;
                }
            }
        }
        self.bufs[depth] = buf;
        found
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::build_prime_set;

    #[test]
    fn ell_two_is_empty() {
        let p = build_prime_set(11, 60).unwrap();
        assert!(build_yell_conditions(&p, 2, &[], 1 << 20).unwrap().is_empty());
        assert!((1..2000).all(|n| is_in_yell(n, &p, 2)));
    }

    #[test]
    fn witness_2002() {
        let p = PrimeSet::from_list(&[11, 13, 31]).unwrap();
        assert!(!is_in_yell(2002, &p, 3));
        let chains = yell_chains(&p, 3, 1 << 20).unwrap();
        let c = chains.iter().find(|c| c.primes == [13, 31] && c.signs == [1, 1]).unwrap();
        assert_eq!(c.closure, Closure::Witness(11));
        assert_eq!(c.progression.modulus(), 11 * 13 * 31);
        let first = (1..).find(|&n| c.progression.contains(n)).unwrap();
        assert_eq!(first, 2002);
    }

    #[test]
    fn coprime_n_is_kept() {
        let p = build_prime_set(11, 60).unwrap();
        assert!(is_in_yell(1, &p, 3));
        assert!(is_in_yell(2 * 3 * 5 * 7, &p, 3));
    }

    #[test]
    fn shifts_translate() {
        let p = PrimeSet::from_list(&[11, 13, 31]).unwrap();
        let base = build_yell_conditions(&p, 3, &[0], 1 << 20).unwrap();
        let moved = build_yell_conditions(&p, 3, &[5], 1 << 20).unwrap();
        assert_eq!(base.len(), moved.len());
        assert!(moved.iter().any(|r| r.contains(1997)));
    }
}
