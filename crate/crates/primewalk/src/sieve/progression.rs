use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_integer::Integer;

use crate::arith::prime_factors;
use crate::error::{Error, Result};

/// The residue class `a mod q` with `q` square-free and `0 ≤ a < q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Progression {
    q: u64,
    a: u64,
}

impl Progression {
    /// All of `ℤ`.
    pub const ALL: Progression = Progression { q: 1, a: 0 };

    /// Canonical `a mod q`; fails unless `q` is positive and square-free.
    pub fn new(a: i64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if prime_factors(q).iter().product::<u64>() != q {
            return Err(Error::NotSquareFree(q));
        }
        Ok(Self { q, a: a.rem_euclid(q as i64) as u64 })
    }

    pub fn residue(&self) -> u64 {
        self.a
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `ω(q)`.
    pub fn omega(&self) -> u32 {
        prime_factors(self.q).len() as u32
    }

    pub fn contains(&self, n: i64) -> bool {
        n.rem_euclid(self.q as i64) as u64 == self.a
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.q.is_multiple_of(other.q) && self.a % other.q == other.a
    }

    /// `self − β`, that is `{n : n + β ∈ self}`.
    pub fn shift(&self, beta: i64) -> Self {
        let q = self.q as i128;
        Self { q: self.q, a: (self.a as i128 - beta as i128).rem_euclid(q) as u64 }
    }

    /// Intersection by CRT; `Ok(None)` when empty.
    pub fn intersect(&self, other: &Self) -> Result<Option<Self>> {
        let (q1, q2) = (self.q as i128, other.q as i128);
        let (a1, a2) = (self.a as i128, other.a as i128);
        let g = q1.gcd(&q2);
        if (a2 - a1) % g != 0 {
            return Ok(None);
        }
        let l = q1 / g * q2;
        if l > u64::MAX as i128 / 4 {
            return Err(Error::Overflow("progression intersection"));
        }
        let m = q2 / g;
        let t = if m == 1 {
            0
        } else {
            let inv = mod_inverse((q1 / g).rem_euclid(m), m);
            ((a2 - a1) / g).rem_euclid(m) * inv % m
        };
        let x = (a1 + q1 * t).rem_euclid(l);
        Ok(Some(Self { q: l as u64, a: x as u64 }))
    }
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let e = a.extended_gcd(&m);
    e.x.rem_euclid(m)
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.a, self.q)
    }
}

impl FromStr for Progression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected \"a mod q\", got {s:?}"));
        let mut it = s.split_whitespace();
        let a: i64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if it.next() != Some("mod") {
            return Err(bad());
        }
        let q: u64 = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        if it.next().is_some() {
            return Err(bad());
        }
        Self::new(a, q)
    }
}

/// One progression per line.
pub fn format_family(family: &[Progression]) -> String {
    let mut s = String::new();
    for p in family {
        s.push_str(&format!("{p}\n"));
    }
    s
}

/// Inverse of [`format_family`]; blank lines are skipped.
pub fn parse_family(text: &str) -> Result<Vec<Progression>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::parse).collect()
}
