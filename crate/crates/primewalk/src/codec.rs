//! Writer–reader encoding of a partition of the surviving indices.
//!
//! Each index gets one of five symbols. `*` opens a new class, `0` repeats
//! the previous class, `1`/`2` name the first or second class already seen
//! next to the previous class, and `·` points back to an explicit earlier
//! index.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::shapes::{canonical_labels, ReducedShape, ShapeRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    New,
    Same,
    First,
    Second,
    Dot,
}

impl Symbol {
    pub fn as_char(self) -> char {
        match self {
            Symbol::New => '*',
            Symbol::Same => '0',
            Symbol::First => '1',
            Symbol::Second => '2',
            Symbol::Dot => '·',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        Some(match c {
            '*' => Symbol::New,
            '0' => Symbol::Same,
            '1' => Symbol::First,
            '2' => Symbol::Second,
            '·' | '.' => Symbol::Dot,
            _ => return None,
        })
    }
}

/// Symbols over the index sequence plus, for every `·`, the smallest
/// earlier position in the same class. Positions are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedPartition {
    pub symbols: Vec<Symbol>,
    pub sideinfo: Vec<(usize, usize)>,
}

impl EncodedPartition {
    pub fn symbol_string(&self) -> String {
        self.symbols.iter().map(|s| s.as_char()).collect()
    }

    pub fn dots(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == Symbol::Dot).count()
    }

    pub fn stars(&self) -> usize {
        self.symbols.iter().filter(|&&s| s == Symbol::New).count()
    }
}

/// `symbols` then `position:index` pairs, 1-based, comma separated.
impl fmt::Display for EncodedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol_string())?;
        for (n, (p, j)) in self.sideinfo.iter().enumerate() {
            write!(f, "{}{}:{}", if n == 0 { ' ' } else { ',' }, p + 1, j + 1)?;
        }
        Ok(())
    }
}

impl FromStr for EncodedPartition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (sym, rest) = s.split_once(' ').unwrap_or((s, ""));
        let mut symbols = Vec::new();
        for (position, c) in sym.chars().enumerate() {
            symbols.push(Symbol::from_char(c).ok_or(Error::Decode { position, reason: "unknown symbol" })?);
        }
        let mut sideinfo = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let bad = Error::Decode { position: sideinfo.len(), reason: "malformed sideinfo" };
            let (p, j) = item.split_once(':').ok_or(bad.clone())?;
            let p: usize = p.trim().parse().map_err(|_| bad.clone())?;
            let j: usize = j.trim().parse().map_err(|_| bad.clone())?;
            if p == 0 || j == 0 {
                return Err(bad);
            }
            sideinfo.push((p - 1, j - 1));
        }
        Ok(Self { symbols, sideinfo })
    }
}

/// Degrees in the graph joining classes of consecutive indices.
pub fn linear_degrees(labels: &[usize]) -> Vec<usize> {
    let n = labels.iter().max().map_or(0, |&m| m + 1);
    let mut nb: Vec<Vec<usize>> = vec![Vec::new(); n];
    for w in labels.windows(2) {
        if w[0] != w[1] {
            for (a, b) in [(w[0], w[1]), (w[1], w[0])] {
                if !nb[a].contains(&b) {
                    nb[a].push(b);
                }
            }
        }
    }
    nb.iter().map(Vec::len).collect()
}

/// Largest number of elements of one class followed by an index outside it.
pub fn kappa_succ(labels: &[usize]) -> usize {
    let n = labels.iter().max().map_or(0, |&m| m + 1);
    let mut count = vec![0usize; n];
    for w in labels.windows(2) {
        if w[0] != w[1] {
            count[w[0]] += 1;
        }
    }
    count.into_iter().max().unwrap_or(0)
}

/// Number of classes of degree ≥ 3 in the consecutive-index graph.
pub fn high_degree_count(labels: &[usize]) -> usize {
    linear_degrees(labels).into_iter().filter(|&d| d >= 3).count()
}

/// `(κ − 1)ν + 2`.
pub fn dot_budget(nu: usize, kappa: usize) -> i64 {
    (kappa as i64 - 1) * nu as i64 + 2
}

/// Classes seen next to each class so far, in order of first appearance.
struct Adjacency {
    seen: Vec<Vec<usize>>,
}

impl Adjacency {
    fn new() -> Self {
        Self { seen: Vec::new() }
    }

    fn note(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let need = a.max(b) + 1;
        if self.seen.len() < need {
            self.seen.resize(need, Vec::new());
        }
        for (x, y) in [(a, b), (b, a)] {
            if !self.seen[x].contains(&y) {
                self.seen[x].push(y);
            }
        }
    }

    fn get(&self, a: usize) -> &[usize] {
        self.seen.get(a).map_or(&[], Vec::as_slice)
    }
}

/// Encodes a label sequence, using degrees from [`linear_degrees`].
pub fn encode_labels(labels: &[usize]) -> EncodedPartition {
    let degrees = linear_degrees(labels);
    let mut symbols = Vec::with_capacity(labels.len());
    let mut sideinfo = Vec::new();
    let mut first: Vec<Option<usize>> = vec![None; degrees.len()];
    let mut adj = Adjacency::new();
    for (i, &c) in labels.iter().enumerate() {
        let sym = if first[c].is_none() {
            Symbol::New
        } else if i > 0 && labels[i - 1] == c {
            Symbol::Same
        } else {
            let prev = labels[i - 1];
            let near = adj.get(prev);
            match near.iter().position(|&d| d == c) {
                Some(0) if degrees[prev] <= 2 => Symbol::First,
                Some(1) if degrees[prev] <= 2 => Symbol::Second,
                _ => Symbol::Dot,
            }
        };
        if sym == Symbol::Dot {
            sideinfo.push((i, first[c].expect("class seen")));
        }
        first[c].get_or_insert(i);
        if i > 0 {
            adj.note(labels[i - 1], c);
        }
        symbols.push(sym);
    }
    EncodedPartition { symbols, sideinfo }
}

/// Encodes the partition of `𝐧` carried by the reduced word.
pub fn encode_partition(r: &ReducedShape) -> EncodedPartition {
    encode_labels(&r.labels())
}

/// Reconstructs canonical labels (classes numbered by first appearance).
pub fn decode_partition(e: &EncodedPartition) -> Result<Vec<usize>> {
    let mut labels: Vec<usize> = Vec::with_capacity(e.symbols.len());
    let mut classes = 0;
    let mut adj = Adjacency::new();
    let mut side = e.sideinfo.iter();
    for (i, &sym) in e.symbols.iter().enumerate() {
        let err = |reason| Error::Decode { position: i, reason };
        let c = match sym {
            Symbol::New => {
                classes += 1;
                classes - 1
            }
            Symbol::Same => *labels.last().ok_or(err("'0' at the first index"))?,
            Symbol::First | Symbol::Second => {
                let prev = *labels.last().ok_or(err("'1'/'2' at the first index"))?;
                let k = usize::from(sym == Symbol::Second);
                *adj.get(prev).get(k).ok_or(err("no such class seen next to the previous one"))?
            }
            Symbol::Dot => {
                let &(p, j) = side.next().ok_or(err("missing sideinfo"))?;
                if p != i || j >= i {
                    return Err(err("sideinfo does not point to an earlier index"));
                }
                labels[j]
            }
        };
        if let Some(&prev) = labels.last() {
            adj.note(prev, c);
        }
        labels.push(c);
    }
    if side.next().is_some() {
        return Err(Error::Decode { position: e.symbols.len(), reason: "unused sideinfo" });
    }
    Ok(labels)
}

/// How an opening parenthesis names its class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YellowRef {
    /// Not seen at any earlier index.
    New,
    /// 1-based number among the classes with a lit earlier index `i` such
    /// that `p_i` divides `σ_i p_i + ⋯ + σ_{j−1} p_{j−1}`.
    Number(usize),
    /// Smallest earlier index of the class.
    Explicit(usize),
}

/// Encoding of a whole walk shape given its primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkEncoding {
    pub survivors: EncodedPartition,
    /// For each `*` in `survivors`, the smallest earlier cancelled index in
    /// the same class, if any.
    pub star_links: Vec<Option<usize>>,
    /// One entry per opening parenthesis, left to right.
    pub yellow_refs: Vec<YellowRef>,
    /// Largest candidate list met while numbering.
    pub max_candidates: usize,
}

fn candidates(labels: &[usize], j: usize, sigma: &[i8], lit: &[bool], primes: &[u64]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut partial = 0i128;
    let mut sums = vec![0i128; j];
    for i in (0..j).rev() {
        partial += i128::from(sigma[i]) * primes[i] as i128;
        sums[i] = partial;
    }
    for i in 0..j {
        if lit[i] && sums[i].rem_euclid(primes[i] as i128) == 0 && !out.contains(&labels[i]) {
            out.push(labels[i]);
        }
    }
    out
}

fn check_walk(s: &ShapeRecord, primes: &[u64]) -> Result<()> {
    if primes.len() != s.k2() {
        return Err(Error::LengthMismatch { expected: s.k2(), got: primes.len() });
    }
    for i in 0..s.k2() {
        for j in 0..s.k2() {
            if (s.classes()[i] == s.classes()[j]) != (primes[i] == primes[j]) {
                return Err(Error::InvalidArgument("primes must be equal exactly on classes".into()));
            }
        }
    }
    Ok(())
}

/// Encodes a shape, naming the classes of opening parentheses through
/// numbers among divisibility-forced candidates where possible.
pub fn encode_walk(s: &ShapeRecord, primes: &[u64]) -> Result<WalkEncoding> {
    check_walk(s, primes)?;
    let r = crate::shapes::reduce_shape(s);
    let survivors = encode_partition(&r);
    let labels = s.classes();
    let mut open = vec![false; s.k2()];
    for &(o, _) in r.pairs() {
        open[o] = true;
    }
    let earliest = |c: usize, before: usize| (0..before).find(|&i| labels[i] == c);
    let mut star_links = Vec::new();
    for (t, &i) in r.surviving().iter().enumerate() {
        if survivors.symbols[t] == Symbol::New {
            star_links.push(earliest(labels[i], i));
        }
    }
    let mut yellow_refs = Vec::new();
    let mut max_candidates = 0;
    for j in (0..s.k2()).filter(|&j| open[j]) {
        let c = labels[j];
        let Some(e) = earliest(c, j) else {
            yellow_refs.push(YellowRef::New);
            continue;
        };
        let cands = candidates(labels, j, s.sigma(), s.lit(), primes);
        max_candidates = max_candidates.max(cands.len());
        yellow_refs.push(match cands.iter().position(|&d| d == c) {
            Some(n) => YellowRef::Number(n + 1),
            None => YellowRef::Explicit(e),
        });
    }
    Ok(WalkEncoding { survivors, star_links, yellow_refs, max_candidates })
}

/// Inverse of [`encode_walk`]; the reader knows signs, lit flags, primes
/// and the parenthesis structure. Returns canonical labels.
pub fn decode_walk(e: &WalkEncoding, sigma: &[i8], lit: &[bool], primes: &[u64]) -> Result<Vec<usize>> {
    let k2 = sigma.len();
    if lit.len() != k2 || primes.len() != k2 {
        return Err(Error::LengthMismatch { expected: k2, got: lit.len().min(primes.len()) });
    }
    // the parenthesis structure follows from signs and primes
    let word: Vec<(usize, i8)> = primes.iter().zip(sigma).map(|(&p, &s)| (p as usize, s)).collect();
    let (surviving, pairs) = crate::shapes::reduce_word(&word);
    let local = decode_partition(&e.survivors)?;
    if local.len() != surviving.len() {
        return Err(Error::Decode { position: local.len(), reason: "survivor count mismatch" });
    }
    let mut closes = vec![None; k2];
    let mut open = vec![false; k2];
    for &(o, c) in &pairs {
        closes[c] = Some(o);
        open[o] = true;
    }
    let mut labels: Vec<usize> = Vec::with_capacity(k2);
    let mut global: Vec<Option<usize>> = vec![None; e.survivors.stars()];
    let mut classes = 0;
    let mut links = e.star_links.iter();
    let mut refs = e.yellow_refs.iter();
    let mut t = 0;
    for j in 0..k2 {
        let err = |reason| Error::Decode { position: j, reason };
        let c = if let Some(o) = closes[j] {
            labels[o]
        } else if open[j] {
            match refs.next().ok_or(err("missing yellow reference"))? {
                YellowRef::New => {
                    classes += 1;
                    classes - 1
                }
                YellowRef::Number(n) => {
                    let cands = candidates(&labels, j, sigma, lit, primes);
                    *cands.get(n.wrapping_sub(1)).ok_or(err("candidate number out of range"))?
                }
                YellowRef::Explicit(i) => {
                    *labels.get(*i).filter(|_| *i < j).ok_or(err("explicit index not earlier"))?
                }
            }
        } else {
            let lc = local[t];
            t += 1;
            match global[lc] {
                Some(g) => g,
                None => {
                    let g = match links.next().ok_or(err("missing star link"))? {
                        Some(i) => *labels.get(*i).filter(|_| *i < j).ok_or(err("star link not earlier"))?,
                        None => {
                            classes += 1;
                            classes - 1
                        }
                    };
                    global[lc] = Some(g);
                    g
                }
            }
        };
        labels.push(c);
    }
    Ok(canonical_labels(&labels))
}
