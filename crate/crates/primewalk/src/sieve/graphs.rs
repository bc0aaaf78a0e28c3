//! Sieve graphs: a horizontal path of `2k` edges with threads hanging off
//! its vertices, and an equivalence relation on all edges.
//!
//! Edges are numbered with the horizontal path first, then each thread in
//! order: its body edges, followed by its two witness edges when open.
//! Classes are given as a restricted growth string over that order.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::arith::PrimeSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ThreadKind {
    /// A cycle through its attachment vertex; `Σ σ_y p_[y] = 0`.
    Closed,
    /// A path with two witness edges; `p_w | Σ σ_y p_[y]`.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Thread {
    /// Vertex of the horizontal path, `0..=2k`.
    pub attach: usize,
    pub kind: ThreadKind,
    /// Number of body edges.
    pub len: usize,
}

impl Thread {
    fn edge_count(&self) -> usize {
        self.len + if self.kind == ThreadKind::Open { 2 } else { 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SieveGraph {
    k2: usize,
    threads: Vec<Thread>,
    classes: Vec<usize>,
}

fn is_rgs(labels: &[usize]) -> bool {
    let mut next = 0;
    for &c in labels {
        if c > next {
            return false;
        }
        if c == next {
            next += 1;
        }
    }
    true
}

/// Whether the body positions of one class are connected in a path or cycle.
fn connected_in(positions: &[bool], cyclic: bool) -> bool {
    let len = positions.len();
    let count = positions.iter().filter(|&&b| b).count();
    if count == 0 || count == len {
        return true;
    }
    let starts = (0..len)
        .filter(|&i| positions[i] && if i == 0 { !cyclic || !positions[len - 1] } else { !positions[i - 1] })
        .count();
    starts == 1
}

impl SieveGraph {
    /// Checks edge count, that `classes` is a restricted growth string, and
    /// the structural rules for threads of length `< ell`.
    pub fn new(k2: usize, threads: Vec<Thread>, classes: Vec<usize>, ell: usize) -> Result<Self> {
        let g = Self { k2, threads, classes };
        let want = g.edge_count();
        if g.classes.len() != want {
            return Err(Error::LengthMismatch { expected: want, got: g.classes.len() });
        }
        if !is_rgs(&g.classes) {
            return Err(Error::InvalidArgument("classes must be a restricted growth string".into()));
        }
        if !g.is_valid(ell) {
            return Err(Error::InvalidArgument("thread structure violates the sieve-graph rules".into()));
        }
        Ok(g)
    }

    pub fn k2(&self) -> usize {
        self.k2
    }

    pub fn threads(&self) -> &[Thread] {
        &self.threads
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn edge_count(&self) -> usize {
        self.k2 + self.threads.iter().map(Thread::edge_count).sum::<usize>()
    }

    /// `s`.
    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    /// `r`.
    pub fn thread_count(&self) -> usize {
        self.threads.len()
    }

    /// Body edge range of thread `t`.
    pub fn body(&self, t: usize) -> Range<usize> {
        let start = self.k2 + self.threads[..t].iter().map(Thread::edge_count).sum::<usize>();
        start..start + self.threads[t].len
    }

    /// Witness edges of thread `t`, if open.
    pub fn witnesses(&self, t: usize) -> Option<(usize, usize)> {
        let b = self.body(t);
        (self.threads[t].kind == ThreadKind::Open).then_some((b.end, b.end + 1))
    }

    fn thread_edges(&self, t: usize) -> Range<usize> {
        let b = self.body(t);
        b.start..b.start + self.threads[t].edge_count()
    }

    /// Classes with at least one thread edge.
    pub fn thread_classes(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.classes[self.k2..].to_vec();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of classes not confined to the horizontal path.
    pub fn cost(&self) -> usize {
        self.thread_classes().len()
    }

    /// Witnesses equal to each other and to nothing else in their thread,
    /// each class connected within every thread body, `1 ≤ len < ell` for
    /// open and `2 ≤ len < ell` for closed threads.
    pub fn is_valid(&self, ell: usize) -> bool {
        for (t, th) in self.threads.iter().enumerate() {
            let min = if th.kind == ThreadKind::Closed { 2 } else { 1 };
            if th.len < min || th.len >= ell || th.attach > self.k2 {
                return false;
            }
            let body = &self.classes[self.body(t)];
            if let Some((w1, w2)) = self.witnesses(t) {
                let w = self.classes[w1];
                if self.classes[w2] != w || body.contains(&w) {
                    return false;
                }
            }
            let cyclic = th.kind == ThreadKind::Closed;
            for &c in body {
                let pos: Vec<bool> = body.iter().map(|&d| d == c).collect();
                if !connected_in(&pos, cyclic) {
                    return false;
                }
            }
        }
        true
    }

    fn unique_classes(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        self.classes[self.thread_edges(t)].iter().copied().filter(move |&c| {
            (0..self.threads.len()).filter(|&u| u != t).all(|u| !self.classes[self.thread_edges(u)].contains(&c))
        })
    }

    /// Every thread has a class with no edge in any other thread.
    pub fn is_non_redundant(&self) -> bool {
        (0..self.threads.len()).all(|t| self.unique_classes(t).next().is_some())
    }

    /// As [`Self::is_non_redundant`], with the private class also avoiding
    /// the lit horizontal edges.
    pub fn is_strongly_non_redundant(&self, lit: &[bool]) -> bool {
        (0..self.threads.len()).all(|t| {
            self.unique_classes(t)
                .any(|c| (0..self.k2).all(|i| !(lit.get(i).copied().unwrap_or(false) && self.classes[i] == c)))
        })
    }
}

/// Number of pairs found, grouped by thread count.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EnumerationSummary {
    /// `by_threads[r]` pairs with `r` threads.
    pub by_threads: Vec<usize>,
}

/// All thread kinds and lengths allowed below `ell`, by attachment vertex.
fn thread_types(k2: usize, ell: usize) -> Vec<Thread> {
    let mut out = Vec::new();
    for attach in 0..=k2 {
        for len in 2..ell {
            out.push(Thread { attach, kind: ThreadKind::Closed, len });
        }
        for len in 1..ell {
            out.push(Thread { attach, kind: ThreadKind::Open, len });
        }
    }
    out.sort();
    out
}

/// All non-redundant pairs `(G, ∼)` of cost at most `m`, with threads taken
/// as a sorted multiset and `∼` as a restricted growth string.
pub fn enumerate_sieve_graphs(k: usize, ell: usize, m: usize, budget: usize) -> Result<Vec<SieveGraph>> {
    let k2 = 2 * k;
    let types = thread_types(k2, ell);
    let mut out = Vec::new();
    let mut threads = Vec::new();
    multisets(&types, 0, m, &mut threads, &mut |ths: &[Thread]| {
        let mut e = Labeller::new(k2, ths, m);
        e.run(&mut out, budget)
    })?;
    Ok(out)
}

pub fn summarize(graphs: &[SieveGraph]) -> EnumerationSummary {
    let mut by_threads = Vec::new();
    for g in graphs {
        let r = g.thread_count();
        if by_threads.len() <= r {
            by_threads.resize(r + 1, 0);
        }
        by_threads[r] += 1;
    }
    EnumerationSummary { by_threads }
}

fn multisets<F: FnMut(&[Thread]) -> Result<()>>(
    types: &[Thread],
    from: usize,
    left: usize,
    cur: &mut Vec<Thread>,
    f: &mut F,
) -> Result<()> {
    f(cur)?;
    if left == 0 {
        return Ok(());
    }
    for i in from..types.len() {
        cur.push(types[i]);
        multisets(types, i, left - 1, cur, f)?;
        cur.pop();
    }
    Ok(())
}

/// Depth-first assignment of class labels, edge by edge, pruning on cost
/// and checking each thread as soon as its last edge is labelled.
struct Labeller<'a> {
    k2: usize,
    threads: &'a [Thread],
    m: usize,
    labels: Vec<usize>,
    /// `(thread, is_last_edge)` for each edge beyond the horizontal path.
    owner: Vec<Option<(usize, bool)>>,
    ranges: Vec<Range<usize>>,
}

impl<'a> Labeller<'a> {
    fn new(k2: usize, threads: &'a [Thread], m: usize) -> Self {
        let mut owner = vec![None; k2];
        let mut ranges = Vec::new();
        let mut at = k2;
        for (t, th) in threads.iter().enumerate() {
            let n = th.edge_count();
            ranges.push(at..at + n);
            for j in 0..n {
                owner.push(Some((t, j + 1 == n)));
            }
            at += n;
        }
        Self { k2, threads, m, labels: Vec::new(), owner, ranges }
    }

    fn run(&mut self, out: &mut Vec<SieveGraph>, budget: usize) -> Result<()> {
        self.step(0, out, budget)
    }

    fn thread_cost(&self) -> usize {
        let mut seen: Vec<usize> = self.labels.get(self.k2..).unwrap_or(&[]).to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    fn thread_ok(&self, t: usize) -> bool {
        let r = &self.ranges[t];
        let th = self.threads[t];
        let body = &self.labels[r.start..r.start + th.len];
        if th.kind == ThreadKind::Open {
            let (a, b) = (self.labels[r.end - 2], self.labels[r.end - 1]);
            if a != b || body.contains(&a) {
                return false;
            }
        }
        // each class occupies one run (cyclically for closed threads)
        let mut runs: Vec<usize> = Vec::new();
        for (i, &c) in body.iter().enumerate() {
            if i == 0 || body[i - 1] != c {
                runs.push(c);
            }
        }
        if th.kind == ThreadKind::Closed && runs.len() > 1 && runs.first() == runs.last() {
            runs.pop();
        }
        let mut sorted = runs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == runs.len()
    }

    fn non_redundant(&self) -> bool {
        (0..self.threads.len()).all(|t| {
            self.labels[self.ranges[t].clone()]
                .iter()
                .any(|c| self.ranges.iter().enumerate().all(|(u, r)| u == t || !self.labels[r.clone()].contains(c)))
        })
    }

    fn step(&mut self, i: usize, out: &mut Vec<SieveGraph>, budget: usize) -> Result<()> {
        if i == self.owner.len() {
            if self.non_redundant() {
                if out.len() >= budget {
                    return Err(Error::Budget {
                        what: "sieve graphs",
                        count: out.len() as u64 + 1,
                        limit: budget as u64,
                    });
                }
                out.push(SieveGraph { k2: self.k2, threads: self.threads.to_vec(), classes: self.labels.clone() });
            }
            return Ok(());
        }
        let next = self.labels.iter().max().map_or(0, |x| x + 1);
        for c in 0..=next {
            self.labels.push(c);
            let ok = self.thread_cost() <= self.m
                && match self.owner[i] {
                    Some((t, true)) => self.thread_ok(t),
                    _ => true,
                };
            if ok {
                self.step(i + 1, out, budget)?;
            }
            self.labels.pop();
        }
        Ok(())
    }
}

/// Bound and exact value of a thread sum.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreadSum {
    /// `L^{s−r} (log H/H0)^r`.
    pub bound: f64,
    /// Largest exact sum over the admissible sign patterns.
    pub brute: f64,
    /// Number of sign patterns examined.
    pub sign_patterns: usize,
}

impl ThreadSum {
    pub fn holds(&self, slack: f64) -> bool {
        self.brute <= slack * self.bound
    }
}

/// One body run: a maximal block of equal classes, which carries one sign.
#[derive(Debug, Clone, Copy)]
struct Run {
    class: usize,
    len: i64,
    sign_slot: usize,
}

/// Evaluates `Σ Π 1/p` over assignments of distinct primes of `P` to the
/// classes of `g` satisfying every thread constraint. Unlit horizontal
/// edges contribute `1/p` each; every other class contributes `1/p` once.
pub fn thread_sum_bound(g: &SieveGraph, lit: &[bool], pset: &PrimeSet, budget: u64) -> Result<ThreadSum> {
    if lit.len() != g.k2 {
        return Err(Error::LengthMismatch { expected: g.k2, got: lit.len() });
    }
    let s = g.class_count();
    let r = g.thread_count();
    let l = pset.script_l();
    let logq = libm::log(pset.h() as f64 / pset.h0() as f64);
    let bound = libm::pow(l, (s - r) as f64) * libm::pow(logq, r as f64);

    let mut exponent = vec![0i32; s];
    let mut other = vec![false; s];
    for (i, &c) in g.classes.iter().enumerate() {
        if i < g.k2 && !lit[i] {
            exponent[c] += 1;
        } else {
            other[c] = true;
        }
    }
    for c in 0..s {
        exponent[c] += i32::from(other[c]);
    }

    let tc = g.thread_classes();
    let mut slot_of = vec![usize::MAX; s];
    for (j, &c) in tc.iter().enumerate() {
        slot_of[c] = j;
    }
    let rest: Vec<usize> = (0..s).filter(|&c| slot_of[c] == usize::MAX).collect();

    let mut runs: Vec<Vec<Run>> = Vec::new();
    let mut slots = 0;
    for t in 0..r {
        let body = &g.classes[g.body(t)];
        let mut rs: Vec<Run> = Vec::new();
        for (i, &c) in body.iter().enumerate() {
            if i > 0 && body[i - 1] == c {
                rs.last_mut().expect("run exists").len += 1;
            } else {
                rs.push(Run { class: c, len: 1, sign_slot: slots });
                slots += 1;
            }
        }
        if g.threads[t].kind == ThreadKind::Closed && rs.len() > 1 && rs[0].class == rs[rs.len() - 1].class {
            let last = rs.pop().expect("run exists");
            rs[0].len += last.len;
            slots -= 1;
        }
        runs.push(rs);
    }
    let patterns = 1usize << slots;

    let np = pset.len() as u64;
    let work = np.saturating_pow(tc.len() as u32);
    if work > budget {
        return Err(Error::Budget { what: "thread sum", count: work, limit: budget });
    }

    let primes = pset.primes();
    let mut totals = vec![0.0f64; patterns];
    let mut assign = vec![0usize; tc.len()];
    let mut used = vec![false; primes.len()];
    assign_rec(
        &mut Assign { g, primes, tc: &tc, slot_of: &slot_of, runs: &runs, exponent: &exponent, rest: &rest },
        0,
        &mut assign,
        &mut used,
        &mut totals,
    );
    let brute = totals.iter().copied().fold(0.0, f64::max);
    Ok(ThreadSum { bound, brute, sign_patterns: patterns })
}

struct Assign<'a> {
    g: &'a SieveGraph,
    primes: &'a [u64],
    tc: &'a [usize],
    slot_of: &'a [usize],
    runs: &'a [Vec<Run>],
    exponent: &'a [i32],
    rest: &'a [usize],
}

fn assign_rec(a: &mut Assign<'_>, j: usize, assign: &mut [usize], used: &mut [bool], totals: &mut [f64]) {
    if j < a.tc.len() {
        for pi in 0..a.primes.len() {
            if used[pi] {
                continue;
            }
            used[pi] = true;
            assign[j] = pi;
            assign_rec(a, j + 1, assign, used, totals);
            used[pi] = false;
        }
        return;
    }
    let prime_of = |c: usize| a.primes[assign[a.slot_of[c]]] as i64;
    let mut live: Vec<usize> = Vec::new();
    'pattern: for pat in 0..totals.len() {
        for (t, rs) in a.runs.iter().enumerate() {
            let sum: i64 = rs
                .iter()
                .map(|run| {
                    let sg = if pat >> run.sign_slot & 1 == 1 { -1 } else { 1 };
                    sg * run.len * prime_of(run.class)
                })
                .sum();
            let ok = match a.g.witnesses(t) {
                None => sum == 0,
                Some((w, _)) => sum % prime_of(a.g.classes[w]) == 0,
            };
            if !ok {
                continue 'pattern;
            }
        }
        live.push(pat);
    }
    if live.is_empty() {
        return;
    }
    let mut w = 1.0;
    for &c in a.tc {
        w *= libm::pow(prime_of(c) as f64, -f64::from(a.exponent[c]));
    }
    w *= distinct_product(a.primes, used, a.rest, a.exponent);
    for pat in live {
        totals[pat] += w;
    }
}

/// `Σ Π_c p_c^{−e_c}` over injective assignments of unused primes to `classes`.
fn distinct_product(primes: &[u64], used: &[bool], classes: &[usize], exponent: &[i32]) -> f64 {
    let h = classes.len();
    let mut dp = vec![0.0f64; 1 << h];
    dp[0] = 1.0;
    for (pi, &p) in primes.iter().enumerate() {
        if used[pi] {
            continue;
        }
        for mask in (0..dp.len()).rev() {
            let v = dp[mask];
            if v == 0.0 {
                continue;
            }
            for (j, &c) in classes.iter().enumerate() {
                if mask >> j & 1 == 0 {
                    dp[mask | 1 << j] += v * libm::pow(p as f64, -f64::from(exponent[c]));
                }
            }
        }
    }
    dp[(1 << h) - 1]
}
