//! Shapes `(∼, σ⃗)` of walks of length `2k`, their free-group reduction,
//! the shape graph, revenants and gaps.
//!
//! Indices are 0-based throughout. Classes are numbered by first
//! appearance, so a partition is a restricted growth string.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::PrimeSet;
use crate::coloring::Coloring;
use crate::error::{Error, Result};

/// Relabels `labels` by order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    labels
        .iter()
        .map(|&l| match map.iter().find(|(a, _)| *a == l) {
            Some(&(_, b)) => b,
            None => {
                let b = map.len();
                map.push((l, b));
                b
            }
        })
        .collect()
}

/// A pair `(∼, σ⃗)` with a set of lit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShapeRecord {
    classes: Vec<usize>,
    sigma: Vec<i8>,
    lit: Vec<bool>,
}

impl ShapeRecord {
    /// `classes` may use any labels; they are renumbered by first appearance.
    pub fn new(classes: &[usize], sigma: Vec<i8>, lit: Vec<bool>) -> Result<Self> {
        let n = classes.len();
        for got in [sigma.len(), lit.len()] {
            if got != n {
                return Err(Error::LengthMismatch { expected: n, got });
            }
        }
        if sigma.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(Self { classes: canonical_labels(classes), sigma, lit })
    }

    /// From 1-based blocks, nothing lit.
    pub fn from_blocks(blocks: &[&[usize]], sigma: Vec<i8>) -> Result<Self> {
        let n = sigma.len();
        let mut labels = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            for &i in block.iter() {
                if i == 0 || i > n || labels[i - 1] != usize::MAX {
                    return Err(Error::InvalidArgument("blocks must partition 1..=2k".into()));
                }
                labels[i - 1] = b;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::InvalidArgument("blocks must partition 1..=2k".into()));
        }
        Self::new(&labels, sigma, vec![false; n])
    }

    pub fn with_lit(mut self, lit: Vec<bool>) -> Result<Self> {
        if lit.len() != self.k2() {
            return Err(Error::LengthMismatch { expected: self.k2(), got: lit.len() });
        }
        self.lit = lit;
        Ok(self)
    }

    pub fn k2(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn sigma(&self) -> &[i8] {
        &self.sigma
    }

    pub fn lit(&self) -> &[bool] {
        &self.lit
    }

    /// `|Π|`.
    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.class_count()];
        for &c in &self.classes {
            out[c] += 1;
        }
        out
    }

    /// `|𝒮(∼)|`.
    pub fn singleton_count(&self) -> usize {
        self.class_sizes().iter().filter(|&&s| s == 1).count()
    }

    /// Indices of class `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.k2()).filter(|&i| self.classes[i] == c).collect()
    }
}

/// Result of reducing `x_[1]^{σ₁} ⋯ x_[2k]^{σ_{2k}}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedShape {
    surviving: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    yellow: Vec<bool>,
    word: Vec<(usize, i8)>,
}

impl ReducedShape {
    /// `𝐧`, ascending.
    pub fn surviving(&self) -> &[usize] {
        &self.surviving
    }

    /// Cancelled pairs `(open, close)` in order of cancellation.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn is_yellow(&self, c: usize) -> bool {
        self.yellow[c]
    }

    pub fn yellow(&self) -> &[bool] {
        &self.yellow
    }

    /// The reduced word as `(class, sign)`.
    pub fn word(&self) -> &[(usize, i8)] {
        &self.word
    }

    /// Class labels along the reduced word.
    pub fn labels(&self) -> Vec<usize> {
        self.word.iter().map(|&(c, _)| c).collect()
    }

    pub fn class_count(&self) -> usize {
        self.yellow.len()
    }
}

/// Stack reduction of a word; returns surviving positions and cancelled pairs.
pub fn reduce_word(word: &[(usize, i8)]) -> (Vec<usize>, Vec<(usize, usize)>) {
    let mut stack: Vec<usize> = Vec::new();
    let mut pairs = Vec::new();
    for (i, &(c, s)) in word.iter().enumerate() {
        match stack.last() {
            Some(&j) if word[j].0 == c && word[j].1 == -s => {
                stack.pop();
                pairs.push((j, i));
            }
            _ => stack.push(i),
        }
    }
    (stack, pairs)
}

pub fn reduce_shape(s: &ShapeRecord) -> ReducedShape {
    let word: Vec<(usize, i8)> = s.classes.iter().copied().zip(s.sigma.iter().copied()).collect();
    let (surviving, pairs) = reduce_word(&word);
    let mut yellow = vec![true; s.class_count()];
    for &i in &surviving {
        yellow[s.classes[i]] = false;
    }
    let word = surviving.iter().map(|&i| word[i]).collect();
    ReducedShape { surviving, pairs, yellow, word }
}

/// `𝒢_(∼,σ)` on the non-yellow classes, with its arrows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeGraph {
    vertex: Vec<bool>,
    adj: Vec<Vec<usize>>,
    arrows: Vec<(usize, usize)>,
}

impl ShapeGraph {
    /// Builds a graph on classes `0..n` from explicit vertex flags, edges
    /// and arrows.
    pub fn from_parts(vertex: Vec<bool>, edges: &[(usize, usize)], arrows: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); vertex.len()];
        for &(a, b) in edges {
            if a != b && !adj[a].contains(&b) {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        let mut arrows = arrows;
        arrows.sort_unstable();
        arrows.dedup();
        Self { vertex, adj, arrows }
    }

    /// Number of class slots (vertices are a subset).
    pub fn slots(&self) -> usize {
        self.vertex.len()
    }

    pub fn vertices(&self) -> Vec<usize> {
        (0..self.vertex.len()).filter(|&c| self.vertex[c]).collect()
    }

    pub fn is_vertex(&self, c: usize) -> bool {
        self.vertex[c]
    }

    pub fn neighbors(&self, c: usize) -> &[usize] {
        &self.adj[c]
    }

    pub fn degree(&self, c: usize) -> usize {
        self.adj[c].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn in_degree(&self, c: usize) -> usize {
        self.arrows.iter().filter(|&&(_, b)| b == c).count()
    }

    /// Whether the subgraph induced on `subset` (vertices only) is connected;
    /// an empty subset counts as connected.
    pub fn is_connected_on(&self, subset: &[bool]) -> bool {
        let inside: Vec<usize> = (0..self.vertex.len()).filter(|&c| self.vertex[c] && subset[c]).collect();
        let Some(&first) = inside.first() else { return true };
        let mut seen = vec![false; self.vertex.len()];
        seen[first] = true;
        let mut stack = vec![first];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adj[v] {
                if subset[u] && self.vertex[u] && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == inside.len()
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_on(&vec![true; self.vertex.len()])
    }
}

/// Edges join distinct non-yellow classes with representatives `i₁ < i₂`
/// such that either every class met strictly between them is yellow, or
/// both survive and everything between them cancels. Arrows run between
/// cyclically consecutive letters of the reduced word.
pub fn build_shape_graph(r: &ReducedShape, s: &ShapeRecord) -> ShapeGraph {
    let n = s.class_count();
    let vertex: Vec<bool> = (0..n).map(|c| !r.is_yellow(c)).collect();
    let mut edges = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &c) in s.classes().iter().enumerate() {
        if r.is_yellow(c) {
            continue;
        }
        if let Some(j) = last {
            edges.push((s.classes()[j], c));
        }
        last = Some(i);
    }
    for w in r.surviving().windows(2) {
        edges.push((s.classes()[w[0]], s.classes()[w[1]]));
    }
    let labels = r.labels();
    let len = labels.len();
    let arrows = (0..len).map(|t| (labels[t], labels[(t + 1) % len])).filter(|(a, b)| a != b).collect();
    let g = ShapeGraph::from_parts(vertex, &edges, arrows);
    debug_assert!(g.is_connected());
    g
}

/// Greedy maximum packing of disjoint revenants in a label sequence.
pub fn revenants_in(labels: &[usize]) -> usize {
    let mut count = 0;
    let mut start = 0;
    'next: loop {
        for e in start + 2..labels.len() {
            let c = labels[e];
            if let Some(i) = (start..e).find(|&i| labels[i] == c) {
                if labels[i + 1..e].iter().any(|&d| d != c) {
                    count += 1;
                    start = e;
                    continue 'next;
                }
            }
        }
        return count;
    }
}

/// Disjoint revenants in the reduced word.
pub fn max_disjoint_revenants(r: &ReducedShape) -> usize {
    revenants_in(&r.labels())
}

/// Number of contiguous blocks of each class in a label sequence.
pub fn block_counts(labels: &[usize], classes: usize) -> Vec<usize> {
    let mut out = vec![0; classes];
    for (t, &c) in labels.iter().enumerate() {
        if t == 0 || labels[t - 1] != c {
            out[c] += 1;
        }
    }
    out
}

/// Maximal runs of red letters in the reduced word, read cyclically, as
/// lists of positions in the reduced word.
pub fn gaps(r: &ReducedShape, coloring: &Coloring) -> Result<Vec<Vec<usize>>> {
    let labels = r.labels();
    for &c in &labels {
        if !coloring.is_blue(c) && !coloring.is_red(c) {
            return Err(Error::MissingClass(c));
        }
    }
    let len = labels.len();
    let Some(first_blue) = (0..len).find(|&t| coloring.is_blue(labels[t])) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    for step in 1..=len {
        let t = (first_blue + step) % len;
        if coloring.is_red(labels[t]) {
            cur.push(t);
        } else if !cur.is_empty() {
            out.push(core::mem::take(&mut cur));
        }
    }
    Ok(out)
}

pub fn count_gaps(r: &ReducedShape, coloring: &Coloring) -> Result<usize> {
    Ok(gaps(r, coloring)?.len())
}

/// Gaps in which every class occurs equally often with each sign.
pub fn invalid_gap_count(r: &ReducedShape, coloring: &Coloring) -> Result<usize> {
    let word = r.word();
    let mut count = 0;
    for g in gaps(r, coloring)? {
        let mut bal = vec![0i64; r.class_count()];
        for &t in &g {
            bal[word[t].0] += i64::from(word[t].1);
        }
        count += usize::from(bal.iter().all(|&b| b == 0));
    }
    Ok(count)
}

/// `H0^{−r} (4kr log H / (L log 2))^r L^{|Π|}`.
pub fn shape_contribution_bound(s: &ShapeRecord, rank: usize, h0: f64, h: f64, script_l: f64, k: usize) -> f64 {
    let pi = libm::pow(script_l, s.class_count() as f64);
    if rank == 0 {
        return pi;
    }
    let r = rank as f64;
    let inner = 4.0 * k as f64 * r * libm::log(h) / (script_l * core::f64::consts::LN_2);
    libm::pow(inner / h0, r) * pi
}

/// `L^{−|𝒮(∼)|/2}`.
pub fn singleton_penalty(s: &ShapeRecord, script_l: f64) -> f64 {
    libm::pow(script_l, -(s.singleton_count() as f64) / 2.0)
}

/// Exact sum over assignments of distinct primes to classes, subject to
/// `p_[i] | β_j − β_i` for lit `i < j` in one class, of
/// `Π_{i unlit} 1/p_[i] · Π_{[i] with a lit index} 1/p_[i]`.
pub fn littlestar_sum(s: &ShapeRecord, pset: &PrimeSet, budget: u64) -> Result<f64> {
    let nc = s.class_count();
    let np = pset.len() as u64;
    let work = np.saturating_pow(nc as u32);
    if work > budget {
        return Err(Error::Budget { what: "shape sum", count: work, limit: budget });
    }
    let mut expo = vec![0i32; nc];
    let mut any_lit = vec![false; nc];
    for i in 0..s.k2() {
        let c = s.classes[i];
        if s.lit[i] {
            any_lit[c] = true;
        } else {
            expo[c] += 1;
        }
    }
    for c in 0..nc {
        expo[c] += i32::from(any_lit[c]);
    }
    let mut lit_pairs = Vec::new();
    for i in 0..s.k2() {
        for j in i + 1..s.k2() {
            if s.lit[i] && s.lit[j] && s.classes[i] == s.classes[j] {
                lit_pairs.push((i, j));
            }
        }
    }
    let primes = pset.primes();
    let mut assign = vec![0usize; nc];
    let mut used = vec![false; primes.len()];
    let mut total = 0.0;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        c: usize,
        s: &ShapeRecord,
        primes: &[u64],
        expo: &[i32],
        pairs: &[(usize, usize)],
        assign: &mut [usize],
        used: &mut [bool],
        total: &mut f64,
    ) {
        if c == assign.len() {
            let p = |i: usize| primes[assign[s.classes[i]]] as i64;
            let ok = pairs.iter().all(|&(i, j)| {
                let d: i64 = (i + 1..=j).map(|t| i64::from(s.sigma[t]) * p(t)).sum();
                d % p(i) == 0
            });
            if ok {
                *total += (0..assign.len())
                    .map(|c| libm::pow(primes[assign[c]] as f64, -f64::from(expo[c])))
                    .product::<f64>();
            }
            return;
        }
        for pi in 0..primes.len() {
            if !used[pi] {
                used[pi] = true;
                assign[c] = pi;
                rec(c + 1, s, primes, expo, pairs, assign, used, total);
                used[pi] = false;
            }
        }
    }
    rec(0, s, primes, &expo, &lit_pairs, &mut assign, &mut used, &mut total);
    Ok(total)
}

/// Set partitions of `0..n` as restricted growth strings, in lexicographic
/// order.
#[derive(Debug, Clone)]
pub struct Partitions {
    cur: Vec<usize>,
    max: Vec<usize>,
    done: bool,
}

impl Partitions {
    pub fn new(n: usize) -> Self {
        Self { cur: vec![0; n], max: vec![0; n], done: false }
    }
}

impl Iterator for Partitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let n = self.cur.len();
        // max[i] = max(cur[0..i]) so cur[i] ≤ max[i] + 1
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.cur[i] <= self.max[i] {
                self.cur[i] += 1;
                for j in i + 1..n {
                    self.cur[j] = 0;
                    self.max[j] = self.max[j - 1].max(self.cur[j - 1]);
                }
                break;
            }
        }
        Some(out)
    }
}

/// Restriction on the shapes produced by [`enumerate_shapes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeFilter {
    All,
    /// At most this many singleton classes; `0` means every class has at
    /// least two elements.
    MaxSingletons(usize),
}

/// All `(∼, σ⃗)` with `2k` indices, nothing lit, partitions outermost.
pub fn enumerate_shapes(k: usize, filter: ShapeFilter) -> Result<impl Iterator<Item = ShapeRecord>> {
    if k > 5 {
        return Err(Error::Budget { what: "shape enumeration (k <= 5)", count: k as u64, limit: 5 });
    }
    let n = 2 * k;
    Ok(Partitions::new(n)
        .filter(move |p| match filter {
            ShapeFilter::All => true,
            ShapeFilter::MaxSingletons(m) => {
                let mut sizes = vec![0usize; n + 1];
                for &c in p {
                    sizes[c] += 1;
                }
                sizes.iter().filter(|&&s| s == 1).count() <= m
            }
        })
        .flat_map(move |p| {
            (0..1u32 << n).map(move |bits| {
                let sigma = (0..n).map(|i| if bits >> i & 1 == 1 { -1 } else { 1 }).collect();
                ShapeRecord { classes: p.clone(), sigma, lit: vec![false; n] }
            })
        }))
}
