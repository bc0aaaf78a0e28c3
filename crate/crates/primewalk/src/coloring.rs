//! Choosing blue and red classes: leafy spanning trees, the in-degree
//! selection, the sparse-column rank bound and the `dim W` pipeline.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::rank_i64;
use crate::shapes::{gaps, ReducedShape, ShapeGraph, ShapeRecord};

/// Blue and red classes; everything else is yellow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    blue: Vec<bool>,
    red: Vec<bool>,
}

impl Coloring {
    pub fn new(blue: Vec<bool>, red: Vec<bool>) -> Result<Self> {
        if blue.len() != red.len() {
            return Err(Error::LengthMismatch { expected: blue.len(), got: red.len() });
        }
        if blue.iter().zip(&red).any(|(b, r)| *b && *r) {
            return Err(Error::InvalidArgument("a class cannot be both blue and red".into()));
        }
        Ok(Self { blue, red })
    }

    /// `blue` as given; every other non-yellow class red.
    pub fn from_blue(r: &ReducedShape, blue: &[usize]) -> Self {
        let n = r.class_count();
        let mut b = vec![false; n];
        for &c in blue {
            b[c] = true;
        }
        let red = (0..n).map(|c| !b[c] && !r.is_yellow(c)).collect();
        let blue = (0..n).map(|c| b[c] && !r.is_yellow(c)).collect();
        Self { blue, red }
    }

    pub fn is_blue(&self, c: usize) -> bool {
        self.blue.get(c).copied().unwrap_or(false)
    }

    pub fn is_red(&self, c: usize) -> bool {
        self.red.get(c).copied().unwrap_or(false)
    }

    pub fn blue(&self) -> &[bool] {
        &self.blue
    }

    pub fn red(&self) -> &[bool] {
        &self.red
    }

    pub fn red_classes(&self) -> Vec<usize> {
        (0..self.red.len()).filter(|&c| self.red[c]).collect()
    }

    pub fn blue_classes(&self) -> Vec<usize> {
        (0..self.blue.len()).filter(|&c| self.blue[c]).collect()
    }
}

/// A spanning tree on vertices `0..n` given by parent pointers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanningTree {
    pub parent: Vec<Option<usize>>,
}

impl SpanningTree {
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|p| (p, v))).collect()
    }

    /// Vertices of tree degree 1.
    pub fn leaves(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.parent.len()];
        for (a, b) in self.edges() {
            deg[a] += 1;
            deg[b] += 1;
        }
        (0..deg.len()).filter(|&v| deg[v] == 1).collect()
    }
}

fn is_connected(adj: &[Vec<usize>], inside: &[bool]) -> bool {
    let Some(s) = (0..adj.len()).find(|&v| inside[v]) else { return true };
    let mut seen = vec![false; adj.len()];
    seen[s] = true;
    let mut stack = vec![s];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if inside[u] && !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    (0..adj.len()).all(|v| !inside[v] || seen[v])
}

fn greedy_from(adj: &[Vec<usize>], start: usize) -> SpanningTree {
    let n = adj.len();
    let mut parent = vec![None; n];
    let mut inside = vec![false; n];
    inside[start] = true;
    let mut count = 1;
    let outside_nbrs =
        |v: usize, inside: &[bool]| -> Vec<usize> { adj[v].iter().copied().filter(|&u| !inside[u]).collect() };
    while count < n {
        // (vertex, via, gain): expand `vertex` (reached through `via`)
        let mut best: Option<(usize, Option<usize>, usize)> = None;
        for x in (0..n).filter(|&x| inside[x]) {
            let out = outside_nbrs(x, &inside);
            if out.len() >= 2 && best.is_none_or(|b| out.len() > b.2) {
                best = Some((x, None, out.len()));
            }
            if out.len() == 1 {
                let y = out[0];
                let further = adj[y].iter().filter(|&&u| !inside[u] && u != y).count();
                if further >= 2 && best.is_none_or(|b| further > b.2) {
                    best = Some((y, Some(x), further));
                }
            }
        }
        let (v, via) = match best {
            Some((v, via, _)) => (v, via),
            None => {
                // attach the outside vertex with the most outside neighbours
                let mut pick = None;
                for x in (0..n).filter(|&x| inside[x]) {
                    for y in outside_nbrs(x, &inside) {
                        let f = outside_nbrs(y, &inside).len();
                        if pick.is_none_or(|(_, _, g)| f > g) {
                            pick = Some((y, x, f));
                        }
                    }
                }
                let (y, x, _) = pick.expect("graph is connected");
                (y, Some(x))
            }
        };
        if let Some(x) = via {
            parent[v] = Some(x);
            inside[v] = true;
            count += 1;
        }
        for u in outside_nbrs(v, &inside) {
            parent[u] = Some(v);
            inside[u] = true;
            count += 1;
        }
    }
    SpanningTree { parent }
}

/// Maximum-leaf spanning tree by exhaustive search over connected
/// dominating sets; `n ≤ 20`.
pub fn max_leaf_tree_exact(adj: &[Vec<usize>]) -> Result<SpanningTree> {
    let n = adj.len();
    if n > 20 {
        return Err(Error::Budget { what: "exact max-leaf tree", count: n as u64, limit: 20 });
    }
    if !is_connected(adj, &vec![true; n]) {
        return Err(Error::Disconnected);
    }
    if n <= 2 {
        return Ok(greedy_from(adj, 0));
    }
    let mut best: Option<u32> = None;
    for mask in 1u32..1 << n {
        if best.is_some_and(|b| mask.count_ones() >= b.count_ones()) {
            continue;
        }
        let inside: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let dominates = (0..n).all(|v| inside[v] || adj[v].iter().any(|&u| inside[u]));
        if dominates && is_connected(adj, &inside) {
            best = Some(mask);
        }
    }
    let mask = best.expect("the full vertex set dominates");
    let inside: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
    let root = (0..n).find(|&v| inside[v]).expect("non-empty");
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if inside[u] && !seen[u] {
                seen[u] = true;
                parent[u] = Some(v);
                stack.push(u);
            }
        }
    }
    for v in (0..n).filter(|&v| !inside[v]) {
        parent[v] = adj[v].iter().copied().find(|&u| inside[u]);
    }
    Ok(SpanningTree { parent })
}

/// A spanning tree with many leaves: the best greedy tree over all start
/// vertices, replaced by an exact search when it misses `n₃/4 + 2`
/// (`n₃` the number of vertices of degree ≥ 3) and the graph is small.
pub fn spanning_tree_many_leaves(adj: &[Vec<usize>]) -> Result<SpanningTree> {
    let n = adj.len();
    if n == 0 {
        return Ok(SpanningTree { parent: Vec::new() });
    }
    if !is_connected(adj, &vec![true; n]) {
        return Err(Error::Disconnected);
    }
    let mut best = greedy_from(adj, 0);
    let mut leaves = best.leaves().len();
    for s in 1..n {
        let t = greedy_from(adj, s);
        let l = t.leaves().len();
        if l > leaves {
            best = t;
            leaves = l;
        }
    }
    let n3 = adj.iter().filter(|a| a.len() >= 3).count();
    if n3 > 0 && (leaves as f64) < n3 as f64 / 4.0 + 2.0 && n <= 20 {
        best = max_leaf_tree_exact(adj)?;
    }
    Ok(best)
}

/// For `v ∈ S`, keeps one incoming arrow (preferring a tail outside `S`),
/// properly 3-colours the kept arrows inside `S` and returns the largest
/// colour class. Every vertex listed must have an incoming arrow.
pub fn select_independent_boundary(vertices: &[usize], arrows: &[(usize, usize)], s: &[usize]) -> Result<Vec<usize>> {
    for &v in vertices {
        if !arrows.iter().any(|&(a, b)| b == v && a != v) {
            return Err(Error::ZeroInDegree(v));
        }
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut s_sorted = s.to_vec();
    s_sorted.sort_unstable();
    s_sorted.dedup();
    let in_s = |v: usize| s_sorted.binary_search(&v).is_ok();
    let pos = |v: usize| s_sorted.binary_search(&v).expect("member of S");
    let m = s_sorted.len();
    // pred[i]: position in S of the kept tail, if that tail lies in S
    let mut pred: Vec<Option<usize>> = vec![None; m];
    for (i, &v) in s_sorted.iter().enumerate() {
        let tails: Vec<usize> = arrows.iter().filter(|&&(a, b)| b == v && a != v).map(|&(a, _)| a).collect();
        if tails.is_empty() {
            return Err(Error::ZeroInDegree(v));
        }
        pred[i] = match tails.iter().find(|&&a| !in_s(a)) {
            Some(_) => None,
            None => Some(pos(*tails.iter().min().expect("non-empty"))),
        };
    }
    let mut colour: Vec<Option<u8>> = vec![None; m];
    // cycles of the kept-arrow map
    let mut state = vec![0u8; m];
    for start in 0..m {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut v = start;
        loop {
            if state[v] != 0 {
                if state[v] == 1 {
                    let at = path.iter().position(|&x| x == v).expect("on path");
                    let mut cyc: Vec<usize> = path[at..].to_vec();
                    cyc.reverse(); // now cyc[j+1] is the successor of cyc[j]
                    let r = cyc.iter().enumerate().min_by_key(|(_, &x)| x).map(|(j, _)| j).expect("non-empty");
                    cyc.rotate_left(r);
                    let len = cyc.len();
                    for (j, &x) in cyc.iter().enumerate() {
                        colour[x] = Some((j % 2) as u8);
                    }
                    if len % 2 == 1 {
                        colour[cyc[len - 1]] = Some(2);
                    }
                }
                break;
            }
            state[v] = 1;
            path.push(v);
            match pred[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        for &x in &path {
            state[x] = 2;
        }
    }
    fn tree_colour(v: usize, pred: &[Option<usize>], colour: &mut [Option<u8>]) -> u8 {
        if let Some(c) = colour[v] {
            return c;
        }
        let c = match pred[v] {
            None => 0,
            Some(p) => match tree_colour(p, pred, colour) {
                0 => 1,
                _ => 0,
            },
        };
        colour[v] = Some(c);
        c
    }
    for v in 0..m {
        tree_colour(v, &pred, &mut colour);
    }
    let class = |c: u8| -> Vec<usize> { (0..m).filter(|&i| colour[i] == Some(c)).map(|i| s_sorted[i]).collect() };
    let mut best = class(1);
    for c in [0u8, 2] {
        let cand = class(c);
        if cand.len() > best.len() {
            best = cand;
        }
    }
    debug_assert!(3 * best.len() >= m);
    debug_assert!(best.iter().all(|&v| arrows.iter().any(|&(a, b)| b == v && a != v && !best.contains(&a))));
    Ok(best)
}

/// Exact rank and the greedy column certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub columns: Vec<usize>,
}

/// For a matrix whose rows are all non-zero and whose columns have at most
/// `kappa` non-zero entries: greedily picks columns covering fresh rows,
/// giving `rank ≥ |S| ≥ rows/κ`.
pub fn rank_lower_bound(a: &[Vec<i64>], kappa: usize) -> Result<RankCertificate> {
    let cols = a.iter().map(Vec::len).max().unwrap_or(0);
    for (i, row) in a.iter().enumerate() {
        if row.iter().all(|&x| x == 0) {
            return Err(Error::ZeroRow(i));
        }
    }
    for j in 0..cols {
        let count = a.iter().filter(|r| r.get(j).copied().unwrap_or(0) != 0).count();
        if count > kappa {
            return Err(Error::ColumnTooDense { column: j, count, kappa });
        }
    }
    let entry = |i: usize, j: usize| a[i].get(j).copied().unwrap_or(0);
    let mut columns: Vec<usize> = Vec::new();
    while let Some(i) = (0..a.len()).find(|&i| columns.iter().all(|&j| entry(i, j) == 0)) {
        let j = (0..cols).find(|&j| entry(i, j) != 0).expect("row is non-zero");
        columns.push(j);
    }
    let rank = rank_i64(a);
    debug_assert!(rank >= columns.len() && kappa * columns.len() >= a.len());
    Ok(RankCertificate { rank, columns })
}

/// `v(i) = Σ_{j<i, [j] red} σ_j x_[j]` for `i = 0..=2k`, as coefficient
/// vectors over the red classes.
pub fn v_vectors(s: &ShapeRecord, c: &Coloring) -> Vec<Vec<i64>> {
    let red = c.red_classes();
    let col = |cls: usize| red.iter().position(|&r| r == cls);
    let mut cur = vec![0i64; red.len()];
    let mut out = Vec::with_capacity(s.k2() + 1);
    for i in 0..s.k2() {
        out.push(cur.clone());
        if let Some(j) = col(s.classes()[i]) {
            cur[j] += i64::from(s.sigma()[i]);
        }
    }
    out.push(cur);
    out
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rows `v(i₂) − v(i₁)` with `[i₁] = [i₂]` blue; with `lit_only`, both
/// indices lit.
pub fn same_class_rows(s: &ShapeRecord, c: &Coloring, lit_only: bool) -> Vec<Vec<i64>> {
    let v = v_vectors(s, c);
    let mut rows = Vec::new();
    for i in 0..s.k2() {
        for j in i + 1..s.k2() {
            let cls = s.classes()[i];
            if cls == s.classes()[j] && c.is_blue(cls) && (!lit_only || (s.lit()[i] && s.lit()[j])) {
                rows.push(diff(&v[j], &v[i]));
            }
        }
    }
    rows
}

/// Rows `v(i₂) − v(i₁)` with `[i₁]`, `[i₂]` both blue.
pub fn all_blue_rows(s: &ShapeRecord, c: &Coloring) -> Vec<Vec<i64>> {
    let v = v_vectors(s, c);
    let blue: Vec<usize> = (0..s.k2()).filter(|&i| c.is_blue(s.classes()[i])).collect();
    let mut rows = Vec::new();
    for (a, &i) in blue.iter().enumerate() {
        for &j in &blue[a + 1..] {
            rows.push(diff(&v[j], &v[i]));
        }
    }
    rows
}

/// `(dim V, dim W)` by exact rank.
pub fn span_dims(s: &ShapeRecord, c: &Coloring) -> (usize, usize) {
    (rank_i64(&same_class_rows(s, c, false)), rank_i64(&all_blue_rows(s, c)))
}

/// Outcome of [`pick_coloring`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringChoice {
    pub coloring: Coloring,
    /// Leaves of the spanning tree, as classes.
    pub leaves: Vec<usize>,
    /// Vertices of degree ≥ 3.
    pub high_degree: usize,
    pub gaps: usize,
    /// `𝒢|blue` is connected.
    pub blue_connected: bool,
    /// `gaps ≥ (n₃/4 + 2)/3`, or `n₃ = 0`.
    pub gap_bound_holds: bool,
}

/// Spanning tree, its leaves `S`, then `red = S′` from
/// [`select_independent_boundary`] and `blue` the remaining vertices.
pub fn pick_coloring(r: &ReducedShape, g: &ShapeGraph) -> Result<ColoringChoice> {
    let verts = g.vertices();
    let n = g.slots();
    let high_degree = verts.iter().filter(|&&v| g.degree(v) >= 3).count();
    let (leaves, red_set) = if verts.len() <= 1 {
        (Vec::new(), Vec::new())
    } else {
        let idx = |c: usize| verts.binary_search(&c).expect("vertex");
        let adj: Vec<Vec<usize>> = verts.iter().map(|&v| g.neighbors(v).iter().map(|&u| idx(u)).collect()).collect();
        let tree = spanning_tree_many_leaves(&adj)?;
        let leaves: Vec<usize> = tree.leaves().into_iter().map(|i| verts[i]).collect();
        let red = select_independent_boundary(&verts, g.arrows(), &leaves)?;
        (leaves, red)
    };
    let mut blue = vec![false; n];
    let mut red = vec![false; n];
    for &v in &verts {
        blue[v] = true;
    }
    for &v in &red_set {
        blue[v] = false;
        red[v] = true;
    }
    let coloring = Coloring::new(blue, red)?;
    let gap_count = gaps(r, &coloring)?.len();
    let blue_connected = g.is_connected_on(coloring.blue());
    let gap_bound_holds = high_degree == 0 || 3.0 * gap_count as f64 >= high_degree as f64 / 4.0 + 2.0;
    Ok(ColoringChoice { coloring, leaves, high_degree, gaps: gap_count, blue_connected, gap_bound_holds })
}

/// Outcome of [`dim_w_lower_bound`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimWBound {
    /// Gaps between blue chunks.
    pub gaps: usize,
    /// Gaps whose red letters all balance.
    pub invalid: usize,
    /// Greedy certificate size on the valid-gap matrix.
    pub certificate: usize,
    /// Certified lower bound on `dim W`.
    pub bound: usize,
    /// Exact `dim V`.
    pub exact: usize,
}

/// Builds the gap × red-class matrix of signed occurrence counts, drops the
/// balanced rows and certifies a rank via [`rank_lower_bound`]. Columns are
/// allowed `κ + 1` non-zeros, the most blocks a class can form with at
/// most `κ` disjoint revenants. The cyclic wrap-around gap differs from a
/// difference `v(i₁) − v(i_t)` by the total red content, so it costs one
/// from the bound when present.
pub fn dim_w_lower_bound(s: &ShapeRecord, r: &ReducedShape, c: &Coloring, kappa: usize) -> Result<DimWBound> {
    let red = c.red_classes();
    let word = r.word();
    let gs = gaps(r, c)?;
    let first_blue = word.iter().position(|&(cl, _)| c.is_blue(cl));
    let last_blue = word.iter().rposition(|&(cl, _)| c.is_blue(cl));
    let mut rows = Vec::new();
    let mut wrap_valid = false;
    for g in &gs {
        let mut row = vec![0i64; red.len()];
        for &t in g {
            let j = red.iter().position(|&x| x == word[t].0).expect("red letter");
            row[j] += i64::from(word[t].1);
        }
        if row.iter().any(|&x| x != 0) {
            let wraps = first_blue.zip(last_blue).is_some_and(|(f, l)| g.iter().any(|&t| t < f || t > l));
            wrap_valid |= wraps;
            rows.push(row);
        }
    }
    let invalid = gs.len() - rows.len();
    let cert = rank_lower_bound(&rows, kappa + 1)?;
    let certificate = cert.columns.len();
    let bound = certificate.saturating_sub(usize::from(wrap_valid));
    let exact = span_dims(s, c).0;
    Ok(DimWBound { gaps: gs.len(), invalid, certificate, bound, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{build_shape_graph, reduce_shape};

    fn complete(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect()
    }

    #[test]
    fn k4_star() {
        let t = spanning_tree_many_leaves(&complete(4)).unwrap();
        assert_eq!(t.leaves().len(), 3);
    }

    #[test]
    fn cycle_path() {
        let c6: Vec<Vec<usize>> = (0..6).map(|v| vec![(v + 5) % 6, (v + 1) % 6]).collect();
        let t = spanning_tree_many_leaves(&c6).unwrap();
        assert_eq!(t.edges().len(), 5);
        assert_eq!(t.leaves().len(), 2);
    }

    #[test]
    fn disconnected_rejected() {
        let g = vec![vec![1], vec![0], vec![]];
        assert_eq!(spanning_tree_many_leaves(&g), Err(Error::Disconnected));
    }

    #[test]
    fn four_cycle_selection() {
        let arrows = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let s = select_independent_boundary(&[0, 1, 2, 3], &arrows, &[0, 1, 2, 3]).unwrap();
        assert_eq!(s, [1, 3]);
        assert!(select_independent_boundary(&[0, 1, 2, 3], &arrows, &[]).unwrap().is_empty());
        assert_eq!(select_independent_boundary(&[0, 1], &[(0, 1)], &[1]), Err(Error::ZeroInDegree(0)));
    }

    #[test]
    fn rank_bound_examples() {
        let id: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| i64::from(i == j)).collect()).collect();
        let c = rank_lower_bound(&id, 1).unwrap();
        assert_eq!((c.rank, c.columns.len()), (4, 4));
        let ones = vec![vec![1i64]; 5];
        let c = rank_lower_bound(&ones, 5).unwrap();
        assert_eq!((c.rank, c.columns.len()), (1, 1));
        assert_eq!(rank_lower_bound(&[vec![0, 0]], 1), Err(Error::ZeroRow(0)));
        assert!(matches!(rank_lower_bound(&ones, 4), Err(Error::ColumnTooDense { .. })));
    }

    #[test]
    fn k5_example_coloring() {
        let s = ShapeRecord::from_blocks(
            &[&[1, 8], &[2, 9], &[3], &[4, 7], &[5, 6, 10]],
            vec![1, -1, 1, -1, 1, -1, 1, 1, 1, -1],
        )
        .unwrap();
        let r = reduce_shape(&s);
        let g = build_shape_graph(&r, &s);
        let ch = pick_coloring(&r, &g).unwrap();
        assert_eq!(ch.leaves.len(), 3);
        assert!(!ch.coloring.red_classes().is_empty());
        assert!(ch.coloring.red_classes().iter().all(|c| ch.leaves.contains(c)));
        assert!(ch.blue_connected && ch.gap_bound_holds);
    }

    #[test]
    fn single_class() {
        let s = ShapeRecord::new(&[0, 0], vec![1, 1], vec![false; 2]).unwrap();
        let r = reduce_shape(&s);
        let g = build_shape_graph(&r, &s);
        let ch = pick_coloring(&r, &g).unwrap();
        assert_eq!(ch.coloring.blue_classes(), [0]);
        assert!(ch.coloring.red_classes().is_empty());
        assert_eq!(ch.gaps, 0);
    }

    #[test]
    fn worked_six_letter_example() {
        // r x r z r y x r z y with x, y, z blue and distinct red letters
        let labels = [3usize, 0, 4, 2, 5, 1, 0, 6, 2, 1];
        let s = ShapeRecord::new(&labels, vec![1; 10], vec![false; 10]).unwrap();
        let r = reduce_shape(&s);
        let blue = [s.classes()[1], s.classes()[3], s.classes()[5]];
        let c = Coloring::from_blue(&r, &blue);
        let (v, w) = span_dims(&s, &c);
        assert_eq!(v, w);
        assert_eq!(v, 3);
    }
}
