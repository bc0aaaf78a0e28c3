use primewalk::coloring::{
    dim_w_lower_bound, max_leaf_tree_exact, pick_coloring, rank_lower_bound, select_independent_boundary, span_dims,
    spanning_tree_many_leaves, SpanningTree,
};
use primewalk::exact::rank_i64;
use primewalk::shapes::{
    build_shape_graph, enumerate_shapes, max_disjoint_revenants, reduce_shape, ShapeFilter, ShapeRecord,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tree_ok(adj: &[Vec<usize>], t: &SpanningTree) -> bool {
    let n = adj.len();
    let edges = t.edges();
    if edges.len() + 1 != n.max(1) || edges.iter().any(|&(a, b)| !adj[a].contains(&b)) {
        return false;
    }
    // union-find for acyclicity
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    let add = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for v in 1..n {
        let u = rng.random_range(0..v);
        add(u, v, &mut adj);
    }
    for _ in 0..extra {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        add(a, b, &mut adj);
    }
    adj
}

/// Most leaves over all spanning trees, by subset enumeration.
fn brute_max_leaves(adj: &[Vec<usize>]) -> usize {
    let n = adj.len();
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| adj[a].iter().filter(move |&&b| a < b).map(move |&b| (a, b))).collect();
    let mut best = 0;
    for mask in 0u32..1 << edges.len() {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut deg = vec![0; n];
        let mut ok = true;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if mask >> i & 1 == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    ok = false;
                    break;
                }
                parent[ra] = rb;
                deg[a] += 1;
                deg[b] += 1;
            }
        }
        if ok {
            best = best.max(deg.iter().filter(|&&d| d == 1).count());
        }
    }
    best
}

#[test]
fn leafy_trees_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let n = rng.random_range(2..9);
        let extra = rng.random_range(0..2 * n);
        let adj = random_connected(&mut rng, n, extra);
        let t = spanning_tree_many_leaves(&adj).unwrap();
        assert!(tree_ok(&adj, &t));
        let e = max_leaf_tree_exact(&adj).unwrap();
        assert!(tree_ok(&adj, &e));
        let m = e.leaves().len();
        if adj.iter().map(Vec::len).sum::<usize>() / 2 <= 16 {
            assert_eq!(m, brute_max_leaves(&adj), "{adj:?}");
        }
        assert!(t.leaves().len() <= m);
        let n3 = adj.iter().filter(|a| a.len() >= 3).count();
        if n3 > 0 {
            assert!(t.leaves().len() as f64 >= n3 as f64 / 4.0 + 2.0, "{adj:?}");
        }
    }
}

#[test]
fn leafy_trees_on_cubic_graphs() {
    // prisms and Möbius ladders: 3-regular, so leaves ≥ n/4 + 2
    for half in 3..=8usize {
        let n = 2 * half;
        for mobius in [false, true] {
            let mut adj = vec![Vec::new(); n];
            for i in 0..half {
                let j = (i + 1) % half;
                for (a, b) in [(i, j), (half + i, half + j), (i, half + i)] {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            }
            if mobius {
                // rewire the last rungs into a twist
                let (a, b, c, d) = (half - 1, 0, 2 * half - 1, half);
                for (x, y) in [(a, b), (c, d)] {
                    adj[x].retain(|&z| z != y);
                    adj[y].retain(|&z| z != x);
                }
                for (x, y) in [(a, d), (c, b)] {
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
            let t = spanning_tree_many_leaves(&adj).unwrap();
            assert!(tree_ok(&adj, &t));
            assert!(t.leaves().len() as f64 >= n as f64 / 4.0 + 2.0);
        }
    }
}

fn each_shape(k: usize, mut f: impl FnMut(&ShapeRecord)) {
    for s in enumerate_shapes(k, ShapeFilter::All).unwrap() {
        f(&s);
    }
}

#[test]
fn shape_sweep_up_to_k3() {
    let mut colored = 0;
    for k in 1..=3 {
        each_shape(k, |s| {
            let r = reduce_shape(s);
            let g = build_shape_graph(&r, s);
            let verts = g.vertices();
            if verts.is_empty() {
                return;
            }
            assert!(g.is_connected());
            if verts.len() >= 2 {
                for &v in &verts {
                    assert!(g.in_degree(v) >= 1, "{s:?}");
                }
            }
            let ch = pick_coloring(&r, &g).unwrap();
            assert!(ch.blue_connected, "{s:?}");
            assert!(ch.gap_bound_holds, "{s:?}");
            let red = ch.coloring.red_classes();
            for &v in &red {
                assert!(ch.leaves.contains(&v));
                assert!(g.arrows().iter().any(|&(a, b)| b == v && !red.contains(&a)), "{s:?}");
            }
            assert!(3 * red.len() >= ch.leaves.len());
            let (dv, dw) = span_dims(s, &ch.coloring);
            assert_eq!(dv, dw, "V = W fails for {s:?}");
            let kappa = max_disjoint_revenants(&r);
            let b = dim_w_lower_bound(s, &r, &ch.coloring, kappa).unwrap();
            assert!(b.bound <= b.exact, "{s:?} {b:?}");
            assert!(b.invalid <= kappa, "{s:?} {b:?}");
            colored += 1;
        });
    }
    assert!(colored > 1000);
}

#[test]
fn v_equals_w_for_every_blue_set() {
    // every choice of blue classes, not only the chosen colouring
    for k in 1..=3 {
        each_shape(k, |s| {
            let r = reduce_shape(s);
            let live: Vec<usize> = (0..r.class_count()).filter(|&c| !r.is_yellow(c)).collect();
            for bits in 0u32..1 << live.len() {
                let blue: Vec<usize> = (0..live.len()).filter(|i| bits >> i & 1 == 1).map(|i| live[i]).collect();
                let c = primewalk::coloring::Coloring::from_blue(&r, &blue);
                let (dv, dw) = span_dims(s, &c);
                if !blue.is_empty() {
                    let g = build_shape_graph(&r, s);
                    let mut mask = vec![false; g.slots()];
                    for &b in &blue {
                        mask[b] = true;
                    }
                    if g.is_connected_on(&mask) {
                        assert_eq!(dv, dw, "{s:?} blue {blue:?}");
                    }
                }
                assert!(dv <= dw);
            }
        });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn rank_certificate(rows in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 1..8), kappa in 1usize..8) {
        let rows: Vec<Vec<i64>> = rows.into_iter().filter(|r| r.iter().any(|&x| x != 0)).collect();
        let dens = (0..6).map(|j| rows.iter().filter(|r| r[j] != 0).count()).max().unwrap_or(0);
        match rank_lower_bound(&rows, kappa) {
            Ok(c) => {
                prop_assert!(dens <= kappa);
                prop_assert_eq!(c.rank, rank_i64(&rows));
                prop_assert!(c.columns.len() <= c.rank);
                prop_assert!(kappa * c.columns.len() >= rows.len());
            }
            Err(_) => prop_assert!(dens > kappa),
        }
    }

    #[test]
    fn independent_boundary(arrows in prop::collection::vec((0usize..7, 0usize..7), 1..20), sbits in 0u32..128) {
        let arrows: Vec<(usize, usize)> = arrows.into_iter().filter(|(a, b)| a != b).collect();
        let verts: Vec<usize> = (0..7).filter(|&v| arrows.iter().any(|&(_, b)| b == v)).collect();
        let s: Vec<usize> = verts.iter().copied().filter(|v| sbits >> v & 1 == 1).collect();
        let chosen = select_independent_boundary(&verts, &arrows, &s).unwrap();
        prop_assert!(3 * chosen.len() >= s.len());
        for &v in &chosen {
            prop_assert!(s.contains(&v));
            prop_assert!(arrows.iter().any(|&(a, b)| b == v && !chosen.contains(&a)));
        }
    }
}
