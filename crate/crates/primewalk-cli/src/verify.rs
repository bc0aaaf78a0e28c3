//! Invariant suites. Each check compares two independent computations or a
//! computed value against a proven bound.

use primewalk::arith::{
    build_window, compensated_sum, is_prime, liouville_naive, liouville_range, log_chowla_series, primes_in_range,
    PrimeSet,
};
use primewalk::codec::{decode_partition, dot_budget, encode_labels, high_degree_count, kappa_succ, EncodedPartition};
use primewalk::coloring::{
    dim_w_lower_bound, max_leaf_tree_exact, pick_coloring, rank_lower_bound, select_independent_boundary, span_dims,
    spanning_tree_many_leaves, SpanningTree,
};
use primewalk::divgraph::{inner, DiffOperator, VertexMask, Which};
use primewalk::exact::rank_i64;
use primewalk::geom::{count_solutions_bruteforce, lemma_bound, DivisibilityInstance};
use primewalk::shapes::{
    build_shape_graph, enumerate_shapes, max_disjoint_revenants, reduce_shape, Partitions, ShapeFilter,
};
use primewalk::sieve::{
    abstract_sieve_identity, build_fd, build_yell_conditions, cross_cut_sum, enumerate_sieve_graphs, is_in_yell,
    sieve_error_bound, thread_sum_bound, Progression,
};
use primewalk::walks::{
    count_trivial_walks, periodic_walksum, trace_power_dense, trace_power_operator, trace_power_walksum, TraceMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ExperimentConfig, UsageError};
use crate::report::Header;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, detail }
    }

    /// `Ok` carries the detail of a pass, `Err` the first failure.
    fn from(name: &str, r: Result<String, String>) -> Self {
        match r {
            Ok(d) => Self::new(name, true, d),
            Err(d) => Self::new(name, false, d),
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    }};
}

pub const SUITES: [&str; 7] = ["arith", "trace", "shapes", "coloring", "geom", "codec", "sieve"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    #[serde(flatten)]
    pub header: Header,
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs the named suite; unknown names are a usage error listing [`SUITES`].
pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<SuiteReport, UsageError> {
    let seed = cfg.seed;
    let checks = match name {
        "arith" => vec![
            liouville_agrees(20_000),
            primes_agree(1_000, 20_000),
            chowla_series_agrees(&[100, 1_000, 20_000]),
            window_divisors(4_096, 11, 60),
        ],
        "trace" => vec![
            trace_cross_oracle(&[40, 97, 256], &[11, 13, 17, 19, 23, 29, 31], 3, 1e-8, seed),
            operator_symmetry(512, 100, seed),
            periodic_singletons_vanish(&[&[11, 13], &[3, 5, 7, 11], &[5, 7, 11, 13, 17]], 2),
            windowed_singletons_small(&[3, 5, 7, 11], 20_000, 2, 1e-2),
        ],
        "shapes" => vec![shape_graph_invariants(3), trivial_walk_count(4)],
        "coloring" => vec![
            coloring_sweep(3),
            leaf_bound_random(300, seed),
            leaf_bound_cubic(8),
            rank_certificates(400, seed),
            independent_boundaries(400, seed),
        ],
        "geom" => vec![geom_instances(200, seed)],
        "codec" => vec![codec_exhaustive(8), codec_worked_example()],
        "sieve" => vec![
            abstract_identity_trials(1_000, 12, seed),
            composite_sieve_families(100, seed),
            cross_cut_up_sets(5),
            yell_cross_oracle(11, 60, 3, 30_000),
            thread_sums(1, 3, 2, 11, 40, 4.0),
        ],
        _ => {
            return Err(UsageError(format!("unknown suite {name:?}; available suites: {}", SUITES.join(", "))));
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    Ok(SuiteReport { header: Header::new(cfg), suite: name.to_string(), passed, checks })
}

// ---------------------------------------------------------------------------
// arith

pub fn liouville_agrees(hi: u64) -> Check {
    let fast = liouville_range(1, hi);
    let bad = (1..=hi).find(|&n| fast[(n - 1) as usize] != liouville_naive(n));
    Check::from(
        "liouville segmented vs trial division",
        match bad {
            None => Ok(format!("n <= {hi}")),
            Some(n) => Err(format!("mismatch at {n}")),
        },
    )
}

pub fn primes_agree(lo: u64, hi: u64) -> Check {
    let fast = primes_in_range(lo, hi);
    let slow: Vec<u64> = (lo..=hi).filter(|&n| is_prime(n)).collect();
    Check::new("segmented primes vs primality test", fast == slow, format!("{} primes in [{lo}, {hi}]", slow.len()))
}

pub fn chowla_series_agrees(xs: &[u64]) -> Check {
    let series = match log_chowla_series(xs) {
        Ok(s) => s,
        Err(e) => return Check::new("chowla series vs direct sum", false, e.to_string()),
    };
    let r = (|| {
        for (&x, &s) in xs.iter().zip(&series) {
            let direct =
                compensated_sum((1..=x).map(|n| f64::from(liouville_naive(n) * liouville_naive(n + 1)) / n as f64))
                    / (x as f64).ln();
            ensure!((direct - s).abs() <= 1e-12, "x = {x}: {s} vs {direct}");
        }
        Ok(format!("{} points", xs.len()))
    })();
    Check::from("chowla series vs direct sum", r)
}

pub fn window_divisors(n: u64, h0: u64, h: u64) -> Check {
    let r = (|| {
        let pset = PrimeSet::from_primes(primes_in_range(h0, h), h0, h).map_err(|e| e.to_string())?;
        let w = build_window(n, &pset).map_err(|e| e.to_string())?;
        for m in n + 1..=2 * n {
            let want: Vec<u64> = pset.primes().iter().copied().filter(|p| m % p == 0).collect();
            let got: Vec<u64> = w.pdivs(m).iter().map(|&p| u64::from(p)).collect();
            ensure!(got == want, "divisors of {m}: {got:?} vs {want:?}");
            ensure!(w.lambda(m) == liouville_naive(m), "lambda({m})");
        }
        Ok(format!("window ({n}, {}]", 2 * n))
    })();
    Check::from("window tables vs direct", r)
}

// ---------------------------------------------------------------------------
// trace

fn prime_sets(cands: &[u64]) -> Vec<Vec<u64>> {
    let mut out: Vec<Vec<u64>> = cands.iter().map(|&p| vec![p]).collect();
    for (i, &p) in cands.iter().enumerate() {
        for &q in &cands[i + 1..] {
            out.push(vec![p, q]);
        }
    }
    out
}

/// Operator, walk-sum and dense traces of `(A|_X)^{2k}` over every one- or
/// two-prime subset of `cands`, with and without a random mask.
pub fn trace_cross_oracle(ns: &[u64], cands: &[u64], kmax: u32, rel_tol: f64, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = 0;
    let mut worst: f64 = 0.0;
    let r = (|| {
        for list in prime_sets(cands) {
            let pset = PrimeSet::from_list(&list).map_err(|e| e.to_string())?;
            for &n in ns {
                let w = build_window(n, &pset).map_err(|e| e.to_string())?;
                let op = DiffOperator::new(&w, &pset);
                let bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.85)).collect();
                let mask = VertexMask::from_bits(bits);
                for m in [None, Some(&mask)] {
                    for k in 1..=kmax {
                        let a = trace_power_operator(&op, k, m, TraceMode::Exact).map_err(|e| e.to_string())?.value;
                        let b = trace_power_walksum(&op, k, m, 1 << 24).map_err(|e| e.to_string())?.total();
                        let c = trace_power_dense(&op, k, m);
                        let scale = a.abs().max(1.0);
                        let err = (a - b).abs().max((a - c).abs()) / scale;
                        worst = worst.max(err);
                        ensure!(err <= rel_tol, "P={list:?} N={n} k={k}: {a} / {b} / {c}");
                        runs += 1;
                    }
                }
            }
        }
        Ok(format!("{runs} runs, worst relative gap {worst:.2e}"))
    })();
    Check::from("trace: operator = walk sum = dense", r)
}

pub fn operator_symmetry(n: u64, pairs: usize, seed: u64) -> Check {
    let r = (|| {
        let pset = PrimeSet::from_primes(primes_in_range(11, 60), 11, 60).map_err(|e| e.to_string())?;
        let w = build_window(n, &pset).map_err(|e| e.to_string())?;
        let op = DiffOperator::new(&w, &pset);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = n as usize;
        let norm = |f: &[f64]| f.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut worst_sym: f64 = 0.0;
        let mut worst_dec: f64 = 0.0;
        for _ in 0..pairs {
            let f: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let g: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ap = |v: &[f64], which| op.apply(v, which, None).map_err(|e| e.to_string());
            let (af, ag) = (ap(&f, Which::A)?, ap(&g, Which::A)?);
            let gap = (inner(&f, &ag).unwrap() - inner(&af, &g).unwrap()).abs() / (norm(&f) * norm(&g));
            worst_sym = worst_sym.max(gap);
            ensure!(gap <= 1e-10, "symmetry gap {gap:e}");
            let (gam, gp) = (ap(&f, Which::Gamma)?, ap(&f, Which::GammaPrime)?);
            for i in 0..len {
                let d = (af[i] - (gam[i] - gp[i])).abs();
                worst_dec = worst_dec.max(d);
                ensure!(d <= 1e-12, "decomposition gap {d:e} at {i}");
            }
        }
        Ok(format!("{pairs} pairs at N = {n}; symmetry {worst_sym:.1e}, decomposition {worst_dec:.1e}"))
    })();
    Check::from("operator symmetry and A = Gamma - Gamma'", r)
}

pub fn periodic_singletons_vanish(lists: &[&[u64]], kmax: u32) -> Check {
    let r = (|| {
        let mut tuples = 0;
        for list in lists {
            let pset = PrimeSet::from_list(list).map_err(|e| e.to_string())?;
            for k in 1..=kmax {
                let s = periodic_walksum(&pset, k, 1 << 24).map_err(|e| e.to_string())?;
                ensure!(s.with_singletons == Default::default(), "P={list:?} k={k}: {}", s.with_singletons);
                tuples += s.tuples;
            }
        }
        Ok(format!("{tuples} closed walks"))
    })();
    Check::from("periodic singleton part is exactly 0", r)
}

/// `|singleton part| ≤ factor · L^k · N` on the window.
pub fn windowed_singletons_small(primes: &[u64], n: u64, kmax: u32, factor: f64) -> Check {
    let r = (|| {
        let pset = PrimeSet::from_list(primes).map_err(|e| e.to_string())?;
        let w = build_window(n, &pset).map_err(|e| e.to_string())?;
        let op = DiffOperator::new(&w, &pset);
        let mut detail = Vec::new();
        for k in 1..=kmax {
            let s = trace_power_walksum(&op, k, None, 1 << 24).map_err(|e| e.to_string())?;
            let bound = factor * pset.script_l().powi(k as i32) * n as f64;
            ensure!(s.with_singletons.abs() <= bound, "k={k}: {} > {bound}", s.with_singletons);
            detail.push(format!("k={k}: {:.3e} <= {bound:.3e}", s.with_singletons));
        }
        Ok(detail.join("; "))
    })();
    Check::from("windowed singleton part is small", r)
}

// ---------------------------------------------------------------------------
// shapes

pub fn shape_graph_invariants(kmax: usize) -> Check {
    let r = (|| {
        let mut count = 0;
        for k in 1..=kmax {
            for s in enumerate_shapes(k, ShapeFilter::All).map_err(|e| e.to_string())? {
                let r = reduce_shape(&s);
                let g = build_shape_graph(&r, &s);
                let verts = g.vertices();
                ensure!(g.is_connected(), "{s:?} graph disconnected");
                if verts.len() >= 2 {
                    ensure!(verts.iter().all(|&v| g.in_degree(v) >= 1), "{s:?} has in-degree 0");
                }
                count += 1;
            }
        }
        Ok(format!("{count} shapes"))
    })();
    Check::from("shape graphs connected with in-degree >= 1", r)
}

/// Fully cancelling shapes with all classes of size two number `2^k C_k`.
pub fn trivial_walk_count(kmax: usize) -> Check {
    let r = (|| {
        for k in 1..=kmax {
            let mut n = 0u64;
            for s in enumerate_shapes(k, ShapeFilter::MaxSingletons(0)).map_err(|e| e.to_string())? {
                if s.class_sizes().iter().all(|&c| c == 2) && reduce_shape(&s).surviving().is_empty() {
                    n += 1;
                }
            }
            let want = count_trivial_walks(k as u32);
            ensure!(want == n.into(), "k={k}: {n} vs {want}");
        }
        Ok(format!("k <= {kmax}"))
    })();
    Check::from("trivial walk count", r)
}

// ---------------------------------------------------------------------------
// coloring

/// For every shape with `k ≤ kmax`: the chosen colouring is valid, `V = W`,
/// and the rank bound is below the exact dimension.
pub fn coloring_sweep(kmax: usize) -> Check {
    let r = (|| {
        let mut colored = 0;
        for k in 1..=kmax {
            for s in enumerate_shapes(k, ShapeFilter::All).map_err(|e| e.to_string())? {
                let r = reduce_shape(&s);
                let g = build_shape_graph(&r, &s);
                if g.vertices().is_empty() {
                    continue;
                }
                let ch = pick_coloring(&r, &g).map_err(|e| format!("{s:?}: {e}"))?;
                ensure!(ch.blue_connected && ch.gap_bound_holds, "{s:?}: {ch:?}");
                let red = ch.coloring.red_classes();
                for &v in &red {
                    ensure!(ch.leaves.contains(&v), "{s:?}: red {v} is not a leaf");
                    ensure!(
                        g.arrows().iter().any(|&(a, b)| b == v && !red.contains(&a)),
                        "{s:?}: red {v} has no arrow from outside"
                    );
                }
                ensure!(3 * red.len() >= ch.leaves.len(), "{s:?}: too few red");
                let (dv, dw) = span_dims(&s, &ch.coloring);
                ensure!(dv == dw, "{s:?}: dim V = {dv}, dim W = {dw}");
                let kappa = max_disjoint_revenants(&r);
                let b = dim_w_lower_bound(&s, &r, &ch.coloring, kappa).map_err(|e| format!("{s:?}: {e}"))?;
                ensure!(b.bound <= b.exact && b.invalid <= kappa, "{s:?}: {b:?}");
                colored += 1;
            }
        }
        Ok(format!("{colored} shapes with k <= {kmax}"))
    })();
    Check::from("colouring, V = W and rank bound on all shapes", r)
}

fn tree_ok(adj: &[Vec<usize>], t: &SpanningTree) -> bool {
    let n = adj.len();
    let edges = t.edges();
    if edges.len() + 1 != n.max(1) || edges.iter().any(|&(a, b)| !adj[a].contains(&b)) {
        return false;
    }
    let mut root: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    edges.into_iter().all(|(a, b)| {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        root[ra] = rb;
        ra != rb
    })
}

fn random_connected(rng: &mut ChaCha8Rng, n: usize, extra: usize) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    let mut add = |a: usize, b: usize| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for v in 1..n {
        add(rng.random_range(0..v), v);
    }
    for _ in 0..extra {
        add(rng.random_range(0..n), rng.random_range(0..n));
    }
    adj
}

fn check_leafy(adj: &[Vec<usize>]) -> Result<(), String> {
    let t = spanning_tree_many_leaves(adj).map_err(|e| e.to_string())?;
    ensure!(tree_ok(adj, &t), "not a spanning tree: {adj:?}");
    let e = max_leaf_tree_exact(adj).map_err(|e| e.to_string())?;
    ensure!(tree_ok(adj, &e) && t.leaves().len() <= e.leaves().len(), "exact tree: {adj:?}");
    let n3 = adj.iter().filter(|a| a.len() >= 3).count();
    ensure!(n3 == 0 || 4 * t.leaves().len() >= n3 + 8, "leaf bound fails: {adj:?}");
    Ok(())
}

pub fn leaf_bound_random(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        for _ in 0..trials {
            let n = rng.random_range(2..12);
            let extra = rng.random_range(0..2 * n);
            check_leafy(&random_connected(&mut rng, n, extra))?;
        }
        Ok(format!("{trials} random graphs"))
    })();
    Check::from("leafy spanning trees on random graphs", r)
}

/// Prisms and Möbius ladders on `2·3 … 2·max_half` vertices.
pub fn leaf_bound_cubic(max_half: usize) -> Check {
    let r = (|| {
        for half in 3..=max_half {
            for mobius in [false, true] {
                let n = 2 * half;
                let mut adj = vec![Vec::new(); n];
                for i in 0..half {
                    let j = (i + 1) % half;
                    for (a, b) in [(i, j), (half + i, half + j), (i, half + i)] {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                }
                if mobius {
                    // swap the ends of the two closing rails to add a twist
                    let (a, b, c, d) = (half - 1, 0, n - 1, half);
                    for (x, y) in [(a, b), (c, d)] {
                        adj[x].retain(|&z| z != y);
                        adj[y].retain(|&z| z != x);
                    }
                    for (x, y) in [(a, d), (c, b)] {
                        adj[x].push(y);
                        adj[y].push(x);
                    }
                }
                check_leafy(&adj)?;
            }
        }
        Ok(format!("cubic ladders up to {} vertices", 2 * max_half))
    })();
    Check::from("leafy spanning trees on cubic graphs", r)
}

pub fn rank_certificates(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        let mut certified = 0;
        for _ in 0..trials {
            let rows: Vec<Vec<i64>> = (0..rng.random_range(1..8))
                .map(|_| (0..6).map(|_| rng.random_range(-2..=2)).collect::<Vec<i64>>())
                .filter(|r| r.iter().any(|&x| x != 0))
                .collect();
            let kappa = rng.random_range(1..8);
            let dens = (0..6).map(|j| rows.iter().filter(|r| r[j] != 0).count()).max().unwrap_or(0);
            match rank_lower_bound(&rows, kappa) {
                Ok(c) => {
                    ensure!(dens <= kappa, "accepted a column of density {dens} > {kappa}");
                    ensure!(c.rank == rank_i64(&rows), "rank {} vs {}", c.rank, rank_i64(&rows));
                    ensure!(c.columns.len() <= c.rank && kappa * c.columns.len() >= rows.len(), "{c:?}");
                    certified += 1;
                }
                Err(_) => ensure!(dens > kappa, "rejected a matrix of density {dens} <= {kappa}"),
            }
        }
        Ok(format!("{certified} of {trials} matrices certified"))
    })();
    Check::from("rank certificates", r)
}

pub fn independent_boundaries(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        for _ in 0..trials {
            let arrows: Vec<(usize, usize)> = (0..rng.random_range(1..20))
                .map(|_| (rng.random_range(0..7), rng.random_range(0..7)))
                .filter(|(a, b)| a != b)
                .collect();
            let verts: Vec<usize> = (0..7).filter(|&v| arrows.iter().any(|&(_, b)| b == v)).collect();
            let s: Vec<usize> = verts.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
            let chosen = select_independent_boundary(&verts, &arrows, &s).map_err(|e| e.to_string())?;
            ensure!(3 * chosen.len() >= s.len(), "{arrows:?} {s:?}: {chosen:?}");
            for &v in &chosen {
                ensure!(s.contains(&v), "{v} not in S");
                ensure!(arrows.iter().any(|&(a, b)| b == v && !chosen.contains(&a)), "{v} has no outside arrow");
            }
        }
        Ok(format!("{trials} digraphs"))
    })();
    Check::from("independent boundary selection", r)
}

// ---------------------------------------------------------------------------
// geom

/// Brute counts against the lattice-point bound; `m ≤ 3`, `C ≤ 5`, `D ≤ 20`, `N_i ≤ 50`.
pub fn geom_instances(count: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        let mut done = 0;
        let mut tightest: f64 = 0.0;
        while done < count {
            let dim = rng.random_range(1..=3);
            let c = rng.random_range(1..=5);
            let d = rng.random_range(1..=20);
            let Some(inst) = DivisibilityInstance::random(&mut rng, dim, c, d, 50) else { continue };
            let n = count_solutions_bruteforce(&inst, 1 << 22).map_err(|e| e.to_string())?;
            let bound = lemma_bound(&inst);
            ensure!(n as f64 <= bound, "{inst:?}: {n} > {bound}");
            tightest = tightest.max(n as f64 / bound);
            done += 1;
        }
        Ok(format!("{count} instances, largest count/bound {tightest:.3}"))
    })();
    Check::from("lattice count below bound", r)
}

// ---------------------------------------------------------------------------
// codec

fn codec_one(labels: &[usize]) -> Result<(), String> {
    let e = encode_labels(labels);
    ensure!(decode_partition(&e).map_err(|e| e.to_string())? == labels, "{labels:?}: round trip");
    ensure!(e.stars() == labels.iter().max().map_or(0, |m| m + 1), "{labels:?}: star count");
    let (nu, kappa) = (high_degree_count(labels), kappa_succ(labels));
    ensure!(e.dots() as i64 <= dot_budget(nu, kappa), "{labels:?}: {} dots", e.dots());
    ensure!(e.to_string().parse::<EncodedPartition>().ok() == Some(e.clone()), "{labels:?}: text round trip");
    Ok(())
}

pub fn codec_exhaustive(n: usize) -> Check {
    let r = (|| {
        let mut count = 0;
        for p in Partitions::new(n) {
            codec_one(&p)?;
            count += 1;
        }
        Ok(format!("{count} partitions of {n}"))
    })();
    Check::from("codec exhaustive round trip", r)
}

pub fn codec_worked_example() -> Check {
    let blocks: [&[usize]; 6] = [&[1, 7, 15], &[2, 16], &[3, 4, 5, 11], &[6, 10, 12, 14], &[8], &[9, 13]];
    let mut labels = vec![0; 16];
    for (c, b) in blocks.iter().enumerate() {
        for &i in *b {
            labels[i - 1] = c;
        }
    }
    let e = encode_labels(&labels);
    let got = e.symbol_string();
    let ok = got == "***00*·**··2·2··" && codec_one(&labels).is_ok();
    Check::new("codec worked example", ok, got)
}

// ---------------------------------------------------------------------------
// sieve

/// Random `g` with `g(∅) = 1` on condition sets of size up to `max_size`.
pub fn abstract_identity_trials(trials: usize, max_size: u32, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        for _ in 0..trials {
            let size = rng.random_range(0..=max_size);
            let salt: u64 = rng.random();
            let modulus = rng.random_range(2..6);
            let g = move |t: u64| {
                t == 0 || !(t.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt).count_ones().is_multiple_of(modulus)
            };
            let id = abstract_sieve_identity(size, g).map_err(|e| e.to_string())?;
            ensure!(id.total() == i64::from(size == 0), "size {size}: {id:?}");
        }
        Ok(format!("{trials} trials, sizes <= {max_size}"))
    })();
    Check::from("abstract sieve identity", r)
}

const SQUAREFREE_2310: [u64; 31] = [
    2, 3, 5, 6, 7, 10, 11, 14, 15, 21, 22, 30, 33, 35, 42, 55, 66, 70, 77, 105, 110, 154, 165, 210, 231, 330, 385, 462,
    770, 1155, 2310,
];

/// Random families with moduli dividing 2310, checked pointwise over a full period.
pub fn composite_sieve_families(trials: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = (|| {
        let mut points = 0u64;
        for _ in 0..trials {
            let family: Vec<Progression> = (0..rng.random_range(1..6))
                .map(|_| {
                    let q = SQUAREFREE_2310[rng.random_range(0..SQUAREFREE_2310.len())];
                    Progression::new(rng.random_range(0..q as i64), q).unwrap()
                })
                .collect();
            let m = rng.random_range(0..4);
            let approx = build_fd(&family, m).map_err(|e| e.to_string())?;
            for (r, c) in approx.coeffs() {
                ensure!(c.unsigned_abs() <= 1 << r.omega(), "{r}: coefficient {c}");
            }
            let period = approx.period().map_err(|e| e.to_string())? as i64;
            ensure!(2310 % period == 0, "period {period}");
            for n in 0..period {
                let e = sieve_error_bound(&approx, n);
                ensure!(e.holds(), "{family:?} m={m} n={n}: {e:?}");
            }
            points += period as u64;
        }
        Ok(format!("{trials} families, {points} residues"))
    })();
    Check::from("composite sieve error within boundary sums", r)
}

fn up_sets(x: u32) -> Vec<Vec<u32>> {
    let mut order: Vec<u32> = (0..1u32 << x).collect();
    order.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
    fn go(order: &[u32], i: usize, x: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == order.len() {
            out.push(cur.clone());
            return;
        }
        let s = order[i];
        go(order, i + 1, x, cur, out);
        if (0..x).filter(|b| s >> b & 1 == 0).all(|b| cur.contains(&(s | 1 << b))) {
            cur.push(s);
            go(order, i + 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(&order, 0, x, &mut Vec::new(), &mut out);
    out
}

/// The cross-cut sum depends only on the generated up-set, so sweeping every
/// up-set of `X` covers every collection.
pub fn cross_cut_up_sets(max_x: u32) -> Check {
    let r = (|| {
        let mut total = 0;
        for x in 0..=max_x {
            for up in up_sets(x) {
                let minimal: Vec<u32> =
                    up.iter().copied().filter(|&s| !up.iter().any(|&t| t != s && t & s == t)).collect();
                let a = cross_cut_sum(x, &minimal).map_err(|e| e.to_string())?;
                let b = cross_cut_sum(x, &up).map_err(|e| e.to_string())?;
                let complement: i64 = (0..1u32 << x)
                    .filter(|y| !up.contains(y))
                    .map(|y| if (x - y.count_ones()) % 2 == 0 { 1 } else { -1 })
                    .sum();
                ensure!(a == b && a == complement, "X={x}, up-set {up:?}: {a}, {b}, {complement}");
                ensure!(a.unsigned_abs() <= 1 << x, "X={x}: |{a}| > 2^{x}");
                total += 1;
            }
        }
        Ok(format!("{total} up-sets, |X| <= {max_x}"))
    })();
    Check::from("cross-cut bound", r)
}

/// `ℓ = 3` brute force: `n` is excluded iff there are distinct `p0, p1, p2`
/// with `p0 | n`, `p1 | n`, `p2 | n + σ1 p1` and `p0 | σ1 p1 + σ2 p2`.
fn excluded_brute3(n: i64, primes: &[i64]) -> bool {
    let divs: Vec<i64> = primes.iter().copied().filter(|p| n % p == 0).collect();
    divs.iter().any(|&p1| {
        [1i64, -1].iter().any(|&s1| {
            let m = n + s1 * p1;
            primes.iter().filter(|&&p2| p2 != p1 && m % p2 == 0).any(|&p2| {
                [1i64, -1].iter().any(|&s2| {
                    let b = s1 * p1 + s2 * p2;
                    divs.iter().any(|&p0| p0 != p1 && p0 != p2 && b % p0 == 0)
                })
            })
        })
    })
}

/// Pointwise membership against family coverage (and the `ℓ = 3` brute
/// force), the `2002` witness, and the exceptional-set count.
pub fn yell_cross_oracle(h0: u64, h: u64, ell: u32, limit: i64) -> Check {
    let r = (|| {
        let primes = primes_in_range(h0, h);
        let pset = PrimeSet::from_primes(primes.clone(), h0, h).map_err(|e| e.to_string())?;
        let family = build_yell_conditions(&pset, ell, &[], 1 << 24).map_err(|e| e.to_string())?;
        let signed: Vec<i64> = primes.iter().map(|&p| p as i64).collect();
        // 2002 = 2·7·11·13 and 2002 + 13 = 5·13·31 with 11 | 13 + 31
        if ell == 3 && [11, 13, 31].iter().all(|&p| pset.contains(p)) {
            ensure!(!is_in_yell(2002, &pset, 3), "2002 should be excluded");
        }
        let mut outside = 0u64;
        for n in 1..=limit {
            let direct = is_in_yell(n, &pset, ell);
            let covered = family.iter().any(|p| p.contains(n));
            ensure!(direct != covered, "family disagrees at {n}");
            if ell == 3 {
                ensure!(direct != excluded_brute3(n, &signed), "brute force disagrees at {n}");
            }
            outside += u64::from(!direct);
        }
        let bound = 10.0 * pset.script_l().powi(ell as i32) * limit as f64 / h0 as f64;
        ensure!(outside as f64 <= bound, "|N \\ Y| = {outside} > {bound}");
        Ok(format!("n <= {limit}: {} conditions, {outside} excluded (bound {bound:.0})", family.len()))
    })();
    Check::from("Y_ell membership vs progression family", r)
}

/// Every enumerated sieve graph under every lit pattern.
pub fn thread_sums(k: usize, ell: usize, m: usize, h0: u64, h: u64, slack: f64) -> Check {
    let r = (|| {
        let pset = PrimeSet::from_primes(primes_in_range(h0, h), h0, h).map_err(|e| e.to_string())?;
        let graphs = enumerate_sieve_graphs(k, ell, m, 1 << 22).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for g in &graphs {
            for bits in 0u32..1 << g.k2() {
                let lit: Vec<bool> = (0..g.k2()).map(|i| bits >> i & 1 == 1).collect();
                let ts = thread_sum_bound(g, &lit, &pset, 1 << 26).map_err(|e| e.to_string())?;
                ensure!(ts.holds(slack), "{g:?} lit {lit:?}: {ts:?}");
                if ts.bound > 0.0 {
                    worst = worst.max(ts.brute / ts.bound);
                }
            }
        }
        Ok(format!("{} graphs, largest brute/bound {worst:.3}", graphs.len()))
    })();
    Check::from("thread sums within bound", r)
}
