use std::collections::HashSet;

use primewalk::arith::{primes_in_range, PrimeSet};
use primewalk::sieve::{
    abstract_sieve_identity, build_fd, build_yell_conditions, cross_cut_sum, enumerate_sieve_graphs, is_in_yell,
    sieve_error_bound, thread_sum_bound, Progression, SieveGraph, Thread, ThreadKind,
};
use proptest::prelude::*;

// ---------------------------------------------------------------------------
// sieve graphs: threads first, then extend to the horizontal path

fn all_rgs(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let next = cur.iter().max().map_or(0, |m| m + 1);
        for c in 0..=next {
            cur.push(c);
            go(cur, n, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), n, &mut out);
    out
}

fn canon(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|c| {
            let n = map.len();
            *map.entry(*c).or_insert(n)
        })
        .collect()
}

fn edges_of(t: &Thread) -> usize {
    t.len + if t.kind == ThreadKind::Open { 2 } else { 0 }
}

/// One run per class in the body, cyclically when closed.
fn body_ok(body: &[usize], closed: bool) -> bool {
    let n = body.len();
    let classes: HashSet<usize> = body.iter().copied().collect();
    classes.into_iter().all(|c| {
        let starts = (0..n)
            .filter(|&i| {
                body[i] == c
                    && match (i, closed) {
                        (0, true) => body[n - 1] != c,
                        (0, false) => true,
                        _ => body[i - 1] != c,
                    }
            })
            .count();
        starts <= 1 || (closed && body.iter().all(|&d| d == c))
    })
}

fn oracle(k: usize, ell: usize, m: usize) -> HashSet<(Vec<Thread>, Vec<usize>)> {
    let k2 = 2 * k;
    let mut types = Vec::new();
    for attach in 0..=k2 {
        for len in 1..ell {
            types.push(Thread { attach, kind: ThreadKind::Open, len });
            if len >= 2 {
                types.push(Thread { attach, kind: ThreadKind::Closed, len });
            }
        }
    }
    types.sort();
    let mut multisets: Vec<Vec<Thread>> = vec![vec![]];
    for size in 1..=m {
        let mut idx = vec![0usize; size];
        loop {
            multisets.push(idx.iter().map(|&i| types[i]).collect());
            let Some(p) = (0..size).rev().find(|&p| idx[p] + 1 < types.len()) else { break };
            idx[p] += 1;
            for q in p + 1..size {
                idx[q] = idx[p];
            }
        }
    }
    let mut out = HashSet::new();
    for ths in multisets {
        let total: usize = ths.iter().map(edges_of).sum();
        let mut ranges = Vec::new();
        let mut at = 0;
        for t in &ths {
            ranges.push((at, at + t.len, at + edges_of(t)));
            at += edges_of(t);
        }
        for lab in all_rgs(total) {
            let cost = lab.iter().collect::<HashSet<_>>().len();
            if cost > m {
                continue;
            }
            let ok = ths.iter().zip(&ranges).all(|(t, &(s, b, _))| {
                let body = &lab[s..b];
                let wit_ok = t.kind == ThreadKind::Closed || (lab[b] == lab[b + 1] && !body.contains(&lab[b]));
                wit_ok && body_ok(body, t.kind == ThreadKind::Closed)
            });
            let private = ranges.iter().enumerate().all(|(t, &(s, _, e))| {
                lab[s..e]
                    .iter()
                    .any(|c| ranges.iter().enumerate().all(|(u, &(s2, _, e2))| u == t || !lab[s2..e2].contains(c)))
            });
            if !(ok && private) {
                continue;
            }
            // horizontal labels: thread classes 0..cost or fresh ids from 100
            let mut hs: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..k2 {
                let mut next = Vec::new();
                for h in &hs {
                    let fresh = h.iter().filter(|&&c| c >= 100).max().map_or(100, |m| m + 1);
                    for c in (0..cost).chain(100..=fresh) {
                        let mut v = h.clone();
                        v.push(c);
                        next.push(v);
                    }
                }
                hs = next;
            }
            for h in hs {
                let mut all = h.clone();
                all.extend(&lab);
                out.insert((ths.clone(), canon(&all)));
            }
        }
    }
    out
}

fn check_enumerator(k: usize, ell: usize, m: usize) {
    let got = enumerate_sieve_graphs(k, ell, m, 1 << 22).unwrap();
    let set: HashSet<(Vec<Thread>, Vec<usize>)> =
        got.iter().map(|g| (g.threads().to_vec(), g.classes().to_vec())).collect();
    assert_eq!(set.len(), got.len(), "duplicates for ({k},{ell},{m})");
    let want = oracle(k, ell, m);
    assert_eq!(set.len(), want.len(), "count for ({k},{ell},{m})");
    assert!(set == want, "sets differ for ({k},{ell},{m})");
    for g in &got {
        assert!(g.is_non_redundant() && g.is_valid(ell) && g.cost() <= m);
        let rebuilt = SieveGraph::new(g.k2(), g.threads().to_vec(), g.classes().to_vec(), ell).unwrap();
        assert_eq!(&rebuilt, g);
    }
}

#[test]
fn sieve_graphs_match_oracle() {
    check_enumerator(1, 3, 1);
    check_enumerator(1, 3, 2);
    check_enumerator(2, 3, 1);
    check_enumerator(1, 4, 2);
    check_enumerator(2, 3, 2);
}

#[test]
fn thread_sums_within_bound() {
    let pset = PrimeSet::from_primes(primes_in_range(11, 40), 11, 40).unwrap();
    let graphs = enumerate_sieve_graphs(1, 3, 2, 1 << 20).unwrap();
    for g in &graphs {
        for lit in [vec![false; 2], vec![true; 2], vec![true, false]] {
            let ts = thread_sum_bound(g, &lit, &pset, 1 << 24).unwrap();
            assert!(ts.brute >= 0.0);
            assert!(ts.holds(4.0), "{g:?} {lit:?} {ts:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// Y_ℓ for ℓ = 3: n fails iff distinct p0, p1, p2 with p0 | n, p1 | n,
// p2 | n + σ1 p1 and p0 | σ1 p1 + σ2 p2

fn excluded_brute(n: i64, primes: &[u64]) -> bool {
    let divs: Vec<i64> = primes.iter().map(|&p| p as i64).filter(|p| n % p == 0).collect();
    for &p1 in &divs {
        for s1 in [1i64, -1] {
            let m = n + s1 * p1;
            for &p2 in primes.iter().map(|p| *p as i64).collect::<Vec<_>>().iter() {
                if p2 == p1 || m % p2 != 0 {
                    continue;
                }
                for s2 in [1i64, -1] {
                    let b = s1 * p1 + s2 * p2;
                    if divs.iter().any(|&p0| p0 != p1 && p0 != p2 && b % p0 == 0) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn yell_three_cross_oracle() {
    let primes = primes_in_range(11, 60);
    let pset = PrimeSet::from_primes(primes.clone(), 11, 60).unwrap();
    let family = build_yell_conditions(&pset, 3, &[], 1 << 24).unwrap();
    assert!(!is_in_yell(2002, &pset, 3));
    for n in 1..=30_000i64 {
        let direct = is_in_yell(n, &pset, 3);
        let covered = family.iter().any(|p| p.contains(n));
        assert_eq!(direct, !covered, "family disagrees at {n}");
        assert_eq!(direct, !excluded_brute(n, &primes), "brute disagrees at {n}");
    }
}

// ---------------------------------------------------------------------------
// cross-cut: the sum depends only on the up-set generated by C

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
        let supers_in = (0..x).filter(|b| s >> b & 1 == 0).all(|b| cur.contains(&(s | 1 << b)));
        if supers_in {
            cur.push(s);
            go(order, i + 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(&order, 0, x, &mut Vec::new(), &mut out);
    out
}

fn minimal(up: &[u32]) -> Vec<u32> {
    up.iter().copied().filter(|&s| !up.iter().any(|&t| t != s && t & s == t)).collect()
}

fn complement_formula(x: u32, up: &[u32]) -> i64 {
    (0..1u32 << x)
        .filter(|y| !up.contains(y))
        .map(|y| if (x - y.count_ones()).is_multiple_of(2) { 1 } else { -1 })
        .sum()
}

#[test]
fn cross_cut_up_set_sweep() {
    let dedekind = [2usize, 3, 6, 20, 168, 7581];
    for x in 0..=5u32 {
        let ups = up_sets(x);
        assert_eq!(ups.len(), dedekind[x as usize]);
        for up in &ups {
            let a = cross_cut_sum(x, &minimal(up)).unwrap();
            let b = cross_cut_sum(x, up).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, complement_formula(x, up));
            assert!(a.unsigned_abs() <= 1 << x);
        }
    }
}

#[test]
fn cross_cut_all_collections_small() {
    for x in 0..=4u32 {
        let subsets = 1u32 << x;
        for coll in 0..1u64 << subsets {
            let c: Vec<u32> = (0..subsets).filter(|s| coll >> s & 1 == 1).collect();
            let v = cross_cut_sum(x, &c).unwrap();
            assert!(v.unsigned_abs() <= 1 << x);
        }
    }
}

// ---------------------------------------------------------------------------

fn prog(a: i64, q: u64) -> Progression {
    Progression::new(a, q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn abstract_identity_sums_to_indicator(size in 0u32..=12, seed in any::<u64>()) {
        let g = move |t: u64| t == 0 || !(t.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ seed).count_ones().is_multiple_of(3);
        let id = abstract_sieve_identity(size, g).unwrap();
        prop_assert_eq!(id.total(), i64::from(size == 0));
    }

    #[test]
    fn composite_sieve_error_bounded(
        picks in prop::collection::vec((0usize..31, 0i64..2310), 1..5),
        m in 0u32..4,
    ) {
        let squarefree = [2u64, 3, 5, 6, 7, 10, 11, 14, 15, 21, 22, 30, 33, 35, 42, 55, 66, 70, 77, 105, 110, 154, 165, 210, 231, 330, 385, 462, 770, 1155, 2310];
        let family: Vec<Progression> = picks.iter().map(|&(i, a)| prog(a, squarefree[i])).collect();
        let approx = build_fd(&family, m).unwrap();
        for (r, c) in approx.coeffs() {
            prop_assert!(c.unsigned_abs() <= 1 << r.omega());
        }
        let period = approx.period().unwrap() as i64;
        prop_assert!(period <= 2310);
        for n in 0..period {
            prop_assert!(sieve_error_bound(&approx, n).holds());
        }
    }
}
