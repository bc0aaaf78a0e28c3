use num_traits::Zero;
use primewalk::arith::{build_window, PrimeSet};
use primewalk::codec::{
    decode_partition, decode_walk, dot_budget, encode_labels, encode_walk, high_degree_count, kappa_succ,
    EncodedPartition,
};
use primewalk::divgraph::{DiffOperator, VertexMask};
use primewalk::shapes::{canonical_labels, Partitions, ShapeRecord};
use primewalk::walks::{
    closed_walks, periodic_walksum, simulate_naive_walk, trace_power_dense, trace_power_operator, trace_power_walksum,
    TraceMode,
};
use proptest::prelude::*;

fn check_codec(labels: &[usize]) {
    let e = encode_labels(labels);
    assert_eq!(decode_partition(&e).unwrap(), labels);
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    assert_eq!(e.stars(), classes);
    let nu = high_degree_count(labels);
    let kappa = kappa_succ(labels);
    assert!(e.dots() as i64 <= dot_budget(nu, kappa), "{labels:?}: {} > {}", e.dots(), dot_budget(nu, kappa));
    let text = e.to_string();
    assert_eq!(text.parse::<EncodedPartition>().unwrap(), e);
    assert!(e.symbol_string().chars().all(|c| "*012·".contains(c)));
}

#[test]
fn codec_exhaustive_eight() {
    let all: Vec<Vec<usize>> = Partitions::new(8).collect();
    assert_eq!(all.len(), 4140);
    for p in &all {
        check_codec(p);
    }
}

proptest! {
    #[test]
    fn codec_random_sixteen(raw in prop::collection::vec(0usize..6, 0..=16)) {
        check_codec(&canonical_labels(&raw));
    }
}

fn shape_of(sigma: &[i8], primes: &[u64], n: i64) -> (ShapeRecord, Vec<usize>) {
    let mut node = n;
    let mut lit = Vec::new();
    let mut nodes = Vec::new();
    for (&s, &p) in sigma.iter().zip(primes) {
        lit.push(node % p as i64 == 0);
        nodes.push(node);
        node += i64::from(s) * p as i64;
    }
    let labels = canonical_labels(&primes.iter().map(|&p| p as usize).collect::<Vec<_>>());
    (ShapeRecord::new(&labels, sigma.to_vec(), lit).unwrap(), nodes.into_iter().map(|m| m as usize).collect())
}

#[test]
fn walk_codec_numbers_stay_small() {
    let primes = [11u64, 13, 17, 19, 23];
    let pset = PrimeSet::from_list(&primes).unwrap();
    let walks = closed_walks(&pset, 6, 1 << 24).unwrap();
    assert!(!walks.is_empty());
    let mut numbered = 0;
    for (w_i, w) in walks.iter().enumerate().step_by(7) {
        let n = 1000 + (w_i as i64 * 7919) % 50_000;
        let (s, nodes) = shape_of(w.sigma(), w.primes(), n);
        let e = encode_walk(&s, w.primes()).unwrap();
        assert_eq!(decode_walk(&e, s.sigma(), s.lit(), w.primes()).unwrap(), s.classes());
        let max_omega =
            nodes.iter().map(|&m| primes.iter().filter(|&&p| (m as u64).is_multiple_of(p)).count()).max().unwrap();
        assert!(e.max_candidates <= max_omega, "{w:?} at {n}");
        numbered += e.yellow_refs.iter().filter(|r| matches!(r, primewalk::codec::YellowRef::Number(_))).count();
    }
    // a start divisible by every prime makes every index lit
    let n = primes.iter().product::<u64>() as i64;
    for w in walks.iter().take(2000) {
        let (s, _) = shape_of(w.sigma(), w.primes(), n);
        let e = encode_walk(&s, w.primes()).unwrap();
        assert_eq!(decode_walk(&e, s.sigma(), s.lit(), w.primes()).unwrap(), s.classes());
        numbered += e.yellow_refs.iter().filter(|r| matches!(r, primewalk::codec::YellowRef::Number(_))).count();
    }
    assert!(numbered > 0);
}

// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn trace_methods_agree(
        n in 40u64..=256,
        pi in 0usize..6,
        qi in 0usize..6,
        k in 1u32..=3,
        drop in prop::collection::vec(0usize..256, 0..20),
    ) {
        let cands = [11u64, 13, 17, 19, 23, 29];
        let list: Vec<u64> = if pi == qi { vec![cands[pi]] } else { vec![cands[pi], cands[qi]] };
        let pset = PrimeSet::from_list(&list).unwrap();
        let w = build_window(n, &pset).unwrap();
        let op = DiffOperator::new(&w, &pset);
        let mut bits = vec![true; n as usize];
        for d in drop {
            bits[d % n as usize] = false;
        }
        let mask = VertexMask::from_bits(bits);
        let a = trace_power_operator(&op, k, Some(&mask), TraceMode::Exact).unwrap().value;
        let b = trace_power_walksum(&op, k, Some(&mask), 1 << 22).unwrap().total();
        let c = trace_power_dense(&op, k, Some(&mask));
        let tol = 1e-8 * a.abs().max(1.0);
        prop_assert!(a >= 0.0);
        prop_assert!((a - b).abs() <= tol, "{} vs {}", a, b);
        prop_assert!((a - c).abs() <= tol, "{} vs {}", a, c);
    }
}

#[test]
fn periodic_singleton_part_vanishes() {
    for list in [&[11u64, 13][..], &[3, 5, 7, 11], &[5, 7, 11, 13, 17]] {
        let pset = PrimeSet::from_list(list).unwrap();
        for k in 1..=2 {
            let s = periodic_walksum(&pset, k, 1 << 24).unwrap();
            assert!(s.with_singletons.is_zero(), "{list:?} k={k}");
        }
    }
}

#[test]
fn windowed_singleton_part_is_small() {
    let pset = PrimeSet::from_list(&[3, 5, 7, 11]).unwrap();
    let w = build_window(20_000, &pset).unwrap();
    let op = DiffOperator::new(&w, &pset);
    let s = trace_power_walksum(&op, 2, None, 1 << 24).unwrap();
    let l = pset.script_l();
    assert!(s.with_singletons.abs() <= 1e-2 * l * l * 20_000.0, "{s:?}");
    assert!(s.without_singletons > 0.0);
}

#[test]
fn naive_walk_variance() {
    let pset = PrimeSet::from_list(&[11, 13, 17, 19, 23, 29, 31]).unwrap();
    let st = simulate_naive_walk(&pset, 6, 200_000, 5).unwrap();
    assert!(st.mean.abs() <= 3.0 * st.stderr);
    assert!((st.variance / st.expected_variance - 1.0).abs() <= 0.05);
    assert_eq!(st.histogram.iter().map(|b| b.1).sum::<u64>(), 200_000);
}
