//! Acceptance criteria 1–14. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use primewalk::arith::{build_window, log_chowla_series, log_chowla_sum, primes_in_range, PrimeSet};
use primewalk::divgraph::{DiffOperator, Which};
use primewalk::walks::simulate_naive_walk;
use primewalk_cli::experiments::spectrum;
use primewalk_cli::verify::{self, Check};
use primewalk_cli::ExperimentConfig;

const SEED: u64 = 20240601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn of(checks: &[Check]) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        let detail = checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join(" | ");
        Self { passed, detail }
    }

    fn timed(self, elapsed: Duration, limit: Duration) -> Self {
        let within = elapsed <= limit;
        Self {
            passed: self.passed && within,
            detail: format!("{} [{:.1}s, limit {}s]", self.detail, elapsed.as_secs_f64(), limit.as_secs()),
        }
    }
}

fn trace_cross_oracle() -> Outcome {
    let t = Instant::now();
    let c = verify::trace_cross_oracle(&[40, 64, 101, 128, 200, 256], &[11, 13, 17, 19, 23, 29, 31], 3, 1e-8, SEED);
    Outcome::of(&[c]).timed(t.elapsed(), Duration::from_secs(60))
}

fn symmetry() -> Outcome {
    Outcome::of(&[verify::operator_symmetry(512, 100, SEED)])
}

/// 1155 = 3·5·7·11 lies in (1000, 2000]; 46189 = 11·13·17·19 in (30000, 60000].
fn eigenvalue_obstruction() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let small = PrimeSet::from_list(&[3, 5, 7, 11]).unwrap();
    let large = PrimeSet::from_primes(primes_in_range(11, 60), 11, 60).unwrap();
    for (pset, n, witness, dense) in [(&small, 1000u64, 1155u64, true), (&large, 30_000, 46_189, false)] {
        let w = build_window(n, pset).unwrap();
        assert_eq!(w.omega(witness), 4);
        let op = DiffOperator::new(&w, pset);
        let est = op.estimate_extreme_eigenvalue(Which::A, None, 400, 1e-12, SEED).unwrap();
        ok &= est.value.abs() >= 1.0;
        let mut note = format!("N={n}: |estimate| {:.6}", est.value.abs());
        if dense {
            let d = op.dense_extreme_eigenvalue(Which::A, None);
            ok &= (d.abs() - est.value.abs()).abs() <= 1e-6;
            note.push_str(&format!(", dense {:.6}", d.abs()));
        }
        notes.push(note);
    }
    Outcome { passed: ok, detail: notes.join("; ") }
}

fn spectral_probe() -> Outcome {
    let t = Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.apply_text("N=1000000\nH0=50\nH=1000\nK=2\nell=3\nmask=true").unwrap();
    cfg.seed = SEED;
    let r = spectrum(&cfg).unwrap();
    let out = Outcome {
        passed: r.ratio <= 10.0,
        detail: format!(
            "value {:.6}, ratio to sqrt(K L) {:.4}, residual {:.1e}, kept {} of {}",
            r.value, r.ratio, r.residual, r.mask.kept, cfg.n
        ),
    };
    out.timed(t.elapsed(), Duration::from_secs(600))
}

fn singleton_cancellation() -> Outcome {
    Outcome::of(&[
        verify::periodic_singletons_vanish(&[&[11, 13], &[3, 5, 7, 11], &[5, 7, 11, 13, 17]], 2),
        verify::windowed_singletons_small(&[11, 13], 100_000, 2, 1e-2),
        verify::windowed_singletons_small(&[3, 5, 7, 11], 100_000, 2, 1e-2),
    ])
}

fn lattice_count() -> Outcome {
    let t = Instant::now();
    Outcome::of(&[verify::geom_instances(200, SEED)]).timed(t.elapsed(), Duration::from_secs(30))
}

fn rank_boundary_leaf() -> Outcome {
    Outcome::of(&[
        verify::coloring_sweep(3),
        verify::leaf_bound_random(1_000, SEED),
        verify::leaf_bound_cubic(10),
        verify::rank_certificates(2_000, SEED),
        verify::independent_boundaries(2_000, SEED),
    ])
}

fn codec() -> Outcome {
    Outcome::of(&[verify::codec_exhaustive(8), verify::codec_worked_example()])
}

fn abstract_sieve() -> Outcome {
    Outcome::of(&[verify::abstract_identity_trials(10_000, 12, SEED)])
}

fn composite_sieve() -> Outcome {
    Outcome::of(&[verify::composite_sieve_families(300, SEED), verify::cross_cut_up_sets(5)])
}

fn yell() -> Outcome {
    Outcome::of(&[verify::yell_cross_oracle(11, 60, 3, 100_000)])
}

fn thread_sums() -> Outcome {
    Outcome::of(&[verify::thread_sums(2, 3, 2, 11, 40, 4.0)])
}

fn chowla() -> Outcome {
    let t = Instant::now();
    let xs: Vec<u64> = (3..=7).map(|e| 10u64.pow(e)).collect();
    let series = log_chowla_series(&xs).unwrap();
    let top = log_chowla_sum(10_000_000).unwrap();
    let shown: Vec<String> = xs.iter().zip(&series).map(|(x, s)| format!("{x}:{s:+.5}")).collect();
    Outcome { passed: top.abs() < 0.1 && series[4] == top, detail: format!("series {}", shown.join(" ")) }
        .timed(t.elapsed(), Duration::from_secs(300))
}

fn naive_walk() -> Outcome {
    let pset = PrimeSet::from_primes(primes_in_range(11, 100), 11, 100).unwrap();
    let st = simulate_naive_walk(&pset, 6, 1_000_000, SEED).unwrap();
    let rel = st.variance / st.expected_variance - 1.0;
    Outcome {
        passed: st.mean.abs() <= 3.0 * st.stderr && rel.abs() <= 0.05,
        detail: format!(
            "mean {:.3} (3 se = {:.3}), variance {:.1} vs {:.1} ({:+.2}%)",
            st.mean,
            3.0 * st.stderr,
            st.variance,
            st.expected_variance,
            100.0 * rel
        ),
    }
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("trace cross-oracle", trace_cross_oracle),
        ("operator symmetry and decomposition", symmetry),
        ("eigenvalue obstruction", eigenvalue_obstruction),
        ("masked spectral-radius probe", spectral_probe),
        ("singleton cancellation", singleton_cancellation),
        ("lattice-point count bound", lattice_count),
        ("rank, boundary and leaf bounds", rank_boundary_leaf),
        ("writer-reader codec", codec),
        ("abstract sieve identity", abstract_sieve),
        ("composite-moduli sieve", composite_sieve),
        ("Y_ell cross-oracle", yell),
        ("thread-sum bound", thread_sums),
        ("Chowla probe", chowla),
        ("naive-model walk statistics", naive_walk),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} criterion {:>2} ({name}): {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
