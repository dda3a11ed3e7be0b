//! Acceptance gate: eight end-to-end criteria, one test each.  Every test
//! prints a single `criterion N: PASS/FAIL` line (visible with
//! `--nocapture`, and always on failure) and enforces its runtime budget.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;

use autoseq::algebra::{dominant_eigenvalue, integer_eigenvalues, NumberClass};
use autoseq::catalogue;
use autoseq::dynamical::{
    eigenvalue_obstruction, host_profile, ObstructionOptions, ObstructionReason, QObstruction,
};
use autoseq::gaps_runs::{cobham_gap_test, run_first_occurrence, GapVerdict, OccurrenceOptions};
use autoseq::kernel::{dfao_from_uniform, minimize, targeted_kernel_family, KernelFamily};
use autoseq::matrix::{char_poly, transition_matrix, IntMatrix};
use autoseq::poly::{IntPolynomial, Rat};
use autoseq::report::{build_report, strip_volatile, to_json_string, InputEcho};
use autoseq::seqlib::{generate, GeneratorSpec};
use autoseq::stats::{block_complexity, block_morphism, frequencies, ExactFrequencies, GrowthClass};
use autoseq::strategy::{analyze, Conclusion, Config, Grade, TheoremTag};
use autoseq::words::{expand, expand_letters, return_words, Morphism};

/// Runs one criterion, prints its PASS/FAIL line, and enforces the budget.
fn criterion<F>(n: u32, label: &str, budget: Duration, body: F)
where
    F: FnOnce() + UnwindSafe,
{
    let started = Instant::now();
    let result = catch_unwind(body);
    let elapsed = started.elapsed();
    let ok = result.is_ok() && elapsed <= budget;
    println!(
        "criterion {n}: {} — {label} ({:.2} s of {:.0} s budget)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    if let Err(cause) = result {
        resume_unwind(cause);
    }
    assert!(
        elapsed <= budget,
        "criterion {n} exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

#[test]
fn criterion_1_grigorchuk_characteristic_polynomial() {
    criterion(
        1,
        "Grigorchuk morphism: char poly x^4 - 2x^3 - 2x^2 - x + 2, no rational roots",
        Duration::from_secs(1),
        || {
            let m = catalogue::grigorchuk();
            let p = char_poly(&transition_matrix(&m));
            assert_eq!(p, IntPolynomial::from_i64(&[2, -1, -2, -2, 1]));
            assert!(p.rational_roots().expect("root scan").is_empty());
        },
    );
}

#[test]
fn criterion_2_fibonacci_certified_non_automatic() {
    criterion(
        2,
        "Fibonacci word: irrational eigenvalue x^2 - x - 1, certified non-automatic, det -1 obstructs q <= 64",
        Duration::from_secs(5),
        || {
            let m = catalogue::fibonacci_word();
            let rho = dominant_eigenvalue(&transition_matrix(&m)).expect("Perron root");
            assert_eq!(*rho.class(), NumberClass::Irrational);
            assert_eq!(*rho.min_poly(), IntPolynomial::from_i64(&[-1, -1, 1]));

            let analysis = analyze(&m, &Config::default());
            assert_eq!(analysis.verdict.conclusion, Conclusion::NotAutomaticAny);
            assert!(analysis.verdict.certified);

            let obs = eigenvalue_obstruction(&m, &ObstructionOptions::default())
                .expect("obstruction sweep");
            assert_eq!(obs.constraint.det, BigInt::from(-1));
            assert!(obs.all_q_obstructed);
            for q in 2..=64 {
                assert!(
                    obs.outcome(q).expect("base covered").is_obstructed(),
                    "base {q} not obstructed"
                );
            }
        },
    );
}

#[test]
fn criterion_3_aab_runs_kernel_family_complexity() {
    criterion(
        3,
        "a->aab: run table f(n) = 2^(n+1) - n - 1, eight distinct 2^k - k kernel members, quadratic complexity",
        Duration::from_secs(60),
        || {
            let m = catalogue::aab();
            let mut view = expand(&m, 1 << 20).expect("expansion");

            let profile = run_first_occurrence(&mut view, 18, 1 << 20).expect("run table");
            let (_, b_table) = profile
                .per_symbol
                .iter()
                .find(|(name, _)| name == "b")
                .expect("symbol b")
                .clone();
            for n in 1..=18usize {
                let expected = (1u64 << (n + 1)) - n as u64 - 1;
                assert_eq!(b_table[n], Some(expected), "f({n})");
            }

            let est = targeted_kernel_family(
                &mut view,
                2,
                &KernelFamily::QkMinusK,
                8,
                1 << 20,
                None,
            )
            .expect("kernel family");
            assert_eq!(est.distinct_classes, 8);
            assert_eq!(est.witnesses.len(), 8 * 7 / 2, "every pair witnessed");

            let complexity = block_complexity(&mut view, 64, 1 << 18).expect("complexity");
            assert_eq!(complexity.growth, GrowthClass::QuadraticOrMore);
        },
    );
}

#[test]
fn criterion_4_thue_morse_automaton() {
    criterion(
        4,
        "Thue-Morse: minimal DFAO has 2 states, matches the expansion below 2^14, certified candidate",
        Duration::from_secs(10),
        || {
            let m = catalogue::thue_morse();
            let dfao = minimize(&dfao_from_uniform(&m).expect("uniform automaton"));
            assert_eq!(dfao.states(), 2);

            let view = expand(&m, 1 << 14).expect("expansion");
            for n in 0..(1u64 << 14) {
                let from_seq = view.alphabet().name(view.symbols()[n as usize]);
                assert_eq!(dfao.eval_name(n), from_seq, "position {n}");
            }

            let analysis = analyze(&m, &Config::default());
            assert_eq!(
                analysis.verdict.conclusion,
                Conclusion::CandidateAutomatic {
                    d: 2,
                    certified: true
                }
            );
            assert!(analysis.verdict.certified);
        },
    );
}

#[test]
fn criterion_5_m211_frequencies_and_obstruction() {
    criterion(
        5,
        "2->211: exact frequencies (1/2, 1/2); every base 2..=64 obstructed, residue stall j=0 at q=2",
        Duration::from_secs(10),
        || {
            let m = catalogue::m_2_211();

            let freq = frequencies(&m, 1 << 16).expect("frequency report");
            match &freq.exact {
                ExactFrequencies::Rational {
                    eigenvalue,
                    letters,
                    ..
                } => {
                    assert_eq!(*eigenvalue, BigInt::from(2));
                    let half = Rat::new(BigInt::from(1), BigInt::from(2));
                    assert_eq!(letters.len(), 2);
                    for (name, f) in letters {
                        assert_eq!(*f, half, "frequency of {name}");
                    }
                }
                other => panic!("expected rational frequencies, got {other:?}"),
            }

            let mat = transition_matrix(&m);
            assert_eq!(mat.det(), BigInt::from(-2));
            assert_eq!(
                integer_eigenvalues(&mat).expect("integer eigenvalues"),
                vec![BigInt::from(-1), BigInt::from(2)]
            );

            let obs = eigenvalue_obstruction(&m, &ObstructionOptions::default())
                .expect("obstruction sweep");
            assert!(obs.all_q_obstructed);
            for q in 2..=64 {
                assert!(
                    obs.outcome(q).expect("base covered").is_obstructed(),
                    "base {q} not obstructed"
                );
            }
            match obs.outcome(2).expect("base 2") {
                QObstruction::Obstructed(ObstructionReason::ResidueStall {
                    p, j, witness, ..
                }) => {
                    assert_eq!((*p, *j), (2, 0));
                    assert!(
                        witness.contains("residue 1 (mod 2)"),
                        "odd-numerator witness, got: {witness}"
                    );
                }
                other => panic!("expected a residue stall at q = 2, got {other:?}"),
            }
        },
    );
}

/// One substitution step: the image of a word.
fn apply(m: &Morphism, w: &[u8]) -> Vec<u8> {
    let mut out = Vec::new();
    for &a in w {
        out.extend_from_slice(m.image(a));
    }
    out
}

#[test]
fn criterion_6_aaab_growth_and_divisibility() {
    criterion(
        6,
        "a->aaab, b->aaabaaab: |phi^n| = 4*5^(n-1) and 8*5^(n-1); 5-divisibility grows",
        Duration::from_secs(5),
        || {
            let m = catalogue::m_aaab_aaabaaab();
            let mat = transition_matrix(&m);
            let a = m.alphabet().id("a").expect("letter a") as usize;
            let b = m.alphabet().id("b").expect("letter b") as usize;

            for n in 1..=12u32 {
                let sums = mat.pow(n).column_sums();
                let factor = 5u64.pow(n - 1);
                assert_eq!(sums[a], BigInt::from(4 * factor), "column a at n = {n}");
                assert_eq!(sums[b], BigInt::from(8 * factor), "column b at n = {n}");
            }

            let mut wa = vec![a as u8];
            let mut wb = vec![b as u8];
            for n in 1..=4u32 {
                wa = apply(&m, &wa);
                wb = apply(&m, &wb);
                assert_eq!(wa.len() as u64, 4 * 5u64.pow(n - 1), "literal |phi^{n}(a)|");
                assert_eq!(wb.len() as u64, 8 * 5u64.pow(n - 1), "literal |phi^{n}(b)|");
            }

            let mut letters = expand_letters(&m, 4096).expect("letter expansion");
            let sample = return_words(&mut letters, m.start(), 4096).expect("return words");
            let host = host_profile(&m, 16, &sample, &[5]).expect("divisibility profile");
            let div = host
                .divisibility
                .iter()
                .find(|d| d.q == 5)
                .expect("q = 5 profile");
            assert!(div.grows, "5-divisibility should keep climbing");
        },
    );
}

#[test]
fn criterion_7_squares_gap_dichotomy() {
    criterion(
        7,
        "squares: gap dichotomy fails both ways (count/log > 50, min tail gap > 1000)",
        Duration::from_secs(10),
        || {
            let spec = GeneratorSpec::parse("poly:1,0,0").expect("generator spec");
            let mut view = generate(&spec, 1 << 20).expect("generation");
            let one = view.alphabet().id("1").expect("symbol 1");
            match cobham_gap_test(&mut view, one, 1 << 20, &OccurrenceOptions::default())
                .expect("gap test")
            {
                GapVerdict::FailsBoth(ev) => {
                    assert!(
                        ev.count_log_ratio > 50.0,
                        "count/log ratio {:.2}",
                        ev.count_log_ratio
                    );
                    assert!(
                        ev.min_tail_gap.expect("tail gaps sampled") > 1000,
                        "min tail gap {:?}",
                        ev.min_tail_gap
                    );
                }
                other => panic!("expected FailsBoth, got {other:?}"),
            }
        },
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: property suites.
// ---------------------------------------------------------------------------

/// Deterministic pseudo-random small integers in -3..=3.
struct Lcg(u64);

impl Lcg {
    fn next_entry(&mut self) -> i64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.0 >> 33) % 7) as i64 - 3
    }
}

fn scaled_identity(dim: usize, c: &BigInt) -> IntMatrix {
    let mut m = IntMatrix::zero(dim);
    for i in 0..dim {
        m.set(i, i, c.clone());
    }
    m
}

/// p(M) = 0 for the characteristic polynomial p, all dims up to 5.
fn cayley_hamilton_to_dim_5() {
    let mut rng = Lcg(0x9E3779B97F4A7C15);
    for dim in 1..=5usize {
        for round in 0..6 {
            let entries: Vec<i64> = (0..dim * dim).map(|_| rng.next_entry()).collect();
            let m = IntMatrix::from_i64(dim, &entries).expect("square matrix");
            let p = char_poly(&m);
            let mut acc = IntMatrix::zero(dim);
            for c in p.coeffs().iter().rev() {
                acc = acc.mul(&m).add(&scaled_identity(dim, c));
            }
            assert_eq!(
                acc,
                IntMatrix::zero(dim),
                "Cayley-Hamilton failed at dim {dim}, round {round}"
            );
        }
    }
}

/// M(f . g) = M(f) * M(g) for composable morphisms.
fn transition_matrix_functoriality() {
    let pairs = [
        (catalogue::thue_morse(), catalogue::period_doubling()),
        (catalogue::fibonacci_word(), catalogue::thue_morse()),
        (catalogue::aab(), catalogue::aab()),
        (catalogue::m_2_211(), catalogue::m_121_12221()),
    ];
    for (f, g) in &pairs {
        let composed = f.compose(g).expect("shared alphabet");
        assert_eq!(
            transition_matrix(&composed),
            transition_matrix(f).mul(&transition_matrix(g))
        );
    }
}

/// Longer expansions extend shorter ones verbatim.
fn prefix_stability_of_expand() {
    for m in [
        catalogue::thue_morse(),
        catalogue::fibonacci_word(),
        catalogue::aab(),
        catalogue::m_2_211(),
        catalogue::m_aaab_aaabaaab(),
    ] {
        let short = expand(&m, 1_000).expect("short expansion");
        let long = expand(&m, 4_000).expect("long expansion");
        assert_eq!(
            &short.symbols()[..1_000],
            &long.symbols()[..1_000],
            "prefix instability"
        );
    }
}

/// Every distinctness witness replayed against the raw sequence.
fn kernel_witnesses_reverify() {
    let m = catalogue::aab();
    let mut view = expand(&m, 1 << 18).expect("expansion");
    let est = targeted_kernel_family(&mut view, 2, &KernelFamily::QkMinusK, 8, 1 << 18, None)
        .expect("kernel family");
    assert!(!est.witnesses.is_empty());
    for w in &est.witnesses {
        let left = 2u64.pow(w.left.k) * w.at + w.left.r;
        let right = 2u64.pow(w.right.k) * w.at + w.right.r;
        let seq = view.symbols();
        assert_eq!(seq[left as usize], w.left_value);
        assert_eq!(seq[right as usize], w.right_value);
        assert_ne!(w.left_value, w.right_value);
    }
}

/// The dominant eigenvalue survives passing to the block morphism.
fn block_morphism_preserves_dominant_eigenvalue() {
    for m in [
        catalogue::thue_morse(),
        catalogue::fibonacci_word(),
        catalogue::m_2_211(),
    ] {
        let rho = dominant_eigenvalue(&transition_matrix(&m)).expect("Perron root");
        for ell in 1..=3usize {
            let blocked = block_morphism(&m, ell).expect("block morphism");
            let rho_b = dominant_eigenvalue(&transition_matrix(&blocked)).expect("Perron root");
            assert_eq!(
                rho.min_poly(),
                rho_b.min_poly(),
                "eigenvalue changed for block length {ell}"
            );
        }
    }
}

/// Identical input and config produce byte-identical reports once the
/// wall-clock section is zeroed.
fn reports_are_deterministic() {
    let m = catalogue::aab();
    let config = Config {
        prefix_len: 1 << 16,
        bases: vec![2],
        complexity_horizon: 1 << 14,
        gaps_horizon: 1 << 16,
        runs_horizon: 1 << 16,
        ..Config::default()
    };
    let echo = || InputEcho {
        kind: "morphism".into(),
        source: "<builtin:aab>".into(),
        alphabet: vec!["a".into(), "b".into()],
        prefix_analyzed: 1 << 16,
    };
    let mut timings_a = BTreeMap::new();
    timings_a.insert("analyze".to_string(), 17.0);
    let mut timings_b = BTreeMap::new();
    timings_b.insert("analyze".to_string(), 916.25);

    let mut first = build_report(echo(), &config, &analyze(&m, &config), timings_a);
    let mut second = build_report(echo(), &config, &analyze(&m, &config), timings_b);
    strip_volatile(&mut first);
    strip_volatile(&mut second);
    assert_eq!(to_json_string(&first), to_json_string(&second));
}

/// No certified negative evidence may ever appear on a built-in uniform
/// morphism: they are all automatic by construction.
fn soundness_on_uniform_builtins() {
    for m in catalogue::uniform_aperiodic() {
        let q = m.uniform_length().expect("uniform") as u64;
        let analysis = analyze(&m, &Config::default());
        assert_eq!(
            analysis.verdict.conclusion,
            Conclusion::CandidateAutomatic {
                d: q,
                certified: true
            },
            "misclassified uniform morphism"
        );
        for item in &analysis.verdict.evidence {
            assert!(
                item.grade != Grade::Certified || item.tag == TheoremTag::Automaticity,
                "certified non-automaticity evidence on an automatic sequence: {item:?}"
            );
        }
    }
}

#[test]
fn criterion_8_property_suites() {
    criterion(
        8,
        "property suites: Cayley-Hamilton, functoriality, prefix stability, witness replay, block eigenvalues, determinism, soundness",
        Duration::from_secs(120),
        || {
            cayley_hamilton_to_dim_5();
            transition_matrix_functoriality();
            prefix_stability_of_expand();
            kernel_witnesses_reverify();
            block_morphism_preserves_dominant_eigenvalue();
            reports_are_deterministic();
            soundness_on_uniform_builtins();
        },
    );
}
