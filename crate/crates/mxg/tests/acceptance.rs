//! Acceptance suite: one test per release criterion, each printing a
//! single PASS line with its measured numbers (run with --nocapture to
//! see them). Thresholds are pinned in code, not configuration.

use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use mxg::engine::{temper, untemper, Generator, Mode};
use mxg::equidist;
use mxg::gf2;
use mxg::params::{GeneratorParams, Registry, MERSENNE_EXPONENTS};
use mxg::stats::{self, DummyKind, StreamPath};
use mxg::word::Word;

const TOYS: [&str; 5] = ["toy4-7", "toy4-11", "toy4-13", "toy8-11", "toy8-13"];

/// Weights of the certified characteristic polynomials for the default
/// acceptance rows, frozen at transcription time.
const FROZEN_WEIGHTS: [(&str, usize); 6] = [
    ("mxg32-521", 251),
    ("mxg64-521", 245),
    ("mxg128-521", 257),
    ("mxg32-607", 269),
    ("mxg64-607", 297),
    ("mxg128-607", 291),
];

/// Equidistribution totals for the smallest 32-bit tabulated set,
/// frozen from the first verified run (regression guard on top of the
/// property checks the criterion mandates).
const FROZEN_DEFECT_MXG32_521: (usize, usize) = (74, 38); // (none, linear)

/// SHA-256 of `gen` raw output for the determinism criterion.
const FROZEN_GEN_SHA256: [(&str, &str); 2] = [
    (
        "int32-mxg32-521",
        "4657df31cc619f1ea11ce29b363f1d8069c2053d3b7033cc700eb2b159a9f3ca",
    ),
    (
        "real64-mxg64-521",
        "77c0273cb361bf345261ca988cf52305f96402c5a4ebc9b8e4a800c81e975a0e",
    ),
];

fn lookup(name: &str) -> Arc<GeneratorParams> {
    Registry::embedded().lookup(name).unwrap()
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[test]
fn criterion_01_charpoly_degree_and_irreducibility() {
    for (name, p) in [("mxg32-521", 521usize), ("mxg32-607", 607)] {
        let start = Instant::now();
        let params = lookup(name);
        let f = gf2::char_poly(&params).unwrap();
        assert_eq!(f.degree(), Some(p), "{}: degree", name);
        assert!(
            gf2::is_irreducible_prime_degree(&f).unwrap(),
            "{}: irreducible",
            name
        );
        let elapsed = start.elapsed().as_secs_f64();
        assert!(
            elapsed < 300.0,
            "{}: took {:.1}s, cap is 300s",
            name,
            elapsed
        );
        println!(
            "[criterion 01] PASS: {} degree={} irreducible=true elapsed={:.2}s",
            name, p, elapsed
        );
    }
}

#[test]
fn criterion_02_weight_fidelity() {
    for (name, frozen) in FROZEN_WEIGHTS {
        let params = lookup(name);
        let f = gf2::char_poly(&params).unwrap();
        let weight = f.weight();
        let degree = f.degree().unwrap();
        assert_eq!(
            weight, frozen,
            "{}: weight drifted from the frozen transcription",
            name
        );
        println!(
            "[criterion 02] PASS: {} weight={} weight/degree={:.4} (reported, not thresholded)",
            name,
            weight,
            weight as f64 / degree as f64
        );
    }
}

#[test]
fn criterion_03_equidistribution_oracle_equivalence() {
    let start = Instant::now();
    let mut cells = 0usize;
    for name in TOYS {
        let params = lookup(name);
        for mode in [Mode::None, Mode::Linear] {
            for v in 1..=params.word_size {
                let rank_k = equidist::k_of_v(&params, v, mode).unwrap();
                let oracle_k = equidist::exhaustive_k_of_v(&params, v, mode).unwrap();
                assert_eq!(rank_k, oracle_k, "{} v={} mode={:?}", name, v, mode);
                cells += 1;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 120.0, "suite took {:.1}s, cap is 120s", elapsed);
    println!(
        "[criterion 03] PASS: {} (set, v, mode) cells, exact match, {:.1}s",
        cells, elapsed
    );
}

#[test]
fn criterion_04_engine_oracle_equivalence() {
    // Descriptor interpreter vs transition matrix on toys.
    for name in TOYS {
        let params = lookup(name);
        let p = params.effective_bits;
        let m = gf2::transition_matrix(&params).unwrap();
        let mut s = 0x5EED ^ p as u64;
        for _ in 0..100 {
            let idx = 1 + splitmix(&mut s) % ((1 << p) - 1);
            let mut gen = Generator::from_state_index(params.clone(), idx);
            let mut vec = gen.effective_bits();
            for _ in 0..100 {
                gen.next_raw();
                vec = m.mat_vec(&vec);
            }
            assert_eq!(gen.effective_bits(), vec, "{} from state {}", name, idx);
        }
    }
    // Interpreter vs specialized fast path on every tabulated set.
    let mut fast_sets = 0;
    for row in Registry::embedded().list() {
        if row.is_toy() {
            continue;
        }
        let mut fast = Generator::seed(row.clone(), 5489);
        let mut interp = Generator::seed_interpreted(row.clone(), 5489);
        assert!(fast.uses_fast_path(), "{} must have a fast path", row.name);
        for i in 0..100_000 {
            assert_eq!(
                fast.next_raw(),
                interp.next_raw(),
                "{} step {}",
                row.name,
                i
            );
        }
        assert!(fast.same_state(&interp));
        fast_sets += 1;
    }
    println!(
        "[criterion 04] PASS: 5 toys x 100 states x 100 steps vs matrix; {} tabulated sets x 1e5 steps fast==interpreted",
        fast_sets
    );
}

#[test]
fn criterion_05_full_period_at_toy_scale() {
    for name in TOYS {
        let params = lookup(name);
        let p = params.effective_bits as u32;
        let start = Generator::from_state_index(params.clone(), 1);
        let mut gen = start.clone();
        let full = (1u64 << p) - 1;
        let mut period = 0u64;
        for step in 1..=full {
            gen.next_raw();
            if gen.same_linear_state(&start) {
                period = step;
                break;
            }
        }
        assert_eq!(period, full, "{}: cycle length", name);
        println!(
            "[criterion 05] PASS: {} raw-output cycle = 2^{} - 1 = {}",
            name, p, full
        );
    }
}

#[test]
fn criterion_06_tempering_contracts() {
    // Linear tempering round-trips on 1e5 random words per set.
    let mut sets = 0;
    for row in Registry::embedded().list() {
        if row.tempering_linear.kind != mxg::params::TemperKind::Linear {
            continue;
        }
        let w = row.word_size;
        let mut s = 0xC0FFEE ^ row.effective_bits as u64;
        for _ in 0..100_000 {
            let word = Word::from_parts(splitmix(&mut s), splitmix(&mut s)).and(Word::mask(w));
            assert_eq!(untemper(temper(word, &row), &row), word, "{}", row.name);
        }
        sets += 1;
    }
    // Weyl output minus the logged accumulator equals the raw stream.
    for name in ["mxg32-521", "mxg64-521", "mxg128-521", "toy8-11"] {
        let params = lookup(name);
        let w = params.word_size;
        let mut gen = Generator::seed(params.clone(), 777);
        let mut shadow = gen.clone();
        for i in 0..100_000 {
            let out = gen.next_word(Mode::Weyl).unwrap();
            let raw = shadow.next_raw();
            assert_eq!(out.sub(gen.weyl_acc(), w), raw, "{} step {}", name, i);
        }
    }
    println!(
        "[criterion 06] PASS: linear round-trip on {} sets x 1e5 words; weyl decomposition on 4 sets x 1e5 steps",
        sets
    );
}

#[test]
fn criterion_07_jump_ahead() {
    let start = Instant::now();
    let params = lookup("mxg32-521");
    let f = gf2::char_poly(&params).unwrap();
    let origin = Generator::seed(params.clone(), 5489);
    let jumped = origin.jump(&(BigUint::from(1u32) << 20), &f).unwrap();
    let mut seq = origin.clone();
    for _ in 0..(1u32 << 20) {
        seq.next_raw();
    }
    assert!(
        jumped.same_linear_state(&seq),
        "jump(2^20) must equal 2^20 raw steps"
    );
    // Identities required alongside the big jump.
    assert!(origin
        .jump(&BigUint::from(0u32), &f)
        .unwrap()
        .same_state(&origin));
    let one = origin.jump(&BigUint::from(1u32), &f).unwrap();
    let mut step1 = origin.clone();
    step1.next_raw();
    assert!(one.same_linear_state(&step1));
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 10.0,
        "jump check took {:.2}s, cap is 10s",
        elapsed
    );
    println!(
        "[criterion 07] PASS: jump(2^20) == sequential on mxg32-521 in {:.2}s",
        elapsed
    );
}

#[test]
fn criterion_08_statistical_echo() {
    const SAMPLE: usize = 10 << 20;
    const SEED: u64 = 5489;
    let names: Vec<String> = MERSENNE_EXPONENTS
        .iter()
        .flat_map(|p| [format!("mxg32-{}", p), format!("mxg64-{}", p)])
        .collect();
    let jobs: Vec<(String, StreamPath)> = names
        .iter()
        .flat_map(|n| {
            [
                (n.clone(), StreamPath::Int32),
                (n.clone(), StreamPath::Real64),
            ]
        })
        .collect();
    let start = Instant::now();
    let worst: Vec<(String, &'static str, f64)> = jobs
        .par_iter()
        .flat_map(|(name, path)| {
            let params = lookup(name);
            let outcomes = stats::run_battery(&params, SEED, Mode::Weyl, *path, SAMPLE).unwrap();
            outcomes
                .into_iter()
                .map(|o| {
                    (
                        format!("{}/{}", name, o.stream.path.name()),
                        o.test_name,
                        o.p_value,
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(worst.len(), names.len() * 2 * 5);
    let mut min_p = 1.0f64;
    let mut max_p = 0.0f64;
    for (stream, test, p) in &worst {
        assert!(
            (1e-4..=1.0 - 1e-4).contains(p),
            "{} {}: p = {:e} outside [1e-4, 1-1e-4]",
            stream,
            test,
            p
        );
        min_p = min_p.min(*p);
        max_p = max_p.max(*p);
    }
    // Negative controls must fail decisively.
    for kind in [DummyKind::Zeros, DummyKind::Ones, DummyKind::Counter] {
        let stream = stats::dummy_stream(kind, stats::MIN_SAMPLE_BYTES);
        let spec = stats::StreamSpec {
            param_name: format!("{:?}", kind),
            seed: 0,
            mode: Mode::None,
            path: StreamPath::Int32,
        };
        let outcomes = stats::run_battery_on_bits(spec, &stream);
        let control_min = outcomes.iter().map(|o| o.p_value).fold(1.0, f64::min);
        assert!(
            control_min < 1e-6,
            "{:?} control min p = {:e}",
            kind,
            control_min
        );
    }
    println!(
        "[criterion 08] PASS: {} outcomes over {} streams x 10 MB, p in [{:.2e}, {:.6}], controls rejected ({:.0}s)",
        worst.len(),
        jobs.len(),
        min_p,
        max_p,
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_09_dimension_gaps_smallest_32bit_set() {
    let start = Instant::now();
    let params = lookup("mxg32-521");
    let p = params.effective_bits;
    let none = equidist::full_report(&params, Mode::None).unwrap();
    let linear = equidist::full_report(&params, Mode::Linear).unwrap();
    for report in [&none, &linear] {
        assert_eq!(
            report.per_v[0].k_v, p,
            "k(1) must reach p for a primitive set"
        );
        for row in &report.per_v {
            assert!(
                row.k_v * row.v as usize <= p,
                "dimension bound at v={}",
                row.v
            );
            assert_eq!(row.gap, row.k_star - row.k_v);
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 600.0,
        "equidist took {:.0}s, cap is 600s",
        elapsed
    );
    // Regression freeze of the computed totals (the tables this echoes
    // are not shipped with the build inputs, so the property checks
    // above are the binding part).
    assert_eq!(
        (none.total_defect, linear.total_defect),
        FROZEN_DEFECT_MXG32_521,
        "gap totals drifted from the frozen run"
    );
    println!(
        "[criterion 09] PASS: mxg32-521 total_defect none={} linear={} in {:.0}s",
        none.total_defect, linear.total_defect, elapsed
    );
}

#[test]
fn criterion_10_byte_identical_streams() {
    let bin = env!("CARGO_BIN_EXE_mxg");
    let cases = [
        (
            "int32-mxg32-521",
            vec![
                "gen",
                "--param",
                "mxg32-521",
                "--seed",
                "5489",
                "--count",
                "65536",
                "--format",
                "raw",
            ],
        ),
        (
            "real64-mxg64-521",
            vec![
                "gen",
                "--param",
                "mxg64-521",
                "--seed",
                "5489",
                "--path",
                "real64",
                "--count",
                "8192",
                "--format",
                "raw",
            ],
        ),
    ];
    for (label, args) in &cases {
        let run = |args: &[&str]| {
            let out = Command::new(bin).args(args).output().expect("spawn gen");
            assert!(out.status.success(), "{}: gen failed", label);
            out.stdout
        };
        let first = run(args);
        let second = run(args);
        assert_eq!(first, second, "{}: two runs differ", label);
        let mut hasher = Sha256::new();
        hasher.update(&first);
        let hex: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{:02x}", b))
            .collect();
        let frozen = FROZEN_GEN_SHA256
            .iter()
            .find(|(l, _)| l == label)
            .unwrap()
            .1;
        assert_eq!(hex, frozen, "{}: checksum drifted", label);
        println!(
            "[criterion 10] PASS: {} byte-identical, sha256={}",
            label,
            &hex[..16]
        );
    }
}
