//! Throughput measurement for the CLI bench command, plus two classic
//! reference generators so the numbers have in-repo context: a plain
//! 128-bit xorshift and a standard 32-bit twisted generalized feedback
//! generator.

use std::hint::black_box;
use std::time::Instant;

use crate::engine::{Generator, Mode};
use crate::params::Registry;
use crate::Result;

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub label: String,
    pub mode: &'static str,
    pub ns_per_word: f64,
    pub words_per_sec: f64,
}

impl BenchRow {
    pub fn tsv_header() -> &'static str {
        "generator\tmode\tns_per_word\twords_per_sec"
    }

    pub fn to_tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{:.3}\t{:.3e}",
            self.label, self.mode, self.ns_per_word, self.words_per_sec
        )
    }
}

/// Median ns/word over `reps` repetitions of roughly `secs` each, after
/// one warm-up repetition.
fn measure<F: FnMut(u64) -> u64>(mut run_words: F, secs: f64, reps: usize) -> f64 {
    // Calibrate a batch size that lasts about a repetition.
    let mut batch = 64 * 1024u64;
    loop {
        let t = Instant::now();
        black_box(run_words(batch));
        let dt = t.elapsed().as_secs_f64();
        if dt > secs / 4.0 || batch >= 1 << 28 {
            break;
        }
        batch *= 4;
    }
    black_box(run_words(batch / 4)); // warm-up
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps.max(5) {
        let mut words = 0u64;
        let t = Instant::now();
        while t.elapsed().as_secs_f64() < secs {
            black_box(run_words(batch));
            words += batch;
        }
        samples.push(t.elapsed().as_secs_f64() * 1e9 / words as f64);
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    samples[samples.len() / 2]
}

pub fn bench_generators(
    registry: &Registry,
    param_names: &[String],
    modes: &[Mode],
    secs_per_cell: f64,
    reps: usize,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for name in param_names {
        let params = registry.lookup(name)?;
        for &mode in modes {
            // Skip modes the parameter set does not carry.
            let mut probe = Generator::seed(params.clone(), 1);
            if probe.next_word(mode).is_err() {
                continue;
            }
            let mut gen = Generator::seed(params.clone(), 5489);
            let ns = measure(
                move |n| {
                    let mut acc = 0u64;
                    for _ in 0..n {
                        acc ^= gen.next_word(mode).expect("mode checked above").lo;
                    }
                    acc
                },
                secs_per_cell,
                reps,
            );
            rows.push(BenchRow {
                label: name.clone(),
                mode: mode.name(),
                ns_per_word: ns,
                words_per_sec: 1e9 / ns,
            });
        }
    }
    // Reference rows.
    let mut xs = Xorshift128::new(5489);
    let ns = measure(
        move |n| {
            let mut acc = 0u32;
            for _ in 0..n {
                acc ^= xs.next();
            }
            acc as u64
        },
        secs_per_cell,
        reps,
    );
    rows.push(BenchRow {
        label: "ref-xorshift128".into(),
        mode: "none",
        ns_per_word: ns,
        words_per_sec: 1e9 / ns,
    });
    let mut mt = Mt19937::new(5489);
    let ns = measure(
        move |n| {
            let mut acc = 0u32;
            for _ in 0..n {
                acc ^= mt.next();
            }
            acc as u64
        },
        secs_per_cell,
        reps,
    );
    rows.push(BenchRow {
        label: "ref-mt19937".into(),
        mode: "linear",
        ns_per_word: ns,
        words_per_sec: 1e9 / ns,
    });
    Ok(rows)
}

/// Marsaglia's four-word xorshift, period 2^128 - 1.
pub struct Xorshift128 {
    x: u32,
    y: u32,
    z: u32,
    w: u32,
}

impl Xorshift128 {
    pub fn new(seed: u32) -> Self {
        Xorshift128 {
            x: seed ^ 0x075BCD15,
            y: 0x159A55E5,
            z: 0x1F123BB5,
            w: seed.wrapping_mul(1812433253).wrapping_add(1) | 1,
        }
    }

    #[inline]
    pub fn next(&mut self) -> u32 {
        let t = self.x ^ (self.x << 11);
        self.x = self.y;
        self.y = self.z;
        self.z = self.w;
        self.w = self.w ^ (self.w >> 19) ^ t ^ (t >> 8);
        self.w
    }
}

/// The classic 623-lag twisted generator with shift/mask tempering
/// (block refill variant), as a speed reference.
pub struct Mt19937 {
    state: [u32; 624],
    index: usize,
}

impl Mt19937 {
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; 624];
        state[0] = seed;
        for i in 1..624 {
            state[i] = 1812433253u32
                .wrapping_mul(state[i - 1] ^ (state[i - 1] >> 30))
                .wrapping_add(i as u32);
        }
        Mt19937 { state, index: 624 }
    }

    fn refill(&mut self) {
        const M: usize = 397;
        const MATRIX_A: u32 = 0x9908B0DF;
        const UPPER: u32 = 0x80000000;
        const LOWER: u32 = 0x7FFFFFFF;
        for i in 0..624 {
            let y = (self.state[i] & UPPER) | (self.state[(i + 1) % 624] & LOWER);
            let mut next = self.state[(i + M) % 624] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    #[inline]
    pub fn next(&mut self) -> u32 {
        if self.index >= 624 {
            self.refill();
        }
        let mut y = self.state[self.index];
        self.index += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9D2C5680;
        y ^= (y << 15) & 0xEFC60000;
        y ^ (y >> 18)
    }
}
