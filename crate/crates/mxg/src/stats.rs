//! Built-in statistical battery: five classical bit-level tests chosen
//! for implementation transparency (monobit frequency, block frequency
//! with m = 128, runs, 32x32 binary matrix rank, and the 16-bit
//! overlapping serial test). This echoes, not replaces, external
//! batteries; raw streams for those are exported by the CLI.
//!
//! Stream convention: each output value contributes its bits
//! least-significant first, so the test bitstream is identical to the
//! little-endian raw byte export read bit 0 of byte 0 onward.

use std::sync::Arc;

use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;

use crate::bits::BitVec;
use crate::engine::{Generator, Mode};
use crate::params::GeneratorParams;
use crate::{Error, Result};

/// Smallest sample the battery accepts.
pub const MIN_SAMPLE_BYTES: usize = 1 << 20;

const BLOCK_BITS: usize = 128;
const SERIAL_M: u32 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamPath {
    /// 32-bit integer parts of the output words.
    Int32,
    /// 53-bit mantissas of the derived reals.
    Real64,
}

impl StreamPath {
    pub fn parse(s: &str) -> Result<StreamPath> {
        match s {
            "int32" => Ok(StreamPath::Int32),
            "real64" => Ok(StreamPath::Real64),
            other => Err(Error::InvalidArgument(format!("unknown path '{}'", other))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StreamPath::Int32 => "int32",
            StreamPath::Real64 => "real64",
        }
    }
}

/// Where a test stream came from.
#[derive(Clone, Debug)]
pub struct StreamSpec {
    pub param_name: String,
    pub seed: u64,
    pub mode: Mode,
    pub path: StreamPath,
}

#[derive(Clone, Debug)]
pub struct TestOutcome {
    pub test_name: &'static str,
    pub stream: StreamSpec,
    pub sample_bytes: usize,
    pub statistic: f64,
    pub p_value: f64,
}

impl TestOutcome {
    /// Two-sided view flagging both suspicious tails.
    pub fn two_sided_p(&self) -> f64 {
        2.0 * self.p_value.min(1.0 - self.p_value)
    }

    pub fn tsv_header() -> &'static str {
        "test\tparam\tseed\tmode\tpath\tbytes\tstatistic\tp_value"
    }

    pub fn to_tsv_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{:.6e}\t{:.6e}",
            self.test_name,
            self.stream.param_name,
            self.stream.seed,
            self.stream.mode.name(),
            self.stream.path.name(),
            self.sample_bytes,
            self.statistic,
            self.p_value
        )
    }
}

/// Generate the designated output stream as a bit sequence.
pub fn collect_stream(
    params: &Arc<GeneratorParams>,
    seed: u64,
    mode: Mode,
    path: StreamPath,
    bytes: usize,
) -> Result<BitVec> {
    let target_bits = bytes * 8;
    let mut bits = BitVec::with_capacity(target_bits + 128);
    let mut gen = Generator::seed(params.clone(), seed);
    match path {
        StreamPath::Int32 => {
            let w = params.word_size;
            if w < 32 {
                return Err(Error::InvalidArgument(format!(
                    "int32 path needs word size >= 32 (parameter set '{}' has w = {})",
                    params.name, w
                )));
            }
            while bits.len() < target_bits {
                let word = gen.next_word(mode)?;
                if w > 64 {
                    push_lsb(&mut bits, word.lo, 64);
                    push_lsb(&mut bits, word.hi, w - 64);
                } else {
                    push_lsb(&mut bits, word.lo, w);
                }
            }
        }
        StreamPath::Real64 => {
            while bits.len() < target_bits {
                let mantissa = gen.next_bits64(mode)? >> 11;
                push_lsb(&mut bits, mantissa, 53);
            }
        }
    }
    Ok(truncate(bits, target_bits))
}

/// Degenerate streams for negative-control checks.
#[derive(Clone, Copy, Debug)]
pub enum DummyKind {
    Zeros,
    Ones,
    Counter,
}

pub fn dummy_stream(kind: DummyKind, bytes: usize) -> BitVec {
    let target_bits = bytes * 8;
    let mut bits = BitVec::with_capacity(target_bits + 32);
    match kind {
        DummyKind::Zeros => {
            while bits.len() < target_bits {
                push_lsb(&mut bits, 0, 64);
            }
        }
        DummyKind::Ones => {
            while bits.len() < target_bits {
                push_lsb(&mut bits, u64::MAX, 64);
            }
        }
        DummyKind::Counter => {
            let mut c = 0u32;
            while bits.len() < target_bits {
                push_lsb(&mut bits, c as u64, 32);
                c = c.wrapping_add(1);
            }
        }
    }
    truncate(bits, target_bits)
}

fn push_lsb(bits: &mut BitVec, value: u64, count: u32) {
    for i in 0..count {
        bits.push((value >> i) & 1 != 0);
    }
}

fn truncate(bits: BitVec, target: usize) -> BitVec {
    if bits.len() == target {
        return bits;
    }
    let mut out = BitVec::with_capacity(target);
    for i in 0..target {
        out.push(bits.get(i));
    }
    out
}

/// Run the battery on a generated stream. Deterministic for fixed
/// inputs; failing p-values are outcomes, not errors.
pub fn run_battery(
    params: &Arc<GeneratorParams>,
    seed: u64,
    mode: Mode,
    path: StreamPath,
    bytes: usize,
) -> Result<Vec<TestOutcome>> {
    if bytes < MIN_SAMPLE_BYTES {
        return Err(Error::InvalidArgument(format!(
            "battery sample must be at least {} bytes (got {})",
            MIN_SAMPLE_BYTES, bytes
        )));
    }
    let stream = collect_stream(params, seed, mode, path, bytes)?;
    let spec = StreamSpec {
        param_name: params.name.clone(),
        seed,
        mode,
        path,
    };
    Ok(run_battery_on_bits(spec, &stream))
}

/// The five tests against an arbitrary bit stream.
pub fn run_battery_on_bits(spec: StreamSpec, bits: &BitVec) -> Vec<TestOutcome> {
    let bytes = bits.len() / 8;
    let mk = |test_name: &'static str, (statistic, p_value): (f64, f64)| TestOutcome {
        test_name,
        stream: spec.clone(),
        sample_bytes: bytes,
        statistic,
        p_value,
    };
    vec![
        mk("monobit", monobit(bits)),
        mk("block_frequency", block_frequency(bits, BLOCK_BITS)),
        mk("runs", runs(bits)),
        mk("matrix_rank", matrix_rank32(bits)),
        mk("serial16", serial(bits, SERIAL_M)),
    ]
}

/// Monobit frequency: s_obs = |#1 - #0| / sqrt(n), p = erfc(s_obs/sqrt 2).
fn monobit(bits: &BitVec) -> (f64, f64) {
    let n = bits.len() as f64;
    let ones = bits.count_ones() as f64;
    let s = (2.0 * ones - n).abs() / n.sqrt();
    (s, erfc(s / std::f64::consts::SQRT_2))
}

/// Block frequency: chi^2 = 4m sum (pi_i - 1/2)^2 over N full blocks,
/// p = Q(N/2, chi^2/2).
fn block_frequency(bits: &BitVec, m: usize) -> (f64, f64) {
    let n_blocks = bits.len() / m;
    if n_blocks == 0 {
        return (f64::NAN, 0.0);
    }
    let mut chi2 = 0.0;
    for b in 0..n_blocks {
        let mut ones = 0u32;
        let start = b * m;
        // Blocks are sub-limb aligned only for the test fixtures; the
        // production block size (128) is limb aligned.
        if start.is_multiple_of(64) && m.is_multiple_of(64) {
            for l in 0..m / 64 {
                ones += bits.limbs()[start / 64 + l].count_ones();
            }
        } else {
            for i in start..start + m {
                ones += bits.get(i) as u32;
            }
        }
        let pi = ones as f64 / m as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * m as f64;
    (chi2, gamma_ur(n_blocks as f64 / 2.0, chi2 / 2.0))
}

/// Runs test. Degenerate streams (prerequisite frequency way off) get
/// p = 0 directly, matching the usual convention.
fn runs(bits: &BitVec) -> (f64, f64) {
    let n = bits.len();
    let nf = n as f64;
    let pi = bits.count_ones() as f64 / nf;
    if (pi - 0.5).abs() >= 2.0 / nf.sqrt() {
        return (f64::INFINITY, 0.0);
    }
    // Transitions between adjacent bits, word-at-a-time.
    let limbs = bits.limbs();
    let mut transitions = 0u64;
    for (i, &l) in limbs.iter().enumerate() {
        let in_limb_pairs = if (i + 1) * 64 <= n {
            63
        } else {
            n - i * 64 - 1
        };
        let x = l ^ (l >> 1);
        let mask = if in_limb_pairs >= 63 {
            (1u64 << 63) - 1
        } else {
            (1u64 << in_limb_pairs) - 1
        };
        transitions += (x & mask).count_ones() as u64;
        // Boundary pair (bit 63 of this limb, bit 0 of the next).
        if (i + 1) * 64 < n {
            let next = limbs[i + 1];
            transitions += (l >> 63) ^ (next & 1);
        }
    }
    let v = transitions as f64 + 1.0;
    let num = (v - 2.0 * nf * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * nf).sqrt() * pi * (1.0 - pi);
    (v, erfc(num / den))
}

/// 32x32 binary matrix rank test over consecutive 1024-bit blocks.
fn matrix_rank32(bits: &BitVec) -> (f64, f64) {
    let n_matrices = bits.len() / 1024;
    if n_matrices == 0 {
        return (f64::NAN, 0.0);
    }
    let mut f_full = 0usize;
    let mut f_minus1 = 0usize;
    let limbs = bits.limbs();
    for m in 0..n_matrices {
        let mut rows = [0u32; 32];
        for (r, row) in rows.iter_mut().enumerate() {
            let off = m * 1024 + r * 32;
            let limb = limbs[off / 64];
            *row = if off % 64 == 0 {
                limb as u32
            } else {
                (limb >> 32) as u32
            };
        }
        match rank32(&mut rows) {
            32 => f_full += 1,
            31 => f_minus1 += 1,
            _ => {}
        }
    }
    let (p_full, p_minus1) = rank32_probabilities();
    let p_rest = 1.0 - p_full - p_minus1;
    let nf = n_matrices as f64;
    let f_rest = n_matrices - f_full - f_minus1;
    let chi2 = (f_full as f64 - p_full * nf).powi(2) / (p_full * nf)
        + (f_minus1 as f64 - p_minus1 * nf).powi(2) / (p_minus1 * nf)
        + (f_rest as f64 - p_rest * nf).powi(2) / (p_rest * nf);
    (chi2, gamma_ur(1.0, chi2 / 2.0))
}

fn rank32(rows: &mut [u32; 32]) -> usize {
    let mut rank = 0;
    for col in (0..32).rev() {
        let bit = 1u32 << col;
        let Some(pivot) = (rank..32).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let prow = rows[rank];
        for r in 0..32 {
            if r != rank && rows[r] & bit != 0 {
                rows[r] ^= prow;
            }
        }
        rank += 1;
    }
    rank
}

/// Exact probabilities that a random 32x32 GF(2) matrix has rank 32 / 31.
fn rank32_probabilities() -> (f64, f64) {
    let full = |r: i32| {
        let (m, q) = (32i32, 32i32);
        let mut p = 2f64.powi(r * (m + q - r) - m * q);
        for i in 0..r {
            p *= (1.0 - 2f64.powi(i - m)) * (1.0 - 2f64.powi(i - q)) / (1.0 - 2f64.powi(i - r));
        }
        p
    };
    (full(32), full(31))
}

/// Overlapping serial test with wraparound; returns the first p-value
/// (nabla psi^2_m against Q(2^(m-2), ./2)).
fn serial(bits: &BitVec, m: u32) -> (f64, f64) {
    let n = bits.len();
    if n < (1usize << m) {
        return (f64::NAN, 0.0);
    }
    let mut counts16 = vec![0u64; 1 << m];
    // Rolling LSB-first window over the sequence extended by its first
    // m-1 bits.
    let mut win: u32 = 0;
    for j in 0..(m - 1) as usize {
        if bits.get(j) {
            win |= 1 << j;
        }
    }
    let mmask = (1u32 << m) - 1;
    for i in 0..n {
        let incoming = i + (m as usize) - 1;
        let b = bits.get(if incoming < n { incoming } else { incoming - n });
        win = (win | (b as u32) << (m - 1)) & mmask;
        counts16[win as usize] += 1;
        win >>= 1;
    }
    let psi = |counts: &[u64], bits_m: u32| -> f64 {
        let sum_sq: f64 = counts.iter().map(|&c| (c as f64) * (c as f64)).sum();
        2f64.powi(bits_m as i32) / n as f64 * sum_sq - n as f64
    };
    // Windows one bit shorter share positions: c_(m-1)[y] sums the two
    // extensions of y.
    let fold = |counts: &[u64]| -> Vec<u64> {
        let half = counts.len() / 2;
        (0..half).map(|y| counts[y] + counts[y + half]).collect()
    };
    let counts15 = fold(&counts16);
    let counts14 = fold(&counts15);
    let psi16 = psi(&counts16, m);
    let psi15 = psi(&counts15, m - 1);
    let psi14 = psi(&counts14, m - 2);
    let del1 = psi16 - psi15;
    let _del2 = psi16 - 2.0 * psi15 + psi14;
    (del1, gamma_ur(2f64.powi(m as i32 - 2), del1 / 2.0))
}
