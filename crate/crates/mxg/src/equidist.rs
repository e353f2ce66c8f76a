//! Equidistribution analysis. k(v) is the largest dimension k such that
//! the GF(2)-linear map from the p effective state bits to the
//! concatenated v most-significant bits of the first k outputs has full
//! rank k*v; the dimension gap at resolution v is d(v) = floor(p/v) -
//! k(v). The weyl output path is non-linear, so the rank method applies
//! to modes none and linear only; an exhaustive enumeration oracle
//! covers toy-sized parameter sets.

use std::sync::Arc;

use crate::engine::{temper, Generator, Mode};
use crate::gf2::RowBasis;
use crate::params::GeneratorParams;
use crate::{Error, Result};

/// Cap for the exhaustive enumeration oracle.
pub const EXHAUSTIVE_CAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VRow {
    pub v: u32,
    /// floor(p/v), the theoretical upper bound.
    pub k_star: usize,
    /// Achieved dimension.
    pub k_v: usize,
    /// k_star - k_v.
    pub gap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquidistReport {
    pub param_name: String,
    pub tempering_mode: Mode,
    pub w_analyzed: u32,
    pub per_v: Vec<VRow>,
    pub total_defect: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeStrategy {
    /// Probe k upward from 1, aborting at the first rank deficiency.
    Ascending,
    /// Binary search on k with a fresh rank computation per probe.
    Binary,
}

fn reject_weyl(mode: Mode) -> Result<()> {
    if mode == Mode::Weyl {
        return Err(Error::UnsupportedMode(
            "weyl tempering adds the accumulator with integer carries, which is not GF(2)-linear; \
             equidistribution rank analysis supports modes none and linear"
                .into(),
        ));
    }
    Ok(())
}

/// Per-output bit rows over the effective-state basis: rows[k][b] is the
/// p-bit row of output k, bit (w-1-b), evaluated on every unit state.
struct OutputBitTable {
    rows: Vec<Vec<Vec<u64>>>,
    v_max: u32,
}

impl OutputBitTable {
    fn build(
        params: &Arc<GeneratorParams>,
        mode: Mode,
        k_max: usize,
        v_max: u32,
        reverse_basis: bool,
    ) -> Result<OutputBitTable> {
        reject_weyl(mode)?;
        if mode == Mode::Linear && params.tempering_linear.kind != crate::params::TemperKind::Linear
        {
            return Err(Error::Config(format!(
                "parameter set '{}' has no linear tempering",
                params.name
            )));
        }
        let p = params.effective_bits;
        let w = params.word_size;
        let limbs = p.div_ceil(64);
        let mut rows = vec![vec![vec![0u64; limbs]; v_max as usize]; k_max];
        let mut unit = vec![0u64; limbs];
        for j in 0..p {
            let col = if reverse_basis { p - 1 - j } else { j };
            unit[col / 64] |= 1 << (col % 64);
            let mut gen = Generator::from_effective_bits(params.clone(), &unit);
            unit[col / 64] &= !(1 << (col % 64));
            for out_rows in rows.iter_mut() {
                let mut word = gen.next_raw();
                if mode == Mode::Linear {
                    word = temper(word, params);
                }
                for (b, row) in out_rows.iter_mut().enumerate() {
                    if word.bit(w - 1 - b as u32) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
            }
        }
        Ok(OutputBitTable { rows, v_max })
    }

    /// Rank of the map onto the first k outputs at resolution v,
    /// inserted output by output; returns the first k whose rows went
    /// dependent (None if full rank through k_limit).
    fn first_deficient_k(&self, p: usize, v: u32, k_limit: usize) -> Option<usize> {
        debug_assert!(v <= self.v_max);
        let mut basis = RowBasis::new(p);
        for k in 1..=k_limit {
            for b in 0..v as usize {
                if !basis.insert(&self.rows[k - 1][b]) {
                    return Some(k);
                }
            }
        }
        None
    }

    fn rank_full(&self, p: usize, v: u32, k: usize) -> usize {
        let mut basis = RowBasis::new(p);
        for kk in 0..k {
            for b in 0..v as usize {
                basis.insert(&self.rows[kk][b]);
            }
        }
        basis.rank()
    }
}

fn probe(
    table: &OutputBitTable,
    p: usize,
    v: u32,
    k_star: usize,
    strategy: ProbeStrategy,
) -> usize {
    match strategy {
        ProbeStrategy::Ascending => match table.first_deficient_k(p, v, k_star) {
            Some(k) => k - 1,
            None => k_star,
        },
        ProbeStrategy::Binary => {
            // Largest k with rank(k) == k*v; the predicate is monotone
            // because a deficiency never heals when more rows arrive.
            let (mut lo, mut hi) = (0usize, k_star);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if table.rank_full(p, v, mid) == mid * v as usize {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        }
    }
}

pub(crate) fn k_of_v_probed(
    params: &Arc<GeneratorParams>,
    v: u32,
    mode: Mode,
    strategy: ProbeStrategy,
    reverse_basis: bool,
) -> Result<usize> {
    reject_weyl(mode)?;
    let w = params.word_size;
    let p = params.effective_bits;
    if v == 0 || v > w {
        return Err(Error::InvalidArgument(format!(
            "v must be in [1, {}] (got {})",
            w, v
        )));
    }
    if v as usize > p {
        return Ok(0);
    }
    let k_star = p / v as usize;
    if k_star == 0 {
        return Ok(0);
    }
    let table = OutputBitTable::build(params, mode, k_star, v, reverse_basis)?;
    Ok(probe(&table, p, v, k_star, strategy))
}

/// Achieved equidistribution dimension at resolution v.
pub fn k_of_v(params: &Arc<GeneratorParams>, v: u32, mode: Mode) -> Result<usize> {
    k_of_v_probed(params, v, mode, ProbeStrategy::Ascending, false)
}

/// Gap table over v = 1..min(w, 32) plus the total dimension defect.
pub fn full_report(params: &Arc<GeneratorParams>, mode: Mode) -> Result<EquidistReport> {
    reject_weyl(mode)?;
    let p = params.effective_bits;
    let w_analyzed = params.word_size.min(32);
    // One table serves every v: k never exceeds floor(p/v) <= p.
    let table = OutputBitTable::build(params, mode, p, w_analyzed, false)?;
    let mut per_v = Vec::with_capacity(w_analyzed as usize);
    let mut total_defect = 0usize;
    for v in 1..=w_analyzed {
        let k_star = p / v as usize;
        let k_v = if v as usize > p || k_star == 0 {
            0
        } else {
            probe(&table, p, v, k_star, ProbeStrategy::Ascending)
        };
        let gap = k_star - k_v;
        total_defect += gap;
        per_v.push(VRow {
            v,
            k_star,
            k_v,
            gap,
        });
    }
    Ok(EquidistReport {
        param_name: params.name.clone(),
        tempering_mode: mode,
        w_analyzed,
        per_v,
        total_defect,
    })
}

/// Brute-force oracle: enumerate every nonzero state, tabulate the
/// multiset of (k,v) output-prefix tuples over the full period, and
/// return the largest k at which every tuple value occurs exactly
/// 2^(p-kv) times (the all-zero tuple once less). Definitionally exact;
/// only usable for p <= 20.
pub fn exhaustive_k_of_v(params: &Arc<GeneratorParams>, v: u32, mode: Mode) -> Result<usize> {
    reject_weyl(mode)?;
    let p = params.effective_bits;
    if p > EXHAUSTIVE_CAP {
        return Err(Error::SizeLimit {
            what: "exhaustive_k_of_v".into(),
            limit: EXHAUSTIVE_CAP,
            got: p,
        });
    }
    let w = params.word_size;
    if v == 0 || v > w {
        return Err(Error::InvalidArgument(format!(
            "v must be in [1, {}] (got {})",
            w, v
        )));
    }
    if v as usize > p {
        return Ok(0);
    }
    let k_star = p / v as usize;
    for k in 1..=k_star {
        let tuple_bits = k * v as usize;
        let mut counts = vec![0u64; 1usize << tuple_bits];
        for state in 1..(1u64 << p) {
            let mut gen = Generator::from_state_index(params.clone(), state);
            let mut tuple = 0u64;
            for _ in 0..k {
                let mut word = gen.next_raw();
                if mode == Mode::Linear {
                    word = temper(word, params);
                }
                tuple = (tuple << v) | word.top_bits(v, w).lo;
            }
            counts[tuple as usize] += 1;
        }
        let expected = 1u64 << (p - tuple_bits);
        let ok = counts[0] == expected - 1 && counts[1..].iter().all(|&c| c == expected);
        if !ok {
            return Ok(k - 1);
        }
    }
    Ok(k_star)
}

impl EquidistReport {
    /// Tab-separated export: header comments, one (v, k_star, k_v, gap)
    /// row per resolution, and a total_defect trailer.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# param={}\n", self.param_name));
        out.push_str(&format!("# tempering={}\n", self.tempering_mode.name()));
        out.push_str(&format!("# w_analyzed={}\n", self.w_analyzed));
        out.push_str("v\tk_star\tk_v\tgap\n");
        for row in &self.per_v {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                row.v, row.k_star, row.k_v, row.gap
            ));
        }
        out.push_str(&format!("total_defect={}\n", self.total_defect));
        out
    }

    pub fn from_tsv(text: &str) -> Result<EquidistReport> {
        let mut param_name = None;
        let mut mode = None;
        let mut w_analyzed = None;
        let mut per_v = Vec::new();
        let mut total = None;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let bad = |msg: String| Error::Parse { line: line_no, msg };
            if let Some(rest) = line.strip_prefix("# param=") {
                param_name = Some(rest.to_string());
            } else if let Some(rest) = line.strip_prefix("# tempering=") {
                mode = Some(Mode::parse(rest)?);
            } else if let Some(rest) = line.strip_prefix("# w_analyzed=") {
                w_analyzed = Some(rest.parse::<u32>().map_err(|e| bad(e.to_string()))?);
            } else if let Some(rest) = line.strip_prefix("total_defect=") {
                total = Some(rest.parse::<usize>().map_err(|e| bad(e.to_string()))?);
            } else if line.starts_with('v') || line.trim().is_empty() {
                continue;
            } else {
                let fields: Vec<&str> = line.split('\t').collect();
                if fields.len() != 4 {
                    return Err(bad(format!(
                        "expected 4 tab-separated fields, got {}",
                        fields.len()
                    )));
                }
                per_v.push(VRow {
                    v: fields[0].parse().map_err(|_| bad("bad v".into()))?,
                    k_star: fields[1].parse().map_err(|_| bad("bad k_star".into()))?,
                    k_v: fields[2].parse().map_err(|_| bad("bad k_v".into()))?,
                    gap: fields[3].parse().map_err(|_| bad("bad gap".into()))?,
                });
            }
        }
        let missing = |what: &str| Error::Parse {
            line: 0,
            msg: format!("missing {}", what),
        };
        Ok(EquidistReport {
            param_name: param_name.ok_or_else(|| missing("param header"))?,
            tempering_mode: mode.ok_or_else(|| missing("tempering header"))?,
            w_analyzed: w_analyzed.ok_or_else(|| missing("w_analyzed header"))?,
            per_v,
            total_defect: total.ok_or_else(|| missing("total_defect trailer"))?,
        })
    }
}
