//! Parameter sets for the generator family: the embedded tables, the
//! line-oriented parameter-file format, and the invariants every set has
//! to satisfy before the engine will touch it.

mod parse;

pub use parse::{parse_param_file, serialize_params};

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::word::Word;
use crate::{Error, Result};

/// Exponents covered by the embedded tables. Primitivity of a degree-p
/// characteristic polynomial follows from irreducibility exactly when
/// 2^p - 1 is prime, so tabulated sets stick to Mersenne exponents.
pub const MERSENNE_EXPONENTS: [usize; 15] = [
    521, 607, 1279, 2203, 2281, 3217, 4253, 4423, 9689, 9941, 11213, 19937, 21701, 23209, 44497,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDir {
    Left,
    Right,
}

/// One xorshift step: x ^= x << s or x ^= x >> s.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XorshiftOp {
    pub dir: ShiftDir,
    pub shift: u32,
}

/// One term of the state recurrence; the new word is the XOR of all
/// evaluated terms. Lags count backwards from the word being produced:
/// lag L reads the word generated L steps ago, so lag n is the oldest
/// word still in the state array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    /// Read one lagged word and run it through a chain of xorshifts.
    LaggedXorshift { lag: usize, ops: Vec<XorshiftOp> },
    /// Concatenate the split_mask bits of the lag_hi word with the
    /// complementary bits of the lag_lo word, then apply the one-bit
    /// twist y -> (y >> 1) ^ (twist_mask if y&1 else 0).
    TwistedConcat {
        lag_hi: usize,
        lag_lo: usize,
        split_mask: Word,
        twist_mask: Word,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RecurrenceDescriptor {
    pub terms: Vec<Term>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TemperKind {
    None,
    Linear,
    Weyl,
}

/// One linear tempering step: y ^= (y << s) & m or y ^= (y >> s) & m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemperOp {
    pub dir: ShiftDir,
    pub shift: u32,
    pub and_mask: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemperingDescriptor {
    pub kind: TemperKind,
    pub ops: Vec<TemperOp>,
}

impl TemperingDescriptor {
    pub fn none() -> Self {
        TemperingDescriptor {
            kind: TemperKind::None,
            ops: Vec::new(),
        }
    }

    pub fn weyl() -> Self {
        TemperingDescriptor {
            kind: TemperKind::Weyl,
            ops: Vec::new(),
        }
    }

    pub fn linear(ops: Vec<TemperOp>) -> Self {
        TemperingDescriptor {
            kind: TemperKind::Linear,
            ops,
        }
    }
}

/// One named row of the parameter tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    pub name: String,
    /// Bits per output word (w).
    pub word_size: u32,
    /// Words in the state array (n).
    pub state_words: usize,
    /// Dimension of the linear state space in bits (p).
    pub effective_bits: usize,
    /// Mask on the designated top word so the state carries exactly p bits.
    pub top_mask: Word,
    pub recurrence: RecurrenceDescriptor,
    pub tempering_nonlinear: TemperingDescriptor,
    pub tempering_linear: TemperingDescriptor,
    /// Odd stepping constant of the Weyl accumulator.
    pub weyl_increment: Word,
}

impl GeneratorParams {
    /// Sets under the toy namespace are shipped for enumerable-state
    /// oracles only; they may use any p >= 2 and sub-byte word sizes.
    pub fn is_toy(&self) -> bool {
        self.name.starts_with("toy")
    }

    /// Whether the top word actually drops bits ((n-1)w < p < nw).
    pub fn has_partial_top_word(&self) -> bool {
        self.top_mask != Word::mask(self.word_size)
    }

    /// Structural invariant suite. Everything checkable without running
    /// the generator; invertibility of the induced transition is
    /// certified separately by the gf2 analysis.
    pub fn validate(&self) -> Result<()> {
        let fail = |field: &str, msg: String| -> Result<()> {
            Err(Error::Invariant {
                field: field.to_string(),
                msg,
            })
        };
        let w = self.word_size;
        let n = self.state_words;
        let p = self.effective_bits;

        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return fail("name", format!("'{}' is not a valid identifier", self.name));
        }
        let toy = self.is_toy();
        if toy {
            if !matches!(w, 4 | 8 | 32 | 64 | 128) {
                return fail(
                    "w",
                    format!("toy word size must be one of 4,8,32,64,128 (got {})", w),
                );
            }
        } else if !matches!(w, 32 | 64 | 128) {
            return fail(
                "w",
                format!("word size must be one of 32,64,128 (got {})", w),
            );
        }
        if p < 2 {
            return fail("p", format!("effective bits must be >= 2 (got {})", p));
        }
        if !toy && !MERSENNE_EXPONENTS.contains(&p) {
            return fail("p", format!("{} is not a tabulated Mersenne exponent", p));
        }
        if n == 0 || n * (w as usize) < p || p <= (n - 1) * (w as usize) {
            return fail(
                "n",
                format!("need n*w >= p > (n-1)*w (w={}, n={}, p={})", w, n, p),
            );
        }
        let expect_top_bits = (p - (n - 1) * w as usize) as u32;
        if self.top_mask.count_ones() != expect_top_bits {
            return fail(
                "top_mask",
                format!(
                    "must have exactly {} set bits (got {})",
                    expect_top_bits,
                    self.top_mask.count_ones()
                ),
            );
        }
        if self.top_mask.and(Word::mask(w).not(128)) != Word::ZERO {
            return fail("top_mask", "mask exceeds word width".to_string());
        }
        if !self.weyl_increment.lsb() {
            return fail("weyl_increment", "must be odd".to_string());
        }
        if self.weyl_increment.and(Word::mask(w)) != self.weyl_increment {
            return fail("weyl_increment", "exceeds word width".to_string());
        }

        // Recurrence shape.
        if self.recurrence.terms.is_empty() {
            return fail("recurrence", "needs at least one term".to_string());
        }
        let mut lags = std::collections::BTreeSet::new();
        let partial = self.has_partial_top_word();
        for (i, term) in self.recurrence.terms.iter().enumerate() {
            let field = format!("term.{}", i + 1);
            match term {
                Term::LaggedXorshift { lag, ops } => {
                    if !(1..=n).contains(lag) {
                        return fail(&field, format!("lag {} outside [1, {}]", lag, n));
                    }
                    if partial && *lag == n {
                        return fail(
                            &field,
                            "xorshift terms may not read the partially-masked oldest word"
                                .to_string(),
                        );
                    }
                    lags.insert(*lag);
                    for op in ops {
                        if op.shift == 0 || op.shift >= w {
                            return fail(
                                &field,
                                format!("shift {} outside [1, {}]", op.shift, w - 1),
                            );
                        }
                    }
                }
                Term::TwistedConcat {
                    lag_hi,
                    lag_lo,
                    split_mask,
                    twist_mask,
                } => {
                    for lag in [lag_hi, lag_lo] {
                        if !(1..=n).contains(lag) {
                            return fail(&field, format!("lag {} outside [1, {}]", lag, n));
                        }
                    }
                    if lag_hi == lag_lo {
                        return fail(&field, "twist lags must differ".to_string());
                    }
                    if partial {
                        if *lag_lo == n {
                            return fail(
                                &field,
                                "the low side of a twist may not read the partially-masked oldest word"
                                    .to_string(),
                            );
                        }
                        if *lag_hi == n && *split_mask != self.top_mask {
                            return fail(
                                &field,
                                "a twist reading the oldest word must split exactly at top_mask"
                                    .to_string(),
                            );
                        }
                    }
                    lags.insert(*lag_hi);
                    lags.insert(*lag_lo);
                    for (what, mask) in [("split_mask", split_mask), ("twist_mask", twist_mask)] {
                        if mask.and(Word::mask(w)) != *mask {
                            return fail(&field, format!("{} exceeds word width", what));
                        }
                    }
                }
            }
        }
        if lags.len() < 2 {
            return fail("recurrence", "needs at least two distinct lags".to_string());
        }

        // Tempering descriptors.
        match self.tempering_nonlinear.kind {
            TemperKind::Weyl => {
                if !self.tempering_nonlinear.ops.is_empty() {
                    return fail(
                        "tempering_nonlinear",
                        "weyl tempering carries no linear ops".to_string(),
                    );
                }
            }
            TemperKind::None => {}
            TemperKind::Linear => {
                return fail(
                    "tempering_nonlinear",
                    "the non-linear slot cannot be linear".to_string(),
                )
            }
        }
        match self.tempering_linear.kind {
            TemperKind::Linear => {
                if self.tempering_linear.ops.is_empty() {
                    return fail(
                        "tempering_linear",
                        "linear tempering needs at least one op".to_string(),
                    );
                }
                for op in &self.tempering_linear.ops {
                    if op.shift == 0 || op.shift >= w {
                        return fail(
                            "tempering_linear",
                            format!("shift {} outside [1, {}]", op.shift, w - 1),
                        );
                    }
                    if op.and_mask.and(Word::mask(w)) != op.and_mask {
                        return fail("tempering_linear", "mask exceeds word width".to_string());
                    }
                }
            }
            TemperKind::None => {
                if !self.tempering_linear.ops.is_empty() {
                    return fail("tempering_linear", "kind none carries no ops".to_string());
                }
            }
            TemperKind::Weyl => {
                return fail(
                    "tempering_linear",
                    "the linear slot cannot be weyl".to_string(),
                )
            }
        }
        Ok(())
    }

    /// Compact one-line description for listings.
    pub fn summary(&self) -> String {
        let mut parts = Vec::new();
        for term in &self.recurrence.terms {
            match term {
                Term::TwistedConcat { lag_hi, lag_lo, .. } => {
                    parts.push(format!("twist({},{})", lag_hi, lag_lo))
                }
                Term::LaggedXorshift { lag, ops } => {
                    let chain: Vec<String> = ops
                        .iter()
                        .map(|o| {
                            format!(
                                "{}{}",
                                if o.dir == ShiftDir::Left { "L" } else { "R" },
                                o.shift
                            )
                        })
                        .collect();
                    parts.push(format!("xs({};{})", lag, chain.join(",")));
                }
            }
        }
        let lin = if self.tempering_linear.kind == TemperKind::Linear {
            "+linear"
        } else {
            ""
        };
        format!("n={} {}{}", self.state_words, parts.join("^"), lin)
    }
}

/// Immutable collection of parameter sets indexed by name.
pub struct Registry {
    rows: Vec<Arc<GeneratorParams>>,
    by_name: HashMap<String, usize>,
}

impl Registry {
    pub fn from_params(params: Vec<GeneratorParams>) -> Result<Registry> {
        let mut rows = Vec::with_capacity(params.len());
        let mut by_name = HashMap::new();
        for p in params {
            p.validate()?;
            if by_name.contains_key(&p.name) {
                return Err(Error::DuplicateName {
                    name: p.name.clone(),
                    line: 0,
                });
            }
            by_name.insert(p.name.clone(), rows.len());
            rows.push(Arc::new(p));
        }
        Ok(Registry { rows, by_name })
    }

    /// The embedded tables. Constructed once; every row re-runs the full
    /// invariant suite on the way in.
    pub fn embedded() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| {
            let rows =
                parse_param_file(EMBEDDED_TABLE).expect("embedded parameter table must parse");
            Registry::from_params(rows).expect("embedded parameter table must validate")
        })
    }

    pub fn lookup(&self, name: &str) -> Result<Arc<GeneratorParams>> {
        match self.by_name.get(name) {
            Some(&i) => Ok(self.rows[i].clone()),
            None => {
                let mut available: Vec<String> = self.rows.iter().map(|r| r.name.clone()).collect();
                available.sort();
                Err(Error::NotFound {
                    name: name.to_string(),
                    available,
                })
            }
        }
    }

    /// All rows sorted by (word size, effective bits, name).
    pub fn list(&self) -> Vec<Arc<GeneratorParams>> {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| (r.word_size, r.effective_bits, r.name.clone()));
        rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Raw text of the embedded tables (exposed so the self-test can verify
/// its checksum).
pub const EMBEDDED_TABLE: &str = include_str!("../../data/params.mxg");

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_row() -> GeneratorParams {
        GeneratorParams {
            name: "toy8-11".into(),
            word_size: 8,
            state_words: 2,
            effective_bits: 11,
            top_mask: Word::from_u64(0xE0),
            recurrence: RecurrenceDescriptor {
                terms: vec![
                    Term::TwistedConcat {
                        lag_hi: 2,
                        lag_lo: 1,
                        split_mask: Word::from_u64(0xE0),
                        twist_mask: Word::from_u64(0xB8),
                    },
                    Term::LaggedXorshift {
                        lag: 1,
                        ops: vec![
                            XorshiftOp {
                                dir: ShiftDir::Left,
                                shift: 3,
                            },
                            XorshiftOp {
                                dir: ShiftDir::Right,
                                shift: 2,
                            },
                        ],
                    },
                ],
            },
            tempering_nonlinear: TemperingDescriptor::weyl(),
            tempering_linear: TemperingDescriptor::linear(vec![TemperOp {
                dir: ShiftDir::Right,
                shift: 3,
                and_mask: Word::mask(8),
            }]),
            weyl_increment: Word::from_u64(0x0B),
        }
    }

    #[test]
    fn toy_row_validates() {
        toy_row().validate().unwrap();
    }

    #[test]
    fn even_weyl_increment_rejected() {
        let mut row = toy_row();
        row.weyl_increment = Word::from_u64(0x0A);
        match row.validate() {
            Err(Error::Invariant { field, .. }) => assert_eq!(field, "weyl_increment"),
            other => panic!("expected invariant error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn top_mask_popcount_enforced() {
        let mut row = toy_row();
        row.top_mask = Word::from_u64(0xC0);
        assert!(
            matches!(row.validate(), Err(Error::Invariant { field, .. }) if field == "top_mask")
        );
    }

    #[test]
    fn oldest_word_reads_are_restricted() {
        let mut row = toy_row();
        row.recurrence.terms[1] = Term::LaggedXorshift {
            lag: 2,
            ops: vec![],
        };
        assert!(row.validate().is_err());
        // Twist reading lag n with a different split mask is rejected too.
        let mut row = toy_row();
        if let Term::TwistedConcat { split_mask, .. } = &mut row.recurrence.terms[0] {
            *split_mask = Word::from_u64(0xC1);
        }
        assert!(row.validate().is_err());
    }

    #[test]
    fn non_mersenne_p_rejected_outside_toy_namespace() {
        let mut row = toy_row();
        row.name = "mxg8-11".into();
        assert!(matches!(row.validate(), Err(Error::Invariant { field, .. }) if field == "w"));
        row.name = "custom-row".into();
        row.word_size = 32;
        row.state_words = 1;
        assert!(row.validate().is_err());
    }

    #[test]
    fn single_lag_rejected() {
        let mut row = toy_row();
        row.recurrence.terms = vec![Term::LaggedXorshift {
            lag: 1,
            ops: vec![XorshiftOp {
                dir: ShiftDir::Left,
                shift: 1,
            }],
        }];
        // lag set {1} is too small.
        assert!(
            matches!(row.validate(), Err(Error::Invariant { field, .. }) if field == "recurrence")
        );
    }
}
