//! The generator engine: state layout, the data-driven recurrence
//! stepper with specialized fast paths for the production word sizes,
//! output tempering, real-number derivation, and polynomial jump-ahead.
//!
//! State layout: `words` is a ring buffer holding the last n sequence
//! values; `cursor` indexes the oldest one. A term with lag L reads the
//! word generated L steps ago. Each step writes the new word over the
//! oldest slot, advances the cursor, and re-masks the word that just
//! became oldest (its low bits are dead from that point on, which is
//! what keeps the effective state at exactly p bits).

use std::sync::Arc;

use num_bigint::BigUint;

use crate::gf2::Gf2Poly;
use crate::params::{GeneratorParams, ShiftDir, TemperKind, Term};
use crate::word::Word;
use crate::{Error, Result};

/// Output tempering mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Untempered linear output (the analysis path).
    None,
    /// Bijective shift/mask tempering chain.
    Linear,
    /// Weyl-accumulator addition (the shipping path).
    Weyl,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "none" => Ok(Mode::None),
            "linear" => Ok(Mode::Linear),
            "weyl" => Ok(Mode::Weyl),
            other => Err(Error::InvalidArgument(format!("unknown mode '{}'", other))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::None => "none",
            Mode::Linear => "linear",
            Mode::Weyl => "weyl",
        }
    }
}

/// Multiplier of the 64-bit seed-expansion chain (the 64-bit variant of
/// the classic multiplicative initializer).
const SEED_MULT: u64 = 6364136223846793005;

#[derive(Clone, PartialEq, Eq)]
enum Stepper {
    Interpreter,
    /// Tabulated shape: twist(n, n-1) ^ xorshift chains [L a, R b] at
    /// distinct lags, monomorphized per word size.
    Fast {
        xs: Vec<(usize, u32, u32)>,
    },
}

/// A generator instance: parameter set plus mutable state.
#[derive(Clone)]
pub struct Generator {
    params: Arc<GeneratorParams>,
    words: Vec<Word>,
    cursor: usize,
    weyl_acc: Word,
    repaired: bool,
    stepper: Stepper,
}

impl Generator {
    /// Deterministic seeding: expand the 64-bit seed through a
    /// multiplicative filler chain, mask the top word, repair an
    /// all-zero effective state if one shows up, then run n warm-up
    /// steps.
    pub fn seed(params: Arc<GeneratorParams>, seed: u64) -> Generator {
        let n = params.state_words;
        let w = params.word_size;
        let mut chain = seed;
        let mut idx = 0u64;
        let mut next64 = move || {
            idx += 1;
            chain = SEED_MULT
                .wrapping_mul(chain ^ (chain >> 62))
                .wrapping_add(idx);
            chain
        };
        let mut words = Vec::with_capacity(n);
        for _ in 0..n {
            let word = if w <= 64 {
                Word::from_u64(next64()).and(Word::mask(w))
            } else {
                let lo = next64();
                let hi = next64();
                Word::from_parts(hi, lo).and(Word::mask(w))
            };
            words.push(word);
        }
        let weyl_acc = if w <= 64 {
            Word::from_u64(next64()).and(Word::mask(w))
        } else {
            let lo = next64();
            let hi = next64();
            Word::from_parts(hi, lo).and(Word::mask(w))
        };
        words[0] = words[0].and(params.top_mask);

        let mut gen = Generator {
            stepper: select_stepper(&params),
            params,
            words,
            cursor: 0,
            weyl_acc,
            repaired: false,
        };
        if gen.effective_is_zero() {
            // The all-zero state is absorbing for the linear part. Set
            // the lowest effective bit of the masked top word.
            let lowest = lowest_set_bit(gen.params.top_mask);
            gen.words[0].set_bit(lowest);
            gen.repaired = true;
        }
        for _ in 0..gen.params.state_words {
            gen.next_raw();
        }
        gen
    }

    /// Same seeding, forced through the descriptor interpreter even when
    /// a fast path exists (used by equivalence tests).
    pub fn seed_interpreted(params: Arc<GeneratorParams>, seed: u64) -> Generator {
        let mut g = Generator::seed(params, seed);
        g.stepper = Stepper::Interpreter;
        g
    }

    /// All-zero state (only used as the accumulator of jump-ahead; the
    /// public seeding path never produces it).
    fn zeros(params: Arc<GeneratorParams>, cursor: usize) -> Generator {
        let n = params.state_words;
        Generator {
            stepper: select_stepper(&params),
            params,
            words: vec![Word::ZERO; n],
            cursor,
            weyl_acc: Word::ZERO,
            repaired: false,
        }
    }

    pub fn params(&self) -> &Arc<GeneratorParams> {
        &self.params
    }

    pub fn was_repaired(&self) -> bool {
        self.repaired
    }

    pub fn weyl_acc(&self) -> Word {
        self.weyl_acc
    }

    pub fn set_weyl_acc(&mut self, acc: Word) {
        self.weyl_acc = acc.and(Word::mask(self.params.word_size));
    }

    pub fn uses_fast_path(&self) -> bool {
        matches!(self.stepper, Stepper::Fast { .. })
    }

    fn read_lag(&self, lag: usize) -> Word {
        let n = self.params.state_words;
        debug_assert!((1..=n).contains(&lag));
        self.words[(self.cursor + n - lag) % n]
    }

    /// Advance the recurrence one step and return the new (untempered)
    /// word.
    pub fn next_raw(&mut self) -> Word {
        match self.stepper {
            Stepper::Fast { .. } => self.step_fast(),
            Stepper::Interpreter => self.step_interpreted(),
        }
    }

    fn step_interpreted(&mut self) -> Word {
        let w = self.params.word_size;
        let mut acc = Word::ZERO;
        for term in &self.params.recurrence.terms {
            match term {
                Term::TwistedConcat {
                    lag_hi,
                    lag_lo,
                    split_mask,
                    twist_mask,
                } => {
                    let y = self
                        .read_lag(*lag_hi)
                        .and(*split_mask)
                        .or(self.read_lag(*lag_lo).and(split_mask.not(w)));
                    let mut t = y.shr(1);
                    if y.lsb() {
                        t = t.xor(*twist_mask);
                    }
                    acc = acc.xor(t);
                }
                Term::LaggedXorshift { lag, ops } => {
                    let mut v = self.read_lag(*lag);
                    for op in ops {
                        v = match op.dir {
                            ShiftDir::Left => v.xor(v.shl(op.shift, w)),
                            ShiftDir::Right => v.xor(v.shr(op.shift)),
                        };
                    }
                    acc = acc.xor(v);
                }
            }
        }
        self.finish_step(acc)
    }

    fn finish_step(&mut self, new_word: Word) -> Word {
        let n = self.params.state_words;
        self.words[self.cursor] = new_word;
        self.cursor = if self.cursor + 1 == n {
            0
        } else {
            self.cursor + 1
        };
        // The word that just became oldest will only ever be read
        // through top_mask from here on; keep the state canonical.
        self.words[self.cursor] = self.words[self.cursor].and(self.params.top_mask);
        new_word
    }

    fn step_fast(&mut self) -> Word {
        let Stepper::Fast { xs } = &self.stepper else {
            unreachable!()
        };
        let n = self.params.state_words;
        let c = self.cursor;
        let lo_idx = if c + 1 == n { 0 } else { c + 1 };
        let lag_idx = |q: usize| {
            let i = c + (n - q);
            if i >= n {
                i - n
            } else {
                i
            }
        };
        match self.params.word_size {
            32 => {
                let split = self.params.top_mask.lo as u32;
                let twist = twist_mask_of(&self.params).lo as u32;
                let y = (self.words[c].lo as u32 & split) | (self.words[lo_idx].lo as u32 & !split);
                let mut x = y >> 1;
                if y & 1 != 0 {
                    x ^= twist;
                }
                for &(q, a, b) in xs {
                    let mut v = self.words[lag_idx(q)].lo as u32;
                    v ^= v << a;
                    v ^= v >> b;
                    x ^= v;
                }
                self.words[c] = Word::from_u64(x as u64);
                self.cursor = lo_idx;
                self.words[lo_idx].lo &= split as u64;
                Word::from_u64(x as u64)
            }
            64 => {
                let split = self.params.top_mask.lo;
                let twist = twist_mask_of(&self.params).lo;
                let y = (self.words[c].lo & split) | (self.words[lo_idx].lo & !split);
                let mut x = y >> 1;
                if y & 1 != 0 {
                    x ^= twist;
                }
                for &(q, a, b) in xs {
                    let mut v = self.words[lag_idx(q)].lo;
                    v ^= v << a;
                    v ^= v >> b;
                    x ^= v;
                }
                self.words[c] = Word::from_u64(x);
                self.cursor = lo_idx;
                self.words[lo_idx].lo &= split;
                Word::from_u64(x)
            }
            128 => {
                let split = self.params.top_mask;
                let twist = twist_mask_of(&self.params);
                let y = self.words[c]
                    .and(split)
                    .or(self.words[lo_idx].and(split.not(128)));
                let mut x = y.shr(1);
                if y.lsb() {
                    x = x.xor(twist);
                }
                for &(q, a, b) in xs {
                    let mut v = self.words[lag_idx(q)];
                    v = v.xor(v.shl(a, 128));
                    v = v.xor(v.shr(b));
                    x = x.xor(v);
                }
                self.words[c] = x;
                self.cursor = lo_idx;
                self.words[lo_idx] = self.words[lo_idx].and(split);
                x
            }
            _ => unreachable!("fast path only selected for production word sizes"),
        }
    }

    /// Tempered output word.
    pub fn next_word(&mut self, mode: Mode) -> Result<Word> {
        match mode {
            Mode::None => Ok(self.next_raw()),
            Mode::Linear => {
                if self.params.tempering_linear.kind != TemperKind::Linear {
                    return Err(Error::Config(format!(
                        "parameter set '{}' has no linear tempering",
                        self.params.name
                    )));
                }
                let raw = self.next_raw();
                Ok(temper(raw, &self.params))
            }
            Mode::Weyl => {
                if self.params.tempering_nonlinear.kind != TemperKind::Weyl {
                    return Err(Error::Config(format!(
                        "parameter set '{}' has no weyl tempering",
                        self.params.name
                    )));
                }
                let w = self.params.word_size;
                let raw = self.next_raw();
                self.weyl_acc = self.weyl_acc.add(self.params.weyl_increment, w);
                Ok(raw.add(self.weyl_acc, w))
            }
        }
    }

    /// A real in [0,1) with 53 significant bits, assembled from
    /// ceil(64/w) output words, first word in the most significant
    /// position.
    pub fn next_real64(&mut self) -> f64 {
        self.next_real64_in_mode(Mode::Weyl)
            .expect("weyl tempering is always available")
    }

    pub fn next_real64_in_mode(&mut self, mode: Mode) -> Result<f64> {
        Ok(bits64_to_real(self.next_bits64(mode)?))
    }

    /// The 64 assembled bits behind next_real64 (used by tests and the
    /// battery).
    pub fn next_bits64(&mut self, mode: Mode) -> Result<u64> {
        let w = self.params.word_size;
        if w >= 64 {
            let word = self.next_word(mode)?;
            // For w = 128 the derived value takes the top 64 bits.
            Ok(word.shr(w - 64).lo)
        } else {
            let k = 64_u32.div_ceil(w);
            debug_assert_eq!(64 % w, 0);
            let mut acc = 0u64;
            for _ in 0..k {
                acc = (acc << w) | self.next_word(mode)?.lo;
            }
            Ok(acc)
        }
    }

    /// Jump the raw recurrence forward by `steps` using the
    /// characteristic polynomial: the new state is (x^steps mod f)
    /// evaluated at the transition and applied to the current state.
    /// The Weyl accumulator jumps in closed form.
    pub fn jump(&self, steps: &BigUint, charpoly: &Gf2Poly) -> Result<Generator> {
        let p = self.params.effective_bits;
        if charpoly.degree() != Some(p) {
            return Err(Error::Config(format!(
                "jump polynomial degree {:?} does not match p = {}",
                charpoly.degree(),
                p
            )));
        }
        let g = crate::gf2::poly_powmod_x(steps, charpoly)?;
        // Horner: acc <- A*acc + g_i * state, from the top coefficient down.
        let mut acc = Generator::zeros(self.params.clone(), self.cursor);
        acc.stepper = self.stepper.clone();
        let top = g.degree().map_or(0, |d| d);
        for i in (0..=top).rev() {
            acc.next_raw();
            if g.coeff(i) {
                acc.xor_state(self);
            }
        }
        if g.is_zero() {
            // steps mapped to the zero polynomial mod f cannot happen for
            // f with nonzero constant term, but keep the algebra total.
            acc = Generator::zeros(self.params.clone(), self.cursor);
            acc.stepper = self.stepper.clone();
        }
        // weyl_acc + steps * increment, both mod 2^w.
        let w = self.params.word_size;
        let inc = (BigUint::from(self.params.weyl_increment.hi) << 64)
            | BigUint::from(self.params.weyl_increment.lo);
        let jumped: BigUint = inc * steps;
        let digits = jumped.to_u64_digits();
        let add = Word::from_parts(
            digits.get(1).copied().unwrap_or(0),
            digits.first().copied().unwrap_or(0),
        )
        .and(Word::mask(w));
        acc.weyl_acc = self.weyl_acc.add(add, w);
        acc.repaired = self.repaired;
        Ok(acc)
    }

    /// XOR the age-aligned words of `other` into self (both states must
    /// share a parameter set). Used by the jump-ahead Horner loop.
    fn xor_state(&mut self, other: &Generator) {
        let n = self.params.state_words;
        for t in 0..n {
            let a = (self.cursor + t) % n;
            let b = (other.cursor + t) % n;
            self.words[a] = self.words[a].xor(other.words[b]);
        }
    }

    /// Compare the linear part of two states, aligning by age.
    pub fn same_linear_state(&self, other: &Generator) -> bool {
        let n = self.params.state_words;
        if other.params.state_words != n {
            return false;
        }
        (0..n).all(|t| self.words[(self.cursor + t) % n] == other.words[(other.cursor + t) % n])
    }

    pub fn same_state(&self, other: &Generator) -> bool {
        self.same_linear_state(other) && self.weyl_acc == other.weyl_acc
    }

    // ---- effective-bit coordinates (analysis support) ----
    //
    // Bit e of the effective state: bits [0, t) are the set bits of
    // top_mask in the oldest word (t = popcount(top_mask)); the rest run
    // through the younger words in age order, w bits each.

    pub fn effective_is_zero(&self) -> bool {
        let n = self.params.state_words;
        if !self.words[self.cursor].and(self.params.top_mask).is_zero() {
            return false;
        }
        (1..n).all(|t| self.words[(self.cursor + t) % n].is_zero())
    }

    /// Pack the p effective bits into limbs (bit e at limb e/64).
    pub fn effective_bits(&self) -> Vec<u64> {
        let p = self.params.effective_bits;
        let n = self.params.state_words;
        let w = self.params.word_size;
        let mut out = vec![0u64; p.div_ceil(64)];
        let mut e = 0usize;
        let top = self.words[self.cursor];
        for bit in mask_bits(self.params.top_mask) {
            if top.bit(bit) {
                out[e / 64] |= 1 << (e % 64);
            }
            e += 1;
        }
        for t in 1..n {
            let word = self.words[(self.cursor + t) % n];
            for bit in 0..w {
                if word.bit(bit) {
                    out[e / 64] |= 1 << (e % 64);
                }
                e += 1;
            }
        }
        debug_assert_eq!(e, p);
        out
    }

    /// Build a state (cursor 0, zero Weyl accumulator) from packed
    /// effective bits.
    pub fn from_effective_bits(params: Arc<GeneratorParams>, bits: &[u64]) -> Generator {
        let mut gen = Generator::zeros(params, 0);
        let w = gen.params.word_size;
        let n = gen.params.state_words;
        let mut e = 0usize;
        let top_bits: Vec<u32> = mask_bits(gen.params.top_mask).collect();
        for bit in top_bits {
            if get_bit(bits, e) {
                gen.words[0].set_bit(bit);
            }
            e += 1;
        }
        for t in 1..n {
            for bit in 0..w {
                if get_bit(bits, e) {
                    gen.words[t % n].set_bit(bit);
                }
                e += 1;
            }
        }
        debug_assert_eq!(e, gen.params.effective_bits);
        gen
    }

    /// Load the p effective bits from an integer index (toy-scale
    /// exhaustive enumeration).
    pub fn from_state_index(params: Arc<GeneratorParams>, index: u64) -> Generator {
        let limbs = [index, 0];
        Generator::from_effective_bits(params, &limbs)
    }
}

fn get_bit(limbs: &[u64], i: usize) -> bool {
    limbs.get(i / 64).is_some_and(|l| (l >> (i % 64)) & 1 != 0)
}

fn lowest_set_bit(mask: Word) -> u32 {
    if mask.lo != 0 {
        mask.lo.trailing_zeros()
    } else {
        64 + mask.hi.trailing_zeros()
    }
}

/// Iterator over the set-bit positions of a mask, lowest first.
fn mask_bits(mask: Word) -> impl Iterator<Item = u32> {
    (0..128u32).filter(move |&i| mask.bit(i))
}

fn twist_mask_of(params: &GeneratorParams) -> Word {
    for term in &params.recurrence.terms {
        if let Term::TwistedConcat { twist_mask, .. } = term {
            return *twist_mask;
        }
    }
    unreachable!("fast shape always carries a twist term")
}

/// Detect the tabulated shape: twist(n, n-1, split=top_mask) followed by
/// any number of xorshift chains of the form [L a, R b], at a production
/// word size.
fn select_stepper(params: &GeneratorParams) -> Stepper {
    if !matches!(params.word_size, 32 | 64 | 128) {
        return Stepper::Interpreter;
    }
    let n = params.state_words;
    if params.recurrence.terms.len() < 2 {
        return Stepper::Interpreter;
    }
    match &params.recurrence.terms[0] {
        Term::TwistedConcat {
            lag_hi,
            lag_lo,
            split_mask,
            ..
        } if *lag_hi == n && *lag_lo == n - 1 && *split_mask == params.top_mask => {}
        _ => return Stepper::Interpreter,
    }
    let mut xs = Vec::new();
    for term in &params.recurrence.terms[1..] {
        match term {
            Term::LaggedXorshift { lag, ops } => match ops.as_slice() {
                [l, r] if l.dir == ShiftDir::Left && r.dir == ShiftDir::Right => {
                    xs.push((*lag, l.shift, r.shift));
                }
                _ => return Stepper::Interpreter,
            },
            _ => return Stepper::Interpreter,
        }
    }
    Stepper::Fast { xs }
}

/// Apply the linear tempering chain of `params` to one word.
pub fn temper(word: Word, params: &GeneratorParams) -> Word {
    let w = params.word_size;
    let mut y = word;
    for op in &params.tempering_linear.ops {
        y = match op.dir {
            ShiftDir::Left => y.xor(y.shl(op.shift, w).and(op.and_mask)),
            ShiftDir::Right => y.xor(y.shr(op.shift).and(op.and_mask)),
        };
    }
    y
}

/// Invert the linear tempering chain (each step is a bijection; undo
/// them in reverse order by iterating the reconstruction to a fixpoint).
pub fn untemper(word: Word, params: &GeneratorParams) -> Word {
    let w = params.word_size;
    let mut y = word;
    for op in params.tempering_linear.ops.iter().rev() {
        let rounds = w.div_ceil(op.shift);
        let mut x = y;
        for _ in 0..rounds {
            x = match op.dir {
                ShiftDir::Left => y.xor(x.shl(op.shift, w).and(op.and_mask)),
                ShiftDir::Right => y.xor(x.shr(op.shift).and(op.and_mask)),
            };
        }
        y = x;
    }
    y
}

/// Map 64 derived bits to a real in [0,1) carrying 53 significant bits.
pub fn bits64_to_real(bits: u64) -> f64 {
    (bits >> 11) as f64 / (1u64 << 53) as f64
}
