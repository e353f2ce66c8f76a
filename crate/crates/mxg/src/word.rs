//! Fixed-width machine words up to 128 bits, stored as two explicit 64-bit
//! limbs. All arithmetic that depends on the word width (shifts, wrapping
//! addition, masking) takes the width as a parameter, so one representation
//! serves the 4- and 8-bit toy generators as well as the 32/64/128-bit
//! production ones.

use std::fmt;

/// A value of at most 128 bits. `hi` holds bits 64..128, `lo` bits 0..64.
/// The owner is responsible for keeping values masked to their nominal
/// width; every width-taking operation here re-masks its result.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Word {
    pub hi: u64,
    pub lo: u64,
}

impl Word {
    pub const ZERO: Word = Word { hi: 0, lo: 0 };
    pub const ONE: Word = Word { hi: 0, lo: 1 };

    pub fn from_u64(v: u64) -> Word {
        Word { hi: 0, lo: v }
    }

    pub fn from_parts(hi: u64, lo: u64) -> Word {
        Word { hi, lo }
    }

    /// All-ones mask for a w-bit word, 1 <= w <= 128.
    pub fn mask(w: u32) -> Word {
        debug_assert!((1..=128).contains(&w));
        if w >= 128 {
            Word {
                hi: u64::MAX,
                lo: u64::MAX,
            }
        } else if w >= 64 {
            Word {
                hi: (1u64 << (w - 64)) - 1,
                lo: u64::MAX,
            }
        } else {
            Word {
                hi: 0,
                lo: (1u64 << w) - 1,
            }
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0 && self.lo == 0
    }

    pub fn bit(self, i: u32) -> bool {
        if i < 64 {
            (self.lo >> i) & 1 != 0
        } else {
            (self.hi >> (i - 64)) & 1 != 0
        }
    }

    pub fn set_bit(&mut self, i: u32) {
        if i < 64 {
            self.lo |= 1 << i;
        } else {
            self.hi |= 1 << (i - 64);
        }
    }

    pub fn lsb(self) -> bool {
        self.lo & 1 != 0
    }

    pub fn count_ones(self) -> u32 {
        self.hi.count_ones() + self.lo.count_ones()
    }

    pub fn xor(self, o: Word) -> Word {
        Word {
            hi: self.hi ^ o.hi,
            lo: self.lo ^ o.lo,
        }
    }

    pub fn and(self, o: Word) -> Word {
        Word {
            hi: self.hi & o.hi,
            lo: self.lo & o.lo,
        }
    }

    pub fn or(self, o: Word) -> Word {
        Word {
            hi: self.hi | o.hi,
            lo: self.lo | o.lo,
        }
    }

    /// Bitwise complement within a w-bit word.
    pub fn not(self, w: u32) -> Word {
        Word {
            hi: !self.hi,
            lo: !self.lo,
        }
        .and(Word::mask(w))
    }

    /// Left shift by s (0 <= s < 128) over the full 128-bit space,
    /// then masked to w bits.
    pub fn shl(self, s: u32, w: u32) -> Word {
        debug_assert!(s < 128);
        let r = if s == 0 {
            self
        } else if s < 64 {
            Word {
                hi: (self.hi << s) | (self.lo >> (64 - s)),
                lo: self.lo << s,
            }
        } else {
            Word {
                hi: self.lo << (s - 64),
                lo: 0,
            }
        };
        r.and(Word::mask(w))
    }

    /// Logical right shift by s (0 <= s < 128). No masking needed as long
    /// as the input was within its width.
    pub fn shr(self, s: u32) -> Word {
        debug_assert!(s < 128);
        if s == 0 {
            self
        } else if s < 64 {
            Word {
                hi: self.hi >> s,
                lo: (self.lo >> s) | (self.hi << (64 - s)),
            }
        } else {
            Word {
                hi: 0,
                lo: self.hi >> (s - 64),
            }
        }
    }

    /// Addition modulo 2^w, with explicit carry between the limbs.
    pub fn add(self, o: Word, w: u32) -> Word {
        let (lo, carry) = self.lo.overflowing_add(o.lo);
        let hi = self.hi.wrapping_add(o.hi).wrapping_add(carry as u64);
        Word { hi, lo }.and(Word::mask(w))
    }

    /// Subtraction modulo 2^w (borrow between limbs).
    pub fn sub(self, o: Word, w: u32) -> Word {
        let (lo, borrow) = self.lo.overflowing_sub(o.lo);
        let hi = self.hi.wrapping_sub(o.hi).wrapping_sub(borrow as u64);
        Word { hi, lo }.and(Word::mask(w))
    }

    /// The v most significant bits of a w-bit word, right-aligned.
    pub fn top_bits(self, v: u32, w: u32) -> Word {
        debug_assert!(v >= 1 && v <= w);
        self.shr(w - v)
    }

    /// Little-endian byte serialization of the low `nbytes` bytes.
    pub fn to_le_bytes(self, nbytes: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            let byte = if i < 8 {
                (self.lo >> (8 * i)) as u8
            } else {
                (self.hi >> (8 * (i - 8))) as u8
            };
            out.push(byte);
        }
        out
    }

    /// Fixed-width lowercase hex, one digit per 4 bits of w (rounded up).
    pub fn to_hex(self, w: u32) -> String {
        let digits = w.div_ceil(4) as usize;
        if w > 64 {
            let lo_digits = 16;
            let hi_digits = digits - lo_digits;
            format!("{:0hw$x}{:016x}", self.hi, self.lo, hw = hi_digits)
        } else {
            format!("{:0w$x}", self.lo, w = digits)
        }
    }

    /// Parse a hex string (optional 0x prefix, optional `_` separators)
    /// into a word. Errors on invalid digits or overflow past 128 bits.
    pub fn parse_hex(s: &str) -> Result<Word, String> {
        let s = s
            .strip_prefix("0x")
            .or_else(|| s.strip_prefix("0X"))
            .unwrap_or(s);
        let mut hi = 0u64;
        let mut lo = 0u64;
        let mut seen = 0u32;
        for ch in s.chars() {
            if ch == '_' {
                continue;
            }
            let d = ch
                .to_digit(16)
                .ok_or_else(|| format!("invalid hex digit '{}'", ch))? as u64;
            if seen >= 32 && (hi >> 60) != 0 {
                return Err("hex literal wider than 128 bits".into());
            }
            hi = (hi << 4) | (lo >> 60);
            lo = (lo << 4) | d;
            seen += 1;
        }
        if seen == 0 {
            return Err("empty hex literal".into());
        }
        Ok(Word { hi, lo })
    }

    /// Decimal rendering (for `--format dec`).
    pub fn to_dec(self) -> String {
        // Repeated division by 10 on the two limbs.
        if self.hi == 0 {
            return self.lo.to_string();
        }
        let mut digits = Vec::new();
        let (mut hi, mut lo) = (self.hi, self.lo);
        while hi != 0 || lo != 0 {
            // divide (hi, lo) by 10
            let rem_hi = hi % 10;
            let new_hi = hi / 10;
            // lo with carried remainder: value = rem_hi * 2^64 + lo
            let combined_hi = rem_hi << 32 | lo >> 32;
            let q1 = combined_hi / 10;
            let r1 = combined_hi % 10;
            let combined_lo = r1 << 32 | (lo & 0xFFFF_FFFF);
            let q0 = combined_lo / 10;
            let r0 = combined_lo % 10;
            digits.push(b'0' + r0 as u8);
            hi = new_hi;
            lo = q1 << 32 | q0;
        }
        digits.reverse();
        String::from_utf8(digits).unwrap()
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi == 0 {
            write!(f, "Word(0x{:x})", self.lo)
        } else {
            write!(f, "Word(0x{:x}_{:016x})", self.hi, self.lo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn to_u128(w: Word) -> u128 {
        (w.hi as u128) << 64 | w.lo as u128
    }

    fn from_u128(v: u128) -> Word {
        Word {
            hi: (v >> 64) as u64,
            lo: v as u64,
        }
    }

    // Deterministic test value stream.
    fn splitmix(state: &mut u64) -> u64 {
        *state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = *state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    #[test]
    fn ops_match_native_u128() {
        let mut s = 42u64;
        for _ in 0..2000 {
            let a = from_u128((splitmix(&mut s) as u128) << 64 | splitmix(&mut s) as u128);
            let b = from_u128((splitmix(&mut s) as u128) << 64 | splitmix(&mut s) as u128);
            for &w in &[4u32, 8, 32, 64, 77, 128] {
                let m = (u128::MAX) >> (128 - w);
                let (aw, bw) = (a.and(Word::mask(w)), b.and(Word::mask(w)));
                let (au, bu) = (to_u128(aw), to_u128(bw));
                assert_eq!(to_u128(aw.xor(bw)), au ^ bu);
                assert_eq!(to_u128(aw.and(bw)), au & bu);
                assert_eq!(to_u128(aw.or(bw)), au | bu);
                assert_eq!(to_u128(aw.not(w)), !au & m);
                assert_eq!(to_u128(aw.add(bw, w)), au.wrapping_add(bu) & m);
                assert_eq!(to_u128(aw.sub(bw, w)), au.wrapping_sub(bu) & m);
                let sft = (splitmix(&mut s) % w as u64) as u32;
                assert_eq!(to_u128(aw.shl(sft, w)), (au << sft) & m);
                assert_eq!(to_u128(aw.shr(sft)), au >> sft);
            }
        }
    }

    #[test]
    fn shift_edges() {
        let a = Word::from_parts(0x8000_0000_0000_0000, 1);
        assert_eq!(a.shr(127), Word::ONE);
        assert_eq!(a.shl(0, 128), a);
        assert_eq!(Word::ONE.shl(127, 128), Word::from_parts(1 << 63, 0));
        assert_eq!(Word::ONE.shl(64, 128), Word::from_parts(1, 0));
        // Width masking drops bits shifted past w.
        assert_eq!(Word::from_u64(0b1000).shl(1, 4), Word::ZERO);
    }

    #[test]
    fn mask_widths() {
        assert_eq!(Word::mask(4), Word::from_u64(0xF));
        assert_eq!(Word::mask(64), Word::from_parts(0, u64::MAX));
        assert_eq!(Word::mask(65), Word::from_parts(1, u64::MAX));
        assert_eq!(Word::mask(128), Word::from_parts(u64::MAX, u64::MAX));
    }

    #[test]
    fn hex_round_trip() {
        for s in [
            "0x0",
            "0xdeadbeef",
            "0x9E3779B97F4A7C15F39CC0605CEDC835",
            "ff",
            "0x0000_0001",
        ] {
            let w = Word::parse_hex(s).unwrap();
            let again = Word::parse_hex(&w.to_hex(128)).unwrap();
            assert_eq!(w, again);
        }
        assert!(Word::parse_hex("0xZZ").is_err());
        assert!(Word::parse_hex("").is_err());
        assert!(Word::parse_hex("0x1_0000_0000_0000_0000_0000_0000_0000_0000").is_err());
    }

    #[test]
    fn dec_rendering() {
        assert_eq!(Word::from_u64(0).to_dec(), "0");
        assert_eq!(
            Word::from_u64(1234567890123456789).to_dec(),
            "1234567890123456789"
        );
        let v: u128 = 340282366920938463463374607431768211455; // 2^128 - 1
        assert_eq!(from_u128(v).to_dec(), v.to_string());
        let v: u128 = 98765432109876543210987654321;
        assert_eq!(from_u128(v).to_dec(), v.to_string());
    }

    #[test]
    fn le_bytes() {
        let w = Word::from_parts(0x1122334455667788, 0x99AABBCCDDEEFF00);
        assert_eq!(w.to_le_bytes(4), vec![0x00, 0xFF, 0xEE, 0xDD]);
        assert_eq!(
            w.to_le_bytes(16),
            vec![
                0x00, 0xFF, 0xEE, 0xDD, 0xCC, 0xBB, 0xAA, 0x99, 0x88, 0x77, 0x66, 0x55, 0x44, 0x33,
                0x22, 0x11
            ]
        );
    }

    #[test]
    fn top_bits_extraction() {
        let w = Word::from_u64(0b1011_0001);
        assert_eq!(w.top_bits(3, 8), Word::from_u64(0b101));
        assert_eq!(w.top_bits(8, 8), w);
        let x = Word::from_parts(0xF000_0000_0000_0000, 0);
        assert_eq!(x.top_bits(4, 128), Word::from_u64(0xF));
    }
}
