//! Growable bit sequence packed into u64 limbs, bit i of the sequence at
//! bit (i % 64) of limb (i / 64). Shared by the minimal-polynomial
//! recovery (input sequences) and the statistical battery (test streams).

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitVec {
    limbs: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn new() -> Self {
        BitVec::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitVec {
            limbs: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i / 64] >> (i % 64)) & 1 != 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.limbs.push(0);
        }
        if bit {
            *self.limbs.last_mut().unwrap() |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Append the low `count` bits of `value`, most significant first.
    pub fn push_bits_msb(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.push((value >> i) & 1 != 0);
        }
    }

    /// 64 bits starting at `offset`, zero-padded past the end.
    pub fn window(&self, offset: usize) -> u64 {
        let q = offset / 64;
        let r = offset % 64;
        let lo = self.limbs.get(q).copied().unwrap_or(0);
        let w = if r == 0 {
            lo
        } else {
            let hi = self.limbs.get(q + 1).copied().unwrap_or(0);
            (lo >> r) | (hi << (64 - r))
        };
        // Mask anything past len.
        if offset >= self.len {
            0
        } else if self.len - offset < 64 {
            w & ((1u64 << (self.len - offset)) - 1)
        } else {
            w
        }
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> u64 {
        self.limbs.iter().map(|l| l.count_ones() as u64).sum()
    }

    /// The sequence reversed (bit i of the result = bit len-1-i of self).
    pub fn reversed(&self) -> BitVec {
        let mut out = BitVec::with_capacity(self.len);
        for i in (0..self.len).rev() {
            out.push(self.get(i));
        }
        out
    }

    /// Parse from an ASCII string of '0'/'1' (test fixtures).
    pub fn from_bitstring(s: &str) -> BitVec {
        let mut out = BitVec::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => panic!("bitstring may contain only 0 and 1"),
            }
        }
        out
    }
}
