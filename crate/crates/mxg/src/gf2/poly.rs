//! Polynomials over GF(2), coefficients bit-packed into u64 limbs
//! (coefficient of x^i at bit i%64 of limb i/64). Representation is
//! canonical: no trailing zero limbs, so equal polynomials are
//! bit-identical.

use num_bigint::BigUint;

use crate::bits::BitVec;
use crate::{Error, Result};

// spread_byte(b) places bit j of b at bit 2j; squaring a GF(2) polynomial
// is exactly this bit spreading.
const SPREAD: [u16; 256] = {
    let mut t = [0u16; 256];
    let mut i = 0usize;
    while i < 256 {
        let mut v = 0u16;
        let mut j = 0;
        while j < 8 {
            if i & (1 << j) != 0 {
                v |= 1 << (2 * j);
            }
            j += 1;
        }
        t[i] = v;
        i += 1;
    }
    t
};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    limbs: Vec<u64>,
}

impl Gf2Poly {
    pub fn zero() -> Gf2Poly {
        Gf2Poly { limbs: Vec::new() }
    }

    pub fn one() -> Gf2Poly {
        Gf2Poly { limbs: vec![1] }
    }

    pub fn x() -> Gf2Poly {
        Gf2Poly { limbs: vec![2] }
    }

    /// x^d
    pub fn monomial(d: usize) -> Gf2Poly {
        let mut limbs = vec![0u64; d / 64 + 1];
        limbs[d / 64] = 1 << (d % 64);
        Gf2Poly { limbs }
    }

    pub fn from_coeffs(coeffs: &[usize]) -> Gf2Poly {
        let mut p = Gf2Poly::zero();
        for &c in coeffs {
            p.flip_coeff(c);
        }
        p
    }

    pub fn from_limbs(limbs: Vec<u64>) -> Gf2Poly {
        let mut p = Gf2Poly { limbs };
        p.trim();
        p
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    fn trim(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = self.limbs.last()?;
        Some((self.limbs.len() - 1) * 64 + (63 - last.leading_zeros() as usize))
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs
            .get(i / 64)
            .is_some_and(|l| (l >> (i % 64)) & 1 != 0)
    }

    fn flip_coeff(&mut self, i: usize) {
        if self.limbs.len() <= i / 64 {
            self.limbs.resize(i / 64 + 1, 0);
        }
        self.limbs[i / 64] ^= 1 << (i % 64);
        self.trim();
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.limbs.iter().map(|l| l.count_ones() as usize).sum()
    }

    pub fn add(&self, other: &Gf2Poly) -> Gf2Poly {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut limbs = long.limbs.clone();
        for (i, l) in short.limbs.iter().enumerate() {
            limbs[i] ^= l;
        }
        Gf2Poly::from_limbs(limbs)
    }

    /// self * x^k
    pub fn shl_bits(&self, k: usize) -> Gf2Poly {
        if self.is_zero() {
            return Gf2Poly::zero();
        }
        let mut limbs = vec![0u64; self.limbs.len() + k / 64 + 1];
        xor_shifted(&mut limbs, &self.limbs, k);
        Gf2Poly::from_limbs(limbs)
    }

    /// Carryless (schoolbook) product.
    pub fn mul(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let mut acc = vec![0u64; self.limbs.len() + other.limbs.len()];
        for (i, &limb) in self.limbs.iter().enumerate() {
            let mut l = limb;
            while l != 0 {
                let b = l.trailing_zeros() as usize;
                l &= l - 1;
                xor_shifted(&mut acc, &other.limbs, i * 64 + b);
            }
        }
        Gf2Poly::from_limbs(acc)
    }

    /// Squaring by bit spreading: coefficient i moves to 2i.
    pub fn square(&self) -> Gf2Poly {
        let mut limbs = Vec::with_capacity(self.limbs.len() * 2);
        for &l in &self.limbs {
            limbs.push(spread32(l as u32));
            limbs.push(spread32((l >> 32) as u32));
        }
        Gf2Poly::from_limbs(limbs)
    }

    /// Long division: (quotient, remainder) with deg rem < deg divisor.
    pub fn divrem(&self, divisor: &Gf2Poly) -> (Gf2Poly, Gf2Poly) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let mut rem = self.clone();
        let mut quot = Gf2Poly::zero();
        while let Some(dr) = rem.degree() {
            if dr < dd {
                break;
            }
            let shift = dr - dd;
            let mut r = rem.limbs;
            xor_shifted(&mut r, &divisor.limbs, shift);
            rem = Gf2Poly::from_limbs(r);
            quot.flip_coeff(shift);
        }
        (quot, rem)
    }

    pub fn rem(&self, divisor: &Gf2Poly) -> Gf2Poly {
        self.divrem(divisor).1
    }

    pub fn gcd(&self, other: &Gf2Poly) -> Gf2Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn lcm(&self, other: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || other.is_zero() {
            return Gf2Poly::zero();
        }
        let g = self.gcd(other);
        let (q, r) = self.divrem(&g);
        debug_assert!(r.is_zero());
        q.mul(other)
    }

    /// Reverse the coefficients with respect to degree d: x^d * p(1/x).
    pub fn reciprocal(&self, d: usize) -> Gf2Poly {
        let mut out = Gf2Poly::zero();
        for i in 0..=d {
            if self.coeff(i) {
                out.flip_coeff(d - i);
            }
        }
        out
    }

    /// Export format: `deg=<d>` header line followed by the coefficient
    /// bits as hex, most-significant limb first.
    pub fn to_export(&self) -> String {
        match self.degree() {
            None => "deg=-inf\n0\n".to_string(),
            Some(d) => {
                let mut hex = String::new();
                for (i, l) in self.limbs.iter().enumerate().rev() {
                    if i == self.limbs.len() - 1 {
                        hex.push_str(&format!("{:x}", l));
                    } else {
                        hex.push_str(&format!("{:016x}", l));
                    }
                }
                format!("deg={}\n{}\n", d, hex)
            }
        }
    }

    pub fn from_export(text: &str) -> Result<Gf2Poly> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse {
            line: 1,
            msg: "empty export".into(),
        })?;
        let deg = header.strip_prefix("deg=").ok_or_else(|| Error::Parse {
            line: 1,
            msg: "missing deg= header".into(),
        })?;
        let body = lines.next().ok_or_else(|| Error::Parse {
            line: 2,
            msg: "missing hex body".into(),
        })?;
        if deg == "-inf" {
            return Ok(Gf2Poly::zero());
        }
        let want: usize = deg.parse().map_err(|_| Error::Parse {
            line: 1,
            msg: format!("bad degree '{}'", deg),
        })?;
        let mut limbs = Vec::new();
        let chars: Vec<char> = body.trim().chars().collect();
        for chunk in chars.rchunks(16) {
            let s: String = chunk.iter().collect();
            let l = u64::from_str_radix(&s, 16).map_err(|_| Error::Parse {
                line: 2,
                msg: format!("bad hex '{}'", s),
            })?;
            limbs.push(l);
        }
        let p = Gf2Poly::from_limbs(limbs);
        if p.degree() != Some(want) {
            return Err(Error::Parse {
                line: 2,
                msg: format!("degree mismatch: header {} vs body {:?}", want, p.degree()),
            });
        }
        Ok(p)
    }
}

impl std::fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.degree() {
            None => write!(f, "0"),
            Some(d) => {
                let mut first = true;
                for i in (0..=d).rev() {
                    if self.coeff(i) {
                        if !first {
                            write!(f, " + ")?;
                        }
                        first = false;
                        match i {
                            0 => write!(f, "1")?,
                            1 => write!(f, "x")?,
                            _ => write!(f, "x^{}", i)?,
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

fn spread32(v: u32) -> u64 {
    (SPREAD[(v & 0xFF) as usize] as u64)
        | (SPREAD[((v >> 8) & 0xFF) as usize] as u64) << 16
        | (SPREAD[((v >> 16) & 0xFF) as usize] as u64) << 32
        | (SPREAD[(v >> 24) as usize] as u64) << 48
}

/// dst ^= src << shift (in bits). dst must be long enough for the value;
/// an all-zero carry limb may fall off the end.
fn xor_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let ws = shift / 64;
    let bs = shift % 64;
    if bs == 0 {
        for (j, &l) in src.iter().enumerate() {
            dst[ws + j] ^= l;
        }
    } else {
        for (j, &l) in src.iter().enumerate() {
            dst[ws + j] ^= l << bs;
            let carry = l >> (64 - bs);
            if carry != 0 {
                dst[ws + j + 1] ^= carry;
            }
        }
    }
}

/// a * b mod m. Errors when m is zero or constant.
pub fn poly_mul_mod(a: &Gf2Poly, b: &Gf2Poly, m: &Gf2Poly) -> Result<Gf2Poly> {
    check_modulus(m)?;
    Ok(a.rem(m).mul(&b.rem(m)).rem(m))
}

fn check_modulus(m: &Gf2Poly) -> Result<()> {
    match m.degree() {
        Some(d) if d >= 1 => Ok(()),
        _ => Err(Error::Domain("modulus must have degree >= 1".into())),
    }
}

/// x^e mod m by square-and-multiply over the bits of e. For e = 2^k this
/// degenerates into k squarings, which is the irreducibility-test path.
pub fn poly_powmod_x(e: &BigUint, m: &Gf2Poly) -> Result<Gf2Poly> {
    check_modulus(m)?;
    let modulus = Modulus::new(m.clone());
    let mut r = Gf2Poly::one().rem(m);
    for i in (0..e.bits()).rev() {
        r = modulus.square(&r);
        if e.bit(i) {
            r = modulus.mul_x(&r);
        }
    }
    Ok(r)
}

/// Prime-degree irreducibility: f of prime degree p is irreducible iff
/// x^(2^p) == x (mod f) and f shares no factor with x^2 + x. For degrees
/// where 2^p - 1 is prime this also certifies primitivity.
pub fn is_irreducible_prime_degree(f: &Gf2Poly) -> Result<bool> {
    let d = f.degree().unwrap_or(0);
    if !is_prime_u64(d as u64) {
        return Err(Error::UnsupportedDegree { degree: d });
    }
    // No factor of degree 1 (x or x+1); also rejects zero constant term.
    let x2x = Gf2Poly::from_coeffs(&[1, 2]);
    if f.gcd(&x2x).degree() != Some(0) {
        return Ok(false);
    }
    let modulus = Modulus::new(f.clone());
    let x = Gf2Poly::x().rem(f);
    let mut t = x.clone();
    for _ in 0..d {
        t = modulus.square(&t);
    }
    Ok(t == x)
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Reduction context for a fixed modulus: precomputes b(x)*m(x) for every
/// byte value b so wide polynomials reduce 8 coefficient bits per step.
/// Certifying a degree-p polynomial takes p squarings; the table pays for
/// itself after the first one.
pub struct Modulus {
    m: Gf2Poly,
    deg: usize,
    table: Vec<Vec<u64>>,
}

impl Modulus {
    pub fn new(m: Gf2Poly) -> Modulus {
        let deg = m.degree().expect("modulus must be nonzero");
        assert!(deg >= 1, "modulus must have degree >= 1");
        // table[b] = b(x)*x^deg + (b(x)*x^deg mod m): multiple of m whose
        // coefficients on [deg, deg+8) are exactly the byte b, so one XOR
        // clears a whole byte of the value being reduced.
        let entry_limbs = (deg + 8).div_ceil(64);
        let mut residues: Vec<Gf2Poly> = Vec::with_capacity(256);
        residues.push(Gf2Poly::zero());
        // x^deg mod m = m with its leading term dropped.
        let r1 = m.add(&Gf2Poly::monomial(deg));
        for b in 1..256usize {
            let r = if b == 1 {
                r1.clone()
            } else if b % 2 == 0 {
                // x * r[b/2] mod m
                let t = residues[b / 2].shl_bits(1);
                if t.degree() == Some(deg) {
                    t.add(&m)
                } else {
                    t
                }
            } else {
                residues[b - 1].add(&r1)
            };
            residues.push(r);
        }
        let mut table = Vec::with_capacity(256);
        for (b, r) in residues.iter().enumerate() {
            let mut acc = vec![0u64; entry_limbs];
            for (j, &l) in r.limbs().iter().enumerate() {
                acc[j] = l;
            }
            for bit in 0..8 {
                if b & (1 << bit) != 0 {
                    let pos = deg + bit;
                    acc[pos / 64] ^= 1 << (pos % 64);
                }
            }
            table.push(acc);
        }
        Modulus { m, deg, table }
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn poly(&self) -> &Gf2Poly {
        &self.m
    }

    /// Reduce a wide limb vector in place and return the canonical remainder.
    fn reduce(&self, mut wide: Vec<u64>) -> Gf2Poly {
        // Whole bytes strictly above deg, high to low.
        let total_bits = wide.len() * 64;
        let mut byte = total_bits / 8;
        while byte > 0 {
            byte -= 1;
            let pos = byte * 8;
            if pos < self.deg {
                break;
            }
            let b = extract_byte(&wide, pos);
            if b != 0 {
                xor_shifted(&mut wide, &self.table[b as usize], pos - self.deg);
            }
        }
        // Straddling bits between deg and the next byte boundary.
        let boundary = self.deg.div_ceil(8) * 8;
        for i in (self.deg..boundary.min(total_bits)).rev() {
            if (wide[i / 64] >> (i % 64)) & 1 != 0 {
                xor_shifted(&mut wide, self.m.limbs(), i - self.deg);
            }
        }
        wide.truncate(self.deg.div_ceil(64));
        Gf2Poly::from_limbs(wide)
    }

    pub fn rem(&self, a: &Gf2Poly) -> Gf2Poly {
        self.reduce(a.limbs().to_vec())
    }

    /// a^2 mod m for deg a < deg m.
    pub fn square(&self, a: &Gf2Poly) -> Gf2Poly {
        debug_assert!(a.degree().is_none_or(|d| d < self.deg));
        let mut wide = Vec::with_capacity(a.limbs().len() * 2);
        for &l in a.limbs() {
            wide.push(spread32(l as u32));
            wide.push(spread32((l >> 32) as u32));
        }
        self.reduce(wide)
    }

    /// a * x mod m for deg a < deg m.
    pub fn mul_x(&self, a: &Gf2Poly) -> Gf2Poly {
        let shifted = a.shl_bits(1);
        if shifted.degree() == Some(self.deg) {
            shifted.add(&self.m)
        } else {
            shifted
        }
    }

    pub fn mul(&self, a: &Gf2Poly, b: &Gf2Poly) -> Gf2Poly {
        let prod = a.mul(b);
        self.reduce(prod.limbs().to_vec())
    }
}

fn extract_byte(limbs: &[u64], pos: usize) -> u8 {
    let q = pos / 64;
    let r = pos % 64;
    let lo = limbs.get(q).copied().unwrap_or(0) >> r;
    let v = if r > 56 {
        lo | (limbs.get(q + 1).copied().unwrap_or(0) << (64 - r))
    } else {
        lo
    };
    v as u8
}

/// Berlekamp-Massey over GF(2): the monic minimal polynomial f of the
/// shortest LFSR generating `seq`, i.e. sum_i f_i * s_(k+i) = 0 for all k.
/// Needs at least 2*deg(f) bits to converge to the true answer.
pub fn berlekamp_massey(seq: &BitVec) -> Gf2Poly {
    let n_total = seq.len();
    if n_total == 0 {
        return Gf2Poly::one();
    }
    let srev = seq.reversed();
    // Connection polynomial c: s_n = sum_{i=1..l} c_i * s_(n-i).
    let mut c = Gf2Poly::one();
    let mut b = Gf2Poly::one();
    let mut l = 0usize;
    let mut m = 1usize;
    for n in 0..n_total {
        // Discrepancy d = sum_{i=0..l} c_i * s_(n-i); with the reversed
        // sequence this is a word-aligned dot product at offset N-1-n.
        let off = n_total - 1 - n;
        let mut acc = 0u64;
        for (k, &cl) in c.limbs().iter().enumerate() {
            acc ^= cl & srev.window(off + 64 * k);
        }
        let d = acc.count_ones() & 1 == 1;
        if !d {
            m += 1;
        } else if 2 * l <= n {
            let t = c.clone();
            c = c.add(&b.shl_bits(m));
            l = n + 1 - l;
            b = t;
            m = 1;
        } else {
            c = c.add(&b.shl_bits(m));
            m += 1;
        }
    }
    // Minimal polynomial = reciprocal of the connection polynomial at
    // length l (monic because c_0 = 1).
    c.reciprocal(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(coeffs: &[usize]) -> Gf2Poly {
        Gf2Poly::from_coeffs(coeffs)
    }

    #[test]
    fn degree_and_weight() {
        assert_eq!(Gf2Poly::zero().degree(), None);
        assert_eq!(Gf2Poly::one().degree(), Some(0));
        assert_eq!(poly(&[0, 1, 3]).degree(), Some(3));
        assert_eq!(poly(&[0, 1, 3]).weight(), 3);
        assert_eq!(Gf2Poly::monomial(521).degree(), Some(521));
        assert_eq!(Gf2Poly::monomial(521).weight(), 1);
    }

    #[test]
    fn mul_small() {
        // (x+1)(x+1) = x^2+1
        assert_eq!(poly(&[0, 1]).mul(&poly(&[0, 1])), poly(&[0, 2]));
        // (x^2+x+1)(x+1) = x^3+1
        assert_eq!(poly(&[0, 1, 2]).mul(&poly(&[0, 1])), poly(&[0, 3]));
    }

    #[test]
    fn square_matches_mul() {
        let mut s = 7u64;
        for _ in 0..50 {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = Gf2Poly::from_limbs(vec![s, s.rotate_left(17), s ^ 0xABCD]);
            assert_eq!(a.square(), a.mul(&a));
        }
    }

    #[test]
    fn divrem_identity() {
        let mut s = 3u64;
        for _ in 0..50 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(99);
            let a = Gf2Poly::from_limbs(vec![s, s.rotate_left(31)]);
            let m = Gf2Poly::from_limbs(vec![s.rotate_left(7) | 1, 0x1B]);
            let (q, r) = a.divrem(&m);
            assert!(r.degree() < m.degree() || r.is_zero());
            assert_eq!(q.mul(&m).add(&r), a);
        }
    }

    #[test]
    fn mulmod_examples() {
        // x * x mod x^2+x+1 = x+1 (GF(4) arithmetic)
        let m = poly(&[0, 1, 2]);
        assert_eq!(
            poly_mul_mod(&Gf2Poly::x(), &Gf2Poly::x(), &m).unwrap(),
            poly(&[0, 1])
        );
        // a * 1 = a mod m
        let a = poly(&[0, 3, 5]);
        let m2 = poly(&[0, 2, 7]);
        assert_eq!(poly_mul_mod(&a, &Gf2Poly::one(), &m2).unwrap(), a.rem(&m2));
        assert!(matches!(
            poly_mul_mod(&a, &a, &Gf2Poly::one()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            poly_mul_mod(&a, &a, &Gf2Poly::zero()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn mulmod_matches_schoolbook_reference() {
        // Random degree-<64 operands against a plain shift-and-add oracle
        // over u128 words.
        fn school_mul(a: u64, b: u64) -> u128 {
            let mut acc = 0u128;
            for i in 0..64 {
                if (b >> i) & 1 != 0 {
                    acc ^= (a as u128) << i;
                }
            }
            acc
        }
        fn school_rem(mut v: u128, m: u128, md: u32) -> u128 {
            for i in (md..128).rev() {
                if (v >> i) & 1 != 0 {
                    v ^= m << (i - md);
                }
            }
            v
        }
        let mut s = 0xFEED_u64;
        let m_limbs = [0x2_47F4_3CB7_u64 | 1, 1]; // degree-64 modulus
        let m = Gf2Poly::from_limbs(m_limbs.to_vec());
        let m128 = (1u128 << 64) | m_limbs[0] as u128;
        for _ in 0..200 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(7);
            let a = s;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(7);
            let b = s;
            let got = poly_mul_mod(
                &Gf2Poly::from_limbs(vec![a]),
                &Gf2Poly::from_limbs(vec![b]),
                &m,
            )
            .unwrap();
            let want = school_rem(school_mul(a, b), m128, 64);
            assert_eq!(
                got,
                Gf2Poly::from_limbs(vec![want as u64, (want >> 64) as u64])
            );
        }
    }

    #[test]
    fn powmod_examples() {
        // e=1 -> x when deg m > 1
        let m = poly(&[0, 1, 4]); // x^4+x+1, irreducible
        assert_eq!(
            poly_powmod_x(&BigUint::from(1u32), &m).unwrap(),
            Gf2Poly::x()
        );
        // Frobenius: x^(2^4) == x mod any degree-4 irreducible
        assert_eq!(
            poly_powmod_x(&BigUint::from(16u32), &m).unwrap(),
            Gf2Poly::x()
        );
        // e=0 -> 1
        assert_eq!(
            poly_powmod_x(&BigUint::from(0u32), &m).unwrap(),
            Gf2Poly::one()
        );
        // Against repeated mul_x
        let modulus = Modulus::new(m.clone());
        let mut t = Gf2Poly::one();
        for e in 0..40u32 {
            assert_eq!(poly_powmod_x(&BigUint::from(e), &m).unwrap(), t, "e={}", e);
            t = modulus.mul_x(&t);
        }
    }

    #[test]
    fn irreducibility_small() {
        assert!(is_irreducible_prime_degree(&poly(&[0, 1, 2])).unwrap()); // x^2+x+1
        assert!(!is_irreducible_prime_degree(&poly(&[0, 2])).unwrap()); // x^2+1 = (x+1)^2
        assert!(is_irreducible_prime_degree(&poly(&[0, 1, 3])).unwrap()); // x^3+x+1
        assert!(is_irreducible_prime_degree(&poly(&[0, 2, 3])).unwrap()); // x^3+x^2+1
        assert!(!is_irreducible_prime_degree(&poly(&[1, 3])).unwrap()); // x^3+x = x(x+1)^2
        assert!(!is_irreducible_prime_degree(&poly(&[0, 4, 5])).unwrap()); // x^5+x^4+1 = (x^2+x+1)(x^3+x+1)
        assert!(matches!(
            is_irreducible_prime_degree(&poly(&[0, 4])),
            Err(Error::UnsupportedDegree { degree: 4 })
        ));
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        // Exhaustive cross-check for all prime degrees <= 13.
        fn reducible_by_trial(f: u64, deg: u32) -> bool {
            for d in 1..=deg / 2 {
                for g in (1u64 << d)..(1u64 << (d + 1)) {
                    // trial divide f by g over GF(2)
                    let mut r = f;
                    while 64 - r.leading_zeros() >= 64 - g.leading_zeros() && r != 0 {
                        let shift = g.leading_zeros() - r.leading_zeros();
                        r ^= g << shift;
                    }
                    if r == 0 {
                        return true;
                    }
                }
            }
            false
        }
        for deg in [2u32, 3, 5, 7, 11, 13] {
            let lo = 1u64 << deg;
            for f in lo..lo << 1 {
                let p = Gf2Poly::from_limbs(vec![f]);
                let got = is_irreducible_prime_degree(&p).unwrap();
                assert_eq!(got, !reducible_by_trial(f, deg), "f={:#b}", f);
            }
        }
    }

    #[test]
    fn modulus_reduce_matches_divrem() {
        let mut s = 0xABCDu64;
        for limbs in [2usize, 5, 9] {
            let mut mv = vec![0u64; limbs];
            for l in mv.iter_mut() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(13);
                *l = s;
            }
            mv[limbs - 1] |= 1 << 17;
            let m = Gf2Poly::from_limbs(mv);
            let modulus = Modulus::new(m.clone());
            for _ in 0..20 {
                let mut av = vec![0u64; limbs * 2];
                for l in av.iter_mut() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(13);
                    *l = s;
                }
                let a = Gf2Poly::from_limbs(av);
                assert_eq!(modulus.rem(&a), a.rem(&m));
                let sq = modulus.square(&modulus.rem(&a));
                assert_eq!(sq, modulus.rem(&a).mul(&modulus.rem(&a)).rem(&m));
            }
        }
    }

    #[test]
    fn bm_known_sequences() {
        // All-zero sequence -> constant polynomial 1.
        let z = BitVec::from_bitstring("0000000000");
        assert_eq!(berlekamp_massey(&z), Gf2Poly::one());

        // LFSR with minimal polynomial x^3+x+1: s_{k+3} = s_{k+1} + s_k.
        let mut seq = BitVec::from_bitstring("100");
        for i in 3..14 {
            let b = seq.get(i - 2) ^ seq.get(i - 3);
            seq.push(b);
        }
        assert_eq!(berlekamp_massey(&seq), poly(&[0, 1, 3]));

        // PRBS-9 with recurrence s_{t+9} = s_{t+5} + s_t -> x^9 + x^5 + 1.
        let mut s9 = BitVec::new();
        let mut state = 0x1FFu32;
        for _ in 0..64 {
            let b = ((state >> 8) ^ (state >> 3)) & 1;
            s9.push(state >> 8 & 1 != 0);
            state = ((state << 1) | b) & 0x1FF;
        }
        assert_eq!(berlekamp_massey(&s9), poly(&[0, 5, 9]));
    }

    #[test]
    fn bm_needs_twice_degree() {
        // Fibonacci LFSR for x^5+x^2+1 (s_{k+5} = s_{k+2} + s_k), fed
        // exactly 10 bits -> converges.
        let f = poly(&[0, 2, 5]);
        let mut seq = BitVec::new();
        let mut state = [true, false, false, true, true];
        for _ in 0..10 {
            seq.push(state[0]);
            let nb = state[0] ^ state[2];
            state.rotate_left(1);
            state[4] = nb;
        }
        assert_eq!(berlekamp_massey(&seq), f);
    }

    #[test]
    fn lcm_gcd() {
        let a = poly(&[0, 1, 3]); // irreducible
        let b = poly(&[0, 2, 3]); // irreducible
        assert_eq!(a.gcd(&b).degree(), Some(0));
        assert_eq!(a.lcm(&b), a.mul(&b));
        let c = a.mul(&a);
        assert_eq!(a.lcm(&c), c);
    }

    #[test]
    fn export_round_trip() {
        for p in [
            Gf2Poly::zero(),
            Gf2Poly::one(),
            poly(&[0, 1, 3]),
            Gf2Poly::monomial(521).add(&Gf2Poly::one()),
        ] {
            let text = p.to_export();
            assert_eq!(Gf2Poly::from_export(&text).unwrap(), p);
        }
    }

    #[test]
    fn reciprocal_small() {
        // x^3+x+1 <-> x^3+x^2+1
        assert_eq!(poly(&[0, 1, 3]).reciprocal(3), poly(&[0, 2, 3]));
        assert_eq!(poly(&[0, 2, 3]).reciprocal(3), poly(&[0, 1, 3]));
        assert_eq!(Gf2Poly::one().reciprocal(0), Gf2Poly::one());
    }
}
