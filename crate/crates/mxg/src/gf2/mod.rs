//! GF(2) algebra for generator analysis: polynomial arithmetic,
//! minimal-polynomial recovery from output streams, irreducibility
//! certification (with a disk cache), and the transition-matrix oracle.

mod cache;
mod matrix;
mod poly;

pub use cache::{cache_dir, is_irreducible_cached};
pub use matrix::{Gf2Matrix, RowBasis};
pub use poly::{
    berlekamp_massey, is_irreducible_prime_degree, poly_mul_mod, poly_powmod_x, Gf2Poly, Modulus,
};

use std::sync::Arc;

use crate::bits::BitVec;
use crate::engine::Generator;
use crate::params::GeneratorParams;
use crate::word::Word;
use crate::{Error, Result};

/// Fixed seed for characteristic-polynomial recovery. The minimal
/// polynomial is a property of the map, not of the orbit, so any nonzero
/// state works; fixing one keeps runs reproducible.
const CHARPOLY_SEED: u64 = 0x00C0FFEE;

/// Analysis-scale cap for dense matrix work.
pub const MATRIX_CAP: usize = 4096;

/// Certification above this degree is gated behind the expensive flag.
pub const CHEAP_DEGREE_LIMIT: usize = 4423;

/// Minimal polynomial of the raw transition, recovered from output bit
/// streams. Runs Berlekamp-Massey on 2p + 64 steps of a fixed bit
/// position, then confirms with further positions (lcm) until the
/// degree reaches p; fewer than p after three positions signals a
/// mistranscribed parameter set.
pub fn char_poly(params: &Arc<GeneratorParams>) -> Result<Gf2Poly> {
    let p = params.effective_bits;
    let w = params.word_size;
    let samples = 2 * p + 64;
    let mut gen = Generator::seed(params.clone(), CHARPOLY_SEED);
    let mut outputs: Vec<Word> = Vec::with_capacity(samples);
    for _ in 0..samples {
        outputs.push(gen.next_raw());
    }
    let positions = [0u32, w - 1, w / 2];
    let mut acc = Gf2Poly::one();
    for pos in positions {
        let mut seq = BitVec::with_capacity(samples);
        for word in &outputs {
            seq.push(word.bit(pos));
        }
        let minpoly = berlekamp_massey(&seq);
        acc = if acc.degree() == Some(0) {
            minpoly
        } else {
            acc.lcm(&minpoly)
        };
        match acc.degree() {
            Some(d) if d == p => return Ok(acc),
            Some(d) if d > p => {
                return Err(Error::DegenerateProjection {
                    name: params.name.clone(),
                    got: d,
                    want: p,
                })
            }
            _ => {}
        }
    }
    Err(Error::DegenerateProjection {
        name: params.name.clone(),
        got: acc.degree().unwrap_or(0),
        want: p,
    })
}

/// p x p transition matrix of the raw step on effective coordinates:
/// column j is the image of the unit state e_j. Built by stepping unit
/// states through the engine so there is exactly one transcription of
/// the recurrence in the codebase.
pub fn transition_matrix(params: &Arc<GeneratorParams>) -> Result<Gf2Matrix> {
    let p = params.effective_bits;
    if p > MATRIX_CAP {
        return Err(Error::SizeLimit {
            what: "transition_matrix".into(),
            limit: MATRIX_CAP,
            got: p,
        });
    }
    let mut m = Gf2Matrix::zeros(p, p);
    let mut unit = vec![0u64; p.div_ceil(64)];
    for j in 0..p {
        unit[j / 64] |= 1 << (j % 64);
        let mut gen = Generator::from_effective_bits(params.clone(), &unit);
        unit[j / 64] &= !(1 << (j % 64));
        gen.next_raw();
        let image = gen.effective_bits();
        for (i, limb) in image.iter().enumerate() {
            let mut l = *limb;
            while l != 0 {
                let b = l.trailing_zeros() as usize;
                l &= l - 1;
                m.set(i * 64 + b, j, true);
            }
        }
    }
    Ok(m)
}
