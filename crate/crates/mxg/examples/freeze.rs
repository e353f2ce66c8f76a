//! Regenerates the constants frozen into the test suite (known-answer
//! vector, equidistribution totals, stream checksums). Run after any
//! deliberate change to the embedded tables and paste the output into
//! lib.rs / tests/acceptance.rs.

use mxg::engine::{Generator, Mode};
use mxg::equidist;
use mxg::params::Registry;
use sha2::{Digest, Sha256};

fn main() {
    let reg = Registry::embedded();

    let params = reg.lookup("mxg32-521").unwrap();
    let mut gen = Generator::seed(params.clone(), 5489);
    let kat: Vec<String> = (0..4)
        .map(|_| format!("{:08x}", gen.next_word(Mode::Weyl).unwrap().lo as u32))
        .collect();
    println!("KAT_MXG32_521_SEED5489_WEYL = {:?}", kat);

    let none = equidist::full_report(&params, Mode::None).unwrap();
    let linear = equidist::full_report(&params, Mode::Linear).unwrap();
    println!(
        "FROZEN_DEFECT_MXG32_521 = ({}, {})",
        none.total_defect, linear.total_defect
    );
    println!(
        "gap table none (v k* k gap): {:?}",
        none.per_v
            .iter()
            .map(|r| (r.v, r.k_star, r.k_v, r.gap))
            .collect::<Vec<_>>()
    );

    // Stream checksums matching the acceptance criterion's gen commands.
    let mut gen = Generator::seed(reg.lookup("mxg32-521").unwrap(), 5489);
    let mut bytes = Vec::new();
    for _ in 0..65536 {
        bytes.extend_from_slice(&(gen.next_word(Mode::Weyl).unwrap().lo as u32).to_le_bytes());
    }
    let mut h = Sha256::new();
    h.update(&bytes);
    println!("sha int32-mxg32-521 = {}", hex(&h.finalize()));

    let mut gen = Generator::seed(reg.lookup("mxg64-521").unwrap(), 5489);
    let mut bytes = Vec::new();
    for _ in 0..8192 {
        bytes.extend_from_slice(&gen.next_real64().to_le_bytes());
    }
    let mut h = Sha256::new();
    h.update(&bytes);
    println!("sha real64-mxg64-521 = {}", hex(&h.finalize()));
}

fn hex(d: &[u8]) -> String {
    d.iter().map(|b| format!("{:02x}", b)).collect()
}
