//! Disk cache for irreducibility verdicts. Certification of large
//! degrees is expensive and the answer is immutable, so verdicts are
//! keyed by a hash of the polynomial and written atomically
//! (write-to-temp + rename).

use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::poly::{is_irreducible_prime_degree, Gf2Poly};
use crate::Result;

/// Cache directory: $MXG_CACHE_DIR if set, otherwise a per-user
/// directory under the system temp dir.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os("MXG_CACHE_DIR") {
        Some(dir) => PathBuf::from(dir),
        None => std::env::temp_dir().join("mxg-cache"),
    }
}

fn poly_key(f: &Gf2Poly) -> String {
    let mut hasher = Sha256::new();
    for limb in f.limbs() {
        hasher.update(limb.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for b in digest {
        hex.push_str(&format!("{:02x}", b));
    }
    hex
}

/// Irreducibility with a disk cache. Cache misses run the full test and
/// persist the verdict; unreadable or corrupt cache entries are ignored
/// and recomputed.
pub fn is_irreducible_cached(f: &Gf2Poly) -> Result<bool> {
    let dir = cache_dir();
    let key = poly_key(f);
    let path = dir.join(format!("irr-{}.txt", key));
    if let Ok(text) = fs::read_to_string(&path) {
        match text.trim() {
            "irreducible=true" => return Ok(true),
            "irreducible=false" => return Ok(false),
            _ => {}
        }
    }
    let verdict = is_irreducible_prime_degree(f)?;
    // Best effort: a failed cache write must not fail the analysis.
    let _ = fs::create_dir_all(&dir);
    let tmp = dir.join(format!("irr-{}.tmp.{}", key, std::process::id()));
    let body = format!("irreducible={}\n", verdict);
    if fs::write(&tmp, body).is_ok() {
        let _ = fs::rename(&tmp, &path);
    }
    Ok(verdict)
}
