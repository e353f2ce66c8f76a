//! F2-linear pseudorandom number generators built from a hybrid of the
//! Mersenne Twister masked-concatenation twist and xorgens-style xorshift
//! factors, together with the GF(2) machinery needed to analyze them:
//! characteristic polynomials (Berlekamp-Massey recovery, irreducibility
//! certification, weight), equidistribution dimensions k(v) and dimension
//! gaps, polynomial jump-ahead for parallel streams, and a small built-in
//! statistical battery with bit-exact stream export for external test
//! suites.

use std::fmt;

pub mod bench;
pub mod bits;
pub mod cli;
pub mod engine;
pub mod equidist;
pub mod gf2;
pub mod params;
pub mod stats;
pub mod word;

/// First four weyl-tempered output words of mxg32-521 at the default
/// seed, frozen after cross-checking the engine against a straight-line
/// reimplementation of the same recurrence (see tests/known_answers.rs).
pub const KAT_MXG32_521_SEED5489_WEYL: [&str; 4] = ["d9cca0c2", "c30ad9ce", "a05bc881", "3b5afadc"];

pub use engine::{Generator, Mode};
pub use gf2::{Gf2Matrix, Gf2Poly};
pub use params::{GeneratorParams, Registry};
pub use word::Word;

/// Crate-wide error type.
#[derive(Debug)]
pub enum Error {
    /// Unknown parameter-set name; carries the registered names for the
    /// error message.
    NotFound {
        name: String,
        available: Vec<String>,
    },
    /// Parameter-file syntax error.
    Parse {
        line: usize,
        msg: String,
    },
    /// A GeneratorParams (or descriptor) invariant failed.
    Invariant {
        field: String,
        msg: String,
    },
    /// Duplicate section name in a parameter file.
    DuplicateName {
        name: String,
        line: usize,
    },
    /// Polynomial operation outside its domain (zero/constant modulus).
    Domain(String),
    /// Irreducibility test requested for a composite degree.
    UnsupportedDegree {
        degree: usize,
    },
    /// Characteristic-polynomial recovery stalled below full degree:
    /// every projection tried gave a proper divisor, which signals a
    /// mistranscribed parameter set.
    DegenerateProjection {
        name: String,
        got: usize,
        want: usize,
    },
    /// Input exceeds an analysis-scale cap.
    SizeLimit {
        what: String,
        limit: usize,
        got: usize,
    },
    /// Operation does not support the requested tempering mode.
    UnsupportedMode(String),
    /// Requested configuration is inconsistent (missing tempering,
    /// mismatched polynomial degree, ...).
    Config(String),
    /// Bad argument value (counts, sample sizes, ...).
    InvalidArgument(String),
    /// Operation needs the explicit expensive flag at this size.
    ExpensiveGate {
        name: String,
        p: usize,
        limit: usize,
    },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotFound { name, available } => {
                write!(f, "unknown parameter set '{}'; available: {}", name, available.join(", "))
            }
            Error::Parse { line, msg } => write!(f, "parse error at line {}: {}", line, msg),
            Error::Invariant { field, msg } => write!(f, "invariant violation in '{}': {}", field, msg),
            Error::DuplicateName { name, line } => {
                write!(f, "duplicate parameter-set name '{}' at line {}", name, line)
            }
            Error::Domain(msg) => write!(f, "domain error: {}", msg),
            Error::UnsupportedDegree { degree } => {
                write!(f, "irreducibility test supports prime degrees only (got {})", degree)
            }
            Error::DegenerateProjection { name, got, want } => write!(
                f,
                "degenerate projection for '{}': minimal polynomial degree {} < {} after 3 bit positions; \
                 the parameter set is likely mistranscribed",
                name, got, want
            ),
            Error::SizeLimit { what, limit, got } => {
                write!(f, "{} supports sizes up to {} (got {})", what, limit, got)
            }
            Error::UnsupportedMode(msg) => write!(f, "unsupported mode: {}", msg),
            Error::Config(msg) => write!(f, "configuration error: {}", msg),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {}", msg),
            Error::ExpensiveGate { name, p, limit } => write!(
                f,
                "'{}' has p = {} > {}; this run can take hours, pass --expensive to proceed",
                name, p, limit
            ),
            Error::Io(e) => write!(f, "io error: {}", e),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
