//! Command-line surface. Standard output carries payload only (streams
//! and report tables); every diagnostic, including the resolved
//! effective configuration printed as the first line of each run, goes
//! to standard error.
//!
//! Exit codes: 0 success, 1 usage error, 2 analysis/self-test failure.

use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use sha2::{Digest, Sha256};

use crate::engine::{Generator, Mode};
use crate::equidist;
use crate::gf2;
use crate::params::Registry;
use crate::stats::{self, DummyKind, StreamPath};
use crate::{bench, Error};

/// SHA-256 of the embedded parameter table; freezes the transcription.
pub const EMBEDDED_TABLE_SHA256: &str =
    include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/params.sha256"));

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "mxg",
    version,
    about = "Hybrid twisted/xorshift F2-linear generators and analysis tools",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Emit an output stream on stdout.
    Gen(GenArgs),
    /// Measure generator throughput against in-repo references.
    Bench(BenchArgs),
    /// Characteristic-polynomial and equidistribution analysis.
    Analyze(AnalyzeArgs),
    /// Fast built-in consistency checks (exit 0 iff everything passes).
    Selftest,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Parameter-set name, e.g. mxg32-521.
    #[arg(long)]
    param: String,
    /// 64-bit seed.
    #[arg(long, default_value_t = 5489)]
    seed: u64,
    /// Output tempering: none | linear | weyl.
    #[arg(long, default_value = "weyl")]
    mode: String,
    /// Output path: int32 | real64 | raw-words.
    #[arg(long, default_value = "int32")]
    path: String,
    /// Number of values to emit (>= 1).
    #[arg(long)]
    count: u64,
    /// Encoding: raw (little-endian, unframed) | hex | dec.
    #[arg(long, default_value = "raw")]
    format: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Comma-separated parameter-set names.
    #[arg(long, default_value = "mxg32-521,mxg64-521")]
    params: String,
    /// Comma-separated modes to measure.
    #[arg(long, default_value = "none,linear,weyl")]
    modes: String,
    /// Measurement duration per cell, seconds.
    #[arg(long, default_value_t = 0.25)]
    secs_per_cell: f64,
    /// Repetitions per cell (median reported, minimum 5).
    #[arg(long, default_value_t = 5)]
    reps: usize,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(subcommand)]
    kind: AnalyzeKind,
}

#[derive(Subcommand, Debug)]
enum AnalyzeKind {
    /// Recover the characteristic polynomial; report degree, weight and
    /// the irreducibility verdict.
    Charpoly {
        #[arg(long)]
        param: String,
        /// Allow certification above the cheap-degree limit (can take hours).
        #[arg(long)]
        expensive: bool,
        /// Write the polynomial export (deg= header + hex) to this file.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Equidistribution gap table at resolutions v = 1..min(w, 32).
    Equidist {
        #[arg(long)]
        param: String,
        /// Tempering mode for the analysis: none | linear.
        #[arg(long, default_value = "none")]
        tempering: String,
        /// Allow state sizes above the cheap limit.
        #[arg(long)]
        expensive: bool,
        /// Write the gap table to this file instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

/// Rank-method state sizes beyond this need --expensive.
const EQUIDIST_CHEAP_LIMIT: usize = 2281;

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version as "errors" with success status.
            if e.use_stderr() {
                eprint!("{}", e);
                return EXIT_USAGE;
            }
            print!("{}", e);
            return 0;
        }
    };
    let outcome = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Bench(args) => cmd_bench(args),
        Cmd::Analyze(args) => match args.kind {
            AnalyzeKind::Charpoly {
                param,
                expensive,
                out,
            } => cmd_charpoly(param, expensive, out),
            AnalyzeKind::Equidist {
                param,
                tempering,
                expensive,
                out,
            } => cmd_equidist(param, tempering, expensive, out),
        },
        Cmd::Selftest => cmd_selftest(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::NotFound { .. }
                | Error::InvalidArgument(_)
                | Error::ExpensiveGate { .. } => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn effective_config(line: String) {
    eprintln!("config: {}", line);
}

fn cmd_gen(args: GenArgs) -> crate::Result<i32> {
    effective_config(format!(
        "subcommand=gen param={} seed={} mode={} path={} count={} format={}",
        args.param, args.seed, args.mode, args.path, args.count, args.format
    ));
    if args.count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    let mode = Mode::parse(&args.mode)?;
    let params = Registry::embedded().lookup(&args.param)?;
    let w = params.word_size;
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut gen = Generator::seed(params.clone(), args.seed);

    enum PathKind {
        Int32,
        Real64,
        RawWords,
    }
    let path = match args.path.as_str() {
        "int32" => PathKind::Int32,
        "real64" => PathKind::Real64,
        "raw-words" => PathKind::RawWords,
        other => return Err(Error::InvalidArgument(format!("unknown path '{}'", other))),
    };
    if matches!(path, PathKind::Int32) && w < 32 {
        return Err(Error::InvalidArgument(format!(
            "int32 path needs word size >= 32 (parameter set '{}' has w = {})",
            params.name, w
        )));
    }

    let result = (|| -> crate::Result<()> {
        // int32 values per output word (most significant part first).
        let parts = if w >= 32 { w / 32 } else { 1 };
        let mut pending: Vec<u32> = Vec::new();
        for _ in 0..args.count {
            match path {
                PathKind::Int32 => {
                    if pending.is_empty() {
                        let word = gen.next_word(mode)?;
                        for i in 0..parts {
                            let part = word.shr((parts - 1 - i) * 32).lo as u32;
                            pending.push(part);
                        }
                        pending.reverse(); // pop() yields most significant first
                    }
                    let v = pending.pop().expect("just refilled");
                    match args.format.as_str() {
                        "raw" => out.write_all(&v.to_le_bytes())?,
                        "hex" => writeln!(out, "{:08x}", v)?,
                        "dec" => writeln!(out, "{}", v)?,
                        other => {
                            return Err(Error::InvalidArgument(format!(
                                "unknown format '{}'",
                                other
                            )))
                        }
                    }
                }
                PathKind::Real64 => {
                    let r = gen.next_real64_in_mode(mode)?;
                    match args.format.as_str() {
                        "raw" => out.write_all(&r.to_le_bytes())?,
                        "hex" => writeln!(out, "{:016x}", r.to_bits())?,
                        "dec" => writeln!(out, "{}", r)?,
                        other => {
                            return Err(Error::InvalidArgument(format!(
                                "unknown format '{}'",
                                other
                            )))
                        }
                    }
                }
                PathKind::RawWords => {
                    let word = gen.next_word(mode)?;
                    match args.format.as_str() {
                        "raw" => out.write_all(&word.to_le_bytes(w.div_ceil(8) as usize))?,
                        "hex" => writeln!(out, "{}", word.to_hex(w))?,
                        "dec" => writeln!(out, "{}", word.to_dec())?,
                        other => {
                            return Err(Error::InvalidArgument(format!(
                                "unknown format '{}'",
                                other
                            )))
                        }
                    }
                }
            }
        }
        out.flush()?;
        Ok(())
    })();
    match result {
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(0),
        Err(e) => Err(e),
        Ok(()) => Ok(0),
    }
}

fn cmd_bench(args: BenchArgs) -> crate::Result<i32> {
    effective_config(format!(
        "subcommand=bench params={} modes={} secs_per_cell={} reps={}",
        args.params, args.modes, args.secs_per_cell, args.reps
    ));
    let names: Vec<String> = args.params.split(',').map(str::to_string).collect();
    let modes = args
        .modes
        .split(',')
        .map(Mode::parse)
        .collect::<crate::Result<Vec<Mode>>>()?;
    let rows = bench::bench_generators(
        Registry::embedded(),
        &names,
        &modes,
        args.secs_per_cell,
        args.reps,
    )?;
    println!("{}", bench::BenchRow::tsv_header());
    for row in &rows {
        println!("{}", row.to_tsv_line());
    }
    // Weyl-tempering overhead per parameter set (informational).
    for name in &names {
        let cell = |mode: &str| {
            rows.iter().find(|r| &r.label == name && r.mode == mode).map(|r| r.ns_per_word)
        };
        if let (Some(none), Some(weyl)) = (cell("none"), cell("weyl")) {
            eprintln!("bench: {} weyl/none ns ratio = {:.3}", name, weyl / none);
        }
    }
    Ok(0)
}

fn cmd_charpoly(
    param: String,
    expensive: bool,
    out: Option<std::path::PathBuf>,
) -> crate::Result<i32> {
    effective_config(format!(
        "subcommand=analyze-charpoly param={} expensive={} out={:?} cache={}",
        param,
        expensive,
        out,
        gf2::cache_dir().display()
    ));
    let params = Registry::embedded().lookup(&param)?;
    let p = params.effective_bits;
    if p > gf2::CHEAP_DEGREE_LIMIT && !expensive {
        return Err(Error::ExpensiveGate {
            name: param,
            p,
            limit: gf2::CHEAP_DEGREE_LIMIT,
        });
    }
    let start = Instant::now();
    let f = gf2::char_poly(&params)?;
    let degree = f.degree().expect("charpoly of a valid set is nonzero");
    let weight = f.weight();
    let irreducible = gf2::is_irreducible_cached(&f)?;
    if let Some(path) = &out {
        std::fs::write(path, f.to_export())?;
    } else {
        print!("{}", f.to_export());
    }
    println!(
        "charpoly {} degree={} weight={} weight_ratio={:.4} irreducible={} elapsed={:.2}s",
        param,
        degree,
        weight,
        weight as f64 / degree as f64,
        irreducible,
        start.elapsed().as_secs_f64()
    );
    Ok(0)
}

fn cmd_equidist(
    param: String,
    tempering: String,
    expensive: bool,
    out: Option<std::path::PathBuf>,
) -> crate::Result<i32> {
    effective_config(format!(
        "subcommand=analyze-equidist param={} tempering={} expensive={} out={:?}",
        param, tempering, expensive, out
    ));
    let mode = Mode::parse(&tempering)?;
    let params = Registry::embedded().lookup(&param)?;
    let p = params.effective_bits;
    if p > EQUIDIST_CHEAP_LIMIT && !expensive {
        return Err(Error::ExpensiveGate {
            name: param,
            p,
            limit: EQUIDIST_CHEAP_LIMIT,
        });
    }
    let start = Instant::now();
    let report = equidist::full_report(&params, mode)?;
    let text = report.to_tsv();
    if let Some(path) = &out {
        std::fs::write(path, &text)?;
    } else {
        print!("{}", text);
    }
    println!(
        "equidist {} tempering={} total_defect={} elapsed={:.2}s",
        param,
        mode.name(),
        report.total_defect,
        start.elapsed().as_secs_f64()
    );
    Ok(0)
}

fn cmd_selftest() -> crate::Result<i32> {
    effective_config("subcommand=selftest".to_string());
    let start = Instant::now();
    let mut failed: Option<String> = None;
    let mut check = |name: &str, result: Result<(), String>| {
        if failed.is_some() {
            return;
        }
        let t = Instant::now();
        match result {
            Ok(()) => eprintln!("selftest: {} ok ({} ms)", name, t.elapsed().as_millis()),
            Err(msg) => {
                eprintln!("selftest: {} FAILED: {}", name, msg);
                failed = Some(name.to_string());
            }
        }
    };

    check("table-checksum", selftest_checksum());
    check("registry-validates", selftest_registry());
    check("known-answer-mxg32-521", selftest_kat());
    check("toy-full-period", selftest_toy_period());
    check("toy-equidist-oracle", selftest_toy_equidist());
    check("temper-round-trip", selftest_temper());
    check("weyl-decomposition", selftest_weyl());
    check("jump-identities", selftest_jump());
    check("battery-negative-controls", selftest_controls());

    eprintln!("selftest: elapsed {:.1}s", start.elapsed().as_secs_f64());
    match failed {
        None => {
            println!("selftest: all checks passed");
            Ok(0)
        }
        Some(name) => {
            println!("selftest: FAILED at {}", name);
            Ok(EXIT_FAILURE)
        }
    }
}

fn selftest_checksum() -> Result<(), String> {
    let mut table = crate::params::EMBEDDED_TABLE.as_bytes().to_vec();
    // Fault-injection hook so the failure path itself stays testable.
    if std::env::var_os("MXG_SELFTEST_INJECT").is_some_and(|v| v == "table-corrupt") {
        table[0] ^= 0xFF;
    }
    let mut hasher = Sha256::new();
    hasher.update(&table);
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{:02x}", b)).collect();
    let expected = EMBEDDED_TABLE_SHA256.trim();
    if hex != expected {
        return Err(format!(
            "embedded table checksum mismatch: {} != {}",
            hex, expected
        ));
    }
    Ok(())
}

fn selftest_registry() -> Result<(), String> {
    let reg = Registry::embedded();
    if reg.len() != 50 {
        return Err(format!("expected 50 embedded rows, found {}", reg.len()));
    }
    Ok(())
}

fn selftest_kat() -> Result<(), String> {
    let params = Registry::embedded()
        .lookup("mxg32-521")
        .map_err(|e| e.to_string())?;
    let mut gen = Generator::seed(params, 5489);
    let got: Vec<String> = (0..4)
        .map(|_| format!("{:08x}", gen.next_word(Mode::Weyl).unwrap().lo as u32))
        .collect();
    let expected = crate::KAT_MXG32_521_SEED5489_WEYL;
    if got != expected {
        return Err(format!(
            "known-answer mismatch: {:?} != {:?}",
            got, expected
        ));
    }
    Ok(())
}

fn selftest_toy_period() -> Result<(), String> {
    for (name, p) in [("toy4-7", 7u32), ("toy8-11", 11)] {
        let params = Registry::embedded()
            .lookup(name)
            .map_err(|e| e.to_string())?;
        let start = Generator::from_state_index(params, 1);
        let mut gen = start.clone();
        let full = (1u64 << p) - 1;
        for step in 1..=full {
            gen.next_raw();
            if gen.same_linear_state(&start) {
                if step == full {
                    break;
                }
                return Err(format!("{}: cycle closed early at step {}", name, step));
            }
        }
        if !gen.same_linear_state(&start) {
            return Err(format!("{}: cycle did not close at 2^{} - 1", name, p));
        }
    }
    Ok(())
}

fn selftest_toy_equidist() -> Result<(), String> {
    let params = Registry::embedded()
        .lookup("toy4-7")
        .map_err(|e| e.to_string())?;
    for mode in [Mode::None, Mode::Linear] {
        for v in [1u32, 2, 4] {
            let a = equidist::k_of_v(&params, v, mode).map_err(|e| e.to_string())?;
            let b = equidist::exhaustive_k_of_v(&params, v, mode).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!(
                    "toy4-7 v={} mode={:?}: rank {} != oracle {}",
                    v, mode, a, b
                ));
            }
        }
    }
    Ok(())
}

fn selftest_temper() -> Result<(), String> {
    for name in ["mxg32-521", "mxg64-521"] {
        let params = Registry::embedded()
            .lookup(name)
            .map_err(|e| e.to_string())?;
        let mut gen = Generator::seed(params.clone(), 7);
        for i in 0..10_000 {
            let raw = gen.next_raw();
            let t = crate::engine::temper(raw, &params);
            if crate::engine::untemper(t, &params) != raw {
                return Err(format!(
                    "{}: tempering round-trip failed at step {}",
                    name, i
                ));
            }
        }
    }
    Ok(())
}

fn selftest_weyl() -> Result<(), String> {
    for name in ["toy8-11", "mxg32-521"] {
        let params = Registry::embedded()
            .lookup(name)
            .map_err(|e| e.to_string())?;
        let w = params.word_size;
        let mut gen = Generator::seed(params.clone(), 99);
        let mut shadow = gen.clone();
        for i in 0..10_000 {
            let out = gen.next_word(Mode::Weyl).unwrap();
            let raw = shadow.next_raw();
            if out.sub(gen.weyl_acc(), w) != raw {
                return Err(format!("{}: weyl decomposition failed at step {}", name, i));
            }
        }
    }
    Ok(())
}

fn selftest_jump() -> Result<(), String> {
    let params = Registry::embedded()
        .lookup("toy8-11")
        .map_err(|e| e.to_string())?;
    let f = gf2::char_poly(&params).map_err(|e| e.to_string())?;
    let gen = Generator::seed(params, 4242);
    let j0 = gen
        .jump(&BigUint::from(0u32), &f)
        .map_err(|e| e.to_string())?;
    if !j0.same_state(&gen) {
        return Err("jump(0) changed the state".into());
    }
    let j1 = gen
        .jump(&BigUint::from(1u32), &f)
        .map_err(|e| e.to_string())?;
    let mut seq = gen.clone();
    seq.next_raw();
    seq_weyl_step(&mut seq);
    if !j1.same_state(&seq) {
        return Err("jump(1) != one step".into());
    }
    Ok(())
}

// jump() advances the Weyl accumulator in closed form; a raw sequential
// step does not touch it, so align manually for the comparison.
fn seq_weyl_step(gen: &mut Generator) {
    let inc = gen.params().weyl_increment;
    let w = gen.params().word_size;
    gen.set_weyl_acc(gen.weyl_acc().add(inc, w));
}

fn selftest_controls() -> Result<(), String> {
    for kind in [DummyKind::Zeros, DummyKind::Ones, DummyKind::Counter] {
        let stream = stats::dummy_stream(kind, stats::MIN_SAMPLE_BYTES);
        let spec = stats::StreamSpec {
            param_name: format!("{:?}", kind),
            seed: 0,
            mode: Mode::None,
            path: StreamPath::Int32,
        };
        let outcomes = stats::run_battery_on_bits(spec, &stream);
        let worst = outcomes.iter().map(|o| o.p_value).fold(1.0, f64::min);
        if worst >= 1e-6 {
            return Err(format!(
                "{:?} control not rejected (min p = {})",
                kind, worst
            ));
        }
    }
    Ok(())
}
