//! Command-line front end: compress/decompress integer sequences, print
//! redundancy-bound tables, run the brute-force normalizing oracle, and
//! drive benchmark sweeps to CSV.
//!
//! Exit codes: 0 success, 2 usage/input error, 3 I/O error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use monocode::bounds;
use monocode::codecs;
use monocode::lab::{self, SourceFamily, SourceSpec};

#[derive(Parser)]
#[command(
    name = "monocode",
    version,
    about = "Lossless compression for integer sequences from monotonic distributions"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a file of whitespace-separated positive integers.
    Compress(CompressArgs),
    /// Decompress a container back to the integer text form.
    Decompress(DecompressArgs),
    /// Measure redundancy over a grid of sequence lengths, writing CSV.
    Bench(BenchArgs),
    /// Print a closed-form redundancy bound.
    Bounds(BoundsArgs),
    /// Brute-force log2 normalizing sum for tiny (n, k).
    Nml(NmlArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Small,
    Fast,
    Individual,
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    /// Model alphabet size for --mode small (default: the max symbol).
    #[arg(long)]
    k: Option<u64>,
    /// Effective alphabet size for --mode fast (default: searched).
    #[arg(long)]
    m: Option<u64>,
    /// Read the input as unsigned LEB128 varints instead of text.
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Geometric,
    Powerlaw,
    Slowlog,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated sequence lengths, e.g. 4096,16384,65536.
    #[arg(long = "n-list", value_delimiter = ',')]
    n_list: Vec<u64>,
    #[arg(long, default_value_t = 30)]
    trials: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// One of thm1..thm8 or cor1..cor4.
    #[arg(long)]
    which: String,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
}

#[derive(Args)]
struct NmlArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    k: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Compress(a) => compress(a),
        Cmd::Decompress(a) => decompress(a),
        Cmd::Bench(a) => bench(a),
        Cmd::Bounds(a) => bounds_cmd(a),
        Cmd::Nml(a) => nml(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {msg}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Input(String),
    Io(String),
}

impl From<monocode::Error> for CliError {
    fn from(e: monocode::Error) -> Self {
        match e {
            monocode::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read_file(path: &PathBuf) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &PathBuf, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Parse whitespace-separated positive integers, reporting 1-based
/// line/column on the first bad token.
fn parse_text(data: &[u8]) -> Result<Vec<u64>, CliError> {
    let text = std::str::from_utf8(data)
        .map_err(|_| CliError::Input("input is not UTF-8 text".into()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut col = 1usize;
        for tok in line.split_whitespace() {
            let start = line[col - 1..].find(tok).map(|o| col + o).unwrap_or(col);
            match tok.parse::<u64>() {
                Ok(v) if v >= 1 => out.push(v),
                _ => {
                    return Err(CliError::Input(format!(
                        "unparsable token {tok:?} at line {}, column {start}",
                        lineno + 1
                    )))
                }
            }
            col = start + tok.len();
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("n >= 1 required: input holds no integers".into()));
    }
    Ok(out)
}

fn parse_varints(data: &[u8]) -> Result<Vec<u64>, CliError> {
    let mut out = Vec::new();
    let mut iter = data.iter().copied().peekable();
    while iter.peek().is_some() {
        let mut v: u64 = 0;
        let mut shift = 0u32;
        loop {
            let b = iter
                .next()
                .ok_or_else(|| CliError::Input("truncated varint at end of input".into()))?;
            if shift >= 63 && b > 1 {
                return Err(CliError::Input("varint overflows 64 bits".into()));
            }
            v |= u64::from(b & 0x7F) << shift;
            if b & 0x80 == 0 {
                break;
            }
            shift += 7;
        }
        if v == 0 {
            return Err(CliError::Input("symbols must be >= 1".into()));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Input("n >= 1 required: input holds no integers".into()));
    }
    Ok(out)
}

fn compress(a: CompressArgs) -> Result<(), CliError> {
    let raw = read_file(&a.input)?;
    let x = if a.binary { parse_varints(&raw)? } else { parse_text(&raw)? };
    let (bytes, stats) = match a.mode {
        ModeArg::Auto => codecs::encode_auto(&x)?,
        ModeArg::Small => {
            let k_max = *x.iter().max().unwrap();
            codecs::encode_small(&x, a.k.unwrap_or(k_max).max(k_max))?
        }
        ModeArg::Fast => match a.m {
            Some(m) => codecs::encode_fast(&x, m)?,
            None => {
                // search over fast models only
                let k_max = *x.iter().max().unwrap();
                let mut best: Option<(Vec<u8>, codecs::EncodeStats)> = None;
                let mut m = 2u64;
                let mut ms: Vec<u64> = Vec::new();
                while m <= k_max {
                    ms.push(m);
                    m *= 2;
                }
                ms.push(k_max.max(2));
                ms.dedup();
                for m in ms {
                    if let Ok(c) = codecs::encode_fast(&x, m) {
                        if best.as_ref().map_or(true, |b| c.1.total_bits < b.1.total_bits) {
                            best = Some(c);
                        }
                    }
                }
                best.ok_or_else(|| CliError::Input("no feasible fast model".into()))?
            }
        },
        ModeArg::Individual => codecs::encode_individual(&x)?,
    };
    write_file(&a.output, &bytes)?;
    println!("mode: {}", stats.mode.label());
    println!("total bits: {}", stats.total_bits);
    println!("ideal payload bits: {:.3}", stats.ideal_payload_bits);
    println!(
        "overhead bits: {} (payload {} of {} total)",
        stats.overhead_bits(),
        stats.payload_bits,
        stats.total_bits
    );
    Ok(())
}

fn decompress(a: DecompressArgs) -> Result<(), CliError> {
    let raw = read_file(&a.input)?;
    let x = codecs::decode(&raw)?;
    let mut out = String::with_capacity(x.len() * 4);
    for (i, v) in x.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&v.to_string());
    }
    out.push('\n');
    write_file(&a.output, out.as_bytes())
}

fn bench(a: BenchArgs) -> Result<(), CliError> {
    if a.n_list.is_empty() {
        return Err(CliError::Input("--n-list must name at least one length".into()));
    }
    let family = match a.family {
        FamilyArg::Geometric => SourceFamily::Geometric {
            p: a.p.ok_or_else(|| CliError::Input("geometric needs --p".into()))?,
        },
        FamilyArg::Powerlaw => SourceFamily::Powerlaw {
            gamma: a.gamma.ok_or_else(|| CliError::Input("powerlaw needs --gamma".into()))?,
        },
        FamilyArg::Slowlog => SourceFamily::SlowLog {
            gamma: a.gamma.ok_or_else(|| CliError::Input("slowlog needs --gamma".into()))?,
        },
    };
    let cells: Vec<(SourceSpec, u64)> = a
        .n_list
        .iter()
        .map(|&n| (SourceSpec { family: family.clone(), seed: a.seed }, n))
        .collect();
    let mut buf = Vec::new();
    lab::run_experiment(&cells, a.trials, &mut buf)?;
    match &a.csv {
        Some(path) => write_file(path, &buf)?,
        None => print!("{}", String::from_utf8_lossy(&buf)),
    }
    Ok(())
}

fn print_bound(name: &str, b: &bounds::BoundValue) {
    println!("{name}: region [{}]", b.region);
    println!("  per-symbol bits: {:.6e}", b.per_symbol);
    println!("  total bits:      {:.6e}", b.total);
    println!("  omitted terms:   {}", b.slack);
}

fn bounds_cmd(a: BoundsArgs) -> Result<(), CliError> {
    let need_k = || a.k.ok_or_else(|| CliError::Input("this bound needs --k".into()));
    let need_m = || a.m.ok_or_else(|| CliError::Input("this bound needs --m".into()));
    let need_p = || a.p.ok_or_else(|| CliError::Input("this bound needs --p".into()));
    let need_gamma =
        || a.gamma.ok_or_else(|| CliError::Input("this bound needs --gamma".into()));
    let n = a.n;
    match a.which.as_str() {
        "thm1" => print_bound("thm1 maximin lower bound", &bounds::maximin_lower_bound(n, need_k()?, a.eps)),
        "thm2" => print_bound(
            "thm2 most-sources lower bound",
            &bounds::most_sources_lower_bound(n, need_k()?, a.eps),
        ),
        "thm3" => print_bound(
            "thm3 individual lower bound",
            &bounds::individual_lower_bound(n, need_k()?),
        ),
        "thm4" => print_bound(
            "thm4 achievable redundancy",
            &bounds::small_large_upper_bound(n, need_k()?, a.eps),
        ),
        "thm5" => print_bound(
            "thm5 effective-alphabet cost",
            &bounds::effective_alphabet_cost(n, need_m()?, a.eps),
        ),
        "thm6" => {
            let (b, info) = match (a.gamma, a.p) {
                (Some(g), _) => {
                    let src = lab::Source::new(SourceSpec {
                        family: SourceFamily::Powerlaw { gamma: g },
                        seed: 0,
                    })?;
                    bounds::fast_decay_upper_bound(n, &move |m| src.tail_logsum(m as u64), a.eps)
                }
                (None, Some(p)) => {
                    let src = lab::Source::new(SourceSpec {
                        family: SourceFamily::Geometric { p },
                        seed: 0,
                    })?;
                    bounds::fast_decay_upper_bound(n, &move |m| src.tail_logsum(m as u64), a.eps)
                }
                (None, None) => bounds::fast_decay_upper_bound(n, &|_| 0.0, a.eps),
            };
            print_bound("thm6 fast-decay minimized bound", &b);
            println!("  minimizer: alpha={:.3} rho={:.3}", info.alpha, info.rho);
        }
        "thm7" => print_bound(
            "thm7 individual achievable redundancy",
            &bounds::individual_upper_bound(n, need_k()?, a.eps),
        ),
        "thm8" => {
            let (b, rho) = match a.gamma {
                Some(g) => {
                    let src = lab::Source::new(SourceSpec {
                        family: SourceFamily::Powerlaw { gamma: g },
                        seed: 0,
                    })?;
                    // expected distinct-tail log sum under the family
                    bounds::individual_upper_bound2(
                        n,
                        &move |m| (n as f64) * src.tail_logsum(m as u64),
                        a.eps,
                    )
                }
                None => bounds::individual_upper_bound2(n, &|_| 0.0, a.eps),
            };
            print_bound("thm8 individual clustered bound", &b);
            println!("  minimizer: rho={rho:.3}");
        }
        "cor1" => {
            let (elog, h, pass) = match (a.p, a.gamma) {
                (Some(p), _) => {
                    lab::wyner_check(&SourceSpec { family: SourceFamily::Geometric { p }, seed: 0 })?
                }
                (None, Some(g)) => lab::wyner_check(&SourceSpec {
                    family: SourceFamily::Powerlaw { gamma: g },
                    seed: 0,
                })?,
                (None, None) => {
                    return Err(CliError::Input("cor1 needs --p or --gamma".into()))
                }
            };
            println!("cor1 finite-entropy compressibility check");
            println!("  E[log2 X] = {elog:.6} <= H = {h:.6}: {}", if pass { "pass" } else { "FAIL" });
        }
        "cor2" => {
            let g = need_gamma()?;
            let src = lab::Source::new(SourceSpec {
                family: SourceFamily::Powerlaw { gamma: g },
                seed: 0,
            })?;
            // theta_1 equals the normalizer for this family
            let a_coeff = src.prob(1);
            print_bound(
                "cor2 power-law bound",
                &bounds::powerlaw_upper_bound(n, g, a_coeff, a.eps),
            );
        }
        "cor3" => print_bound("cor3 geometric bound", &bounds::geometric_upper_bound(n, need_p()?, a.eps)),
        "cor4" => {
            let (b, alpha, ell) = bounds::slow_decay_upper_bound(n, need_gamma()?, a.eps);
            print_bound("cor4 slow-decay bound", &b);
            println!("  optimizers: alpha={alpha:.6} ell={ell:.6}");
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown bound {other:?}; expected thm1..thm8 or cor1..cor4"
            )))
        }
    }
    Ok(())
}

fn nml(a: NmlArgs) -> Result<(), CliError> {
    let mono = bounds::monotone_shtarkov_log2(a.n, a.k)?;
    let iid = bounds::iid_shtarkov_log2(a.n, a.k)?;
    println!("log2 monotone normalizing sum (n={}, k={}): {:.6}", a.n, a.k, mono);
    println!("log2 iid normalizing sum:                   {iid:.6}");
    Ok(())
}
