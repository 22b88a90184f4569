use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use unimod::channel::{corrupt_all, CorruptionMode, CorruptionSpec, Magnitude};
use unimod::format::{read_packages, write_packages, FormatError, KeyFile};
use unimod::report::{verification_name, ReportJson};
use unimod_core::attack::{attack_golden, attack_k_golden, KeyOracle};
use unimod_core::cipher::{decrypt_text, encrypt_text, verify_package, CipherKey, EncryptOptions, DEFAULT_RATIO_DIGITS};
use unimod_core::coding::{SeedPair, UnimodularKeyMatrix};
use unimod_core::correction::{correct_with, CorrectionOptions};
use unimod_core::ratio::{convergence_profile, parse_rational, RatioParams};
use unimod_core::text::{Alphabet, Permutation};
use unimod_core::{BigInt, Mat2};

#[derive(Parser)]
#[command(name = "unimod", version, about = "Unimodular matrix cipher with error detection and correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a key file.
    Keygen(KeygenArgs),
    /// Encrypt text into packages, one JSON object per line.
    Encrypt(EncryptArgs),
    /// Corrupt packages through a seeded noisy channel.
    Corrupt(CorruptArgs),
    /// Detect and repair errors; prints one report per package.
    Correct(CorrectArgs),
    /// Decrypt packages back to text.
    Decrypt(KeyedIo),
    /// Run the chosen-plaintext attack against a key used as oracle.
    Attack(AttackArgs),
    /// Print the orbit of aₙ₊₁ = t − d/aₙ.
    Ratios(RatiosArgs),
    /// Check every package against the determinant and row-ratio checks.
    Verify(KeyedIo),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("preset").args(["golden", "k_golden", "arnolds_cat"]))]
struct KeygenArgs {
    #[arg(long)]
    golden: bool,
    #[arg(long, value_name = "K")]
    k_golden: Option<u64>,
    #[arg(long)]
    arnolds_cat: bool,
    #[arg(long, conflicts_with = "preset", requires_all = ["beta", "gamma", "delta"])]
    alpha: Option<BigInt>,
    #[arg(long, conflicts_with = "preset")]
    beta: Option<BigInt>,
    #[arg(long, conflicts_with = "preset")]
    gamma: Option<BigInt>,
    #[arg(long, conflicts_with = "preset")]
    delta: Option<BigInt>,
    #[arg(long, default_value = "0")]
    seed_a: BigInt,
    #[arg(long, default_value = "1")]
    seed_b: BigInt,
    #[arg(long)]
    n: u64,
    /// Matrix slot of each block position, e.g. 0,1,2,3.
    #[arg(long, value_delimiter = ',', num_args = 4, default_value = "0,1,2,3")]
    perm: Vec<u8>,
    /// latin, bytes, or custom:SYMBOLS.
    #[arg(long, default_value = "latin")]
    alphabet: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncryptArgs {
    /// Key file, or - for stdin.
    #[arg(long)]
    key: PathBuf,
    /// Text to encrypt; read from --in or stdin when absent.
    text: Option<String>,
    #[arg(long = "in", conflicts_with = "text")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Attach the rounded column ratio c21/c11 to every package.
    #[arg(long)]
    emit_column_ratio: bool,
    #[arg(long, env = "UNIMOD_RATIO_DIGITS", default_value_t = DEFAULT_RATIO_DIGITS)]
    ratio_digits: u32,
}

#[derive(Args)]
struct CorruptArgs {
    /// single, diagonal, antidiagonal, column_left, column_right, row_top, row_bottom or random.
    #[arg(long)]
    spec: CorruptionMode,
    #[arg(long)]
    seed: u64,
    /// additive, additive:M or digit-flip.
    #[arg(long, default_value = "additive")]
    magnitude: String,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the per-package ground truth.
    #[arg(long)]
    diff: Option<PathBuf>,
}

#[derive(Args)]
struct CorrectArgs {
    #[command(flatten)]
    io: KeyedIo,
    /// Where to write the packages after repair.
    #[arg(long)]
    repaired: Option<PathBuf>,
    /// Report a repair as ambiguous whenever a row double error explains
    /// the package too (only without column ratio).
    #[arg(long)]
    guard_row_errors: bool,
}

#[derive(Args)]
struct KeyedIo {
    #[arg(long)]
    key: PathBuf,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    oracle_key: PathBuf,
    /// golden or kgolden.
    #[arg(long, default_value = "golden")]
    family: String,
    #[arg(long, default_value_t = 1000)]
    n_max: u64,
    #[arg(long, default_value_t = 100)]
    k_max: u64,
}

#[derive(Args)]
struct RatiosArgs {
    #[arg(long, allow_hyphen_values = true)]
    t: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    d: BigInt,
    /// Decimal or fraction, e.g. 1.5 or 3/2.
    #[arg(long, allow_hyphen_values = true)]
    a0: String,
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

/// A failure reported as `error[category]: message` with exit status 1.
struct Failure {
    category: &'static str,
    message: String,
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure { category: e.category(), message: e.to_string() }
    }
}

impl From<unimod_core::Error> for Failure {
    fn from(e: unimod_core::Error) -> Self {
        Failure { category: e.category(), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { category: "io", message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { category: "usage", message: message.into() }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen(a) => keygen(a),
        Command::Encrypt(a) => encrypt(a),
        Command::Corrupt(a) => corrupt(a),
        Command::Correct(a) => correct(a),
        Command::Decrypt(a) => decrypt(a),
        Command::Attack(a) => attack(a),
        Command::Ratios(a) => ratios(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error[{}]: {}", f.category, f.message);
            ExitCode::from(1)
        }
    }
}

fn read_source(path: Option<&Path>) -> io::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn write_sink(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn load_key(path: &Path) -> Result<(CipherKey, Alphabet), Failure> {
    let text = read_source(Some(path))?;
    Ok(KeyFile::parse(&text)?.to_key()?)
}

fn load_packages(path: Option<&Path>) -> Result<Vec<unimod_core::cipher::CipherPackage>, Failure> {
    match path {
        Some(p) if p != Path::new("-") => Ok(read_packages(BufReader::new(fs::File::open(p)?))?),
        _ => Ok(read_packages(io::stdin().lock())?),
    }
}

fn parse_alphabet(s: &str) -> Result<Alphabet, Failure> {
    match s {
        "latin" => Ok(Alphabet::Latin),
        "bytes" => Ok(Alphabet::Bytes),
        _ => match s.strip_prefix("custom:") {
            Some(symbols) => Ok(Alphabet::custom(symbols)?),
            None => Err(usage(format!("unknown alphabet {s:?}"))),
        },
    }
}

fn keygen(a: KeygenArgs) -> Outcome {
    let u = if a.golden {
        UnimodularKeyMatrix::golden()
    } else if let Some(k) = a.k_golden {
        UnimodularKeyMatrix::k_golden(k)?
    } else if a.arnolds_cat {
        UnimodularKeyMatrix::arnolds_cat()
    } else {
        match (a.alpha, a.beta, a.gamma, a.delta) {
            (Some(al), Some(be), Some(ga), Some(de)) => UnimodularKeyMatrix::new(Mat2::new(al, be, ga, de))?,
            _ => return Err(usage("give --golden, --k-golden, --arnolds-cat or all of --alpha --beta --gamma --delta")),
        }
    };
    let perm: [u8; 4] = a.perm.try_into().map_err(|_| usage("--perm takes four slots"))?;
    let key = CipherKey::new(u, SeedPair::new(a.seed_a, a.seed_b)?, a.n, Permutation::new(perm)?)?;
    if let Some(w) = key.key_matrix().warning() {
        eprintln!("warning: {w:?}");
    }
    let alphabet = parse_alphabet(&a.alphabet)?;
    write_sink(a.out.as_deref(), &KeyFile::from_key(&key, &alphabet).serialize())?;
    Ok(0)
}

fn encrypt(a: EncryptArgs) -> Outcome {
    let (key, alphabet) = load_key(&a.key)?;
    let text = match a.text {
        Some(t) => t,
        None => {
            let raw = read_source(a.input.as_deref())?;
            raw.strip_suffix('\n').map(str::to_owned).unwrap_or(raw)
        }
    };
    let opts = if a.emit_column_ratio { EncryptOptions::with_column_ratio(a.ratio_digits) } else { EncryptOptions::default() };
    let pkgs = encrypt_text(&text, &alphabet, &key, &opts)?;
    write_sink(a.out.as_deref(), &write_packages(&pkgs))?;
    Ok(0)
}

fn parse_magnitude(s: &str) -> Result<Magnitude, Failure> {
    match s {
        "additive" => Ok(Magnitude::Additive { max: None }),
        "digit-flip" => Ok(Magnitude::DigitFlip),
        _ => match s.strip_prefix("additive:").and_then(|m| m.parse::<u64>().ok()) {
            Some(m) if m > 0 => Ok(Magnitude::Additive { max: Some(m) }),
            _ => Err(usage(format!("unknown magnitude {s:?}"))),
        },
    }
}

fn corrupt(a: CorruptArgs) -> Outcome {
    let pkgs = load_packages(a.input.as_deref())?;
    let spec = CorruptionSpec { mode: a.spec, seed: a.seed, magnitude: parse_magnitude(&a.magnitude)? };
    let (out, diffs): (Vec<_>, Vec<_>) = corrupt_all(&pkgs, spec).into_iter().unzip();
    write_sink(a.out.as_deref(), &write_packages(&out))?;
    if let Some(path) = a.diff {
        let text: String = diffs.iter().map(|d| serde_json::to_string(d).expect("plain data") + "\n").collect();
        write_sink(Some(&path), &text)?;
    }
    Ok(0)
}

fn correct(a: CorrectArgs) -> Outcome {
    let (key, alphabet) = load_key(&a.io.key)?;
    let pkgs = load_packages(a.io.input.as_deref())?;
    let mut opts = CorrectionOptions::with_bound(alphabet.size());
    opts.guard_row_errors = a.guard_row_errors;
    let mut lines = String::new();
    let mut repaired = Vec::with_capacity(pkgs.len());
    let mut code = 0;
    for pkg in &pkgs {
        let report = correct_with(pkg, &key, opts);
        let json = ReportJson::new(pkg.block_index, &report);
        code = code.max(json.status.exit_code());
        lines.push_str(&json.to_line());
        lines.push('\n');
        let mut fixed = pkg.clone();
        if let Some(m) = report.repaired {
            fixed.c = m;
        }
        repaired.push(fixed);
    }
    write_sink(a.io.out.as_deref(), &lines)?;
    if let Some(path) = a.repaired {
        write_sink(Some(&path), &write_packages(&repaired))?;
    }
    Ok(code as u8)
}

fn decrypt(a: KeyedIo) -> Outcome {
    let (key, alphabet) = load_key(&a.key)?;
    let pkgs = load_packages(a.input.as_deref())?;
    let text = decrypt_text(&pkgs, &alphabet, &key)?;
    write_sink(a.out.as_deref(), &(text + "\n"))?;
    Ok(0)
}

#[derive(Serialize)]
struct AttackJson {
    family: String,
    recovered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    queries: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

fn attack(a: AttackArgs) -> Outcome {
    let (key, _) = load_key(&a.oracle_key)?;
    let oracle = KeyOracle::new(key);
    let result = match a.family.as_str() {
        "golden" => attack_golden(&oracle, a.n_max),
        "kgolden" => attack_k_golden(&oracle, a.k_max, a.n_max),
        other => return Err(usage(format!("unknown family {other:?}"))),
    };
    let json = match &result {
        Ok(r) => AttackJson { family: a.family, recovered: true, k: Some(r.k), n: Some(r.n), queries: oracle.queries(), failure: None },
        Err(f) => AttackJson { family: a.family, recovered: false, k: None, n: None, queries: oracle.queries(), failure: Some(format!("{f:?}")) },
    };
    write_sink(None, &(serde_json::to_string(&json).expect("plain data") + "\n"))?;
    Ok(if result.is_ok() { 0 } else { 2 })
}

fn ratios(a: RatiosArgs) -> Outcome {
    let a0 = parse_rational(&a.a0)?;
    let profile = convergence_profile(&RatioParams::new(a.t, a.d, a0)?, a.steps)?;
    let mut out = format!("phi+ = {:.10}\nmode = {}\n", profile.fixed_points.phi_plus(), profile.mode);
    out.push_str("n\tratio\tdecimal\t|a_n - phi+|\n");
    for (i, (q, e)) in profile.orbit.iter().zip(&profile.errors).enumerate() {
        let dec = num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
        out.push_str(&format!("{i}\t{q}\t{dec:.5}\t{e:.3e}\n"));
    }
    write_sink(None, &out)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyJson {
    block_index: u64,
    verification: String,
}

fn verify(a: KeyedIo) -> Outcome {
    let (key, _) = load_key(&a.key)?;
    let pkgs = load_packages(a.input.as_deref())?;
    let mut out = String::new();
    let mut clean = true;
    for pkg in &pkgs {
        let v = verify_package(pkg, &key);
        clean &= v.is_clean();
        let line = VerifyJson { block_index: pkg.block_index, verification: verification_name(v) };
        out.push_str(&(serde_json::to_string(&line).expect("plain data") + "\n"));
    }
    write_sink(a.out.as_deref(), &out)?;
    Ok(if clean { 0 } else { 2 })
}
