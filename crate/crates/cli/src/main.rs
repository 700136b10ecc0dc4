//! `dhci`: embed, check, generate and analyze modes from the command line.
//!
//! Exit codes: 0 success (marked / PASS), 1 not marked / FAIL, 2 usage error,
//! 3 I/O or input format error, 4 contract violation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dhci_core::analysis::{full_report, uniformity_experiment, ReportConfig};
use dhci_core::dhci::{dhci_check, dhci_embed, EmbeddingParams};
use dhci_core::markov::default_t_max;
use dhci_core::media_io::{bits_to_image, image_to_bits, read_pgm, write_pgm};
use dhci_core::modes::{
    constant_zero_mode, generate_valid_mode, identity_mode, load_mode, negation_mode, save_mode,
    ModeInstance, ModeSpec,
};
use dhci_core::significance::{SignificationFunction, Thresholds};
use dhci_core::strategy::{fnv1a64, SecretKey};
use dhci_core::{BitStream, Error};

const MAX_GENERATION_TRIES: usize = 1000;

#[derive(Parser)]
#[command(name = "dhci", version, about = "Information hiding by chaotic asynchronous iterations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Hide a message in the least significant bit planes of a PGM cover.
    Embed(EmbedArgs),
    /// Decide whether a candidate image carries a message (needs the cover).
    Check(CheckArgs),
    /// Generate or analyze modes.
    #[command(subcommand)]
    Mode(ModeCommand),
    /// Chi-square uniformity experiment for a mode.
    Analyze(UniformityArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Secret key as hexadecimal bytes.
    #[arg(long)]
    key: String,
    /// `negation` or the path of a mode file whose size equals the LSC count.
    #[arg(long, default_value = "negation")]
    mode: String,
    /// Positions with signification <= m are least significant.
    #[arg(long = "m", default_value_t = 2.0)]
    lsc_max: f64,
    /// Positions with signification >= M are most significant.
    #[arg(long = "M", default_value_t = 6.0)]
    msc_min: f64,
    /// Number of asynchronous iterations. Key sensitivity needs q well above
    /// the number of least significant coefficients.
    #[arg(long, default_value_t = 17)]
    q: u64,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    cover: PathBuf,
    /// Raw message file.
    #[arg(long)]
    message: PathBuf,
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    cover: PathBuf,
    #[arg(long)]
    candidate: PathBuf,
    #[arg(long)]
    message: PathBuf,
    #[command(flatten)]
    scheme: SchemeArgs,
    /// Similarity threshold for the MARKED decision.
    #[arg(long, default_value_t = 0.95)]
    tau: f64,
}

#[derive(Subcommand)]
enum ModeCommand {
    /// Draw a strongly connected, doubly stochastic, primitive XOR mode.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the security report of a mode as JSON.
    Analyze(ModeAnalyzeArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Hexadecimal key of the fixed strategy.
    #[arg(long, default_value = "00")]
    key: String,
    /// Raw message file; empty message when omitted.
    #[arg(long)]
    message: Option<PathBuf>,
    #[arg(long, default_value_t = 17)]
    q: u64,
    /// Sample count; defaults to 100 * 2^n.
    #[arg(long)]
    samples: Option<usize>,
    /// Sampler seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ModeAnalyzeArgs {
    /// `negation`, `identity`, `zero` or a mode file path.
    #[arg(long)]
    mode: String,
    /// Size for built-in modes.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Mixing budget; defaults to 4^n.
    #[arg(long = "t-max")]
    t_max: Option<u64>,
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Args)]
struct UniformityArgs {
    /// `negation`, `identity`, `zero` or a mode file path.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    l: Option<usize>,
    #[command(flatten)]
    experiment: ExperimentArgs,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Contract(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Contract(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Pgm(_) | Error::ModeFormat(_) => CliError::Input(e.to_string()),
            Error::InvalidParameter(_) | Error::EmptyKey => CliError::Usage(e.to_string()),
            _ => CliError::Contract(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_key(hex: &str) -> CliResult<SecretKey> {
    SecretKey::from_hex(hex).map_err(|e| CliError::Usage(format!("--key: {e}")))
}

fn load_mode_file(path: &str) -> CliResult<ModeInstance> {
    // a readable file that fails validation is still bad input
    load_mode(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn builtin_mode(name: &str, n: usize) -> Option<dhci_core::Result<ModeInstance>> {
    match name {
        "negation" => Some(negation_mode(n)),
        "identity" => Some(identity_mode(n)),
        "zero" => Some(constant_zero_mode(n)),
        _ => None,
    }
}

/// Resolves a built-in name at `size` or loads a mode file.
fn sized_mode(name: &str, size: Option<usize>, flag: &str) -> CliResult<ModeInstance> {
    if let Some(n) = size {
        if n > dhci_core::MAX_ANALYSIS_BITS {
            return Err(Error::Capacity { n, limit: dhci_core::MAX_ANALYSIS_BITS }.into());
        }
    }
    match builtin_mode(name, 1) {
        Some(_) => {
            let n = size.ok_or_else(|| CliError::Usage(format!("built-in mode {name} needs {flag}")))?;
            Ok(builtin_mode(name, n).expect("known name")?)
        }
        None => {
            let mode = load_mode_file(name)?;
            if let Some(n) = size {
                if n != mode.n() {
                    return Err(Error::ModeSize { mode: mode.n(), requested: n }.into());
                }
            }
            Ok(mode)
        }
    }
}

fn scheme_params(args: &SchemeArgs, tau: f64) -> CliResult<EmbeddingParams> {
    let key = parse_key(&args.key)?;
    let thresholds = Thresholds::new(args.lsc_max, args.msc_min)?;
    let mode = match args.mode.as_str() {
        "negation" => ModeSpec::Negation,
        "identity" | "zero" => {
            return Err(CliError::Usage(format!(
                "built-in mode {} has no size here; pass a mode file",
                args.mode
            )))
        }
        path => ModeSpec::TruthTable(load_mode_file(path)?),
    };
    Ok(EmbeddingParams::new(mode, SignificationFunction::Bitplane8, thresholds, args.q, key, tau)?)
}

fn message_bits(path: Option<&Path>) -> CliResult<BitStream> {
    match path {
        Some(p) => Ok(BitStream::from_bytes(&read_bytes(p)?)),
        None => Ok(BitStream::default()),
    }
}

fn cmd_embed(args: &EmbedArgs) -> CliResult<u8> {
    let params = scheme_params(&args.scheme, dhci_core::dhci::DEFAULT_TAU)?;
    let cover = read_pgm(&args.cover)?;
    let message = message_bits(Some(&args.message))?;
    let host = image_to_bits(&cover);
    let stego_bits = dhci_embed(&host, &message, &params)?;
    let watermark = params.decompose(&stego_bits)?.lsc_bits;
    let stego = bits_to_image(&stego_bits, cover.width(), cover.height())?;
    write_pgm(&stego, &args.out)?;

    let digest = fnv1a64(&[&BitStream::new(watermark.clone()).to_bytes()]);
    let report = serde_json::json!({
        "l": watermark.len(),
        "q": params.q,
        "watermark_fnv1a64": format!("{digest:016x}"),
        "out": args.out.display().to_string(),
    });
    println!("{report}");
    eprintln!(
        "embedded into {} least significant coefficients of a {}x{} cover",
        watermark.len(),
        cover.width(),
        cover.height()
    );
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> CliResult<u8> {
    let params = scheme_params(&args.scheme, args.tau)?;
    let cover = read_pgm(&args.cover)?;
    let candidate = read_pgm(&args.candidate)?;
    if (cover.width(), cover.height()) != (candidate.width(), candidate.height()) {
        return Err(CliError::Contract(format!(
            "candidate is {}x{} but cover is {}x{}",
            candidate.width(),
            candidate.height(),
            cover.width(),
            cover.height()
        )));
    }
    let message = message_bits(Some(&args.message))?;
    let outcome = dhci_check(&image_to_bits(&cover), &image_to_bits(&candidate), &message, &params)?;
    let verdict = if outcome.marked { "MARKED" } else { "NOT-MARKED" };
    println!("{:.6} {verdict}", outcome.similarity);
    eprintln!("{} least significant coefficients compared, tau = {}", outcome.lsc_count, params.tau);
    Ok(if outcome.marked { 0 } else { 1 })
}

fn cmd_mode_gen(n: usize, seed: u64, out: &Path) -> CliResult<u8> {
    let generated = generate_valid_mode(n, seed, MAX_GENERATION_TRIES)?;
    save_mode(&generated.mode, out)?;
    println!("{}", serde_json::json!({ "n": n, "seed": seed, "tries": generated.tries, "out": out.display().to_string() }));
    eprintln!("accepted candidate {} for n = {n}", generated.tries);
    Ok(0)
}

fn report_config(args: &ExperimentArgs) -> CliResult<ReportConfig> {
    let mut config = ReportConfig::new(parse_key(&args.key)?);
    config.message = message_bits(args.message.as_deref())?;
    config.q = args.q;
    config.samples = args.samples;
    config.sampler_seed = args.seed;
    Ok(config)
}

fn cmd_mode_analyze(args: &ModeAnalyzeArgs) -> CliResult<u8> {
    if args.epsilon.is_nan() || args.epsilon <= 0.0 {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    let mode = sized_mode(&args.mode, args.n, "--n")?;
    let mut config = report_config(&args.experiment)?;
    config.epsilon = args.epsilon;
    config.t_max = Some(args.t_max.unwrap_or_else(|| default_t_max(mode.n())));
    let report = full_report(&mode, &args.mode, &config)?;
    println!("{}", report.to_json());
    eprintln!(
        "chaos-secure: {}, stego-secure hypotheses: {}, primitive: {}",
        report.chaos_secure, report.stego_secure_hypotheses, report.primitive
    );
    Ok(0)
}

fn cmd_analyze_uniformity(args: &UniformityArgs) -> CliResult<u8> {
    let mode = sized_mode(&args.mode, args.l, "--l")?;
    let config = report_config(&args.experiment)?;
    let samples = config.samples.unwrap_or(100 << mode.n());
    let result =
        uniformity_experiment(&mode, &config.key, &config.message, config.q, samples, config.sampler_seed)?;
    let verdict = if result.pass { "PASS" } else { "FAIL" };
    println!(
        "{}",
        serde_json::json!({
            "l": mode.n(),
            "q": config.q,
            "samples": samples,
            "chi2": result.chi2,
            "dof": result.dof,
            "critical_value": result.critical_value,
            "verdict": verdict,
        })
    );
    eprintln!("chi2 = {:.3} with {} dof, critical {:.3}: {verdict}", result.chi2, result.dof, result.critical_value);
    Ok(if result.pass { 0 } else { 1 })
}

fn run(cli: Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Embed(args) => cmd_embed(args),
        Command::Check(args) => cmd_check(args),
        Command::Mode(ModeCommand::Gen { n, seed, out }) => cmd_mode_gen(*n, *seed, out),
        Command::Mode(ModeCommand::Analyze(args)) => cmd_mode_analyze(args),
        Command::Analyze(args) => cmd_analyze_uniformity(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let message = match &e {
                CliError::Usage(m) => format!("usage error: {m}"),
                CliError::Input(m) => format!("input error: {m}"),
                CliError::Contract(m) => format!("error: {m}"),
            };
            eprintln!("{message}");
            ExitCode::from(e.exit_code())
        }
    }
}
