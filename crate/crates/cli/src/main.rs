//! `lwmark`: lattice-based reversible audio watermarking on WAV files.
//!
//! Subcommands: `embed`, `extract`, `restore`, `attack`, `bench`. Flags can
//! also be supplied through a key=value config file (`--config`); explicit
//! flags win. Exit codes are stable: 0 success, 2 configuration, 3 file
//! format/precision, 4 capacity, 5 metadata integrity, 1 anything else.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use lwmark::bench::{run_sweep, SweepSpec};
use lwmark::host::HostSpec;
use lwmark::lattice::LatticeKind;
use lwmark::pipeline::{
    attack_file, bits_to_bytes, bytes_to_bits, embed_file, extract_file, restore_file,
    AlphaChoice, EmbedParams, PayloadSource, Scheme,
};
use lwmark::Error;

#[derive(Parser)]
#[command(name = "lwmark", version, about = "Lattice-based reversible audio watermarking")]
struct Cli {
    /// Key=value config file providing flag defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a payload into a WAV file (writes float64 WAV + sidecar).
    Embed(EmbedArgs),
    /// Extract the payload and restore the host from a watermarked WAV.
    Extract(ExtractArgs),
    /// Restore the host only.
    Restore(RestoreArgs),
    /// Add white Gaussian noise to a WAV file.
    Attack(AttackArgs),
    /// Run a parameter sweep and emit CSV metrics.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SchemeArgs {
    /// Embedding scheme: qim | iqim | mme.
    #[arg(long)]
    scheme: Option<String>,
    /// Lattice: z<N> | a2 | d3 | d4 | e8.
    #[arg(long)]
    lattice: Option<String>,
    /// Quantization step Δ in raw amplitude units.
    #[arg(long)]
    delta: Option<f64>,
    /// Code rate R: nesting J = 2^R · I.
    #[arg(long, conflicts_with = "nesting")]
    rate: Option<u32>,
    /// Explicit nesting diagonal, e.g. "2;2".
    #[arg(long)]
    nesting: Option<String>,
    /// Scaling factor α: a number or "auto" (the general lower bound).
    #[arg(long)]
    alpha: Option<String>,
    /// IQIM bits per sample.
    #[arg(long)]
    bits: Option<u32>,
    /// Mantissa bits of the storage format.
    #[arg(long)]
    mantissa_bits: Option<u32>,
    /// Seed for payload generation.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EmbedArgs {
    /// Host WAV (PCM16 or float64).
    #[arg(long)]
    input: PathBuf,
    /// Watermarked WAV to write (always float64).
    #[arg(long)]
    output: PathBuf,
    /// Sidecar metadata path (default: <output>.meta).
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Payload file; its bytes become the payload bits. Without it a
    /// seeded random payload fills the capacity.
    #[arg(long)]
    payload_file: Option<PathBuf>,
    #[command(flatten)]
    scheme: SchemeArgs,
}

#[derive(Args)]
struct ExtractArgs {
    /// Watermarked (possibly attacked) WAV.
    #[arg(long)]
    input: PathBuf,
    /// Sidecar metadata written at embed time.
    #[arg(long)]
    meta: PathBuf,
    /// Write the extracted payload bytes here.
    #[arg(long)]
    payload_out: Option<PathBuf>,
    /// Write the restored host WAV here.
    #[arg(long)]
    restore: Option<PathBuf>,
    /// Original host WAV for RMSE reporting.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct RestoreArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    meta: PathBuf,
    /// Restored WAV path.
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Target SNR in dB against the input's measured power.
    #[arg(long)]
    snr_db: Option<f64>,
    /// Explicit noise deviation (overrides --snr-db).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated schemes (default mme,iqim).
    #[arg(long)]
    schemes: Option<String>,
    /// Comma-separated lattices (default z2).
    #[arg(long)]
    lattices: Option<String>,
    /// Comma-separated Δ values (default 2000).
    #[arg(long)]
    deltas: Option<String>,
    /// Comma-separated rates (default 1).
    #[arg(long)]
    rates: Option<String>,
    /// Comma-separated α values; "auto" allowed (default 0.6569).
    #[arg(long)]
    alphas: Option<String>,
    /// Comma-separated SNR points in dB; "clean" means no attack
    /// (default 25).
    #[arg(long)]
    snrs_db: Option<String>,
    /// Frames per cell.
    #[arg(long)]
    frames: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Host model: cells:<K> or box:<half-width>.
    #[arg(long)]
    host: Option<String>,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Key=value fallbacks from --config.
struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!("config line '{line}' is not key=value"))
                })?;
                values.insert(key.trim().replace('-', "_"), value.trim().to_string());
            }
        }
        Ok(ConfigFile { values })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("config value '{raw}' for '{key}' does not parse"))
            }),
        }
    }
}

/// Flag value, else config value, else default.
fn resolve<T: FromStr + Clone>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, Error> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(cfg.get::<T>(key)?.unwrap_or(default))
}

fn build_embed_params(args: &SchemeArgs, cfg: &ConfigFile) -> Result<EmbedParams, Error> {
    let defaults = EmbedParams::default();
    let scheme = Scheme::parse(&resolve(args.scheme.clone(), cfg, "scheme", "mme".into())?)?;
    let lattice = LatticeKind::parse(&resolve(args.lattice.clone(), cfg, "lattice", "z2".into())?)?;
    let delta = resolve(args.delta, cfg, "delta", defaults.delta)?;
    let alpha = AlphaChoice::parse(&resolve(
        args.alpha.clone(),
        cfg,
        "alpha",
        defaults.alpha.label(),
    )?)?;
    let nesting = match (&args.nesting, args.rate) {
        (Some(n), _) => parse_nesting(n)?,
        (None, Some(rate)) => vec![1u64 << rate; lattice.dimension()],
        (None, None) => match cfg.get::<String>("nesting")? {
            Some(n) => parse_nesting(&n)?,
            None => {
                let rate = cfg.get::<u32>("rate")?.unwrap_or(1);
                vec![1u64 << rate; lattice.dimension()]
            }
        },
    };
    Ok(EmbedParams {
        scheme,
        lattice,
        delta,
        nesting,
        alpha,
        iqim_bits: resolve(args.bits, cfg, "bits", defaults.iqim_bits)?,
        mantissa_bits: resolve(args.mantissa_bits, cfg, "mantissa_bits", defaults.mantissa_bits)?,
        seed: resolve(args.seed, cfg, "seed", defaults.seed)?,
    })
}

fn parse_nesting(s: &str) -> Result<Vec<u64>, Error> {
    s.split([';', ','])
        .map(|p| {
            p.trim()
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("bad nesting entry '{p}'")))
        })
        .collect()
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad {what} entry '{p}'")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Embed(args) => {
            let params = build_embed_params(&args.scheme, &cfg)?;
            let payload = match &args.payload_file {
                Some(path) => PayloadSource::Bits(bytes_to_bits(&fs::read(path)?)),
                None => PayloadSource::Random,
            };
            let meta = args
                .meta
                .unwrap_or_else(|| args.output.with_extension("wav.meta"));
            let report = embed_file(&args.input, &args.output, &meta, &params, payload)?;
            println!("scheme: {}", params.scheme.label());
            println!("alpha: {}", report.alpha);
            println!("capacity_bits: {}", report.capacity_bits);
            println!("payload_bits: {}", report.payload_bits);
            println!("payload_sha256: {}", report.payload_sha256);
            println!("swr_db: {}", report.swr_db);
            println!("overflow_frames: {}", report.overflow_frames);
            println!("sidecar: {}", meta.display());
        }
        Command::Extract(args) => {
            let report = extract_file(
                &args.input,
                &args.meta,
                args.restore.as_deref(),
                args.reference.as_deref(),
            )?;
            if let Some(path) = &args.payload_out {
                fs::write(path, bits_to_bytes(&report.payload))?;
            }
            println!("payload_bits: {}", report.payload.len());
            println!("payload_sha256: {}", report.payload_sha256);
            println!("digest_match: {}", report.digest_match);
            if let Some(ber) = report.ber {
                println!("ber: {ber}");
            }
            println!("integer_residual_rms: {}", report.integer_residual_rms);
            if let Some(format) = report.restored_format {
                println!("restored_format: {}", format.label());
            }
            if let Some(rmse) = report.reference_rmse {
                println!("reference_rmse: {rmse}");
            }
        }
        Command::Restore(args) => {
            let report = restore_file(
                &args.input,
                &args.meta,
                &args.output,
                args.reference.as_deref(),
            )?;
            println!("integer_residual_rms: {}", report.integer_residual_rms);
            println!(
                "restored_format: {}",
                report
                    .restored_format
                    .map(|f| f.label())
                    .unwrap_or("none")
            );
            if let Some(rmse) = report.reference_rmse {
                println!("reference_rmse: {rmse}");
            }
        }
        Command::Attack(args) => {
            let seed = resolve(args.seed, &cfg, "seed", 42)?;
            let report = attack_file(&args.input, &args.output, args.snr_db, args.sigma, seed)?;
            println!("sigma: {}", report.sigma);
            println!("snr_db: {}", report.snr_db);
        }
        Command::Bench(args) => {
            let defaults = SweepSpec::default();
            let schemes = match resolve_opt_string(args.schemes, &cfg, "schemes")? {
                Some(s) => s
                    .split(',')
                    .map(Scheme::parse)
                    .collect::<Result<Vec<_>, _>>()?,
                None => defaults.schemes,
            };
            let lattices = match resolve_opt_string(args.lattices, &cfg, "lattices")? {
                Some(s) => s
                    .split(',')
                    .map(LatticeKind::parse)
                    .collect::<Result<Vec<_>, _>>()?,
                None => defaults.lattices,
            };
            let deltas = match resolve_opt_string(args.deltas, &cfg, "deltas")? {
                Some(s) => parse_list::<f64>(&s, "delta")?,
                None => defaults.deltas,
            };
            let rates = match resolve_opt_string(args.rates, &cfg, "rates")? {
                Some(s) => parse_list::<u32>(&s, "rate")?,
                None => defaults.rates,
            };
            let alphas = match resolve_opt_string(args.alphas, &cfg, "alphas")? {
                Some(s) => s
                    .split(',')
                    .map(AlphaChoice::parse)
                    .collect::<Result<Vec<_>, _>>()?,
                None => defaults.alphas,
            };
            let snrs_db = match resolve_opt_string(args.snrs_db, &cfg, "snrs_db")? {
                Some(s) => s
                    .split(',')
                    .map(|p| {
                        let p = p.trim();
                        if p.eq_ignore_ascii_case("clean") {
                            Ok(f64::INFINITY)
                        } else {
                            p.parse::<f64>()
                                .map_err(|_| Error::Config(format!("bad SNR entry '{p}'")))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => defaults.snrs_db,
            };
            let host = match resolve_opt_string(args.host, &cfg, "host")? {
                Some(s) => HostSpec::parse(&s)?,
                None => defaults.host,
            };
            let spec = SweepSpec {
                schemes,
                lattices,
                deltas,
                rates,
                alphas,
                snrs_db,
                frames: resolve(args.frames, &cfg, "frames", defaults.frames)?,
                seed: resolve(args.seed, &cfg, "seed", defaults.seed)?,
                host,
            };
            match &args.out {
                Some(path) => {
                    let mut file = fs::File::create(path)?;
                    run_sweep(&spec, &mut file)?;
                    file.flush()?;
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    run_sweep(&spec, &mut lock)?;
                    lock.flush()?;
                }
            }
        }
    }
    Ok(())
}

fn resolve_opt_string(
    flag: Option<String>,
    cfg: &ConfigFile,
    key: &str,
) -> Result<Option<String>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    cfg.get::<String>(key)
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) | Error::Config(_) => 2,
        Error::Format { .. } | Error::Precision(_) => 3,
        Error::Capacity { .. } => 4,
        Error::Integrity(_) => 5,
        Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
