//! File-level embedding pipeline: WAV in, watermarked WAV plus sidecar
//! metadata out, and the reverse path.
//!
//! The embedding parameters travel in a small key=value sidecar file with a
//! SHA-256 self-checksum; extraction refuses a sidecar whose checksum does
//! not match. Watermarked audio is always written as IEEE float64 — storing
//! it as PCM16 would quantize away the scaled self-noise that makes the
//! schemes reversible. Restored audio is written back as PCM16 once every
//! sample is within `1e-6` of an integer, otherwise as float64 with the
//! residual reported.
//!
//! Multichannel clips are framed per channel; payload bits fill frames in
//! round-robin channel order (frame 0 of every channel, then frame 1, ...).

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::audio::{deframe_clip, frame_clip, read_wav, write_wav, AudioClip, SampleFormat};
use crate::channel::{snr_to_sigma, AwgnChannel};
use crate::error::{Error, Result};
use crate::lattice::LatticeKind;
use crate::metrics::swr;
use crate::nested::{CosetTable, NestedPair, NestingMatrix, DEFAULT_COSET_CAP};
use crate::schemes::iqim::IqimConfig;
use crate::schemes::mme::{alpha_lower_bound, MmeConfig};
use crate::schemes::qim;

pub const SIDECAR_VERSION: u32 = 1;

/// Embedding scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Qim,
    Iqim,
    Mme,
}

impl Scheme {
    pub fn label(self) -> &'static str {
        match self {
            Scheme::Qim => "qim",
            Scheme::Iqim => "iqim",
            Scheme::Mme => "mme",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qim" => Ok(Scheme::Qim),
            "iqim" => Ok(Scheme::Iqim),
            "mme" => Ok(Scheme::Mme),
            other => Err(Error::invalid(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Scaling factor selection: a literal value or the per-configuration
/// general lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaChoice {
    /// Use the general lower bound of the built pair.
    Auto,
    Fixed(f64),
}

impl AlphaChoice {
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if t == "auto" {
            return Ok(AlphaChoice::Auto);
        }
        t.parse::<f64>()
            .map(AlphaChoice::Fixed)
            .map_err(|_| Error::invalid(format!("bad alpha '{s}' (number or 'auto')")))
    }

    pub fn label(&self) -> String {
        match self {
            AlphaChoice::Auto => "auto".into(),
            AlphaChoice::Fixed(a) => format!("{a}"),
        }
    }
}

/// Where payload bits come from.
#[derive(Debug, Clone)]
pub enum PayloadSource {
    /// Seeded random bits filling the whole capacity.
    Random,
    /// Explicit bits (e.g. a file's bytes, LSB-first).
    Bits(Vec<bool>),
}

/// Embedding parameters. The defaults mirror the reference experiment
/// setup: MME on `Z²` with `Δ = 2000`, rate 1 and `α = 0.6569`.
#[derive(Debug, Clone)]
pub struct EmbedParams {
    pub scheme: Scheme,
    pub lattice: LatticeKind,
    pub delta: f64,
    pub nesting: Vec<u64>,
    pub alpha: AlphaChoice,
    pub iqim_bits: u32,
    pub mantissa_bits: u32,
    pub seed: u64,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            scheme: Scheme::Mme,
            lattice: LatticeKind::Zn(2),
            delta: 2000.0,
            nesting: vec![2, 2],
            alpha: AlphaChoice::Fixed(0.6569),
            iqim_bits: 1,
            mantissa_bits: 52,
            seed: 42,
        }
    }
}

impl EmbedParams {
    /// Nesting diagonal `2^rate · I` for the lattice's dimension.
    pub fn with_rate(mut self, rate: u32) -> Self {
        self.nesting = vec![1u64 << rate; self.lattice.dimension()];
        self
    }
}

/// Everything extraction needs, stored next to the watermarked file.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub version: u32,
    pub scheme: Scheme,
    pub lattice: LatticeKind,
    pub delta: f64,
    pub nesting: Vec<u64>,
    pub alpha: f64,
    pub iqim_bits: u32,
    pub mantissa_bits: u32,
    pub seed: u64,
    pub payload_random: bool,
    pub sample_rate: u32,
    pub channels: u16,
    pub source_format: SampleFormat,
    pub payload_bits: u64,
    pub payload_sha256: String,
}

impl Sidecar {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# lwmark sidecar v{}", self.version);
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "scheme={}", self.scheme.label());
        let _ = writeln!(s, "lattice={}", self.lattice.label());
        let _ = writeln!(s, "delta={}", self.delta);
        let _ = writeln!(s, "nesting={}", join_u64(&self.nesting));
        let _ = writeln!(s, "alpha={}", self.alpha);
        let _ = writeln!(s, "iqim_bits={}", self.iqim_bits);
        let _ = writeln!(s, "mantissa_bits={}", self.mantissa_bits);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "payload_source={}", if self.payload_random { "random" } else { "bits" });
        let _ = writeln!(s, "sample_rate={}", self.sample_rate);
        let _ = writeln!(s, "channels={}", self.channels);
        let _ = writeln!(s, "source_format={}", self.source_format.label());
        let _ = writeln!(s, "payload_bits={}", self.payload_bits);
        let _ = writeln!(s, "payload_sha256={}", self.payload_sha256);
        let checksum = sha256_hex(s.as_bytes());
        let _ = writeln!(s, "checksum={checksum}");
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let checksum_line = text
            .lines()
            .find(|l| l.starts_with("checksum="))
            .ok_or_else(|| Error::Integrity("sidecar has no checksum line".into()))?;
        let stated = checksum_line.trim_start_matches("checksum=").trim();
        let prefix_end = text
            .find("checksum=")
            .expect("found the line above");
        let actual = sha256_hex(text[..prefix_end].as_bytes());
        if stated != actual {
            return Err(Error::Integrity(
                "sidecar checksum mismatch: the metadata was modified or corrupted".into(),
            ));
        }

        let get = |key: &str| -> Result<String> {
            text.lines()
                .filter(|l| !l.starts_with('#'))
                .find_map(|l| l.strip_prefix(&format!("{key}=")))
                .map(str::to_string)
                .ok_or_else(|| Error::Integrity(format!("sidecar is missing '{key}'")))
        };

        let version: u32 = parse_field(&get("version")?, "version")?;
        if version != SIDECAR_VERSION {
            return Err(Error::Integrity(format!(
                "unsupported sidecar version {version}"
            )));
        }
        let sidecar = Sidecar {
            version,
            scheme: Scheme::parse(&get("scheme")?)?,
            lattice: LatticeKind::parse(&get("lattice")?)?,
            delta: parse_field(&get("delta")?, "delta")?,
            nesting: split_u64(&get("nesting")?)?,
            alpha: parse_field(&get("alpha")?, "alpha")?,
            iqim_bits: parse_field(&get("iqim_bits")?, "iqim_bits")?,
            mantissa_bits: parse_field(&get("mantissa_bits")?, "mantissa_bits")?,
            seed: parse_field(&get("seed")?, "seed")?,
            payload_random: get("payload_source")? == "random",
            sample_rate: parse_field(&get("sample_rate")?, "sample_rate")?,
            channels: parse_field(&get("channels")?, "channels")?,
            source_format: SampleFormat::parse(&get("source_format")?)?,
            payload_bits: parse_field(&get("payload_bits")?, "payload_bits")?,
            payload_sha256: get("payload_sha256")?,
        };
        Ok(sidecar)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::parse(&text)
    }
}

fn parse_field<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Integrity(format!("sidecar field '{key}' has bad value '{value}'")))
}

fn join_u64(v: &[u64]) -> String {
    v.iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn split_u64(s: &str) -> Result<Vec<u64>> {
    s.split(';')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Integrity(format!("bad nesting entry '{p}'")))
        })
        .collect()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().fold(String::new(), |mut acc, b| {
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

// ---------------------------------------------------------------------------
// Bit plumbing
// ---------------------------------------------------------------------------

/// Index from bits, LSB first.
pub fn bits_to_index(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
}

/// Bits of an index, LSB first.
pub fn index_to_bits(index: u64, nbits: usize) -> Vec<bool> {
    (0..nbits).map(|i| (index >> i) & 1 == 1).collect()
}

/// Packs bits into bytes, LSB first within each byte, zero-padded.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    for (i, &b) in bits.iter().enumerate() {
        if b {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    bytes
}

/// Unpacks every bit of a byte slice, LSB first within each byte.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).map(move |i| (byte >> i) & 1 == 1))
        .collect()
}

/// Seed-determined payload bits.
pub fn random_bits(seed: u64, count: u64) -> Vec<bool> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random::<bool>()).collect()
}

fn payload_digest(bits: &[bool]) -> String {
    sha256_hex(&bits_to_bytes(bits))
}

// ---------------------------------------------------------------------------
// Scheme construction
// ---------------------------------------------------------------------------

enum BuiltScheme {
    Mme(Box<MmeConfig<f64>>),
    Iqim(IqimConfig<f64>),
    Qim { step: f64 },
}

impl BuiltScheme {
    fn bits_per_unit(&self) -> Result<u32> {
        match self {
            BuiltScheme::Mme(cfg) => {
                let count = cfg.coset_count();
                if !count.is_power_of_two() {
                    return Err(Error::config(format!(
                        "payload embedding needs a power-of-two coset count, det J = {count}"
                    )));
                }
                Ok(count.trailing_zeros())
            }
            BuiltScheme::Iqim(cfg) => Ok(cfg.bits()),
            BuiltScheme::Qim { .. } => Ok(1),
        }
    }

    /// Frame dimension: the lattice dimension for MME, one sample for the
    /// scalar schemes.
    fn unit_dim(&self) -> usize {
        match self {
            BuiltScheme::Mme(cfg) => cfg.dimension(),
            _ => 1,
        }
    }
}

fn build_scheme(
    scheme: Scheme,
    lattice: LatticeKind,
    delta: f64,
    nesting: &[u64],
    alpha: AlphaChoice,
    iqim_bits: u32,
    mantissa_bits: u32,
) -> Result<(BuiltScheme, f64)> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::config("quantization step must be positive"));
    }
    match scheme {
        Scheme::Mme => {
            let pair = NestedPair::new(lattice, delta, NestingMatrix::new(nesting.to_vec())?)?;
            let resolved = match alpha {
                AlphaChoice::Auto => alpha_lower_bound(&pair),
                AlphaChoice::Fixed(a) => a,
            };
            let table = CosetTable::build(&pair, DEFAULT_COSET_CAP)?;
            let cfg = MmeConfig::with_mantissa_bits(pair, table, resolved, mantissa_bits)?;
            Ok((BuiltScheme::Mme(Box::new(cfg)), resolved))
        }
        Scheme::Iqim => {
            let cfg = IqimConfig::new(delta, iqim_bits)?;
            let beta = cfg.beta();
            Ok((BuiltScheme::Iqim(cfg), beta))
        }
        Scheme::Qim => Ok((BuiltScheme::Qim { step: delta }, f64::NAN)),
    }
}

// ---------------------------------------------------------------------------
// Embed
// ---------------------------------------------------------------------------

/// Outcome of a file embedding.
#[derive(Debug, Clone)]
pub struct EmbedReport {
    pub capacity_bits: u64,
    pub payload_bits: u64,
    pub swr_db: f64,
    /// Frames whose watermarked samples left the 16-bit amplitude range.
    /// Harmless in the float64 output, but worth knowing about.
    pub overflow_frames: u64,
    pub payload_sha256: String,
    pub alpha: f64,
}

/// Embeds a payload into a WAV file, writing the watermarked float64 WAV
/// and the metadata sidecar.
pub fn embed_file(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
    params: &EmbedParams,
    payload: PayloadSource,
) -> Result<EmbedReport> {
    let clip = read_wav(input)?;
    let (built, resolved_alpha) = build_scheme(
        params.scheme,
        params.lattice,
        params.delta,
        &params.nesting,
        params.alpha,
        params.iqim_bits,
        params.mantissa_bits,
    )?;
    let bits_per_unit = built.bits_per_unit()? as u64;
    let unit_dim = built.unit_dim();

    let mut streams = frame_clip(&clip, unit_dim)?;
    let units_total: u64 = streams.iter().map(|s| s.frames().len() as u64).sum();
    let capacity_bits = units_total * bits_per_unit;

    let (bits, payload_random) = match payload {
        PayloadSource::Random => (random_bits(params.seed, capacity_bits), true),
        PayloadSource::Bits(b) => {
            if b.len() as u64 > capacity_bits {
                return Err(Error::Capacity {
                    requested: b.len() as u64,
                    capacity: capacity_bits,
                });
            }
            (b, false)
        }
    };

    let mut overflow_frames = 0u64;
    let mut cursor = 0usize;
    let frames_per_channel = streams.first().map(|s| s.frames().len()).unwrap_or(0);
    'outer: for j in 0..frames_per_channel {
        for stream in streams.iter_mut() {
            if cursor >= bits.len() {
                break 'outer;
            }
            let take = (bits.len() - cursor).min(bits_per_unit as usize);
            let mut frame_bits = bits[cursor..cursor + take].to_vec();
            cursor += take;
            frame_bits.resize(bits_per_unit as usize, false);
            let index = bits_to_index(&frame_bits);

            let frame = &mut stream.frames_mut()[j];
            let watermarked = match &built {
                BuiltScheme::Mme(cfg) => cfg.embed(frame, index)?.watermarked,
                BuiltScheme::Iqim(cfg) => vec![cfg.embed(frame[0], index)?],
                BuiltScheme::Qim { step } => vec![qim::embed(frame[0], index == 1, *step)],
            };
            if watermarked.iter().any(|&w| !(-32767.0..=32767.0).contains(&w)) {
                overflow_frames += 1;
            }
            *frame = watermarked;
        }
    }

    let wm_clip = deframe_clip(&streams, clip.sample_rate(), SampleFormat::Float64)?;
    let swr_db = swr(clip.samples(), wm_clip.samples())?;
    write_wav(&wm_clip, output, SampleFormat::Float64)?;

    let digest = payload_digest(&bits);
    let sidecar = Sidecar {
        version: SIDECAR_VERSION,
        scheme: params.scheme,
        lattice: params.lattice,
        delta: params.delta,
        nesting: params.nesting.clone(),
        alpha: resolved_alpha,
        iqim_bits: params.iqim_bits,
        mantissa_bits: params.mantissa_bits,
        seed: params.seed,
        payload_random,
        sample_rate: clip.sample_rate(),
        channels: clip.channels(),
        source_format: clip.source_format(),
        payload_bits: bits.len() as u64,
        payload_sha256: digest.clone(),
    };
    sidecar.write(sidecar_path)?;

    Ok(EmbedReport {
        capacity_bits,
        payload_bits: bits.len() as u64,
        swr_db,
        overflow_frames,
        payload_sha256: digest,
        alpha: resolved_alpha,
    })
}

// ---------------------------------------------------------------------------
// Extract / restore
// ---------------------------------------------------------------------------

/// Outcome of a file extraction.
#[derive(Debug, Clone)]
pub struct ExtractReport {
    pub payload: Vec<bool>,
    pub payload_sha256: String,
    /// Extracted digest equals the embedded digest.
    pub digest_match: bool,
    /// BER against the regenerated payload (only for seeded-random
    /// payloads, where the receiver can reproduce the sent bits).
    pub ber: Option<f64>,
    /// RMS distance of the restored samples from the nearest integers.
    pub integer_residual_rms: f64,
    /// Format the restored file was written in, when requested.
    pub restored_format: Option<SampleFormat>,
    /// RMS error against a reference file, when one was provided.
    pub reference_rmse: Option<f64>,
}

/// Extracts the payload and (for the reversible schemes) restores the host.
pub fn extract_file(
    input: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
    restored_out: Option<&Path>,
    reference: Option<&Path>,
) -> Result<ExtractReport> {
    let sidecar = Sidecar::read(sidecar_path)?;
    let clip = read_wav(input)?;
    if clip.channels() != sidecar.channels || clip.sample_rate() != sidecar.sample_rate {
        return Err(Error::Integrity(format!(
            "file is {} ch @ {} Hz but sidecar says {} ch @ {} Hz",
            clip.channels(),
            clip.sample_rate(),
            sidecar.channels,
            sidecar.sample_rate
        )));
    }
    if sidecar.scheme == Scheme::Qim && restored_out.is_some() {
        return Err(Error::config(
            "qim is not reversible; extract the payload without --restore",
        ));
    }

    let (built, _) = build_scheme(
        sidecar.scheme,
        sidecar.lattice,
        sidecar.delta,
        &sidecar.nesting,
        AlphaChoice::Fixed(sidecar.alpha),
        sidecar.iqim_bits,
        sidecar.mantissa_bits,
    )?;
    let bits_per_unit = built.bits_per_unit()? as u64;
    let unit_dim = built.unit_dim();

    let mut streams = frame_clip(&clip, unit_dim)?;
    let units_total: u64 = streams.iter().map(|s| s.frames().len() as u64).sum();
    if sidecar.payload_bits > units_total * bits_per_unit {
        return Err(Error::Integrity(format!(
            "sidecar claims {} payload bits but the file can carry only {}",
            sidecar.payload_bits,
            units_total * bits_per_unit
        )));
    }

    let mut bits: Vec<bool> = Vec::with_capacity(sidecar.payload_bits as usize);
    let frames_per_channel = streams.first().map(|s| s.frames().len()).unwrap_or(0);
    'outer: for j in 0..frames_per_channel {
        for stream in streams.iter_mut() {
            if bits.len() as u64 >= sidecar.payload_bits {
                break 'outer;
            }
            let frame = &mut stream.frames_mut()[j];
            let (index, restored) = match &built {
                BuiltScheme::Mme(cfg) => {
                    let r = cfg.extract(frame)?;
                    (r.message_index, r.host_estimate)
                }
                BuiltScheme::Iqim(cfg) => {
                    let (m, s) = cfg.extract(frame[0]);
                    (m, vec![s])
                }
                BuiltScheme::Qim { step } => {
                    let bit = qim::decode(frame[0], *step);
                    (u64::from(bit), frame.clone())
                }
            };
            let take = ((sidecar.payload_bits - bits.len() as u64) as usize)
                .min(bits_per_unit as usize);
            bits.extend(index_to_bits(index, bits_per_unit as usize).into_iter().take(take));
            *frame = restored;
        }
    }

    let digest = payload_digest(&bits);
    let digest_match = digest == sidecar.payload_sha256;
    let ber = if sidecar.payload_random {
        let sent = random_bits(sidecar.seed, sidecar.payload_bits);
        let wrong = sent.iter().zip(&bits).filter(|(a, b)| a != b).count();
        Some(if sent.is_empty() {
            0.0
        } else {
            wrong as f64 / sent.len() as f64
        })
    } else {
        None
    };

    let restored_clip = deframe_clip(&streams, clip.sample_rate(), SampleFormat::Float64)?;
    let mut residual_sq = 0.0;
    let mut residual_max = 0.0f64;
    for &s in restored_clip.samples() {
        let r = s - s.round();
        residual_sq += r * r;
        residual_max = residual_max.max(r.abs());
    }
    let integer_residual_rms = if restored_clip.samples().is_empty() {
        0.0
    } else {
        (residual_sq / restored_clip.samples().len() as f64).sqrt()
    };

    let mut restored_format = None;
    if let Some(path) = restored_out {
        if sidecar.source_format == SampleFormat::Pcm16 && residual_max < 1e-6 {
            let rounded: Vec<f64> = restored_clip.samples().iter().map(|s| s.round()).collect();
            let pcm = AudioClip::new(
                rounded,
                clip.sample_rate(),
                clip.channels(),
                SampleFormat::Pcm16,
            )?;
            write_wav(&pcm, path, SampleFormat::Pcm16)?;
            restored_format = Some(SampleFormat::Pcm16);
        } else {
            write_wav(&restored_clip, path, SampleFormat::Float64)?;
            restored_format = Some(SampleFormat::Float64);
        }
    }

    let reference_rmse = match reference {
        Some(path) => {
            let reference_clip = read_wav(path)?;
            if reference_clip.samples().len() != restored_clip.samples().len() {
                return Err(Error::Integrity(
                    "reference file length does not match the restored stream".into(),
                ));
            }
            let sq: f64 = reference_clip
                .samples()
                .iter()
                .zip(restored_clip.samples())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            Some((sq / reference_clip.samples().len().max(1) as f64).sqrt())
        }
        None => None,
    };

    Ok(ExtractReport {
        payload: bits,
        payload_sha256: digest,
        digest_match,
        ber,
        integer_residual_rms,
        restored_format,
        reference_rmse,
    })
}

/// Restores the host only (extraction with a mandatory restored output).
pub fn restore_file(
    input: impl AsRef<Path>,
    sidecar_path: impl AsRef<Path>,
    output: &Path,
    reference: Option<&Path>,
) -> Result<ExtractReport> {
    extract_file(input, sidecar_path, Some(output), reference)
}

// ---------------------------------------------------------------------------
// Attack
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct AttackReport {
    /// Noise deviation that was applied.
    pub sigma: f64,
    /// SNR of the input stream against that noise, in dB.
    pub snr_db: f64,
}

/// Adds AWGN to a WAV file. The noise level comes either from an explicit
/// `sigma` or from a target SNR against the file's measured power. Output
/// is always float64.
pub fn attack_file(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    snr_db: Option<f64>,
    sigma: Option<f64>,
    seed: u64,
) -> Result<AttackReport> {
    let clip = read_wav(input)?;
    let n = clip.samples().len();
    let power = clip.samples().iter().map(|s| s * s).sum::<f64>() / n.max(1) as f64;
    let sigma = match (sigma, snr_db) {
        (Some(s), _) => {
            if !(s >= 0.0) {
                return Err(Error::invalid("sigma must be >= 0"));
            }
            s
        }
        (None, Some(db)) => snr_to_sigma(db, power)?,
        (None, None) => return Err(Error::invalid("attack needs --snr-db or --sigma")),
    };
    let mut channel = AwgnChannel::new(sigma, seed)?;
    let noisy = channel.apply(clip.samples());
    let attacked = AudioClip::new(noisy, clip.sample_rate(), clip.channels(), SampleFormat::Float64)?;
    write_wav(&attacked, output, SampleFormat::Float64)?;
    let achieved_db = if sigma > 0.0 {
        10.0 * (power / (sigma * sigma)).log10()
    } else {
        f64::INFINITY
    };
    Ok(AttackReport {
        sigma,
        snr_db: achieved_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_packing_round_trips() {
        let bits = vec![true, false, true, true, false, false, false, true, true, false];
        let bytes = bits_to_bytes(&bits);
        let mut back = bytes_to_bits(&bytes);
        back.truncate(bits.len());
        assert_eq!(back, bits);
        assert_eq!(bits_to_index(&[false, true, true]), 6);
        assert_eq!(index_to_bits(6, 3), vec![false, true, true]);
    }

    #[test]
    fn sidecar_text_round_trips() {
        let sidecar = Sidecar {
            version: 1,
            scheme: Scheme::Mme,
            lattice: LatticeKind::Zn(2),
            delta: 2000.0,
            nesting: vec![2, 2],
            alpha: 0.6569,
            iqim_bits: 1,
            mantissa_bits: 52,
            seed: 42,
            payload_random: true,
            sample_rate: 44100,
            channels: 1,
            source_format: SampleFormat::Pcm16,
            payload_bits: 1000,
            payload_sha256: "abc123".into(),
        };
        let text = sidecar.to_text();
        assert_eq!(Sidecar::parse(&text).unwrap(), sidecar);
    }

    #[test]
    fn tampered_sidecar_is_rejected() {
        let sidecar = Sidecar {
            version: 1,
            scheme: Scheme::Mme,
            lattice: LatticeKind::A2,
            delta: 1.0,
            nesting: vec![4, 4],
            alpha: 0.75,
            iqim_bits: 1,
            mantissa_bits: 52,
            seed: 7,
            payload_random: false,
            sample_rate: 8000,
            channels: 2,
            source_format: SampleFormat::Float64,
            payload_bits: 16,
            payload_sha256: "00".into(),
        };
        let tampered = sidecar.to_text().replace("alpha=0.75", "alpha=0.9");
        assert!(matches!(
            Sidecar::parse(&tampered),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn random_bits_are_seed_deterministic() {
        assert_eq!(random_bits(9, 128), random_bits(9, 128));
        assert_ne!(random_bits(9, 128), random_bits(10, 128));
    }
}
