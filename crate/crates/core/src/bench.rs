//! Full-factorial experiment sweeps over scheme, lattice, step, rate,
//! scaling factor and SNR, emitting one CSV row per cell.
//!
//! Determinism contract: a sweep is a pure function of its spec. Cells are
//! enumerated in a fixed nested order and every random stream (hosts,
//! messages, noise) is derived from the master seed and the cell index, so
//! rerunning a spec reproduces the CSV byte for byte.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::channel::{snr_to_sigma, AwgnChannel};
use crate::error::{Error, Result};
use crate::host::{uniform_box_frame, uniform_cell_frame, HostSpec};
use crate::lattice::{Lattice, LatticeKind};
use crate::metrics::{gsnr_theoretical, GsnrAccumulator, MetricsReport, RunParams, CSV_HEADER};
use crate::nested::{CosetTable, NestedPair, NestingMatrix, DEFAULT_COSET_CAP};
use crate::pipeline::{index_to_bits, AlphaChoice, Scheme};
use crate::schemes::iqim::IqimConfig;
use crate::schemes::mme::{alpha_lower_bound, MmeConfig};
use crate::schemes::qim;

/// Sweep axes. Every axis needs at least one value; the cross product is
/// the set of cells.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub schemes: Vec<Scheme>,
    pub lattices: Vec<LatticeKind>,
    pub deltas: Vec<f64>,
    pub rates: Vec<u32>,
    pub alphas: Vec<AlphaChoice>,
    /// SNR points in dB; `f64::INFINITY` means no attack.
    pub snrs_db: Vec<f64>,
    pub frames: u64,
    pub seed: u64,
    pub host: HostSpec,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            schemes: vec![Scheme::Mme, Scheme::Iqim],
            lattices: vec![LatticeKind::Zn(2)],
            deltas: vec![2000.0],
            rates: vec![1],
            alphas: vec![AlphaChoice::Fixed(0.6569)],
            snrs_db: vec![25.0],
            frames: 10_000,
            seed: 1,
            host: HostSpec::Cells { per_axis: 16 },
        }
    }
}

/// One cell of the sweep.
#[derive(Debug, Clone)]
pub struct CellSpec {
    pub scheme: Scheme,
    pub lattice: LatticeKind,
    pub delta: f64,
    pub rate: u32,
    pub alpha: AlphaChoice,
    pub snr_db: f64,
    pub frames: u64,
    pub seed: u64,
    pub host: HostSpec,
}

/// Runs the whole sweep, writing the versioned CSV to `out`.
pub fn run_sweep(spec: &SweepSpec, out: &mut dyn Write) -> Result<()> {
    if spec.schemes.is_empty()
        || spec.lattices.is_empty()
        || spec.deltas.is_empty()
        || spec.rates.is_empty()
        || spec.alphas.is_empty()
        || spec.snrs_db.is_empty()
    {
        return Err(Error::invalid("every sweep axis needs at least one value"));
    }
    if spec.frames == 0 {
        return Err(Error::invalid("sweep needs at least one frame per cell"));
    }
    writeln!(out, "{CSV_HEADER}")?;
    let mut cell_idx = 0u64;
    for &scheme in &spec.schemes {
        for &lattice in &spec.lattices {
            for &delta in &spec.deltas {
                for &rate in &spec.rates {
                    for &alpha in &spec.alphas {
                        for &snr_db in &spec.snrs_db {
                            cell_idx += 1;
                            let cell = CellSpec {
                                scheme,
                                lattice,
                                delta,
                                rate,
                                alpha,
                                snr_db,
                                frames: spec.frames,
                                seed: mix_seed(spec.seed, cell_idx),
                                host: spec.host,
                            };
                            let report = run_cell(&cell)?;
                            writeln!(out, "{}", report.csv_row())?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs a single cell. Infeasible configurations (scaling factor below its
/// bound, scheme/lattice mismatches) come back as a flagged report rather
/// than an error, so sweep output accounts for every cell.
pub fn run_cell(cell: &CellSpec) -> Result<MetricsReport> {
    match cell.scheme {
        Scheme::Mme => run_mme_cell(cell),
        Scheme::Iqim => run_iqim_cell(cell),
        Scheme::Qim => run_qim_cell(cell),
    }
}

fn base_params(cell: &CellSpec) -> RunParams {
    let gamma = 1u64 << cell.rate;
    RunParams {
        scheme: cell.scheme.label().into(),
        lattice: cell.lattice.label(),
        dim: cell.lattice.dimension(),
        delta: cell.delta,
        rate: cell.rate as f64,
        nesting: vec![gamma.to_string(); cell.lattice.dimension()].join(";"),
        alpha: f64::NAN,
        iqim_bits: 0,
        snr_db: cell.snr_db,
        sigma: f64::NAN,
        frames: cell.frames,
        seed: cell.seed,
        feasible: true,
        note: String::new(),
    }
}

fn infeasible(cell: &CellSpec, note: impl Into<String>) -> MetricsReport {
    let mut params = base_params(cell);
    params.feasible = false;
    params.note = note.into();
    MetricsReport {
        params,
        swr_db: f64::NAN,
        gsnr_empirical: f64::NAN,
        gsnr_theoretical: f64::NAN,
        ber: f64::NAN,
        restore_rmse: f64::NAN,
    }
}

/// Shared per-cell accumulators.
struct CellAccumulators {
    signal_sq: f64,
    mark_sq: f64,
    restore_sq: f64,
    coords: u64,
    wrong_bits: u64,
    total_bits: u64,
    gsnr: GsnrAccumulator<f64>,
}

impl CellAccumulators {
    fn new() -> Self {
        CellAccumulators {
            signal_sq: 0.0,
            mark_sq: 0.0,
            restore_sq: 0.0,
            coords: 0,
            wrong_bits: 0,
            total_bits: 0,
            gsnr: GsnrAccumulator::new(),
        }
    }

    fn push_frame(&mut self, s: &[f64], w: &[f64], restored: &[f64], composite: &[f64]) {
        for i in 0..s.len() {
            self.signal_sq += s[i] * s[i];
            self.mark_sq += (w[i] - s[i]) * (w[i] - s[i]);
            self.restore_sq += (restored[i] - s[i]) * (restored[i] - s[i]);
        }
        self.coords += s.len() as u64;
        self.gsnr.push(composite);
    }

    fn push_bits(&mut self, sent: &[bool], got: &[bool]) {
        self.wrong_bits += sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64;
        self.total_bits += sent.len() as u64;
    }

    fn swr_db(&self) -> f64 {
        if self.mark_sq == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (self.signal_sq / self.mark_sq).log10()
        }
    }

    fn ber(&self) -> f64 {
        if self.total_bits == 0 {
            0.0
        } else {
            self.wrong_bits as f64 / self.total_bits as f64
        }
    }

    fn restore_rmse(&self) -> f64 {
        (self.restore_sq / self.coords.max(1) as f64).sqrt()
    }
}

/// Draws the cell's host frames and returns them with their mean per-sample
/// power. The "cells" host is uniform over parallelepipeds of the given
/// period lattice; the "box" host ignores it.
fn draw_hosts(
    cell: &CellSpec,
    period: &Lattice<f64>,
    rng: &mut ChaCha12Rng,
) -> (Vec<Vec<f64>>, f64) {
    let dim = period.dimension();
    let mut hosts = Vec::with_capacity(cell.frames as usize);
    let mut power = 0.0;
    for _ in 0..cell.frames {
        let s = match cell.host {
            HostSpec::Cells { per_axis } => uniform_cell_frame(period, per_axis, rng),
            HostSpec::Box { half_width } => uniform_box_frame(dim, half_width, rng),
        };
        power += s.iter().map(|v| v * v).sum::<f64>();
        hosts.push(s);
    }
    let n = (cell.frames as usize * dim).max(1);
    (hosts, power / n as f64)
}

fn cell_sigma(cell: &CellSpec, host_power: f64) -> Result<f64> {
    if cell.snr_db.is_infinite() {
        Ok(0.0)
    } else {
        snr_to_sigma(cell.snr_db, host_power)
    }
}

fn run_mme_cell(cell: &CellSpec) -> Result<MetricsReport> {
    let dim = cell.lattice.dimension();
    let gamma = 1u64 << cell.rate;
    let nesting = NestingMatrix::self_similar(dim, gamma)?;
    let pair = match NestedPair::new(cell.lattice, cell.delta, nesting) {
        Ok(p) => p,
        Err(e) => return Ok(infeasible(cell, e.to_string())),
    };
    let resolved_alpha = match cell.alpha {
        AlphaChoice::Auto => alpha_lower_bound(&pair),
        AlphaChoice::Fixed(a) => a,
    };
    let table = match CosetTable::build(&pair, DEFAULT_COSET_CAP) {
        Ok(t) => t,
        Err(e) => return Ok(infeasible(cell, e.to_string())),
    };
    let cfg = match MmeConfig::new(pair, table, resolved_alpha) {
        Ok(c) => c,
        Err(e) => return Ok(infeasible(cell, e.to_string())),
    };

    let bits_per_frame = (dim as u32 * cell.rate) as usize;
    let mut host_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 1));
    let mut msg_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 2));
    let (hosts, host_power) = draw_hosts(cell, cfg.pair().coarse(), &mut host_rng);
    let sigma = cell_sigma(cell, host_power)?;
    let mut channel = AwgnChannel::new(sigma, mix_seed(cell.seed, 3))?;

    let one_minus = 1.0 - cfg.alpha();
    let mut acc = CellAccumulators::new();
    for s in &hosts {
        let index = if bits_per_frame == 0 {
            0
        } else {
            msg_rng.random_range(0..cfg.coset_count())
        };
        let emb = cfg.embed(s, index)?;
        let noise = channel.noise(dim);
        let y: Vec<f64> = emb
            .watermarked
            .iter()
            .zip(&noise)
            .map(|(a, b)| a + b)
            .collect();
        let composite: Vec<f64> = emb
            .self_noise
            .iter()
            .zip(&noise)
            .map(|(e, n)| one_minus * e + n)
            .collect();
        let restored = cfg.extract(&y)?;
        acc.push_frame(s, &emb.watermarked, &restored.host_estimate, &composite);
        acc.push_bits(
            &index_to_bits(index, bits_per_frame),
            &index_to_bits(restored.message_index, bits_per_frame),
        );
    }

    let mut params = base_params(cell);
    params.alpha = cfg.alpha();
    params.sigma = sigma;
    Ok(MetricsReport {
        swr_db: acc.swr_db(),
        gsnr_empirical: acc.gsnr.finish(cfg.pair().fine())?,
        gsnr_theoretical: gsnr_theoretical(&cfg, sigma),
        ber: acc.ber(),
        restore_rmse: acc.restore_rmse(),
        params,
    })
}

fn run_iqim_cell(cell: &CellSpec) -> Result<MetricsReport> {
    if !matches!(cell.lattice, LatticeKind::Zn(_)) {
        return Ok(infeasible(
            cell,
            "iqim operates per sample on the cubic lattice only",
        ));
    }
    let dim = cell.lattice.dimension();
    if cell.rate == 0 {
        return Ok(infeasible(cell, "iqim needs at least one bit per sample"));
    }
    let cfg = match IqimConfig::<f64>::new(cell.delta, cell.rate) {
        Ok(c) => c,
        Err(e) => return Ok(infeasible(cell, e.to_string())),
    };
    let span = 2f64.powi(cell.rate as i32) * cell.delta;
    // Same period lattice as the matched MME cell, so paired seeds see the
    // same host stream.
    let period = Lattice::new(cell.lattice, span)?;

    let mut host_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 1));
    let mut msg_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 2));
    let (hosts, host_power) = draw_hosts(cell, &period, &mut host_rng);
    let sigma = cell_sigma(cell, host_power)?;
    let mut channel = AwgnChannel::new(sigma, mix_seed(cell.seed, 3))?;

    let bits = cell.rate as usize;
    let fine = Lattice::new(cell.lattice, cell.delta)?;
    let mut acc = CellAccumulators::new();
    for s in &hosts {
        let symbols: Vec<u64> = (0..dim).map(|_| msg_rng.random_range(0..cfg.symbols())).collect();
        let w = cfg.embed_vec(s, &symbols)?;
        let noise = channel.noise(dim);
        let y: Vec<f64> = w.iter().zip(&noise).map(|(a, b)| a + b).collect();
        // Composite noise per coordinate: offset of the watermarked value
        // from its message lattice point, plus channel noise.
        let composite: Vec<f64> = (0..dim)
            .map(|i| {
                let gamma = (s[i] / span).floor();
                let point = span * gamma + symbols[i] as f64 * cell.delta;
                (w[i] - point) + noise[i]
            })
            .collect();
        let (decoded, restored) = cfg.extract_vec(&y);
        acc.push_frame(s, &w, &restored, &composite);
        for i in 0..dim {
            acc.push_bits(
                &index_to_bits(symbols[i], bits),
                &index_to_bits(decoded[i], bits),
            );
        }
    }

    // Flat-host closed form: E[(r/2^b)^2] = Δ²/3 per coordinate.
    let n = dim as f64;
    let theo = cell.delta * cell.delta
        / (n * (cell.delta * cell.delta / 3.0 + sigma * sigma));

    let mut params = base_params(cell);
    params.alpha = cfg.beta();
    params.iqim_bits = cell.rate;
    params.sigma = sigma;
    params.note = "alpha column echoes beta".into();
    Ok(MetricsReport {
        swr_db: acc.swr_db(),
        gsnr_empirical: acc.gsnr.finish(&fine)?,
        gsnr_theoretical: theo,
        ber: acc.ber(),
        restore_rmse: acc.restore_rmse(),
        params,
    })
}

fn run_qim_cell(cell: &CellSpec) -> Result<MetricsReport> {
    if !matches!(cell.lattice, LatticeKind::Zn(_)) {
        return Ok(infeasible(
            cell,
            "qim operates per sample on the cubic lattice only",
        ));
    }
    let dim = cell.lattice.dimension();
    let period = Lattice::new(cell.lattice, cell.delta * 2f64.powi(cell.rate as i32))?;

    let mut host_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 1));
    let mut msg_rng = ChaCha12Rng::seed_from_u64(mix_seed(cell.seed, 2));
    let (hosts, host_power) = draw_hosts(cell, &period, &mut host_rng);
    let sigma = cell_sigma(cell, host_power)?;
    let mut channel = AwgnChannel::new(sigma, mix_seed(cell.seed, 3))?;

    // The two message grids are Δ/2 apart; a cubic lattice of step Δ/2 has
    // the matching packing radius for the GSNR numerator.
    let half_step = Lattice::new(cell.lattice, cell.delta / 2.0)?;
    let mut acc = CellAccumulators::new();
    for s in &hosts {
        let message: Vec<bool> = (0..dim).map(|_| msg_rng.random::<bool>()).collect();
        let w: Vec<f64> = s
            .iter()
            .zip(&message)
            .map(|(&si, &m)| qim::embed(si, m, cell.delta))
            .collect();
        let noise = channel.noise(dim);
        let y: Vec<f64> = w.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let decoded: Vec<bool> = y.iter().map(|&yi| qim::decode(yi, cell.delta)).collect();
        // No self-noise: the sample sits exactly on the grid.
        acc.push_frame(s, &w, &y, &noise);
        acc.push_bits(&message, &decoded);
    }

    let n = dim as f64;
    let theo = if sigma > 0.0 {
        (cell.delta * cell.delta / 4.0) / (n * sigma * sigma)
    } else {
        f64::INFINITY
    };

    let mut params = base_params(cell);
    params.sigma = sigma;
    params.note = "not reversible; restore_rmse measures the observation".into();
    Ok(MetricsReport {
        swr_db: acc.swr_db(),
        gsnr_empirical: acc.gsnr.finish(&half_step)?,
        gsnr_theoretical: theo,
        ber: acc.ber(),
        restore_rmse: acc.restore_rmse(),
        params,
    })
}

/// SplitMix64-style seed derivation.
fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
