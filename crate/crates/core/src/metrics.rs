//! Distortion and robustness metrics: SWR, GSNR, BER, and the CSV report
//! row emitted by the bench harness.

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::num::{real, Real};
use crate::schemes::mme::MmeConfig;

/// Signal-to-watermark ratio in dB: `10 log10(Σ s² / Σ w²)` with
/// `w = watermarked - host`. A zero-energy watermark yields `+∞`.
pub fn swr<F: Real>(host: &[F], watermarked: &[F]) -> Result<F> {
    if host.len() != watermarked.len() {
        return Err(Error::invalid(format!(
            "host has {} samples, watermarked has {}",
            host.len(),
            watermarked.len()
        )));
    }
    let signal: F = host.iter().map(|&s| s * s).sum();
    let mark: F = host
        .iter()
        .zip(watermarked)
        .map(|(&s, &w)| (w - s) * (w - s))
        .sum();
    if mark == F::zero() {
        return Ok(F::infinity());
    }
    Ok(real::<F>(10.0) * (signal / mark).log10())
}

/// Closed-form GSNR of an MME configuration under noise deviation `sigma`:
///
/// ```text
/// 4 r_pack(Λf)² / ((1-α)² N G(Λc) Vol(Λc)^(2/N) + N σ²)
/// ```
///
/// The numerator is the squared minimum distance between cosets (twice the
/// fine packing radius, squared); the denominator is the expected composite
/// noise energy under a flat host.
pub fn gsnr_theoretical<F: Real>(cfg: &MmeConfig<F>, sigma: F) -> F {
    let fine = cfg.pair().fine();
    let coarse = cfg.pair().coarse();
    let n = real::<F>(fine.dimension() as f64);
    let one_minus = F::one() - cfg.alpha();
    let self_noise_energy =
        one_minus * one_minus * n * coarse.nsm() * coarse.volume().powf(real::<F>(2.0) / n);
    let numerator = real::<F>(4.0) * fine.r_pack() * fine.r_pack();
    numerator / (self_noise_energy + n * sigma * sigma)
}

/// Streaming accumulator for empirical GSNR: feed composite noise vectors
/// `(1-α) e + n` as they are produced.
#[derive(Debug, Clone, Default)]
pub struct GsnrAccumulator<F> {
    sum_sq: F,
    count: u64,
}

impl<F: Real> GsnrAccumulator<F> {
    pub fn new() -> Self {
        GsnrAccumulator {
            sum_sq: F::zero(),
            count: 0,
        }
    }

    pub fn push(&mut self, composite_noise: &[F]) {
        self.sum_sq = self.sum_sq + composite_noise.iter().map(|&v| v * v).sum();
        self.count += 1;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `4 r_pack(Λf)² / mean ‖v̂‖²`. `+∞` when every vector was zero.
    pub fn finish(&self, fine: &Lattice<F>) -> Result<F> {
        if self.count == 0 {
            return Err(Error::invalid("empirical GSNR needs at least one vector"));
        }
        let mean = self.sum_sq / real(self.count as f64);
        if mean == F::zero() {
            return Ok(F::infinity());
        }
        Ok(real::<F>(4.0) * fine.r_pack() * fine.r_pack() / mean)
    }
}

/// Empirical GSNR from a list of composite noise vectors.
pub fn gsnr_empirical<F: Real>(composite_noises: &[Vec<F>], fine: &Lattice<F>) -> Result<F> {
    let mut acc = GsnrAccumulator::new();
    for v in composite_noises {
        acc.push(v);
    }
    acc.finish(fine)
}

/// Bit error rate: the fraction of positions where the matrices differ.
pub fn ber(sent: &[Vec<bool>], received: &[Vec<bool>]) -> Result<f64> {
    if sent.len() != received.len() {
        return Err(Error::invalid(format!(
            "sent {} rows, received {} rows",
            sent.len(),
            received.len()
        )));
    }
    let mut total = 0u64;
    let mut wrong = 0u64;
    for (row, (a, b)) in sent.iter().zip(received).enumerate() {
        if a.len() != b.len() {
            return Err(Error::invalid(format!(
                "row {row}: sent {} bits, received {}",
                a.len(),
                b.len()
            )));
        }
        total += a.len() as u64;
        wrong += a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
    }
    if total == 0 {
        return Ok(0.0);
    }
    Ok(wrong as f64 / total as f64)
}

/// Configuration echo carried in every report row.
#[derive(Debug, Clone)]
pub struct RunParams {
    pub scheme: String,
    pub lattice: String,
    pub dim: usize,
    pub delta: f64,
    pub rate: f64,
    pub nesting: String,
    pub alpha: f64,
    pub iqim_bits: u32,
    pub snr_db: f64,
    pub sigma: f64,
    pub frames: u64,
    pub seed: u64,
    pub feasible: bool,
    pub note: String,
}

/// One experiment cell's metrics, serializable as a CSV row.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub params: RunParams,
    pub swr_db: f64,
    pub gsnr_empirical: f64,
    pub gsnr_theoretical: f64,
    pub ber: f64,
    pub restore_rmse: f64,
}

/// Version comment plus the fixed column order. Kept stable so downstream
/// plots do not silently reshuffle.
pub const CSV_HEADER: &str = "# lwmark bench csv v1\n\
     scheme,lattice,dim,delta,rate,nesting,alpha,iqim_bits,snr_db,sigma,\
     frames,seed,feasible,note,swr_db,gsnr_empirical,gsnr_theoretical,ber,restore_rmse";

impl MetricsReport {
    pub fn csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            p.scheme,
            p.lattice,
            p.dim,
            p.delta,
            p.rate,
            p.nesting,
            p.alpha,
            p.iqim_bits,
            p.snr_db,
            p.sigma,
            p.frames,
            p.seed,
            p.feasible,
            p.note,
            self.swr_db,
            self.gsnr_empirical,
            self.gsnr_theoretical,
            self.ber,
            self.restore_rmse
        )
    }
}
