//! Improved QIM: a reversible scalar embedding.
//!
//! The host axis is split into macro-intervals of `2^b Δ`. Embedding stores
//! the message in the interval index and keeps the host's position inside
//! the macro-interval, compressed by `2^b`, as the position inside the
//! chosen step — so extraction can rebuild the host exactly from a clean
//! observation. The effective scaling factor is `β = 1 - 2^{-b}`.

use crate::error::{Error, Result};
use crate::num::{real, Real};

/// Parameters of the scalar IQIM scheme.
#[derive(Debug, Clone)]
pub struct IqimConfig<F> {
    step: F,
    bits: u32,
    beta: F,
}

impl<F: Real> IqimConfig<F> {
    pub fn new(step: F, bits: u32) -> Result<Self> {
        if !(step > F::zero()) || !step.is_finite() {
            return Err(Error::invalid("IQIM step must be positive"));
        }
        if bits == 0 || bits > 32 {
            return Err(Error::invalid("IQIM bits per sample must be in 1..=32"));
        }
        // Exact: both 2^-b and 1 - 2^-b are representable.
        let beta = F::one() - real::<F>((-(bits as f64)).exp2());
        Ok(IqimConfig { step, bits, beta })
    }

    pub fn step(&self) -> F {
        self.step
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `β = 1 - 2^{-b}`.
    pub fn beta(&self) -> F {
        self.beta
    }

    pub fn symbols(&self) -> u64 {
        1u64 << self.bits
    }

    fn span(&self) -> F {
        real::<F>((self.bits as f64).exp2()) * self.step
    }

    /// Embeds `m ∈ [0, 2^b)` into one sample: with `γ = ⌊s / 2^bΔ⌋` and
    /// `r = s - 2^b γ Δ`, the output is `2^b γ Δ + m Δ + r / 2^b`.
    pub fn embed(&self, s: F, m: u64) -> Result<F> {
        if m >= self.symbols() {
            return Err(Error::invalid(format!(
                "IQIM symbol {m} out of range 0..{}",
                self.symbols()
            )));
        }
        let span = self.span();
        let gamma = (s / span).floor();
        let r = s - gamma * span;
        Ok(gamma * span + real::<F>(m as f64) * self.step + r / real((self.bits as f64).exp2()))
    }

    /// Recovers `(m̂, ŝ)` from an observation: `γ_w = ⌊y/Δ⌋`,
    /// `r_w = y - γ_w Δ`, `m̂ = γ_w mod 2^b`, `ŝ = 2^b ⌊γ_w/2^b⌋ Δ + 2^b r_w`.
    pub fn extract(&self, y: F) -> (u64, F) {
        let gamma_w = (y / self.step).floor();
        let r_w = y - gamma_w * self.step;
        let gw = gamma_w.to_f64().expect("finite interval index") as i64;
        let sym = self.symbols() as i64;
        let m = gw.rem_euclid(sym) as u64;
        let macro_idx = gw.div_euclid(sym);
        let pow = real::<F>((self.bits as f64).exp2());
        let s_hat = real::<F>(macro_idx as f64) * pow * self.step + pow * r_w;
        (m, s_hat)
    }

    /// Coordinate-wise embedding of a message vector.
    pub fn embed_vec(&self, s: &[F], m: &[u64]) -> Result<Vec<F>> {
        if s.len() != m.len() {
            return Err(Error::invalid(format!(
                "host has {} samples but message has {} symbols",
                s.len(),
                m.len()
            )));
        }
        s.iter()
            .zip(m)
            .map(|(&si, &mi)| self.embed(si, mi))
            .collect()
    }

    /// Coordinate-wise extraction.
    pub fn extract_vec(&self, y: &[F]) -> (Vec<u64>, Vec<F>) {
        let mut symbols = Vec::with_capacity(y.len());
        let mut hosts = Vec::with_capacity(y.len());
        for &yi in y {
            let (m, s) = self.extract(yi);
            symbols.push(m);
            hosts.push(s);
        }
        (symbols, hosts)
    }
}
