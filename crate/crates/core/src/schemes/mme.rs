//! Meet-in-the-middle embedding (MME).
//!
//! Embedding quantizes the host vector onto the coset of its message and
//! adds the quantization error back, scaled by `1 - α`:
//!
//! ```text
//! w = Q_i(s) + (1 - α)(s - Q_i(s)) = α Q_i(s) + (1 - α) s
//! ```
//!
//! With `α` high enough, the scaled error stays inside the fine lattice's
//! Voronoi cell, so quantizing `w` to the fine lattice recovers `Q_i(s)`
//! exactly: the receiver can both decode the message and invert the map —
//! the scheme is reversible. With `α` too close to 1 the scaled error falls
//! below the storage format's resolution, which destroys reversibility the
//! other way; both limits are enforced at configuration time.

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::nested::{CosetTable, NestedPair};
use crate::num::{real, Real};

/// General lower bound on the scaling factor:
/// `α ≥ 1 - r_pack(Λf) / r_cov(Λc)`.
///
/// Shrinking the coarse cell by `1 - α` must fit it inside the fine cell;
/// comparing the coarse covering sphere against the fine packed sphere is
/// sufficient for any nesting.
pub fn alpha_lower_bound<F: Real>(pair: &NestedPair<F>) -> F {
    F::one() - pair.fine().r_pack() / pair.coarse().r_cov()
}

/// Tighter lower bound for self-similar nesting `Λc = Γ Λf`:
/// `α ≥ 1 - 1/Γ`. `None` when the nesting is not self-similar.
pub fn alpha_lower_bound_self_similar<F: Real>(pair: &NestedPair<F>) -> Option<F> {
    pair.nesting()
        .self_similar_factor()
        .map(|gamma| F::one() - F::one() / real(gamma as f64))
}

/// The weakest valid lower bound for this pair: the self-similar bound when
/// it applies (shrinking a cell by `1/Γ` keeps it inside itself), otherwise
/// the general radius bound.
pub fn alpha_feasible_lower_bound<F: Real>(pair: &NestedPair<F>) -> F {
    alpha_lower_bound_self_similar(pair).unwrap_or_else(|| alpha_lower_bound(pair))
}

/// Upper bound `α ≤ 1 - 2^{-(L+1)}` for a storage format with `L` mantissa
/// bits: any closer to 1 and the scaled error can underflow the
/// representable resolution, overflowing the reversible range.
pub fn alpha_upper_bound<F: Real>(mantissa_bits: u32) -> F {
    F::one() - real::<F>((-(mantissa_bits as f64 + 1.0)).exp2())
}

/// Validated MME parameters: a nested pair, its coset table, and a scaling
/// factor inside the feasible interval.
#[derive(Debug, Clone)]
pub struct MmeConfig<F> {
    pair: NestedPair<F>,
    table: CosetTable<F>,
    alpha: F,
    mantissa_bits: u32,
}

/// Outcome of one embedding.
#[derive(Debug, Clone)]
pub struct EmbedResult<F> {
    /// The watermarked vector `α Q_i(s) + (1 - α) s`.
    pub watermarked: Vec<F>,
    /// The embedded message index.
    pub coset_index: u64,
    /// Self-noise `e = s - Q_i(s)` (unscaled).
    pub self_noise: Vec<F>,
}

/// Outcome of one extraction.
#[derive(Debug, Clone)]
pub struct RestoreResult<F> {
    /// Restored host estimate; exact for a clean observation, otherwise
    /// off by `n / (1 - α)`.
    pub host_estimate: Vec<F>,
    /// Decoded message index (always produced, minimum-distance).
    pub message_index: u64,
    /// Conservative diagnostic: the observation's fine-lattice residual is
    /// within the packing radius, the ball on which decoding is provably
    /// correct. A `false` does not prove failure.
    pub composite_noise_ok: bool,
}

impl<F: Real> MmeConfig<F> {
    /// Builds a configuration with the scalar type's own mantissa length
    /// (52 for `f64`) as the storage assumption.
    pub fn new(pair: NestedPair<F>, table: CosetTable<F>, alpha: F) -> Result<Self> {
        Self::with_mantissa_bits(pair, table, alpha, F::MANTISSA_BITS)
    }

    /// Builds a configuration for a storage format with `mantissa_bits`
    /// of mantissa.
    pub fn with_mantissa_bits(
        pair: NestedPair<F>,
        table: CosetTable<F>,
        alpha: F,
        mantissa_bits: u32,
    ) -> Result<Self> {
        if table.len() as u64 != pair.coset_count() {
            return Err(Error::config(format!(
                "coset table has {} entries, pair has {} cosets",
                table.len(),
                pair.coset_count()
            )));
        }
        if !alpha.is_finite() || alpha <= F::zero() || alpha >= F::one() {
            return Err(Error::config(format!(
                "scaling factor must lie strictly inside (0, 1), got {alpha}"
            )));
        }
        let lower = alpha_feasible_lower_bound(&pair);
        if alpha < lower {
            return Err(Error::config(format!(
                "scaling factor {alpha} is below the reversibility bound {lower}"
            )));
        }
        let upper = alpha_upper_bound::<F>(mantissa_bits);
        if alpha > upper {
            return Err(Error::config(format!(
                "scaling factor {alpha} exceeds the overflow bound {upper} \
                 for {mantissa_bits} mantissa bits"
            )));
        }
        Ok(MmeConfig {
            pair,
            table,
            alpha,
            mantissa_bits,
        })
    }

    pub fn pair(&self) -> &NestedPair<F> {
        &self.pair
    }

    pub fn table(&self) -> &CosetTable<F> {
        &self.table
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn mantissa_bits(&self) -> u32 {
        self.mantissa_bits
    }

    pub fn dimension(&self) -> usize {
        self.pair.dimension()
    }

    /// Message indices per frame (`det J`).
    pub fn coset_count(&self) -> u64 {
        self.pair.coset_count()
    }

    /// Embeds message index `i` into host frame `s`.
    pub fn embed(&self, s: &[F], index: u64) -> Result<EmbedResult<F>> {
        let q = self.pair.quantize_to_coset(&self.table, index, s)?;
        let one_minus = F::one() - self.alpha;
        let mut watermarked = Vec::with_capacity(s.len());
        let mut self_noise = Vec::with_capacity(s.len());
        for (&si, &qi) in s.iter().zip(&q) {
            let e = si - qi;
            self_noise.push(e);
            watermarked.push(qi + one_minus * e);
        }
        #[cfg(debug_assertions)]
        {
            // Scaled self-noise must stay inside the fine Voronoi cell.
            let scaled: Vec<F> = watermarked.iter().zip(&q).map(|(&w, &qi)| w - qi).collect();
            let dec = self.pair.fine().cvp(&scaled)?;
            debug_assert!(
                dec.coords().iter().all(|&c| c == F::zero()),
                "scaled self-noise escaped the fine cell"
            );
        }
        Ok(EmbedResult {
            watermarked,
            coset_index: index,
            self_noise,
        })
    }

    /// Restores the host estimate and decodes the message from an
    /// observation `y`.
    pub fn extract(&self, y: &[F]) -> Result<RestoreResult<F>> {
        let fine_point = self.pair.fine().cvp(y)?;
        Ok(self.extract_with_fine_point(y, &fine_point))
    }

    fn extract_with_fine_point(&self, y: &[F], fine_point: &LatticePoint<F>) -> RestoreResult<F> {
        let one_minus = F::one() - self.alpha;
        let mut host = Vec::with_capacity(y.len());
        let mut residual_sq = F::zero();
        for (&yi, &qi) in y.iter().zip(fine_point.coords()) {
            let r = yi - qi;
            residual_sq = residual_sq + r * r;
            host.push(r / one_minus + qi);
        }
        let message_index = self.pair.decode_fine_point(fine_point.coords());
        let guard = self.pair.fine().r_pack() * (F::one() + real(1e-9));
        RestoreResult {
            host_estimate: host,
            message_index,
            composite_noise_ok: residual_sq.sqrt() <= guard,
        }
    }
}
