//! Lattice-based reversible audio watermarking.
//!
//! The crate implements three embedding schemes over nested lattice codes:
//!
//! * **QIM** — classic one-bit scalar quantization index modulation (not
//!   reversible, the robustness baseline).
//! * **IQIM** — improved QIM, a reversible scalar scheme that keeps a
//!   compressed copy of the quantization residue.
//! * **MME** — meet-in-the-middle embedding: the host vector is quantized
//!   onto the coset of its message and the quantization error is scaled and
//!   added back, so the receiver can undo the embedding exactly while the
//!   message stays decodable under bounded noise.
//!
//! Supporting machinery: exact CVP decoders for the `Z^N`, `A2`, `D3`, `D4`
//! and `E8` lattices, coset enumeration and labeling for nested pairs, an
//! AWGN attack channel, SWR/GSNR/BER metrics, WAV I/O (PCM16 and IEEE
//! float64), and a sweep harness that emits deterministic CSV reports.
//!
//! All numeric kernels are generic over the scalar type via [`Real`]
//! (`f32` or `f64`); the audio/file pipeline is fixed to `f64`, which is the
//! precision the reversibility guarantees are stated for. Concrete aliases
//! for both precisions live at the crate root.

pub mod audio;
pub mod bench;
pub mod channel;
pub mod error;
pub mod host;
pub mod lattice;
pub mod metrics;
pub mod nested;
pub mod num;
pub mod pipeline;
pub mod schemes;

pub use error::{Error, Result};
pub use num::Real;

pub use channel::{snr_to_sigma, AwgnChannel};
pub use lattice::{GeneratorMatrix, Lattice, LatticeKind, LatticePoint};
pub use nested::{CosetTable, NestedPair, NestingMatrix};
pub use schemes::iqim::IqimConfig;
pub use schemes::mme::{
    alpha_lower_bound, alpha_lower_bound_self_similar, alpha_upper_bound, EmbedResult, MmeConfig,
    RestoreResult,
};

/// `f64` instantiations — the precision used by the audio pipeline.
pub type Lattice64 = lattice::Lattice<f64>;
pub type LatticePoint64 = lattice::LatticePoint<f64>;
pub type GeneratorMatrix64 = lattice::GeneratorMatrix<f64>;
pub type NestedPair64 = nested::NestedPair<f64>;
pub type CosetTable64 = nested::CosetTable<f64>;
pub type MmeConfig64 = schemes::mme::MmeConfig<f64>;
pub type IqimConfig64 = schemes::iqim::IqimConfig<f64>;
pub type AwgnChannel64 = channel::AwgnChannel<f64>;

/// `f32` instantiations, for callers that trade accuracy for footprint.
pub type Lattice32 = lattice::Lattice<f32>;
pub type LatticePoint32 = lattice::LatticePoint<f32>;
pub type GeneratorMatrix32 = lattice::GeneratorMatrix<f32>;
pub type NestedPair32 = nested::NestedPair<f32>;
pub type CosetTable32 = nested::CosetTable<f32>;
pub type MmeConfig32 = schemes::mme::MmeConfig<f32>;
pub type IqimConfig32 = schemes::iqim::IqimConfig<f32>;
pub type AwgnChannel32 = channel::AwgnChannel<f32>;
