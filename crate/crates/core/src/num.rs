//! Scalar abstraction for the numeric kernels.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the lattice and scheme math is generic over.
///
/// `f64` is the reference precision: the reversibility contracts (restored
/// hosts within `1e-9`, PCM16 byte-identity) are stated for it. The `f32`
/// instantiation uses proportionally looser internal tolerances.
pub trait Real: Float + FromPrimitive + NumAssign + Sum<Self> + Debug + Display + 'static {
    /// Mantissa length of the storage format, in bits (23 for `f32`, 52 for
    /// `f64`). Drives the default overflow bound on the MME scaling factor.
    const MANTISSA_BITS: u32;

    /// Residual tolerance for "solve, round, compare" lattice membership
    /// checks, in amplitude units.
    fn membership_tol() -> Self;
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = 52;

    fn membership_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    const MANTISSA_BITS: u32 = 23;

    fn membership_tol() -> Self {
        1e-3
    }
}

/// Shorthand for lifting an `f64` literal into the generic scalar.
#[inline]
pub(crate) fn real<F: Real>(x: f64) -> F {
    F::from_f64(x).expect("f64 literal representable in scalar type")
}
