//! One-bit scalar quantization index modulation.
//!
//! The host sample moves to the nearest point of the message's dithered
//! grid: bit 0 lives on `-Δ/4 + ΔZ`, bit 1 on `Δ/4 + ΔZ`. Decoding picks
//! the grid closer to the observation and is correct while the noise stays
//! below `Δ/4`. Not reversible — the quantization residue is discarded.

use crate::num::{real, Real};

#[inline]
fn dither<F: Real>(bit: bool, step: F) -> F {
    let q = step / real(4.0);
    if bit {
        q
    } else {
        -q
    }
}

#[inline]
fn floor_quantize<F: Real>(x: F, step: F) -> F {
    step * (x / step).floor()
}

/// Embeds one bit: `Q(s - d_m) + d_m` with the floor quantizer
/// `Q(x) = Δ ⌊x/Δ⌋`.
pub fn embed<F: Real>(s: F, bit: bool, step: F) -> F {
    let d = dither(bit, step);
    floor_quantize(s - d, step) + d
}

/// Distance from `y` to the bit's grid.
fn coset_distance<F: Real>(y: F, bit: bool, step: F) -> F {
    let r = y - dither(bit, step);
    (r - step * (r / step).round()).abs()
}

/// Minimum-distance decoder over the two grids; an exact tie decodes as 0.
pub fn decode<F: Real>(y: F, step: F) -> bool {
    coset_distance(y, true, step) < coset_distance(y, false, step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embed_moves_sample_onto_message_grid() {
        // Hand evaluation with Δ = 1: Q(0.3 - 0.25) + 0.25 = 0.25 for bit 1,
        // Q(0.3 + 0.25) - 0.25 = -0.25 for bit 0.
        assert_eq!(embed(0.3, true, 1.0), 0.25);
        assert_eq!(embed(0.3, false, 1.0), -0.25);
    }

    #[test]
    fn grid_points_are_fixed_points() {
        assert_eq!(embed(-0.25, false, 1.0), -0.25);
        assert_eq!(embed(0.25, true, 1.0), 0.25);
        assert_eq!(embed(3.25, true, 1.0), 3.25);
    }

    #[test]
    fn decode_is_correct_below_quarter_step_noise() {
        let step = 1.0;
        for k in -50..50 {
            let n = k as f64 * 0.2499 / 50.0;
            assert!(decode(0.25 + n, step));
            assert!(!decode(-0.25 + n, step));
        }
    }

    #[test]
    fn decode_matches_bruteforce_nearest_point_scan() {
        // Independent route: enumerate grid points of both messages in a
        // window and pick the nearest (ties to bit 0).
        let step = 1.0;
        let brute = |y: f64| -> bool {
            let mut best = (f64::INFINITY, false);
            for bit in [false, true] {
                let d = if bit { 0.25 } else { -0.25 };
                for k in -10..=10 {
                    let p = d + k as f64 * step;
                    let dist = (y - p).abs();
                    if dist < best.0 {
                        best = (dist, bit);
                    }
                }
            }
            best.1
        };
        let mut y = -2.0;
        while y <= 2.0 {
            assert_eq!(decode(y, step), brute(y), "at y = {y}");
            y += 0.01;
        }
    }

    #[test]
    fn round_trip_recovers_bit_noiselessly() {
        for i in 0..1000 {
            let s = (i as f64) * 0.013 - 6.5;
            for bit in [false, true] {
                assert_eq!(decode(embed(s, bit, 2000.0), 2000.0), bit);
            }
        }
    }
}
