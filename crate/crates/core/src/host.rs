//! Synthetic host generators for desk-scale experiments.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::audio::{AudioClip, SampleFormat};
use crate::error::{Error, Result};
use crate::lattice::Lattice;

/// Host distribution used by the bench harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HostSpec {
    /// Uniform over `per_axis` coarse cells along each basis direction
    /// (exactly flat modulo the coarse lattice — the distribution the
    /// closed-form distortion expressions assume).
    Cells { per_axis: u32 },
    /// Uniform over the axis box `[-half_width, half_width)^N`,
    /// independent of the embedding parameters.
    Box { half_width: f64 },
}

impl HostSpec {
    /// Parses `cells:<K>` or `box:<half-width>`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        if let Some(k) = t.strip_prefix("cells:") {
            let per_axis: u32 = k
                .parse()
                .map_err(|_| Error::invalid(format!("bad cell count in host spec '{s}'")))?;
            if per_axis == 0 {
                return Err(Error::invalid("host cell count must be >= 1"));
            }
            return Ok(HostSpec::Cells { per_axis });
        }
        if let Some(w) = t.strip_prefix("box:") {
            let half_width: f64 = w
                .parse()
                .map_err(|_| Error::invalid(format!("bad half-width in host spec '{s}'")))?;
            if !(half_width > 0.0) {
                return Err(Error::invalid("host box half-width must be positive"));
            }
            return Ok(HostSpec::Box { half_width });
        }
        Err(Error::invalid(format!(
            "unknown host spec '{s}' (expected cells:<K> or box:<W>)"
        )))
    }

    pub fn label(&self) -> String {
        match self {
            HostSpec::Cells { per_axis } => format!("cells:{per_axis}"),
            HostSpec::Box { half_width } => format!("box:{half_width}"),
        }
    }
}

/// One host frame uniform over `cells` fundamental parallelepipeds of the
/// lattice, centered on the origin. Exactly uniform modulo the lattice for
/// any cell count.
pub fn uniform_cell_frame(lattice: &Lattice<f64>, cells: u32, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let k = cells as f64;
    let z: Vec<f64> = (0..lattice.dimension())
        .map(|_| rng.random_range(-k / 2.0..k / 2.0))
        .collect();
    lattice.generator().mul_vec(&z)
}

/// One host frame uniform over `[-half_width, half_width)^dim`.
pub fn uniform_box_frame(dim: usize, half_width: f64, rng: &mut ChaCha12Rng) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.random_range(-half_width..half_width))
        .collect()
}

/// Deterministic multi-tone PCM16 clip: a sum of sinusoids rounded to
/// integers, with a small per-channel phase offset so channels differ.
/// The amplitude sum must stay inside the 16-bit range.
pub fn multi_tone_clip(
    sample_rate: u32,
    seconds: f64,
    channels: u16,
    tones: &[(f64, f64)],
) -> Result<AudioClip> {
    if tones.is_empty() {
        return Err(Error::invalid("need at least one tone"));
    }
    let amp_sum: f64 = tones.iter().map(|&(_, a)| a.abs()).sum();
    if amp_sum > 32767.0 {
        return Err(Error::invalid(format!(
            "tone amplitudes sum to {amp_sum}, beyond the 16-bit range"
        )));
    }
    let n = (seconds * sample_rate as f64).round() as usize;
    let mut per_channel: Vec<Vec<f64>> = Vec::with_capacity(channels as usize);
    for c in 0..channels {
        let phase0 = c as f64 * 0.7;
        let samples: Vec<f64> = (0..n)
            .map(|t| {
                let time = t as f64 / sample_rate as f64;
                let v: f64 = tones
                    .iter()
                    .map(|&(freq, amp)| amp * (2.0 * std::f64::consts::PI * freq * time + phase0).sin())
                    .sum();
                v.round()
            })
            .collect();
        per_channel.push(samples);
    }
    AudioClip::from_channels(&per_channel, sample_rate, SampleFormat::Pcm16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeKind;
    use rand::SeedableRng;

    #[test]
    fn host_spec_parsing() {
        assert_eq!(HostSpec::parse("cells:16").unwrap(), HostSpec::Cells { per_axis: 16 });
        assert_eq!(
            HostSpec::parse("box:8000").unwrap(),
            HostSpec::Box { half_width: 8000.0 }
        );
        assert!(HostSpec::parse("cells:0").is_err());
        assert!(HostSpec::parse("triangle:3").is_err());
    }

    #[test]
    fn cell_frames_are_flat_modulo_the_lattice() {
        // The reduced second moment must match the cell's closed form.
        let lat = Lattice::new(LatticeKind::Zn(1), 4.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mut acc = 0.0;
        let n = 200_000;
        for _ in 0..n {
            let u = uniform_cell_frame(&lat, 3, &mut rng);
            let m = lat.modulo(&u).unwrap();
            acc += m[0] * m[0];
        }
        let expect = 16.0 / 12.0;
        assert!((acc / n as f64 - expect).abs() / expect < 0.02);
    }

    #[test]
    fn multi_tone_is_deterministic_integer_pcm() {
        let a = multi_tone_clip(8000, 0.5, 2, &[(440.0, 900.0), (1000.0, 700.0)]).unwrap();
        let b = multi_tone_clip(8000, 0.5, 2, &[(440.0, 900.0), (1000.0, 700.0)]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.samples_per_channel(), 4000);
        assert!(a.samples().iter().all(|s| s.fract() == 0.0));
        assert_ne!(
            a.channel_samples(0).unwrap(),
            a.channel_samples(1).unwrap()
        );
    }

    #[test]
    fn too_loud_tones_are_rejected() {
        assert!(multi_tone_clip(8000, 0.1, 1, &[(440.0, 33000.0)]).is_err());
    }
}
