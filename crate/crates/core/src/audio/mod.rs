//! Audio clips, framing, and WAV file I/O.
//!
//! Samples are kept in raw amplitude units (PCM16 values stay integers in
//! [-32768, 32767], never normalized), so quantization steps like
//! `Δ = 2000` apply directly. Framing cuts each channel into consecutive
//! `N`-dimensional vectors; leftover samples ride along as an untouched
//! tail, and reassembly is exact.

mod wav;

pub use wav::{read_wav, write_wav};

use crate::error::{Error, Result};
use crate::num::Real;

/// Storage format of a WAV stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    /// 16-bit signed PCM (RIFF format code 1).
    Pcm16,
    /// IEEE 754 binary64 (RIFF format code 3, 64 bits per sample).
    Float64,
}

impl SampleFormat {
    pub fn label(self) -> &'static str {
        match self {
            SampleFormat::Pcm16 => "pcm16",
            SampleFormat::Float64 => "float64",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pcm16" => Ok(SampleFormat::Pcm16),
            "float64" => Ok(SampleFormat::Float64),
            other => Err(Error::invalid(format!("unknown sample format '{other}'"))),
        }
    }
}

/// Decoded audio: interleaved samples plus stream parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    samples: Vec<f64>,
    sample_rate: u32,
    channels: u16,
    source_format: SampleFormat,
}

impl AudioClip {
    pub fn new(
        samples: Vec<f64>,
        sample_rate: u32,
        channels: u16,
        source_format: SampleFormat,
    ) -> Result<Self> {
        if channels == 0 {
            return Err(Error::invalid("clip needs at least one channel"));
        }
        if sample_rate == 0 {
            return Err(Error::invalid("sample rate must be positive"));
        }
        if samples.len() % channels as usize != 0 {
            return Err(Error::invalid(format!(
                "{} interleaved samples do not divide into {} channels",
                samples.len(),
                channels
            )));
        }
        if source_format == SampleFormat::Pcm16 {
            for (i, &s) in samples.iter().enumerate() {
                if s.fract() != 0.0 || !(-32768.0..=32767.0).contains(&s) {
                    return Err(Error::Precision(format!(
                        "sample {i} = {s} is not a 16-bit integer value"
                    )));
                }
            }
        }
        Ok(AudioClip {
            samples,
            sample_rate,
            channels,
            source_format,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    pub fn source_format(&self) -> SampleFormat {
        self.source_format
    }

    pub fn samples_per_channel(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    /// Deinterleaves one channel.
    pub fn channel_samples(&self, channel: u16) -> Result<Vec<f64>> {
        if channel >= self.channels {
            return Err(Error::invalid(format!(
                "channel {channel} out of range 0..{}",
                self.channels
            )));
        }
        let step = self.channels as usize;
        Ok(self
            .samples
            .iter()
            .skip(channel as usize)
            .step_by(step)
            .copied()
            .collect())
    }

    /// Re-interleaves per-channel sample vectors (all equal length).
    pub fn from_channels(
        channels: &[Vec<f64>],
        sample_rate: u32,
        source_format: SampleFormat,
    ) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::invalid("clip needs at least one channel"));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::invalid("channels must have equal lengths"));
        }
        let mut samples = Vec::with_capacity(len * channels.len());
        for i in 0..len {
            for ch in channels {
                samples.push(ch[i]);
            }
        }
        AudioClip::new(samples, sample_rate, channels.len() as u16, source_format)
    }
}

/// A channel's samples cut into consecutive `frame_dim`-vectors plus the
/// leftover tail (fewer than `frame_dim` samples, passed through verbatim).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStream<F> {
    frame_dim: usize,
    frames: Vec<Vec<F>>,
    tail: Vec<F>,
}

impl<F: Real> FrameStream<F> {
    pub fn frame_dim(&self) -> usize {
        self.frame_dim
    }

    pub fn frames(&self) -> &[Vec<F>] {
        &self.frames
    }

    pub fn frames_mut(&mut self) -> &mut [Vec<F>] {
        &mut self.frames
    }

    pub fn tail(&self) -> &[F] {
        &self.tail
    }

    /// Exact inverse of framing: concatenated frames followed by the tail.
    pub fn concat(&self) -> Vec<F> {
        let mut out = Vec::with_capacity(self.frames.len() * self.frame_dim + self.tail.len());
        for f in &self.frames {
            out.extend_from_slice(f);
        }
        out.extend_from_slice(&self.tail);
        out
    }
}

/// Cuts a sample sequence into non-overlapping `n`-vectors.
pub fn frame_samples<F: Real>(samples: &[F], n: usize) -> Result<FrameStream<F>> {
    if n == 0 {
        return Err(Error::invalid("frame dimension must be at least 1"));
    }
    let full = samples.len() / n;
    let mut frames = Vec::with_capacity(full);
    for i in 0..full {
        frames.push(samples[i * n..(i + 1) * n].to_vec());
    }
    Ok(FrameStream {
        frame_dim: n,
        frames,
        tail: samples[full * n..].to_vec(),
    })
}

/// Frames every channel of a clip independently.
pub fn frame_clip(clip: &AudioClip, n: usize) -> Result<Vec<FrameStream<f64>>> {
    (0..clip.channels())
        .map(|c| frame_samples(&clip.channel_samples(c)?, n))
        .collect()
}

/// Reassembles per-channel frame streams into a clip.
pub fn deframe_clip(
    streams: &[FrameStream<f64>],
    sample_rate: u32,
    source_format: SampleFormat,
) -> Result<AudioClip> {
    let channels: Vec<Vec<f64>> = streams.iter().map(|s| s.concat()).collect();
    AudioClip::from_channels(&channels, sample_rate, source_format)
}
