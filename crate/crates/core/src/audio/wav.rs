//! RIFF/WAVE reader and writer.
//!
//! Two codecs are supported, both little-endian:
//!
//! * format code 1, 16 bits: signed PCM — the host format;
//! * format code 3, 64 bits: IEEE float64 — the watermarked format, chosen
//!   so the scaled self-noise survives storage bit-exactly.
//!
//! The writer emits the canonical minimal layout: `RIFF` header, a 16-byte
//! `fmt ` chunk, then the `data` chunk, nothing else. The reader tolerates
//! and skips unknown chunks but refuses truncated ones instead of padding.

use std::fs;
use std::path::Path;

use super::{AudioClip, SampleFormat};
use crate::error::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(Error::format(
                self.pos as u64,
                format!(
                    "file truncated reading {what}: need {n} bytes, {} remain",
                    self.bytes.len() - self.pos
                ),
            ));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let b = self.take(2, what)?;
        Ok(u16::from_le_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }
}

struct Fmt {
    format: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

/// Reads a PCM16 or IEEE float64 WAV file losslessly.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let bytes = fs::read(path.as_ref())?;
    parse_wav(&bytes)
}

/// Parses WAV bytes; exposed for in-memory round trips.
pub(crate) fn parse_wav(bytes: &[u8]) -> Result<AudioClip> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "RIFF tag")? != b"RIFF" {
        return Err(Error::format(0, "missing RIFF tag"));
    }
    let _riff_size = cur.u32("RIFF size")?;
    if cur.take(4, "WAVE tag")? != b"WAVE" {
        return Err(Error::format(8, "missing WAVE tag"));
    }

    let mut fmt: Option<Fmt> = None;
    let mut data: Option<&[u8]> = None;
    while cur.pos < bytes.len() {
        let id_offset = cur.pos as u64;
        let id: [u8; 4] = cur.take(4, "chunk id")?.try_into().unwrap();
        let size = cur.u32("chunk size")? as usize;
        match &id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::format(id_offset, "fmt chunk shorter than 16 bytes"));
                }
                let format = cur.u16("format code")?;
                let channels = cur.u16("channel count")?;
                let sample_rate = cur.u32("sample rate")?;
                let _byte_rate = cur.u32("byte rate")?;
                let _block_align = cur.u16("block align")?;
                let bits = cur.u16("bits per sample")?;
                cur.take(size - 16, "fmt extension")?;
                fmt = Some(Fmt {
                    format,
                    channels,
                    sample_rate,
                    bits,
                });
            }
            b"data" => {
                data = Some(cur.take(size, "data chunk payload")?);
            }
            _ => {
                cur.take(size, "chunk payload")?;
            }
        }
        if size % 2 == 1 && cur.pos < bytes.len() {
            cur.take(1, "chunk pad byte")?;
        }
    }

    let fmt = fmt.ok_or_else(|| Error::format(12, "no fmt chunk"))?;
    let data = data.ok_or_else(|| Error::format(12, "no data chunk"))?;
    if fmt.channels == 0 {
        return Err(Error::format(12, "fmt declares zero channels"));
    }

    let (source_format, samples) = match (fmt.format, fmt.bits) {
        (FORMAT_PCM, 16) => {
            if data.len() % 2 != 0 {
                return Err(Error::format(12, "PCM16 data length is odd"));
            }
            let samples = data
                .chunks_exact(2)
                .map(|b| i16::from_le_bytes([b[0], b[1]]) as f64)
                .collect();
            (SampleFormat::Pcm16, samples)
        }
        (FORMAT_IEEE_FLOAT, 64) => {
            if data.len() % 8 != 0 {
                return Err(Error::format(12, "float64 data length not a multiple of 8"));
            }
            let samples = data
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
                .collect();
            (SampleFormat::Float64, samples)
        }
        (f, b) => {
            return Err(Error::format(
                12,
                format!("unsupported codec: format {f}, {b} bits (need PCM16 or float64)"),
            ));
        }
    };

    AudioClip::new(samples, fmt.sample_rate, fmt.channels, source_format)
}

/// Writes a clip in the requested format. PCM16 refuses non-integer or
/// out-of-range samples rather than quantizing them silently.
pub fn write_wav(clip: &AudioClip, path: impl AsRef<Path>, format: SampleFormat) -> Result<()> {
    let bytes = encode_wav(clip, format)?;
    fs::write(path.as_ref(), bytes)?;
    Ok(())
}

pub(crate) fn encode_wav(clip: &AudioClip, format: SampleFormat) -> Result<Vec<u8>> {
    let (code, bits): (u16, u16) = match format {
        SampleFormat::Pcm16 => (FORMAT_PCM, 16),
        SampleFormat::Float64 => (FORMAT_IEEE_FLOAT, 64),
    };
    let mut data: Vec<u8> = Vec::with_capacity(clip.samples().len() * (bits as usize / 8));
    match format {
        SampleFormat::Pcm16 => {
            for (i, &s) in clip.samples().iter().enumerate() {
                if s.fract() != 0.0 {
                    return Err(Error::Precision(format!(
                        "sample {i} = {s} is not an integer; writing it as PCM16 would lose \
                         the embedded information"
                    )));
                }
                if !(-32768.0..=32767.0).contains(&s) {
                    return Err(Error::Precision(format!(
                        "sample {i} = {s} is outside the 16-bit range"
                    )));
                }
                data.extend_from_slice(&(s as i16).to_le_bytes());
            }
        }
        SampleFormat::Float64 => {
            for &s in clip.samples() {
                data.extend_from_slice(&s.to_le_bytes());
            }
        }
    }

    let channels = clip.channels();
    let sample_rate = clip.sample_rate();
    let block_align = channels * (bits / 8);
    let byte_rate = sample_rate * block_align as u32;

    let mut out = Vec::with_capacity(44 + data.len());
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data.len() as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&code.to_le_bytes());
    out.extend_from_slice(&channels.to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(&data);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pcm_clip(samples: Vec<f64>) -> AudioClip {
        AudioClip::new(samples, 44100, 1, SampleFormat::Pcm16).unwrap()
    }

    #[test]
    fn pcm16_round_trip_is_byte_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        let samples: Vec<f64> = (0..4410)
            .map(|_| rng.random_range(-32768..=32767) as f64)
            .collect();
        let clip = pcm_clip(samples);
        let bytes = encode_wav(&clip, SampleFormat::Pcm16).unwrap();
        let back = parse_wav(&bytes).unwrap();
        assert_eq!(back, clip);
        let bytes2 = encode_wav(&back, SampleFormat::Pcm16).unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn one_second_mono_has_sample_rate_samples() {
        let clip = pcm_clip(vec![0.0; 44100]);
        let back = parse_wav(&encode_wav(&clip, SampleFormat::Pcm16).unwrap()).unwrap();
        assert_eq!(back.samples_per_channel(), 44100);
        assert_eq!(back.sample_rate(), 44100);
    }

    #[test]
    fn float64_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        let samples: Vec<f64> = (0..1000)
            .map(|_| rng.random_range(-4e4..4e4) * 1.0000000001)
            .collect();
        let clip = AudioClip::new(samples.clone(), 48000, 2, SampleFormat::Float64).unwrap();
        let back = parse_wav(&encode_wav(&clip, SampleFormat::Float64).unwrap()).unwrap();
        for (a, b) in back.samples().iter().zip(&samples) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn truncated_data_chunk_is_a_format_error() {
        let clip = pcm_clip(vec![1.0; 100]);
        let mut bytes = encode_wav(&clip, SampleFormat::Pcm16).unwrap();
        bytes.truncate(bytes.len() - 17);
        match parse_wav(&bytes) {
            Err(Error::Format { offset, message }) => {
                assert!(offset > 0);
                assert!(message.contains("truncated"), "{message}");
            }
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn garbage_header_is_a_format_error() {
        assert!(matches!(
            parse_wav(b"not a wav file at all............"),
            Err(Error::Format { .. })
        ));
    }

    #[test]
    fn non_integer_samples_refuse_pcm16_encoding() {
        let clip = AudioClip::new(vec![1.5, 2.0], 8000, 1, SampleFormat::Float64).unwrap();
        assert!(matches!(
            encode_wav(&clip, SampleFormat::Pcm16),
            Err(Error::Precision(_))
        ));
        let loud = AudioClip::new(vec![40000.0], 8000, 1, SampleFormat::Float64).unwrap();
        assert!(matches!(
            encode_wav(&loud, SampleFormat::Pcm16),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn empty_clip_is_a_valid_zero_length_wav() {
        let clip = pcm_clip(vec![]);
        let bytes = encode_wav(&clip, SampleFormat::Pcm16).unwrap();
        assert_eq!(bytes.len(), 44);
        let back = parse_wav(&bytes).unwrap();
        assert_eq!(back.samples().len(), 0);
    }

    #[test]
    fn unknown_chunks_are_skipped() {
        let clip = pcm_clip(vec![7.0; 4]);
        let bytes = encode_wav(&clip, SampleFormat::Pcm16).unwrap();
        // Splice a LIST chunk between fmt and data.
        let mut spliced = bytes[..36].to_vec();
        spliced.extend_from_slice(b"LIST");
        spliced.extend_from_slice(&4u32.to_le_bytes());
        spliced.extend_from_slice(b"INFO");
        spliced.extend_from_slice(&bytes[36..]);
        let riff_size = (spliced.len() - 8) as u32;
        spliced[4..8].copy_from_slice(&riff_size.to_le_bytes());
        let back = parse_wav(&spliced).unwrap();
        assert_eq!(back, clip);
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tone.wav");
        let clip = pcm_clip((0..1000).map(|i| (i % 64) as f64).collect());
        write_wav(&clip, &path, SampleFormat::Pcm16).unwrap();
        assert_eq!(read_wav(&path).unwrap(), clip);
    }
}
