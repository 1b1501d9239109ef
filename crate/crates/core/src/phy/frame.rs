//! Full PHY I/II transmit and receive chains.
//!
//! Outer RS blocks are zero-padded to `k` symbols; GF(16) codes carry two
//! symbols per byte (high nibble first), GF(256) codes one. The whole outer
//! output is one terminated convolutional block. Line codes that work on
//! groups (4B6B, 8B10B) get zero fill up to the group size. Every stage
//! length follows from the payload length alone, so the receiver strips the
//! padding without side information.

use super::bits::{bits_to_bytes, bytes_to_bits, chips_to_hex, push_bits, read_bits};
use super::catalog::{Fec, LineCode, Modulation, PhyMode};
use super::conv::{cc_encode, viterbi_decode, CcRate, CONSTRAINT_LENGTH};
use super::eightb10b::{decode_8b10b_chips, encode_8b10b_chips};
use super::fourb6b::{decode_4b6b_bits, encode_4b6b_bits};
use super::manchester::{manchester_decode, manchester_encode};
use super::modulation::{
    ook_demodulate, ook_modulate, vppm_demodulate, vppm_modulate, HIGH_LEVEL, SAMPLES_PER_CLOCK,
};
use super::rs::ReedSolomon;
use super::PhyError;

/// An encoded frame: line-coded chips ready for modulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub mode_id: String,
    pub payload_len: usize,
    pub chips: Vec<u8>,
}

impl Frame {
    /// Hex dump, 64 chips per line.
    pub fn to_hex(&self) -> String {
        chips_to_hex(&self.chips)
    }
}

/// Encoder/decoder for one PHY I/II operating mode.
#[derive(Debug, Clone)]
pub struct PhyCodec {
    mode: PhyMode,
    outer: Option<ReedSolomon>,
    inner: Option<CcRate>,
}

impl PhyCodec {
    pub fn new(mode: &PhyMode) -> Result<Self, PhyError> {
        if !mode.has_codec() {
            return Err(PhyError::Unsupported(format!(
                "mode {} is catalog-only (PHY {})",
                mode.id, mode.phy
            )));
        }
        let outer = match &mode.outer_fec {
            Fec::None => None,
            Fec::Rs {
                n,
                k,
                symbol_bits: 4,
            } => Some(ReedSolomon::gf16(*n, *k)?),
            Fec::Rs {
                n,
                k,
                symbol_bits: 8,
            } => Some(ReedSolomon::gf256(*n, *k)?),
            other => {
                return Err(PhyError::Unsupported(format!(
                    "mode {}: outer code {other} has no codec",
                    mode.id
                )))
            }
        };
        let inner = match &mode.inner_fec {
            Fec::None => None,
            Fec::Cc(rate) => Some(*rate),
            other => {
                return Err(PhyError::Unsupported(format!(
                    "mode {}: inner code {other} has no codec",
                    mode.id
                )))
            }
        };
        if !matches!(mode.modulation, Modulation::Ook | Modulation::Vppm) {
            return Err(PhyError::Unsupported(format!(
                "mode {}: modulation {} has no codec",
                mode.id, mode.modulation
            )));
        }
        Ok(PhyCodec {
            mode: mode.clone(),
            outer,
            inner,
        })
    }

    pub fn mode(&self) -> &PhyMode {
        &self.mode
    }

    /// Bits after the outer code.
    fn outer_len(&self, payload_len: usize) -> usize {
        match &self.outer {
            None => payload_len * 8,
            Some(rs) => {
                let symbols = payload_len * 8 / rs.symbol_bits() as usize;
                symbols.div_ceil(rs.k()) * rs.n() * rs.symbol_bits() as usize
            }
        }
    }

    /// Bits after the inner code.
    fn inner_len(&self, payload_len: usize) -> usize {
        let bits = self.outer_len(payload_len);
        let Some(rate) = self.inner else {
            return bits;
        };
        let steps = bits + CONSTRAINT_LENGTH - 1;
        match rate {
            CcRate::OneQuarter => 4 * steps,
            CcRate::OneThird => 3 * steps,
            CcRate::TwoThirds => steps / 2 * 3 + (steps % 2) * 2,
        }
    }

    fn group(&self) -> usize {
        match self.mode.line_code {
            LineCode::FourB6B => 4,
            LineCode::EightB10B => 8,
            _ => 1,
        }
    }

    pub fn encode(&self, payload: &[u8]) -> Result<Frame, PhyError> {
        let mut bits = match &self.outer {
            None => bytes_to_bits(payload),
            Some(rs) => {
                let m = rs.symbol_bits();
                let symbols: Vec<u16> = match m {
                    4 => payload
                        .iter()
                        .flat_map(|&b| [(b >> 4) as u16, (b & 0x0F) as u16])
                        .collect(),
                    _ => payload.iter().map(|&b| b as u16).collect(),
                };
                let mut out = Vec::with_capacity(self.outer_len(payload.len()));
                for block in symbols.chunks(rs.k()) {
                    let mut data = block.to_vec();
                    data.resize(rs.k(), 0);
                    for s in rs.encode(&data)? {
                        push_bits(&mut out, s, m);
                    }
                }
                out
            }
        };
        if let Some(rate) = self.inner {
            bits = cc_encode(&bits, rate)?;
        }
        bits.resize(bits.len().next_multiple_of(self.group()), 0);
        let chips = match self.mode.line_code {
            LineCode::Manchester => manchester_encode(&bits)?,
            LineCode::FourB6B => encode_4b6b_bits(&bits)?,
            LineCode::EightB10B => encode_8b10b_chips(&bits_to_bytes(&bits)?),
            LineCode::None => bits,
            LineCode::HalfRate => {
                return Err(PhyError::Unsupported(format!(
                    "mode {}: half-rate line code has no codec",
                    self.mode.id
                )))
            }
        };
        Ok(Frame {
            mode_id: self.mode.id.clone(),
            payload_len: payload.len(),
            chips,
        })
    }

    pub fn decode(&self, frame: &Frame) -> Result<Vec<u8>, PhyError> {
        if frame.mode_id != self.mode.id {
            return Err(PhyError::InvalidParameter(format!(
                "frame for mode {} given to codec for {}",
                frame.mode_id, self.mode.id
            )));
        }
        let mut bits = match self.mode.line_code {
            LineCode::Manchester => manchester_decode(&frame.chips)?,
            LineCode::FourB6B => decode_4b6b_bits(&frame.chips)?,
            LineCode::EightB10B => bytes_to_bits(&decode_8b10b_chips(&frame.chips)?),
            LineCode::None => frame.chips.clone(),
            LineCode::HalfRate => {
                return Err(PhyError::Unsupported(format!(
                    "mode {}: half-rate line code has no codec",
                    self.mode.id
                )))
            }
        };
        let inner_len = self.inner_len(frame.payload_len);
        if bits.len() != inner_len.next_multiple_of(self.group()) {
            return Err(PhyError::InvalidLength {
                multiple_of: inner_len.next_multiple_of(self.group()).max(1),
                got: bits.len(),
            });
        }
        bits.truncate(inner_len);
        if let Some(rate) = self.inner {
            bits = viterbi_decode(&bits, rate)?;
        }
        match &self.outer {
            None => bits_to_bytes(&bits),
            Some(rs) => {
                let m = rs.symbol_bits() as usize;
                let mut symbols = Vec::with_capacity(bits.len() / m);
                for (block, word) in bits.chunks(rs.n() * m).enumerate() {
                    let codeword: Vec<u16> = word.chunks(m).map(read_bits).collect();
                    let decoded = rs.decode(&codeword).map_err(|e| match e {
                        PhyError::Uncorrectable { .. } => PhyError::Uncorrectable { block },
                        other => other,
                    })?;
                    symbols.extend(decoded.data);
                }
                let bytes: Vec<u8> = match m {
                    4 => symbols
                        .chunks(2)
                        .map(|p| ((p[0] << 4) | p.get(1).copied().unwrap_or(0)) as u8)
                        .collect(),
                    _ => symbols.iter().map(|&s| s as u8).collect(),
                };
                Ok(bytes[..frame.payload_len].to_vec())
            }
        }
    }

    /// Waveform samples of a frame. `dimming` sets the VPPM duty cycle and is
    /// ignored for OOK.
    pub fn modulate(&self, frame: &Frame, dimming: f64) -> Result<Vec<f64>, PhyError> {
        match self.mode.modulation {
            Modulation::Ook => ook_modulate(&frame.chips),
            Modulation::Vppm => vppm_modulate(&frame.chips, dimming),
            _ => unreachable!("checked in PhyCodec::new"),
        }
    }

    /// Recovers a frame from waveform samples. OOK slices at half the high
    /// level.
    pub fn demodulate(&self, samples: &[f64], payload_len: usize) -> Result<Frame, PhyError> {
        let chips = match self.mode.modulation {
            Modulation::Ook => ook_demodulate(samples, HIGH_LEVEL / 2.0)?,
            Modulation::Vppm => vppm_demodulate(samples)?,
            _ => unreachable!("checked in PhyCodec::new"),
        };
        Ok(Frame {
            mode_id: self.mode.id.clone(),
            payload_len,
            chips,
        })
    }
}

/// CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF).
pub fn crc16_ccitt(data: &[u8]) -> u16 {
    let mut crc: u16 = 0xFFFF;
    for &b in data {
        crc ^= (b as u16) << 8;
        for _ in 0..8 {
            crc = if crc & 0x8000 != 0 {
                (crc << 1) ^ 0x1021
            } else {
                crc << 1
            };
        }
    }
    crc
}

fn append_crc(payload: &[u8]) -> Vec<u8> {
    let mut out = payload.to_vec();
    out.extend_from_slice(&crc16_ccitt(payload).to_be_bytes());
    out
}

fn strip_crc(mut data: Vec<u8>) -> Result<Vec<u8>, PhyError> {
    if data.len() < 2 {
        return Err(PhyError::InvalidLength {
            multiple_of: 1,
            got: data.len(),
        });
    }
    let tail = data.split_off(data.len() - 2);
    let got = u16::from_be_bytes([tail[0], tail[1]]);
    let expected = crc16_ccitt(&data);
    if got != expected {
        return Err(PhyError::ChecksumMismatch { expected, got });
    }
    Ok(data)
}

/// A hop's waveform interface: payload bytes in, samples out, and back.
/// Frames carry a trailing CRC-16 so corruption the FEC cannot repair is
/// detected instead of silently forwarded.
pub trait LinkCodec {
    fn transmit(&self, payload: &[u8]) -> Result<Vec<f64>, PhyError>;
    fn receive(&self, samples: &[f64], payload_len: usize) -> Result<Vec<u8>, PhyError>;
}

/// A PHY codec at a fixed VPPM dimming level.
#[derive(Debug, Clone)]
pub struct OpticalLink {
    pub codec: PhyCodec,
    pub dimming: f64,
}

impl OpticalLink {
    pub fn new(codec: PhyCodec) -> Self {
        OpticalLink {
            codec,
            dimming: 0.5,
        }
    }
}

impl LinkCodec for OpticalLink {
    fn transmit(&self, payload: &[u8]) -> Result<Vec<f64>, PhyError> {
        let frame = self.codec.encode(&append_crc(payload))?;
        self.codec.modulate(&frame, self.dimming)
    }

    fn receive(&self, samples: &[f64], payload_len: usize) -> Result<Vec<u8>, PhyError> {
        let frame = self.codec.demodulate(samples, payload_len + 2)?;
        strip_crc(self.codec.decode(&frame)?)
    }
}

/// Bipolar baseband for the RF hop: bit 1 is `+1`, bit 0 is `-1`, four
/// samples per bit. Unlike the optical waveforms the signal takes both signs,
/// which is why the RF/optical boundary needs decode-and-forward.
#[derive(Debug, Clone, Copy, Default)]
pub struct RfCodec;

impl LinkCodec for RfCodec {
    fn transmit(&self, payload: &[u8]) -> Result<Vec<f64>, PhyError> {
        Ok(bytes_to_bits(&append_crc(payload))
            .into_iter()
            .flat_map(|b| std::iter::repeat_n(if b == 1 { 1.0 } else { -1.0 }, SAMPLES_PER_CLOCK))
            .collect())
    }

    fn receive(&self, samples: &[f64], payload_len: usize) -> Result<Vec<u8>, PhyError> {
        let expected = (payload_len + 2) * 8 * SAMPLES_PER_CLOCK;
        if samples.len() != expected {
            return Err(PhyError::InvalidLength {
                multiple_of: expected.max(1),
                got: samples.len(),
            });
        }
        let bits = samples
            .chunks_exact(SAMPLES_PER_CLOCK)
            .enumerate()
            .map(|(position, s)| {
                let sum: f64 = s.iter().sum();
                if sum > 0.0 {
                    Ok(1)
                } else if sum < 0.0 {
                    Ok(0)
                } else {
                    Err(PhyError::AmbiguousSymbol { position })
                }
            })
            .collect::<Result<Vec<u8>, _>>()?;
        strip_crc(bits_to_bytes(&bits)?)
    }
}
