//! Bit/byte packing helpers, MSB first.

use super::PhyError;

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for shift in (0..8).rev() {
            out.push((b >> shift) & 1);
        }
    }
    out
}

/// Packs bits into bytes. The length must be a multiple of 8.
pub fn bits_to_bytes(bits: &[u8]) -> Result<Vec<u8>, PhyError> {
    if !bits.len().is_multiple_of(8) {
        return Err(PhyError::InvalidLength {
            multiple_of: 8,
            got: bits.len(),
        });
    }
    check_binary(bits)?;
    Ok(bits
        .chunks_exact(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
        .collect())
}

/// Appends the low `width` bits of `value`, MSB first.
pub fn push_bits(out: &mut Vec<u8>, value: u16, width: u32) {
    for shift in (0..width).rev() {
        out.push(((value >> shift) & 1) as u8);
    }
}

/// Reads `bits` (MSB first) as an integer.
pub fn read_bits(bits: &[u8]) -> u16 {
    bits.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16)
}

pub fn check_binary(bits: &[u8]) -> Result<(), PhyError> {
    match bits.iter().position(|&b| b > 1) {
        Some(position) => Err(PhyError::NotBinary { position }),
        None => Ok(()),
    }
}

/// Hex dump of a chip stream, 64 chips per line. Four chips form one hex
/// digit, first chip in the most significant position; a trailing partial
/// digit is padded with zero chips.
pub fn chips_to_hex(chips: &[u8]) -> String {
    let mut out = String::with_capacity(chips.len() / 4 + chips.len() / 64 + 1);
    for line in chips.chunks(64) {
        for nibble in line.chunks(4) {
            let mut v = 0u8;
            for i in 0..4 {
                v = (v << 1) | nibble.get(i).copied().unwrap_or(0);
            }
            out.push(char::from_digit(v as u32, 16).unwrap_or('0'));
        }
        out.push('\n');
    }
    out
}
