//! Manchester line code: bit 0 -> chips `01`, bit 1 -> chips `10`.

use super::bits::check_binary;
use super::PhyError;

pub fn manchester_encode(bits: &[u8]) -> Result<Vec<u8>, PhyError> {
    check_binary(bits)?;
    let mut chips = Vec::with_capacity(bits.len() * 2);
    for &b in bits {
        chips.push(b);
        chips.push(1 - b);
    }
    Ok(chips)
}

pub fn manchester_decode(chips: &[u8]) -> Result<Vec<u8>, PhyError> {
    if !chips.len().is_multiple_of(2) {
        return Err(PhyError::InvalidLength {
            multiple_of: 2,
            got: chips.len(),
        });
    }
    chips
        .chunks_exact(2)
        .enumerate()
        .map(|(i, pair)| match (pair[0], pair[1]) {
            (0, 1) => Ok(0),
            (1, 0) => Ok(1),
            (a, b) if a > 1 || b > 1 => Err(PhyError::NotBinary { position: 2 * i }),
            _ => Err(PhyError::InvalidChipPair { position: 2 * i }),
        })
        .collect()
}
