//! 4B6B line code. Every codeword carries exactly three ones, so any encoded
//! stream is DC balanced. The table is reproduced in `docs/line_codes.md`.

use super::bits::{check_binary, push_bits, read_bits};
use super::PhyError;

/// Codeword for each nibble value, six chips MSB first.
pub const TABLE_4B6B: [u8; 16] = [
    0b001110, 0b001101, 0b010011, 0b010110, 0b010101, 0b100011, 0b100110, 0b100101, 0b011001,
    0b011010, 0b011100, 0b110001, 0b110010, 0b101001, 0b101010, 0b101100,
];

const INVALID: u8 = 0xFF;

const fn build_inverse() -> [u8; 64] {
    let mut inv = [INVALID; 64];
    let mut i = 0;
    while i < 16 {
        inv[TABLE_4B6B[i] as usize] = i as u8;
        i += 1;
    }
    inv
}

const INVERSE_4B6B: [u8; 64] = build_inverse();

/// Maps nibble values (0..=15) to 6-bit codewords.
pub fn encode_4b6b(nibbles: &[u8]) -> Result<Vec<u8>, PhyError> {
    nibbles
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            TABLE_4B6B
                .get(n as usize)
                .copied()
                .ok_or_else(|| PhyError::InvalidParameter(format!("nibble {n} at {i} exceeds 15")))
        })
        .collect()
}

pub fn decode_4b6b(symbols: &[u8]) -> Result<Vec<u8>, PhyError> {
    symbols
        .iter()
        .enumerate()
        .map(|(position, &s)| match INVERSE_4B6B.get(s as usize) {
            Some(&n) if n != INVALID => Ok(n),
            _ => Err(PhyError::InvalidCodeword {
                position,
                word: s as u16,
            }),
        })
        .collect()
}

/// Bit-level encoder: groups of four bits become six chips.
pub fn encode_4b6b_bits(bits: &[u8]) -> Result<Vec<u8>, PhyError> {
    if !bits.len().is_multiple_of(4) {
        return Err(PhyError::InvalidLength {
            multiple_of: 4,
            got: bits.len(),
        });
    }
    check_binary(bits)?;
    let mut chips = Vec::with_capacity(bits.len() / 4 * 6);
    for group in bits.chunks_exact(4) {
        push_bits(&mut chips, TABLE_4B6B[read_bits(group) as usize] as u16, 6);
    }
    Ok(chips)
}

pub fn decode_4b6b_bits(chips: &[u8]) -> Result<Vec<u8>, PhyError> {
    if !chips.len().is_multiple_of(6) {
        return Err(PhyError::InvalidLength {
            multiple_of: 6,
            got: chips.len(),
        });
    }
    check_binary(chips)?;
    let words: Vec<u8> = chips.chunks_exact(6).map(|c| read_bits(c) as u8).collect();
    let nibbles = decode_4b6b(&words)?;
    let mut bits = Vec::with_capacity(nibbles.len() * 4);
    for n in nibbles {
        push_bits(&mut bits, n as u16, 4);
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn every_codeword_has_weight_three_and_is_distinct() {
        for (i, w) in TABLE_4B6B.iter().enumerate() {
            assert_eq!(w.count_ones(), 3, "codeword for {i}");
            assert!(*w < 64);
        }
        let mut sorted = TABLE_4B6B.to_vec();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
    }

    #[test]
    fn round_trip_all_nibbles() {
        let nibbles: Vec<u8> = (0..16).collect();
        assert_eq!(decode_4b6b(&encode_4b6b(&nibbles).unwrap()).unwrap(), nibbles);
    }

    #[test]
    fn invalid_words_rejected() {
        assert_eq!(
            decode_4b6b(&[0b001110, 0b111111]),
            Err(PhyError::InvalidCodeword { position: 1, word: 0b111111 })
        );
        // every weight-3 word not in the table is also rejected
        for w in 0u8..64 {
            if !TABLE_4B6B.contains(&w) {
                assert!(decode_4b6b(&[w]).is_err(), "{w:#08b}");
            }
        }
        assert!(matches!(decode_4b6b_bits(&[0; 5]), Err(PhyError::InvalidLength { .. })));
        assert!(encode_4b6b(&[16]).is_err());
    }

    proptest! {
        #[test]
        fn bit_round_trip_and_balance(nibbles in proptest::collection::vec(0u8..16, 0..128)) {
            let mut bits = Vec::new();
            for n in &nibbles {
                push_bits(&mut bits, *n as u16, 4);
            }
            let chips = encode_4b6b_bits(&bits).unwrap();
            prop_assert_eq!(chips.len() * 4, bits.len() * 6);
            let ones = chips.iter().filter(|&&c| c == 1).count();
            prop_assert_eq!(2 * ones, chips.len());
            prop_assert_eq!(decode_4b6b_bits(&chips).unwrap(), bits);
        }
    }
}
