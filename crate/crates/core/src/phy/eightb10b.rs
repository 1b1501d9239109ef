//! 8b/10b line code (data characters only) with running-disparity control.
//!
//! A byte `HGFEDCBA` is split into `EDCBA` (5b/6b sub-block `abcdei`) and
//! `HGF` (3b/4b sub-block `fghj`). Symbols are 10-bit values with `a` in
//! bit 9 and `j` in bit 0, and are transmitted `a` first.

use std::sync::OnceLock;

use super::bits::{check_binary, push_bits, read_bits};
use super::PhyError;

/// Running disparity at a symbol boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RunningDisparity {
    #[default]
    Negative,
    Positive,
}

impl RunningDisparity {
    fn flipped(self) -> Self {
        match self {
            RunningDisparity::Negative => RunningDisparity::Positive,
            RunningDisparity::Positive => RunningDisparity::Negative,
        }
    }

    fn index(self) -> usize {
        match self {
            RunningDisparity::Negative => 0,
            RunningDisparity::Positive => 1,
        }
    }
}

/// `abcdei` for RD- and RD+ indexed by `EDCBA`.
const TABLE_5B6B: [(u8, u8); 32] = [
    (0b100111, 0b011000),
    (0b011101, 0b100010),
    (0b101101, 0b010010),
    (0b110001, 0b110001),
    (0b110101, 0b001010),
    (0b101001, 0b101001),
    (0b011001, 0b011001),
    (0b111000, 0b000111),
    (0b111001, 0b000110),
    (0b100101, 0b100101),
    (0b010101, 0b010101),
    (0b110100, 0b110100),
    (0b001101, 0b001101),
    (0b101100, 0b101100),
    (0b011100, 0b011100),
    (0b010111, 0b101000),
    (0b011011, 0b100100),
    (0b100011, 0b100011),
    (0b010011, 0b010011),
    (0b110010, 0b110010),
    (0b001011, 0b001011),
    (0b101010, 0b101010),
    (0b011010, 0b011010),
    (0b111010, 0b000101),
    (0b110011, 0b001100),
    (0b100110, 0b100110),
    (0b010110, 0b010110),
    (0b110110, 0b001001),
    (0b001110, 0b001110),
    (0b101110, 0b010001),
    (0b011110, 0b100001),
    (0b101011, 0b010100),
];

/// `fghj` for RD- and RD+ indexed by `HGF` (primary D.x.7).
const TABLE_3B4B: [(u8, u8); 8] = [
    (0b1011, 0b0100),
    (0b1001, 0b1001),
    (0b0101, 0b0101),
    (0b1100, 0b0011),
    (0b1101, 0b0010),
    (0b1010, 0b1010),
    (0b0110, 0b0110),
    (0b1110, 0b0001),
];

/// Alternate D.x.A7 sub-block, avoiding a run of five equal bits.
const ALT_7: (u8, u8) = (0b0111, 0b1000);

fn pick(pair: (u8, u8), rd: RunningDisparity) -> u8 {
    match rd {
        RunningDisparity::Negative => pair.0,
        RunningDisparity::Positive => pair.1,
    }
}

fn disparity(word: u8, width: u32) -> i32 {
    2 * word.count_ones() as i32 - width as i32
}

/// Encodes one byte, returning the 10-bit symbol and the running disparity
/// after it.
pub fn encode_symbol(byte: u8, rd: RunningDisparity) -> (u16, RunningDisparity) {
    let x = (byte & 0x1F) as usize;
    let y = (byte >> 5) as usize;

    let six = pick(TABLE_5B6B[x], rd);
    let rd = if disparity(six, 6) != 0 { rd.flipped() } else { rd };

    let use_alt = y == 7
        && match rd {
            RunningDisparity::Negative => matches!(x, 17 | 18 | 20),
            RunningDisparity::Positive => matches!(x, 11 | 13 | 14),
        };
    let four = if use_alt {
        pick(ALT_7, rd)
    } else {
        pick(TABLE_3B4B[y], rd)
    };
    let rd = if disparity(four, 4) != 0 { rd.flipped() } else { rd };

    (((six as u16) << 4) | four as u16, rd)
}

struct DecodeTables {
    /// `[rd][symbol] -> (byte, rd after)`.
    entries: [Vec<Option<(u8, RunningDisparity)>>; 2],
}

fn decode_tables() -> &'static DecodeTables {
    static TABLES: OnceLock<DecodeTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut entries = [vec![None; 1024], vec![None; 1024]];
        for rd in [RunningDisparity::Negative, RunningDisparity::Positive] {
            for byte in 0..=255u8 {
                let (sym, next) = encode_symbol(byte, rd);
                entries[rd.index()][sym as usize] = Some((byte, next));
            }
        }
        DecodeTables { entries }
    })
}

/// Decodes one symbol under running disparity `rd`.
pub fn decode_symbol(
    symbol: u16,
    rd: RunningDisparity,
    position: usize,
) -> Result<(u8, RunningDisparity), PhyError> {
    let tables = decode_tables();
    let idx = symbol as usize;
    if idx >= 1024 {
        return Err(PhyError::InvalidCodeword {
            position,
            word: symbol,
        });
    }
    if let Some(hit) = tables.entries[rd.index()][idx] {
        return Ok(hit);
    }
    if tables.entries[rd.flipped().index()][idx].is_some() {
        Err(PhyError::DisparityViolation { position })
    } else {
        Err(PhyError::InvalidCodeword {
            position,
            word: symbol,
        })
    }
}

pub fn encode_8b10b(bytes: &[u8], rd: RunningDisparity) -> (Vec<u16>, RunningDisparity) {
    let mut rd = rd;
    let symbols = bytes
        .iter()
        .map(|&b| {
            let (sym, next) = encode_symbol(b, rd);
            rd = next;
            sym
        })
        .collect();
    (symbols, rd)
}

pub fn decode_8b10b(
    symbols: &[u16],
    rd: RunningDisparity,
) -> Result<(Vec<u8>, RunningDisparity), PhyError> {
    let mut rd = rd;
    let mut out = Vec::with_capacity(symbols.len());
    for (i, &s) in symbols.iter().enumerate() {
        let (byte, next) = decode_symbol(s, rd, i)?;
        out.push(byte);
        rd = next;
    }
    Ok((out, rd))
}

/// Encodes bytes into a chip stream, starting from RD-.
pub fn encode_8b10b_chips(bytes: &[u8]) -> Vec<u8> {
    let (symbols, _) = encode_8b10b(bytes, RunningDisparity::Negative);
    let mut chips = Vec::with_capacity(symbols.len() * 10);
    for s in symbols {
        push_bits(&mut chips, s, 10);
    }
    chips
}

/// Decodes a chip stream produced by [`encode_8b10b_chips`].
pub fn decode_8b10b_chips(chips: &[u8]) -> Result<Vec<u8>, PhyError> {
    if !chips.len().is_multiple_of(10) {
        return Err(PhyError::InvalidLength {
            multiple_of: 10,
            got: chips.len(),
        });
    }
    check_binary(chips)?;
    let symbols: Vec<u16> = chips.chunks_exact(10).map(read_bits).collect();
    decode_8b10b(&symbols, RunningDisparity::Negative).map(|(bytes, _)| bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Gate-level Widmer-Franaszek encoder for data characters, an
    /// implementation independent of the lookup tables above. Returns bits
    /// `a..j` and the output running disparity (`true` = positive).
    fn widmer_franaszek(byte: u8, rd_pos: bool) -> ([bool; 10], bool) {
        let bit = |i: u32| (byte >> i) & 1 == 1;
        let (a, b, c, d, e, f, g, h) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5), bit(6), bit(7));
        let k = false;

        let a_xor_b = a ^ b;
        let c_xor_d = c ^ d;
        let a_and_b = a & b;
        let c_and_d = c & d;
        let na_nb = !a & !b;
        let nc_nd = !c & !d;

        let l22 = (a_and_b & nc_nd) | (c_and_d & na_nb) | (a_xor_b & c_xor_d);
        let l40 = a_and_b & c_and_d;
        let l04 = na_nb & nc_nd;
        let l13 = (a_xor_b & nc_nd) | (c_xor_d & na_nb);
        let l31 = (a_xor_b & c_and_d) | (c_xor_d & a_and_b);

        let f_xor_g = f ^ g;
        let f_and_g = f & g;
        let nf_ng = !f & !g;

        let s = (rd_pos & l31 & d & !e) | (!rd_pos & l13 & !d & e);
        let t0 = l13 & d & e;

        let pdm1s6 = t0 | (!l22 & !l31 & !e);
        let nd0s6 = pdm1s6;
        let pd0s6 = (e & !l22 & !l13) | k;
        let ndm1s6 = (l31 & !d & !e) | pd0s6;
        let ndm1s4 = f_and_g;
        let nd0s4 = nf_ng;
        let pdm1s4 = nf_ng | (f_xor_g & k);
        let pd0s4 = f_and_g & h;

        let compls6 = (ndm1s6 & rd_pos) | (!rd_pos & pdm1s6);
        let ndl6 = (pd0s6 & !compls6) | (compls6 & nd0s6) | (!nd0s6 & !pd0s6 & rd_pos);
        let compls4 = (ndm1s4 & ndl6) | (!ndl6 & pdm1s4);
        let rd_out = (ndl6 & !pd0s4 & !nd0s4) | (nd0s4 & compls4) | (!compls4 & pd0s4);

        let n0 = a;
        let n1 = (!l40 & b) | l04;
        let n2 = l04 | c | t0;
        let n3 = d & !l40;
        let n4 = (!t0 & e) | (!e & l13);
        let n5 = (!e & l22) | (l22 & k) | (l04 & e) | (e & l40) | (e & l13 & !d);

        let t1 = (s & f_and_g & h) | (f_and_g & h & k);
        let n6 = !(!f | t1);
        let n7 = g | (nf_ng & !h);
        let n8 = h;
        let n9 = t1 | (f_xor_g & !h);

        (
            [
                n0 ^ compls6,
                n1 ^ compls6,
                n2 ^ compls6,
                n3 ^ compls6,
                n4 ^ compls6,
                n5 ^ compls6,
                n6 ^ compls4,
                n7 ^ compls4,
                n8 ^ compls4,
                n9 ^ compls4,
            ],
            rd_out,
        )
    }

    #[test]
    fn matches_gate_level_encoder_exhaustively() {
        for rd in [RunningDisparity::Negative, RunningDisparity::Positive] {
            for byte in 0..=255u8 {
                let (sym, next) = encode_symbol(byte, rd);
                let (gates, rd_out) = widmer_franaszek(byte, rd == RunningDisparity::Positive);
                let expected = gates.iter().fold(0u16, |acc, &b| (acc << 1) | b as u16);
                assert_eq!(sym, expected, "byte {byte:#04x} rd {rd:?}");
                assert_eq!(next == RunningDisparity::Positive, rd_out, "rd after {byte:#04x}");
            }
        }
    }

    #[test]
    fn known_vectors() {
        // D.0.0 from RD-: 100111 0100
        assert_eq!(encode_symbol(0x00, RunningDisparity::Negative).0, 0b1001110100);
        // D.21.5 is fully balanced in both states
        assert_eq!(encode_symbol(0xB5, RunningDisparity::Negative).0, 0b1010101010);
        assert_eq!(encode_symbol(0xB5, RunningDisparity::Positive).0, 0b1010101010);
    }

    #[test]
    fn exhaustive_round_trip_both_disparities() {
        for rd in [RunningDisparity::Negative, RunningDisparity::Positive] {
            for byte in 0..=255u8 {
                let (sym, next) = encode_symbol(byte, rd);
                let w = sym.count_ones();
                assert!((4..=6).contains(&w));
                assert_eq!(decode_symbol(sym, rd, 0).unwrap(), (byte, next));
                // disparity bounded: the symbol moves RD only between -1 and +1
                match (rd, w) {
                    (RunningDisparity::Negative, 4) | (RunningDisparity::Positive, 6) => {
                        panic!("disparity would leave bounds for {byte:#04x}")
                    }
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn run_length_at_most_five() {
        let bytes: Vec<u8> = (0..=255u8).chain((0..=255u8).rev()).collect();
        let chips = encode_8b10b_chips(&bytes);
        let mut run = 1;
        for w in chips.windows(2) {
            run = if w[0] == w[1] { run + 1 } else { 1 };
            assert!(run <= 5);
        }
    }

    #[test]
    fn expansion_ratio() {
        let bytes = vec![0x5Au8; 64];
        let chips = encode_8b10b_chips(&bytes);
        assert_eq!(chips.len() as f64 / (bytes.len() * 8) as f64, 1.25);
    }

    #[test]
    fn corrupted_symbol_reports_position() {
        let bytes = [0x10u8, 0x20, 0x30, 0x40];
        let (mut symbols, _) = encode_8b10b(&bytes, RunningDisparity::Negative);
        symbols[2] = 0b1111100000;
        assert_eq!(
            decode_8b10b(&symbols, RunningDisparity::Negative),
            Err(PhyError::InvalidCodeword { position: 2, word: 0b1111100000 })
        );
    }

    #[test]
    fn disparity_violation_detected() {
        // D.0.0 encoded under RD+ is not valid when the decoder expects RD-.
        let (sym, _) = encode_symbol(0x00, RunningDisparity::Positive);
        assert_eq!(
            decode_symbol(sym, RunningDisparity::Negative, 5),
            Err(PhyError::DisparityViolation { position: 5 })
        );
    }

    #[test]
    fn running_disparity_stays_bounded_on_streams() {
        let bytes: Vec<u8> = (0..4096u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8).collect();
        let chips = encode_8b10b_chips(&bytes);
        let mut rd = -1i32;
        for sym in chips.chunks_exact(10) {
            let ones = sym.iter().filter(|&&c| c == 1).count() as i32;
            rd += 2 * ones - 10;
            assert!(rd == -1 || rd == 1, "rd {rd}");
        }
        assert_eq!(decode_8b10b_chips(&chips).unwrap(), bytes);
    }
}
