//! Constraint-length-7 convolutional codes and a hard-decision Viterbi
//! decoder.
//!
//! | rate | generators (octal)   | notes                                   |
//! |------|----------------------|-----------------------------------------|
//! | 1/4  | 117, 127, 155, 171   |                                         |
//! | 1/3  | 133, 171, 165        | mother code for 2/3                     |
//! | 2/3  | 133, 171, 165        | punctured, keep `[1 1; 1 0; 0 0]`       |
//!
//! Every encoded block is terminated with six zero tail bits so the decoder
//! ends in state zero.

use super::bits::check_binary;
use super::PhyError;

pub const CONSTRAINT_LENGTH: usize = 7;
const TAIL: usize = CONSTRAINT_LENGTH - 1;
const STATES: usize = 1 << TAIL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CcRate {
    OneQuarter,
    OneThird,
    TwoThirds,
}

impl CcRate {
    pub fn ratio(self) -> f64 {
        match self {
            CcRate::OneQuarter => 0.25,
            CcRate::OneThird => 1.0 / 3.0,
            CcRate::TwoThirds => 2.0 / 3.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CcRate::OneQuarter => "1/4",
            CcRate::OneThird => "1/3",
            CcRate::TwoThirds => "2/3",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        match s {
            "1/4" => Some(CcRate::OneQuarter),
            "1/3" => Some(CcRate::OneThird),
            "2/3" => Some(CcRate::TwoThirds),
            _ => None,
        }
    }

    fn generators(self) -> &'static [u8] {
        match self {
            CcRate::OneQuarter => &[0o117, 0o127, 0o155, 0o171],
            CcRate::OneThird | CcRate::TwoThirds => &[0o133, 0o171, 0o165],
        }
    }

    /// Which mother-code outputs are transmitted at trellis step `t`.
    fn kept(self, t: usize, output: usize) -> bool {
        match self {
            CcRate::TwoThirds => matches!((t % 2, output), (0, 0) | (0, 1) | (1, 0)),
            _ => true,
        }
    }
}

#[inline]
fn parity(x: u8) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Mother-code outputs for `state` (last six inputs, newest in bit 5) and
/// input `bit`.
#[inline]
fn outputs(generators: &[u8], state: usize, bit: u8) -> impl Iterator<Item = u8> + '_ {
    let reg = (bit << TAIL) | state as u8;
    generators.iter().map(move |&g| parity(reg & g))
}

/// Encodes `bits` plus the zero tail.
pub fn cc_encode(bits: &[u8], rate: CcRate) -> Result<Vec<u8>, PhyError> {
    check_binary(bits)?;
    let gens = rate.generators();
    let mut out = Vec::with_capacity(((bits.len() + TAIL) as f64 / rate.ratio()).ceil() as usize);
    let mut state = 0usize;
    for (t, &b) in bits.iter().chain(std::iter::repeat_n(&0u8, TAIL)).enumerate() {
        for (i, o) in outputs(gens, state, b).enumerate() {
            if rate.kept(t, i) {
                out.push(o);
            }
        }
        state = ((b as usize) << (TAIL - 1)) | (state >> 1);
    }
    Ok(out)
}

/// Number of trellis steps that produce `coded_len` transmitted bits.
fn steps_for(coded_len: usize, rate: CcRate) -> Option<usize> {
    match rate {
        CcRate::OneQuarter => coded_len.is_multiple_of(4).then_some(coded_len / 4),
        CcRate::OneThird => coded_len.is_multiple_of(3).then_some(coded_len / 3),
        CcRate::TwoThirds => match coded_len % 3 {
            0 => Some(coded_len / 3 * 2),
            2 => Some(coded_len / 3 * 2 + 1),
            _ => None,
        },
    }
}

/// Maximum-likelihood (Hamming metric) decode of a terminated block.
/// Punctured positions are treated as erasures.
pub fn viterbi_decode(coded: &[u8], rate: CcRate) -> Result<Vec<u8>, PhyError> {
    check_binary(coded)?;
    let steps = steps_for(coded.len(), rate)
        .filter(|&s| s >= TAIL)
        .ok_or(PhyError::InvalidLength {
            multiple_of: match rate {
                CcRate::OneQuarter => 4,
                _ => 3,
            },
            got: coded.len(),
        })?;
    let gens = rate.generators();
    let outputs_per_step = gens.len();

    // Depuncture: None marks an erasure.
    let mut received: Vec<Option<u8>> = Vec::with_capacity(steps * outputs_per_step);
    let mut it = coded.iter();
    for t in 0..steps {
        for i in 0..outputs_per_step {
            received.push(if rate.kept(t, i) { it.next().copied() } else { None });
        }
    }

    // Branch outputs for every (state, input), packed as bits.
    let mut branch = [[0u8; 2]; STATES];
    for (state, entry) in branch.iter_mut().enumerate() {
        for bit in 0..2u8 {
            entry[bit as usize] = outputs(gens, state, bit).fold(0u8, |acc, o| (acc << 1) | o);
        }
    }

    const UNREACHED: u32 = u32::MAX / 2;
    let mut metric = [UNREACHED; STATES];
    metric[0] = 0;
    // decisions[t][next_state] = predecessor state
    let mut decisions: Vec<[u8; STATES]> = Vec::with_capacity(steps);

    for t in 0..steps {
        let rx = &received[t * outputs_per_step..(t + 1) * outputs_per_step];
        let mut next = [UNREACHED; STATES];
        let mut from = [0u8; STATES];
        for state in 0..STATES {
            let m = metric[state];
            if m >= UNREACHED {
                continue;
            }
            for bit in 0..2u8 {
                if t >= steps - TAIL && bit == 1 {
                    continue;
                }
                let expected = branch[state][bit as usize];
                let mut cost = 0u32;
                for (i, r) in rx.iter().enumerate() {
                    if let Some(r) = r {
                        let e = (expected >> (outputs_per_step - 1 - i)) & 1;
                        cost += (e != *r) as u32;
                    }
                }
                let ns = ((bit as usize) << (TAIL - 1)) | (state >> 1);
                let candidate = m + cost;
                // ties resolved towards the lower predecessor state
                if candidate < next[ns] {
                    next[ns] = candidate;
                    from[ns] = state as u8;
                }
            }
        }
        metric = next;
        decisions.push(from);
    }

    let mut state = 0usize;
    let mut bits = vec![0u8; steps];
    for t in (0..steps).rev() {
        bits[t] = ((state >> (TAIL - 1)) & 1) as u8;
        state = decisions[t][state] as usize;
    }
    bits.truncate(steps - TAIL);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const RATES: [CcRate; 3] = [CcRate::OneQuarter, CcRate::OneThird, CcRate::TwoThirds];

    fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<u8> {
        (0..n).map(|_| rng.random_range(0..2u8)).collect()
    }

    #[test]
    fn zero_in_zero_out() {
        for rate in RATES {
            let out = cc_encode(&[0; 40], rate).unwrap();
            assert!(out.iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn expansion_lengths() {
        assert_eq!(cc_encode(&[1; 10], CcRate::OneQuarter).unwrap().len(), 64);
        assert_eq!(cc_encode(&[1; 10], CcRate::OneThird).unwrap().len(), 48);
        // 16 steps -> 8 pairs -> 24 bits
        assert_eq!(cc_encode(&[1; 10], CcRate::TwoThirds).unwrap().len(), 24);
        // 17 steps -> 8 pairs + 1 -> 26 bits
        assert_eq!(cc_encode(&[1; 11], CcRate::TwoThirds).unwrap().len(), 26);
    }

    #[test]
    fn noiseless_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for rate in RATES {
            for len in [0, 1, 2, 7, 128, 129] {
                let bits = random_bits(&mut rng, len);
                let coded = cc_encode(&bits, rate).unwrap();
                assert_eq!(viterbi_decode(&coded, rate).unwrap(), bits, "{rate:?} len {len}");
            }
        }
    }

    #[test]
    fn impulse_response_matches_generators() {
        // A single 1 followed by zeros emits each generator's taps in turn.
        let out = cc_encode(&[1], CcRate::OneQuarter).unwrap();
        let gens = [0o117u8, 0o127, 0o155, 0o171];
        for t in 0..CONSTRAINT_LENGTH {
            for (i, g) in gens.iter().enumerate() {
                let tap = (g >> (TAIL - t)) & 1;
                assert_eq!(out[t * 4 + i], tap, "step {t} generator {i}");
            }
        }
    }

    #[test]
    fn single_flipped_bit_corrected_at_quarter_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bits = random_bits(&mut rng, 128);
        let coded = cc_encode(&bits, CcRate::OneQuarter).unwrap();
        for pos in 0..coded.len() {
            let mut rx = coded.clone();
            rx[pos] ^= 1;
            assert_eq!(viterbi_decode(&rx, CcRate::OneQuarter).unwrap(), bits, "flip at {pos}");
        }
    }

    #[test]
    fn several_scattered_errors_corrected() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for rate in [CcRate::OneQuarter, CcRate::OneThird] {
            for _ in 0..20 {
                let bits = random_bits(&mut rng, 200);
                let mut rx = cc_encode(&bits, rate).unwrap();
                // errors spaced far apart relative to the constraint length
                let stride = rx.len() / 4;
                for k in 0..4 {
                    rx[k * stride + rng.random_range(0..8)] ^= 1;
                }
                assert_eq!(viterbi_decode(&rx, rate).unwrap(), bits);
            }
        }
    }

    #[test]
    fn bad_lengths_rejected() {
        assert!(viterbi_decode(&[0; 5], CcRate::OneQuarter).is_err());
        assert!(viterbi_decode(&[0; 4], CcRate::TwoThirds).is_err());
        assert!(viterbi_decode(&[0; 8], CcRate::OneQuarter).is_err());
        assert!(cc_encode(&[2], CcRate::OneThird).is_err());
    }
}
