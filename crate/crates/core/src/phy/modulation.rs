//! Intensity modulation: OOK and VPPM at four samples per optical clock
//! period. Every waveform is real and non-negative.
//!
//! A VPPM symbol holds one pulse whose width is the dimming fraction of the
//! period: bit 0 places it at the start of the period, bit 1 at the end.
//! Samples are the fraction of each sample interval covered by the pulse, so
//! the mean level equals the dimming fraction exactly.

use super::bits::check_binary;
use super::PhyError;

pub const SAMPLES_PER_CLOCK: usize = 4;

/// On level of both modulations; off is 0.
pub const HIGH_LEVEL: f64 = 1.0;

pub fn ook_modulate(chips: &[u8]) -> Result<Vec<f64>, PhyError> {
    check_binary(chips)?;
    Ok(chips
        .iter()
        .flat_map(|&c| std::iter::repeat_n(c as f64 * HIGH_LEVEL, SAMPLES_PER_CLOCK))
        .collect())
}

/// Integrate-and-dump slicer: each chip's mean sample is compared with
/// `threshold`.
pub fn ook_demodulate(samples: &[f64], threshold: f64) -> Result<Vec<u8>, PhyError> {
    if !samples.len().is_multiple_of(SAMPLES_PER_CLOCK) {
        return Err(PhyError::InvalidLength {
            multiple_of: SAMPLES_PER_CLOCK,
            got: samples.len(),
        });
    }
    Ok(samples
        .chunks_exact(SAMPLES_PER_CLOCK)
        .map(|s| {
            let mean = s.iter().sum::<f64>() / SAMPLES_PER_CLOCK as f64;
            (mean > threshold) as u8
        })
        .collect())
}

fn check_dimming(dimming: f64) -> Result<(), PhyError> {
    if dimming > 0.0 && dimming < 1.0 {
        Ok(())
    } else {
        Err(PhyError::InvalidParameter(format!(
            "dimming {dimming} must lie in (0, 1)"
        )))
    }
}

/// Samples of one VPPM symbol.
fn vppm_symbol(bit: u8, dimming: f64) -> [f64; SAMPLES_PER_CLOCK] {
    let width = dimming * SAMPLES_PER_CLOCK as f64;
    let (start, end) = if bit == 0 {
        (0.0, width)
    } else {
        (SAMPLES_PER_CLOCK as f64 - width, SAMPLES_PER_CLOCK as f64)
    };
    let mut out = [0.0; SAMPLES_PER_CLOCK];
    for (k, s) in out.iter_mut().enumerate() {
        let lo = (k as f64).max(start);
        let hi = ((k + 1) as f64).min(end);
        *s = (hi - lo).max(0.0) * HIGH_LEVEL;
    }
    out
}

pub fn vppm_modulate(bits: &[u8], dimming: f64) -> Result<Vec<f64>, PhyError> {
    check_dimming(dimming)?;
    check_binary(bits)?;
    Ok(bits.iter().flat_map(|&b| vppm_symbol(b, dimming)).collect())
}

/// Decides each symbol by comparing the energy of its two halves.
pub fn vppm_demodulate(samples: &[f64]) -> Result<Vec<u8>, PhyError> {
    if !samples.len().is_multiple_of(SAMPLES_PER_CLOCK) {
        return Err(PhyError::InvalidLength {
            multiple_of: SAMPLES_PER_CLOCK,
            got: samples.len(),
        });
    }
    let half = SAMPLES_PER_CLOCK / 2;
    samples
        .chunks_exact(SAMPLES_PER_CLOCK)
        .enumerate()
        .map(|(position, s)| {
            let early: f64 = s[..half].iter().sum();
            let late: f64 = s[half..].iter().sum();
            if early > late {
                Ok(0)
            } else if late > early {
                Ok(1)
            } else {
                Err(PhyError::AmbiguousSymbol { position })
            }
        })
        .collect()
}
