//! Amplify-and-forward and decode-and-forward relays.
//!
//! An AF relay scales the intensity waveform, noise included. A DF relay
//! decodes the payload with the incoming hop's codec and re-encodes it with
//! the outgoing one; it is required where a bipolar RF signal meets a
//! non-negative optical one.

use crate::phy::LinkCodec;

use super::NetError;

/// `g0 · signal`.
pub fn af_relay(signal_level: f64, gain: f64) -> f64 {
    gain * signal_level
}

/// Amplify-and-forward stage applied to whole waveforms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AfRelay {
    pub gain: f64,
}

impl AfRelay {
    pub fn new(gain: f64) -> Result<Self, NetError> {
        if gain >= 0.0 && gain.is_finite() {
            Ok(AfRelay { gain })
        } else {
            Err(NetError::Malformed(format!("amplification gain {gain} must be >= 0")))
        }
    }

    pub fn forward(&self, samples: &[f64]) -> Vec<f64> {
        samples.iter().map(|&s| af_relay(s, self.gain)).collect()
    }
}

/// Decodes `samples` with `incoming` and re-encodes the payload with
/// `outgoing`. Noise does not cross the relay; a decode failure is returned
/// as [`NetError::DecodeFailure`] so the caller can count the packet dropped.
pub fn df_relay(
    samples: &[f64],
    payload_len: usize,
    incoming: &dyn LinkCodec,
    outgoing: &dyn LinkCodec,
) -> Result<Vec<f64>, NetError> {
    let payload = incoming
        .receive(samples, payload_len)
        .map_err(NetError::DecodeFailure)?;
    outgoing.transmit(&payload).map_err(NetError::Phy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phy::catalog::find_mode;
    use crate::phy::{OpticalLink, PhyCodec, RfCodec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn optical(id: &str) -> OpticalLink {
        OpticalLink::new(PhyCodec::new(find_mode(id).unwrap()).unwrap())
    }

    #[test]
    fn af_identity_zero_and_linearity() {
        assert_eq!(af_relay(0.37, 1.0), 0.37);
        assert_eq!(af_relay(0.0, 5.0), 0.0);
        let (a, b, g) = (0.2, 0.7, 3.0);
        assert!((af_relay(a + b, g) - af_relay(a, g) - af_relay(b, g)).abs() < 1e-15);
        assert!(AfRelay::new(-1.0).is_err());
    }

    #[test]
    fn df_rf_to_ld_preserves_payload() {
        let payload = b"W-OWPAN uplink".to_vec();
        let rf = RfCodec;
        let ld = optical("phy2-ook-96m");
        let w = df_relay(&rf.transmit(&payload).unwrap(), payload.len(), &rf, &ld).unwrap();
        assert!(w.iter().all(|&s| s >= 0.0));
        assert_eq!(ld.receive(&w, payload.len()).unwrap(), payload);
    }

    #[test]
    fn chained_df_relays() {
        let payload: Vec<u8> = (0..40).collect();
        let rf = RfCodec;
        let ld = optical("phy2-ook-96m");
        let led = optical("phy1-vppm-124k");
        let hop1 = df_relay(&rf.transmit(&payload).unwrap(), payload.len(), &rf, &ld).unwrap();
        let hop2 = df_relay(&hop1, payload.len(), &ld, &led).unwrap();
        assert_eq!(led.receive(&hop2, payload.len()).unwrap(), payload);
    }

    #[test]
    fn corrupted_input_signals_failure() {
        let payload = b"lost".to_vec();
        let rf = RfCodec;
        let mut w = rf.transmit(&payload).unwrap();
        for s in w.iter_mut().take(64) {
            *s = -*s;
        }
        let out = df_relay(&w, payload.len(), &rf, &optical("phy1-ook-100k"));
        assert!(matches!(out, Err(NetError::DecodeFailure(_))));
    }

    #[test]
    fn df_then_af_within_fec_bound() {
        // DF onto an RS-protected OOK hop, then an AF stage whose noise is
        // below half the swing after gain normalisation.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let payload: Vec<u8> = (0..24).map(|_| rng.random()).collect();
        let rf = RfCodec;
        let hop = optical("phy1-ook-73k");
        let w = df_relay(&rf.transmit(&payload).unwrap(), payload.len(), &rf, &hop).unwrap();
        let noisy: Vec<f64> = w.iter().map(|&s| s + rng.random_range(-0.2..0.2)).collect();
        let amp = AfRelay::new(1.0).unwrap().forward(&noisy);
        assert_eq!(hop.receive(&amp, payload.len()).unwrap(), payload);
    }
}
