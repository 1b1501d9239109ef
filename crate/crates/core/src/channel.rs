//! Deterministic channel gains for the two optical hops of a W-OWPAN.
//!
//! The indoor hop is an LED broadcasting to user-device photodiodes through a
//! line-of-sight path plus a diffuse (wall-reflected) component. The outdoor
//! hop is a collimated laser beam between two access points, attenuated by the
//! atmosphere and partly captured by a finite detector aperture.
//!
//! All quantities are SI: metres, square metres, seconds, hertz, radians.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::fmt;

use num_complex::Complex64;

/// Relative mismatch between the configured divergence and the one implied
/// by waist and wavelength above which a warning is raised.
pub const DIVERGENCE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// A parameter lies outside its admissible range.
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::OutOfRange {
                name,
                value,
                expected,
            } => write!(f, "{name} = {value} is out of range (expected {expected})"),
        }
    }
}

impl std::error::Error for ChannelError {}

/// Dimensionless optical power ratio of a link, always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ChannelGain(f64);

impl ChannelGain {
    pub const ZERO: ChannelGain = ChannelGain(0.0);
    pub const UNITY: ChannelGain = ChannelGain(1.0);

    /// Wraps a power ratio, rejecting values outside `[0, 1]` and NaN.
    pub fn new(value: f64) -> Result<Self, ChannelError> {
        if (0.0..=1.0).contains(&value) {
            Ok(ChannelGain(value))
        } else {
            Err(ChannelError::OutOfRange {
                name: "channel_gain",
                value,
                expected: "[0, 1]",
            })
        }
    }

    /// Clamps a raw model output into `[0, 1]`. Near-field evaluations of the
    /// far-field formulas can exceed unity; NaN maps to zero.
    pub fn saturating(value: f64) -> Self {
        if value.is_nan() {
            ChannelGain(0.0)
        } else {
            ChannelGain(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl std::ops::Mul for ChannelGain {
    type Output = ChannelGain;

    fn mul(self, rhs: ChannelGain) -> ChannelGain {
        ChannelGain(self.0 * rhs.0)
    }
}

/// Geometry and front-end parameters of the indoor LED-to-photodiode link.
#[derive(Debug, Clone, PartialEq)]
pub struct IndoorChannelParams {
    /// Half-intensity (semi-angle at half power) of the LED, rad.
    pub half_intensity_angle: f64,
    /// Angle of incidence at the photodiode, rad.
    pub incidence_angle: f64,
    /// Angle of irradiance at the LED, rad.
    pub irradiance_angle: f64,
    /// Photodiode effective area, m².
    pub pd_area: f64,
    /// Room floor area, m².
    pub room_area: f64,
    /// Average wall reflectivity in `[0, 1)`.
    pub wall_reflectivity: f64,
    /// LED-to-photodiode distance, m.
    pub distance: f64,
    /// Line-of-sight path delay, s.
    pub los_delay: f64,
    /// Diffuse path delay, s.
    pub nlos_delay: f64,
    /// 3 dB cutoff of the diffuse low-pass response, Hz.
    pub cutoff_frequency: f64,
    /// Photodiode responsivity, A/W.
    pub responsivity: f64,
}

impl Default for IndoorChannelParams {
    fn default() -> Self {
        IndoorChannelParams {
            #[allow(clippy::approx_constant)]
            half_intensity_angle: 0.5236,
            incidence_angle: 1.2217,
            irradiance_angle: 1.7453,
            pd_area: 26e-6,
            room_area: 25.0,
            wall_reflectivity: 0.7,
            distance: 2.5,
            los_delay: 0.01e-9,
            nlos_delay: 0.03e-9,
            cutoff_frequency: 1.7111e6,
            responsivity: 0.8,
        }
    }
}

impl IndoorChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        check_open_interval(
            "half_intensity_angle",
            self.half_intensity_angle,
            0.0,
            FRAC_PI_2,
            "(0, pi/2) rad",
        )?;
        check_finite("incidence_angle", self.incidence_angle)?;
        check_finite("irradiance_angle", self.irradiance_angle)?;
        check_positive("pd_area", self.pd_area)?;
        check_positive("room_area", self.room_area)?;
        let rho = self.wall_reflectivity;
        if !(0.0..1.0).contains(&rho) {
            return Err(ChannelError::OutOfRange {
                name: "wall_reflectivity",
                value: rho,
                expected: "[0, 1)",
            });
        }
        check_positive("distance", self.distance)?;
        check_positive("los_delay", self.los_delay)?;
        check_positive("nlos_delay", self.nlos_delay)?;
        check_positive("cutoff_frequency", self.cutoff_frequency)?;
        check_positive("responsivity", self.responsivity)?;
        Ok(())
    }
}

/// Parameters of the outdoor laser-diode link between two access points.
#[derive(Debug, Clone, PartialEq)]
pub struct OutdoorChannelParams {
    /// Atmospheric attenuation, dB/km.
    pub attenuation_db_per_km: f64,
    /// Distance between the two access points, m.
    pub span: f64,
    /// Detector effective area, m².
    pub detector_area: f64,
    /// Beam waist radius, m.
    pub beam_waist: f64,
    /// Optical wavelength, m.
    pub wavelength: f64,
    /// Far-field half-angle divergence, rad. Only used for the consistency
    /// check; propagation uses waist and wavelength.
    pub divergence: f64,
    /// Laser detector responsivity, A/W.
    pub responsivity: f64,
}

impl Default for OutdoorChannelParams {
    fn default() -> Self {
        OutdoorChannelParams {
            attenuation_db_per_km: 5.0,
            span: 160.0,
            detector_area: 100e-6,
            beam_waist: 0.588e-3,
            wavelength: 1550e-9,
            divergence: 8.38e-7,
            responsivity: 0.8,
        }
    }
}

impl OutdoorChannelParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.attenuation_db_per_km >= 0.0) || !self.attenuation_db_per_km.is_finite() {
            return Err(ChannelError::OutOfRange {
                name: "attenuation_coeff",
                value: self.attenuation_db_per_km,
                expected: ">= 0 dB/km",
            });
        }
        check_positive("span", self.span)?;
        check_positive("detector_area", self.detector_area)?;
        check_positive("beam_waist", self.beam_waist)?;
        check_positive("wavelength", self.wavelength)?;
        check_positive("divergence", self.divergence)?;
        check_positive("responsivity", self.responsivity)?;
        Ok(())
    }

    /// Divergence implied by the Gaussian waist, `λ / (π ω₀)`.
    pub fn implied_divergence(&self) -> f64 {
        self.wavelength / (PI * self.beam_waist)
    }

    /// Relative mismatch `|θ − λ/(π ω₀)| / θ` when it exceeds
    /// [`DIVERGENCE_TOLERANCE`], `None` otherwise.
    pub fn divergence_mismatch(&self) -> Option<f64> {
        let mismatch = (self.divergence - self.implied_divergence()).abs() / self.divergence;
        (mismatch > DIVERGENCE_TOLERANCE).then_some(mismatch)
    }

    /// Logs a warning if the divergence disagrees with waist and wavelength.
    /// Returns whether a warning was emitted.
    pub fn warn_if_inconsistent(&self) -> bool {
        match self.divergence_mismatch() {
            Some(mismatch) => {
                log::warn!(
                    "divergence {:.3e} rad disagrees with lambda/(pi*w0) = {:.3e} rad ({:.1}% off); \
                     beam propagation uses waist and wavelength",
                    self.divergence,
                    self.implied_divergence(),
                    mismatch * 100.0
                );
                true
            }
            None => false,
        }
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::OutOfRange {
            name,
            value,
            expected: "> 0",
        })
    }
}

fn check_finite(name: &'static str, value: f64) -> Result<(), ChannelError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ChannelError::OutOfRange {
            name,
            value,
            expected: "a finite angle",
        })
    }
}

fn check_open_interval(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    expected: &'static str,
) -> Result<(), ChannelError> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(ChannelError::OutOfRange {
            name,
            value,
            expected,
        })
    }
}

/// Lambertian order `m = −ln 2 / ln(cos φ½)` of an LED with half-intensity
/// angle `φ½`.
pub fn lambertian_order(half_intensity_angle: f64) -> Result<f64, ChannelError> {
    check_open_interval(
        "half_intensity_angle",
        half_intensity_angle,
        0.0,
        FRAC_PI_2,
        "(0, pi/2) rad",
    )?;
    Ok(-LN_2 / half_intensity_angle.cos().ln())
}

/// Cosine clamped to zero at and beyond ±π/2.
fn forward_cos(angle: f64) -> f64 {
    if angle.abs() >= FRAC_PI_2 {
        0.0
    } else {
        angle.cos().max(0.0)
    }
}

/// Line-of-sight DC gain of the generalized-Lambertian model,
/// `(m+1) A / (2π d²) · cosᵐ(Φ) · cos(φ)`.
///
/// Angles at or beyond π/2 zero the corresponding factor. `p` must satisfy
/// [`IndoorChannelParams::validate`].
pub fn los_gain(p: &IndoorChannelParams) -> ChannelGain {
    let m = -LN_2 / p.half_intensity_angle.cos().ln();
    let cos_irr = forward_cos(p.irradiance_angle);
    let cos_inc = forward_cos(p.incidence_angle);
    if cos_irr == 0.0 || cos_inc == 0.0 {
        return ChannelGain::ZERO;
    }
    let g = (m + 1.0) * p.pd_area / (2.0 * PI * p.distance * p.distance)
        * cos_irr.powf(m)
        * cos_inc;
    ChannelGain::saturating(g)
}

/// Diffuse gain of the single integrating-sphere approximation,
/// `(A / A_room) · ρ / (1 − ρ)`.
pub fn diffuse_gain(p: &IndoorChannelParams) -> ChannelGain {
    let rho = p.wall_reflectivity;
    ChannelGain::saturating(p.pd_area / p.room_area * rho / (1.0 - rho))
}

/// Complex response of the two-path indoor channel at frequency `f` (Hz):
/// a delayed LOS impulse plus a delayed one-pole low-pass diffuse term.
pub fn indoor_frequency_response(f: f64, p: &IndoorChannelParams) -> Complex64 {
    let g_los = los_gain(p).value();
    let g_diff = diffuse_gain(p).value();
    let los = Complex64::from_polar(g_los, -2.0 * PI * f * p.los_delay);
    let diffuse = Complex64::from_polar(g_diff, -2.0 * PI * f * p.nlos_delay)
        / Complex64::new(1.0, f / p.cutoff_frequency);
    los + diffuse
}

/// DC gain of the indoor link, `|H(0)|`.
pub fn indoor_dc_gain(p: &IndoorChannelParams) -> ChannelGain {
    ChannelGain::saturating(los_gain(p).value() + diffuse_gain(p).value())
}

/// Beers-Lambert transmittance over `span` metres at `attenuation` dB/km.
pub fn beers_lambert_transmittance(attenuation_db_per_km: f64, span: f64) -> ChannelGain {
    let loss_db = attenuation_db_per_km * span / 1000.0;
    ChannelGain::saturating(10f64.powf(-loss_db / 10.0))
}

/// Radius of a Gaussian beam after propagating `span` metres from its waist.
pub fn gaussian_beam_radius(beam_waist: f64, wavelength: f64, span: f64) -> f64 {
    let rayleigh = PI * beam_waist * beam_waist / wavelength;
    let z = span / rayleigh;
    beam_waist * (1.0 + z * z).sqrt()
}

/// Fraction of a centred Gaussian beam of radius `beam_radius` collected by a
/// detector of area `detector_area`.
pub fn fso_capture_fraction(detector_area: f64, beam_radius: f64) -> ChannelGain {
    let x = 2.0 * detector_area / (PI * beam_radius * beam_radius);
    ChannelGain::saturating(-(-x).exp_m1())
}

/// Total gain of the outdoor laser hop: atmospheric transmittance times
/// geometric capture at the receiving aperture.
pub fn fso_link_gain(p: &OutdoorChannelParams) -> ChannelGain {
    let radius = gaussian_beam_radius(p.beam_waist, p.wavelength, p.span);
    beers_lambert_transmittance(p.attenuation_db_per_km, p.span)
        * fso_capture_fraction(p.detector_area, radius)
}
