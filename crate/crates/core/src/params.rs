//! Link-budget parameter set and its key/value file format.
//!
//! A parameter file is a flat list of `key = value unit` lines. Blank lines
//! and everything after `#` are ignored. Every dimensioned quantity must carry
//! an explicit unit; values are converted to SI when loaded. Omitted keys take
//! their default (see [`LinkBudgetParams::default`]).
//!
//! ```text
//! # outdoor hop
//! attenuation_coeff = 5, 20, 50, 80 dB/km
//! span              = 160 m
//! detector_area     = 100 mm^2
//! beam_waist        = 0.588 mm
//! ```

use std::fmt;
use std::path::Path;

use crate::channel::{ChannelError, IndoorChannelParams, OutdoorChannelParams};

/// Environment variable naming the parameter file used when none is given.
pub const PARAMS_ENV: &str = "OWPAN_PARAMS";

#[derive(Debug, Clone, PartialEq)]
pub enum ParamsError {
    Io { path: String, message: String },
    Parse { line: usize, message: String },
    Validation { key: &'static str, unit: &'static str, message: String },
}

impl fmt::Display for ParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamsError::Io { path, message } => write!(f, "cannot read {path}: {message}"),
            ParamsError::Parse { line, message } => write!(f, "line {line}: {message}"),
            ParamsError::Validation { key, unit, message } => {
                write!(f, "invalid {key} [{unit}]: {message}")
            }
        }
    }
}

impl std::error::Error for ParamsError {}

/// Every physical parameter of the W-OWPAN link budget, in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudgetParams {
    pub indoor: IndoorChannelParams,
    /// Outdoor hop. Its `attenuation_db_per_km` is overridden per curve by
    /// [`LinkBudgetParams::attenuation_db_per_km`] in sweeps.
    pub outdoor: OutdoorChannelParams,
    /// Atmospheric attenuation coefficients to evaluate, dB/km.
    pub attenuation_db_per_km: Vec<f64>,
    /// Received power over noise spectral density, dB.
    pub pr_over_n0_db: f64,
    /// Electrical transmission bandwidth, Hz.
    pub bandwidth: f64,
    /// Gain of the amplify-and-forward relay feeding the LED.
    pub amplification_gain: f64,
    /// Fixed capacity assigned to the RF uplink, bit/s.
    pub rf_uplink_capacity: f64,
}

impl Default for LinkBudgetParams {
    fn default() -> Self {
        LinkBudgetParams {
            indoor: IndoorChannelParams::default(),
            outdoor: OutdoorChannelParams::default(),
            attenuation_db_per_km: vec![5.0, 20.0, 50.0, 80.0],
            pr_over_n0_db: 30.0,
            bandwidth: 10e6,
            amplification_gain: 1.0,
            rf_uplink_capacity: 100e6,
        }
    }
}

impl LinkBudgetParams {
    /// Outdoor parameters with the attenuation replaced by `alpha` dB/km.
    pub fn outdoor_at(&self, alpha: f64) -> OutdoorChannelParams {
        OutdoorChannelParams {
            attenuation_db_per_km: alpha,
            ..self.outdoor.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        self.indoor
            .validate()
            .map_err(|e| channel_error(e, Side::Indoor))?;
        self.outdoor
            .validate()
            .map_err(|e| channel_error(e, Side::Outdoor))?;
        if self.attenuation_db_per_km.is_empty() {
            return Err(invalid("attenuation_coeff", "at least one value is required"));
        }
        for &alpha in &self.attenuation_db_per_km {
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(invalid("attenuation_coeff", format!("{alpha} must be >= 0")));
            }
        }
        if !self.pr_over_n0_db.is_finite() {
            return Err(invalid("pr_over_n0", "must be finite"));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(invalid("frequency", format!("{} must be > 0", self.bandwidth)));
        }
        if !(self.amplification_gain >= 0.0 && self.amplification_gain.is_finite()) {
            return Err(invalid(
                "amplification_gain",
                format!("{} must be >= 0", self.amplification_gain),
            ));
        }
        if !(self.rf_uplink_capacity >= 0.0 && self.rf_uplink_capacity.is_finite()) {
            return Err(invalid(
                "rf_uplink_capacity",
                format!("{} must be >= 0", self.rf_uplink_capacity),
            ));
        }
        Ok(())
    }

    /// Parses and validates a parameter file body.
    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let mut params = LinkBudgetParams::default();
        let mut seen: Vec<&'static str> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| ParamsError::Parse {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected `key = value unit`, got `{line}`")))?;
            let key = key.trim();
            let spec = KEYS
                .iter()
                .find(|k| k.name == key)
                .ok_or_else(|| parse_err(format!("unknown key `{key}`")))?;
            if seen.contains(&spec.name) {
                return Err(parse_err(format!("duplicate key `{key}`")));
            }
            seen.push(spec.name);

            let values = parse_values(value.trim(), spec.quantity).map_err(parse_err)?;
            if values.len() != 1 && !spec.list {
                return Err(parse_err(format!("`{key}` takes a single value")));
            }
            (spec.apply)(&mut params, &values);
        }

        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParamsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ParamsError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    /// Renders the parameters in the file format, SI units throughout.
    pub fn to_file_string(&self) -> String {
        let mut out = String::new();
        for spec in KEYS {
            let values = (spec.read)(self);
            let joined = values
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            if spec.si_unit.is_empty() {
                out.push_str(&format!("{} = {}\n", spec.name, joined));
            } else {
                out.push_str(&format!("{} = {} {}\n", spec.name, joined, spec.si_unit));
            }
        }
        out
    }
}

/// Loads `path` if given, else the file named by [`PARAMS_ENV`], else the
/// defaults.
pub fn load_params(path: Option<&Path>) -> Result<LinkBudgetParams, ParamsError> {
    match path {
        Some(p) => LinkBudgetParams::load(p),
        None => match std::env::var_os(PARAMS_ENV) {
            Some(p) if !p.is_empty() => LinkBudgetParams::load(Path::new(&p)),
            _ => Ok(LinkBudgetParams::default()),
        },
    }
}

#[derive(Clone, Copy)]
enum Side {
    Indoor,
    Outdoor,
}

fn channel_error(err: ChannelError, side: Side) -> ParamsError {
    let ChannelError::OutOfRange {
        name,
        value,
        expected,
    } = err;
    let key = match (side, name) {
        (Side::Indoor, "responsivity") => "pd_responsivity",
        (Side::Outdoor, "responsivity") => "laser_responsivity",
        (_, other) => other,
    };
    let unit = KEYS
        .iter()
        .find(|k| k.name == key)
        .map(|k| k.si_unit)
        .unwrap_or("");
    ParamsError::Validation {
        key: KEYS.iter().find(|k| k.name == key).map(|k| k.name).unwrap_or(name),
        unit: if unit.is_empty() { "dimensionless" } else { unit },
        message: format!("{value} is out of range (expected {expected})"),
    }
}

fn invalid(key: &'static str, message: impl Into<String>) -> ParamsError {
    let unit = KEYS
        .iter()
        .find(|k| k.name == key)
        .map(|k| k.si_unit)
        .filter(|u| !u.is_empty())
        .unwrap_or("dimensionless");
    ParamsError::Validation {
        key,
        unit,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Quantity {
    Length,
    Area,
    Angle,
    Time,
    Frequency,
    Attenuation,
    Ratio,
    Responsivity,
    Decibel,
    DataRate,
}

impl Quantity {
    /// Multiplier converting `unit` to SI, or `None` if not accepted.
    fn factor(self, unit: &str) -> Option<f64> {
        use Quantity::*;
        let f = match (self, unit) {
            (Length, "m") => 1.0,
            (Length, "km") => 1e3,
            (Length, "cm") => 1e-2,
            (Length, "mm") => 1e-3,
            (Length, "um") => 1e-6,
            (Length, "nm") => 1e-9,
            (Area, "m^2" | "m2") => 1.0,
            (Area, "cm^2" | "cm2") => 1e-4,
            (Area, "mm^2" | "mm2") => 1e-6,
            (Area, "um^2" | "um2") => 1e-12,
            (Angle, "rad") => 1.0,
            (Angle, "mrad") => 1e-3,
            (Angle, "urad") => 1e-6,
            (Angle, "deg") => std::f64::consts::PI / 180.0,
            (Time, "s") => 1.0,
            (Time, "ms") => 1e-3,
            (Time, "us") => 1e-6,
            (Time, "ns") => 1e-9,
            (Time, "ps") => 1e-12,
            (Frequency, "Hz") => 1.0,
            (Frequency, "kHz") => 1e3,
            (Frequency, "MHz") => 1e6,
            (Frequency, "GHz") => 1e9,
            (Attenuation, "dB/km") => 1.0,
            (Attenuation, "dB/m") => 1e3,
            (Ratio, "") => 1.0,
            (Responsivity, "A/W") => 1.0,
            (Decibel, "dB") => 1.0,
            (DataRate, "bps" | "bit/s") => 1.0,
            (DataRate, "kbps") => 1e3,
            (DataRate, "Mbps") => 1e6,
            (DataRate, "Gbps") => 1e9,
            _ => return None,
        };
        Some(f)
    }

    fn accepted(self) -> &'static str {
        use Quantity::*;
        match self {
            Length => "m, km, cm, mm, um, nm",
            Area => "m^2, cm^2, mm^2, um^2",
            Angle => "rad, mrad, urad, deg",
            Time => "s, ms, us, ns, ps",
            Frequency => "Hz, kHz, MHz, GHz",
            Attenuation => "dB/km, dB/m",
            Ratio => "no unit",
            Responsivity => "A/W",
            Decibel => "dB",
            DataRate => "bps, kbps, Mbps, Gbps",
        }
    }
}

/// Splits `"160m"` or `"160 m"` into number and unit.
fn split_number_unit(s: &str) -> (&str, &str) {
    let bytes = s.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let c = bytes[end] as char;
        let exponent_sign = (c == '+' || c == '-')
            && end > 0
            && matches!(bytes[end - 1] as char, 'e' | 'E');
        let exponent = (c == 'e' || c == 'E')
            && end > 0
            && bytes.get(end + 1).is_some_and(|n| {
                (*n as char).is_ascii_digit() || *n == b'-' || *n == b'+'
            });
        if c.is_ascii_digit() || c == '.' || (end == 0 && (c == '-' || c == '+')) || exponent || exponent_sign {
            end += 1;
        } else {
            break;
        }
    }
    (s[..end].trim(), s[end..].trim())
}

fn parse_values(text: &str, quantity: Quantity) -> Result<Vec<f64>, String> {
    if text.is_empty() {
        return Err("missing value".into());
    }
    let parts: Vec<(&str, &str)> = text.split(',').map(|p| split_number_unit(p.trim())).collect();
    let trailing_unit = parts.last().map(|(_, u)| *u).unwrap_or("");
    let mut out = Vec::with_capacity(parts.len());
    for (number, unit) in parts {
        let unit = if unit.is_empty() { trailing_unit } else { unit };
        let value: f64 = number
            .parse()
            .map_err(|_| format!("`{number}` is not a number"))?;
        let factor = quantity.factor(unit).ok_or_else(|| {
            if unit.is_empty() {
                format!("missing unit (accepted: {})", quantity.accepted())
            } else {
                format!("unit `{unit}` not accepted here (accepted: {})", quantity.accepted())
            }
        })?;
        out.push(value * factor);
    }
    Ok(out)
}

struct KeySpec {
    name: &'static str,
    quantity: Quantity,
    si_unit: &'static str,
    list: bool,
    apply: fn(&mut LinkBudgetParams, &[f64]),
    read: fn(&LinkBudgetParams) -> Vec<f64>,
}

macro_rules! key {
    ($name:literal, $q:ident, $unit:literal, |$p:ident| $field:expr) => {
        KeySpec {
            name: $name,
            quantity: Quantity::$q,
            si_unit: $unit,
            list: false,
            apply: |$p, v| $field = v[0],
            read: |$p| vec![$field],
        }
    };
}

const KEYS: &[KeySpec] = &[
    KeySpec {
        name: "attenuation_coeff",
        quantity: Quantity::Attenuation,
        si_unit: "dB/km",
        list: true,
        apply: |p, v| p.attenuation_db_per_km = v.to_vec(),
        read: |p| p.attenuation_db_per_km.clone(),
    },
    key!("span", Length, "m", |p| p.outdoor.span),
    key!("detector_area", Area, "m^2", |p| p.outdoor.detector_area),
    key!("divergence", Angle, "rad", |p| p.outdoor.divergence),
    key!("beam_waist", Length, "m", |p| p.outdoor.beam_waist),
    key!("wavelength", Length, "m", |p| p.outdoor.wavelength),
    key!("laser_responsivity", Responsivity, "A/W", |p| p.outdoor.responsivity),
    key!("room_area", Area, "m^2", |p| p.indoor.room_area),
    key!("pd_area", Area, "m^2", |p| p.indoor.pd_area),
    key!("wall_reflectivity", Ratio, "", |p| p.indoor.wall_reflectivity),
    key!("incidence_angle", Angle, "rad", |p| p.indoor.incidence_angle),
    key!("half_intensity_angle", Angle, "rad", |p| p.indoor.half_intensity_angle),
    key!("distance", Length, "m", |p| p.indoor.distance),
    key!("irradiance_angle", Angle, "rad", |p| p.indoor.irradiance_angle),
    key!("frequency", Frequency, "Hz", |p| p.bandwidth),
    key!("cutoff_frequency", Frequency, "Hz", |p| p.indoor.cutoff_frequency),
    key!("los_delay", Time, "s", |p| p.indoor.los_delay),
    key!("nlos_delay", Time, "s", |p| p.indoor.nlos_delay),
    key!("pd_responsivity", Responsivity, "A/W", |p| p.indoor.responsivity),
    key!("pr_over_n0", Decibel, "dB", |p| p.pr_over_n0_db),
    key!("amplification_gain", Ratio, "", |p| p.amplification_gain),
    key!("rf_uplink_capacity", DataRate, "bps", |p| p.rf_uplink_capacity),
];
