//! Operating-mode catalog for PHY I-VI and data-rate arithmetic.
//!
//! The catalog ships as a tab-separated file (`data/phy_modes.tsv`) that is
//! compiled into the crate. PHY I/II modes bind to a codec; PHY III-VI modes
//! carry names and nominal rates only.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use super::conv::CcRate;
use super::PhyError;

/// Relative tolerance between computed and nominal rates.
pub const RATE_TOLERANCE: f64 = 0.005;

const CATALOG_TSV: &str = include_str!("../../data/phy_modes.tsv");

/// Comment block heading the catalog file.
pub const CATALOG_HEADER: &str = "\
# IEEE 802.15.7 PHY I-VI operating modes.
#
# One mode per line, fields separated by a single tab:
#   id  phy  modulation  line_code  clock  outer_fec  inner_fec  nominal_bps  origin
#
# clock       optical clock in Hz, or a text label when the standard gives none
# outer_fec   RS(n,k) over GF(16), RS(n,k)/GF256, a text label, or \"-\" for none
# inner_fec   CC(1/4), CC(1/3), CC(2/3), a text label, or \"-\" for none
# origin      \"printed\" when nominal_bps is an endpoint of a published rate range,
#             \"reconstructed\" for intermediate rates
#
# The RS/CC parameter choices of PHY I/II are a reconstruction that lands the
# clock x line code x FEC arithmetic on the published rates. PHY III-VI rows carry
# names and nominal rates only; they have no codec binding.
";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PhyClass {
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl PhyClass {
    pub fn roman(self) -> &'static str {
        match self {
            PhyClass::I => "I",
            PhyClass::II => "II",
            PhyClass::III => "III",
            PhyClass::IV => "IV",
            PhyClass::V => "V",
            PhyClass::VI => "VI",
        }
    }
}

impl FromStr for PhyClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(PhyClass::I),
            "II" | "2" => Ok(PhyClass::II),
            "III" | "3" => Ok(PhyClass::III),
            "IV" | "4" => Ok(PhyClass::IV),
            "V" | "5" => Ok(PhyClass::V),
            "VI" | "6" => Ok(PhyClass::VI),
            _ => Err(format!("unknown PHY class `{s}`")),
        }
    }
}

impl fmt::Display for PhyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Modulation {
    Ook,
    Vppm,
    Csk,
    /// Camera and display schemes of PHY IV-VI, by name.
    Other(String),
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Ook => f.write_str("OOK"),
            Modulation::Vppm => f.write_str("VPPM"),
            Modulation::Csk => f.write_str("CSK"),
            Modulation::Other(name) => f.write_str(name),
        }
    }
}

impl From<&str> for Modulation {
    fn from(s: &str) -> Self {
        match s {
            "OOK" => Modulation::Ook,
            "VPPM" => Modulation::Vppm,
            "CSK" => Modulation::Csk,
            other => Modulation::Other(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineCode {
    Manchester,
    FourB6B,
    EightB10B,
    None,
    HalfRate,
}

impl LineCode {
    /// Data bits per channel chip.
    pub fn ratio(self) -> f64 {
        match self {
            LineCode::Manchester | LineCode::HalfRate => 0.5,
            LineCode::FourB6B => 4.0 / 6.0,
            LineCode::EightB10B => 0.8,
            LineCode::None => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LineCode::Manchester => "Manchester",
            LineCode::FourB6B => "4B6B",
            LineCode::EightB10B => "8B10B",
            LineCode::None => "-",
            LineCode::HalfRate => "half-rate",
        }
    }
}

impl FromStr for LineCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            LineCode::Manchester,
            LineCode::FourB6B,
            LineCode::EightB10B,
            LineCode::None,
            LineCode::HalfRate,
        ]
        .into_iter()
        .find(|c| c.label() == s)
        .ok_or_else(|| format!("unknown line code `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clock {
    Hz(f64),
    Label(String),
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clock::Hz(hz) => write!(f, "{hz}"),
            Clock::Label(s) => f.write_str(s),
        }
    }
}

/// A forward error correction stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Fec {
    None,
    /// Reed-Solomon over GF(2^`symbol_bits`).
    Rs { n: usize, k: usize, symbol_bits: u32 },
    Cc(CcRate),
    /// Named scheme without parameters (catalog-only rows).
    Named(String),
}

impl Fec {
    /// Code rate, if known.
    pub fn ratio(&self) -> Option<f64> {
        match self {
            Fec::None => Some(1.0),
            Fec::Rs { n, k, .. } => Some(*k as f64 / *n as f64),
            Fec::Cc(rate) => Some(rate.ratio()),
            Fec::Named(_) => None,
        }
    }
}

impl fmt::Display for Fec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fec::None => f.write_str("-"),
            Fec::Rs { n, k, symbol_bits: 4 } => write!(f, "RS({n},{k})"),
            Fec::Rs { n, k, symbol_bits } => write!(f, "RS({n},{k})/GF{}", 1u32 << symbol_bits),
            Fec::Cc(rate) => write!(f, "CC({})", rate.label()),
            Fec::Named(s) => f.write_str(s),
        }
    }
}

impl FromStr for Fec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" {
            return Ok(Fec::None);
        }
        if let Some(rest) = s.strip_prefix("RS(") {
            let (params, field) = rest
                .split_once(')')
                .ok_or_else(|| format!("malformed RS spec `{s}`"))?;
            let (n, k) = params
                .split_once(',')
                .ok_or_else(|| format!("malformed RS spec `{s}`"))?;
            let n: usize = n.trim().parse().map_err(|_| format!("bad n in `{s}`"))?;
            let k: usize = k.trim().parse().map_err(|_| format!("bad k in `{s}`"))?;
            let symbol_bits = match field {
                "" => 4,
                "/GF256" => 8,
                other => return Err(format!("unsupported field `{other}`")),
            };
            return Ok(Fec::Rs { n, k, symbol_bits });
        }
        if let Some(rate) = s.strip_prefix("CC(").and_then(|r| r.strip_suffix(')')) {
            return CcRate::from_label(rate)
                .map(Fec::Cc)
                .ok_or_else(|| format!("unsupported convolutional rate `{rate}`"));
        }
        Ok(Fec::Named(s.to_string()))
    }
}

/// One row of the operating-mode catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyMode {
    pub id: String,
    pub phy: PhyClass,
    pub modulation: Modulation,
    pub line_code: LineCode,
    pub clock: Clock,
    pub outer_fec: Fec,
    pub inner_fec: Fec,
    /// Published (or reconstructed) data rate, bit/s.
    pub nominal_rate: f64,
    /// Whether `nominal_rate` is a published range endpoint.
    pub printed: bool,
}

impl PhyMode {
    /// PHY I/II modes have a full encode/decode chain.
    pub fn has_codec(&self) -> bool {
        matches!(self.phy, PhyClass::I | PhyClass::II)
    }

    /// `clock × line-code ratio × outer rate × inner rate`, when every factor
    /// is known.
    pub fn computed_rate(&self) -> Option<f64> {
        let Clock::Hz(clock) = self.clock else {
            return None;
        };
        Some(clock * self.line_code.ratio() * self.outer_fec.ratio()? * self.inner_fec.ratio()?)
    }

    fn to_tsv_line(&self) -> String {
        [
            self.id.clone(),
            self.phy.to_string(),
            self.modulation.to_string(),
            self.line_code.label().to_string(),
            self.clock.to_string(),
            self.outer_fec.to_string(),
            self.inner_fec.to_string(),
            self.nominal_rate.to_string(),
            if self.printed { "printed" } else { "reconstructed" }.to_string(),
        ]
        .join("\t")
    }
}

/// Data rate of a mode, checked against its nominal rate.
pub fn data_rate(mode: &PhyMode) -> Result<f64, PhyError> {
    let computed = mode.computed_rate().ok_or_else(|| {
        PhyError::Unsupported(format!("mode {} has no computable data rate", mode.id))
    })?;
    if !(mode.nominal_rate > 0.0) {
        return Err(PhyError::InvalidParameter(format!(
            "mode {} has non-positive nominal rate",
            mode.id
        )));
    }
    if (computed - mode.nominal_rate).abs() / mode.nominal_rate > RATE_TOLERANCE {
        return Err(PhyError::RateMismatch {
            mode: mode.id.clone(),
            computed,
            nominal: mode.nominal_rate,
        });
    }
    Ok(computed)
}

pub fn parse_catalog_tsv(text: &str) -> Result<Vec<PhyMode>, PhyError> {
    let mut modes = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| PhyError::Catalog {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 9 {
            return Err(err(format!("expected 9 tab-separated fields, found {}", fields.len())));
        }
        let clock = match fields[4].parse::<f64>() {
            Ok(hz) if hz > 0.0 => Clock::Hz(hz),
            Ok(hz) => return Err(err(format!("clock {hz} must be > 0"))),
            Err(_) => Clock::Label(fields[4].to_string()),
        };
        let nominal_rate: f64 = fields[7]
            .parse()
            .map_err(|_| err(format!("bad nominal rate `{}`", fields[7])))?;
        if !(nominal_rate > 0.0) {
            return Err(err(format!("nominal rate {nominal_rate} must be > 0")));
        }
        let printed = match fields[8] {
            "printed" => true,
            "reconstructed" => false,
            other => return Err(err(format!("bad origin `{other}`"))),
        };
        let mode = PhyMode {
            id: fields[0].to_string(),
            phy: fields[1].parse().map_err(err)?,
            modulation: Modulation::from(fields[2]),
            line_code: fields[3].parse().map_err(err)?,
            clock,
            outer_fec: fields[5].parse().map_err(err)?,
            inner_fec: fields[6].parse().map_err(err)?,
            nominal_rate,
            printed,
        };
        if modes.iter().any(|m: &PhyMode| m.id == mode.id) {
            return Err(err(format!("duplicate mode id `{}`", mode.id)));
        }
        modes.push(mode);
    }
    Ok(modes)
}

pub fn render_catalog_tsv(modes: &[PhyMode]) -> String {
    let mut out = String::from(CATALOG_HEADER);
    for m in modes {
        out.push_str(&m.to_tsv_line());
        out.push('\n');
    }
    out
}

/// The raw catalog file compiled into the crate.
pub fn catalog_file() -> &'static str {
    CATALOG_TSV
}

/// Every operating mode of PHY I-VI.
pub fn phy_mode_catalog() -> &'static [PhyMode] {
    static CATALOG: OnceLock<Vec<PhyMode>> = OnceLock::new();
    CATALOG.get_or_init(|| parse_catalog_tsv(CATALOG_TSV).expect("embedded catalog is valid"))
}

pub fn find_mode(id: &str) -> Result<&'static PhyMode, PhyError> {
    phy_mode_catalog()
        .iter()
        .find(|m| m.id == id)
        .ok_or_else(|| PhyError::Unsupported(format!("unknown mode `{id}`")))
}

/// A published table row: every mode sharing PHY class, modulation, line
/// code and clock family, summarised by its rate range.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub phy: PhyClass,
    pub modulation: Modulation,
    pub line_code: LineCode,
    pub clocks: Vec<Clock>,
    pub min_rate: f64,
    pub max_rate: f64,
    pub modes: Vec<String>,
}

/// Groups the catalog into rows by PHY class, modulation and line code, in
/// catalog order.
pub fn rate_rows(modes: &[PhyMode]) -> Vec<RateRow> {
    let mut rows: Vec<RateRow> = Vec::new();
    for m in modes {
        let row = rows.iter_mut().find(|r| {
            r.phy == m.phy && r.modulation == m.modulation && r.line_code == m.line_code
        });
        match row {
            Some(r) => {
                if !r.clocks.contains(&m.clock) {
                    r.clocks.push(m.clock.clone());
                }
                r.min_rate = r.min_rate.min(m.nominal_rate);
                r.max_rate = r.max_rate.max(m.nominal_rate);
                r.modes.push(m.id.clone());
            }
            None => rows.push(RateRow {
                phy: m.phy,
                modulation: m.modulation.clone(),
                line_code: m.line_code,
                clocks: vec![m.clock.clone()],
                min_rate: m.nominal_rate,
                max_rate: m.nominal_rate,
                modes: vec![m.id.clone()],
            }),
        }
    }
    rows
}

/// Formats a rate the way the published table does (`11.67 kbps`).
pub fn format_rate(bps: f64) -> String {
    let (value, unit) = if bps >= 1e6 {
        (bps / 1e6, "Mbps")
    } else if bps >= 1e3 {
        (bps / 1e3, "kbps")
    } else {
        (bps, "bps")
    };
    let s = format!("{value:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s} {unit}")
}
