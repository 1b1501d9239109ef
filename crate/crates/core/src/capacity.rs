//! Electrical SNR, Shannon capacity and capacity sweeps over the W-OWPAN.
//!
//! The end-to-end connection is the cascade RF uplink → laser hop → LED hop,
//! and its capacity is that of the worst of the three. The RF hop is not
//! modelled; it carries a fixed configured capacity.

use std::f64::consts::LN_2;
use std::fmt;

use crate::channel::{self, ChannelGain};
use crate::params::{LinkBudgetParams, ParamsError};

/// Default number of grid points in a sweep.
pub const DEFAULT_SWEEP_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum CapacityError {
    EmptyCascade,
    NegativeCapacity(f64),
    InvalidSweep(String),
    Params(ParamsError),
}

impl fmt::Display for CapacityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CapacityError::EmptyCascade => f.write_str("cascade needs at least one link"),
            CapacityError::NegativeCapacity(c) => write!(f, "negative link capacity {c}"),
            CapacityError::InvalidSweep(msg) => write!(f, "invalid sweep: {msg}"),
            CapacityError::Params(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CapacityError {}

impl From<ParamsError> for CapacityError {
    fn from(e: ParamsError) -> Self {
        CapacityError::Params(e)
    }
}

/// Inputs to the electrical SNR of one optical hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBudget {
    /// Received power over noise spectral density, dB.
    pub pr_over_n0_db: f64,
    /// Bandwidth, Hz.
    pub bandwidth: f64,
    /// Detector responsivity, A/W.
    pub responsivity: f64,
    pub channel_gain: ChannelGain,
}

/// `SNR = (R·g)² · 10^(Pr/N0 / 10) / B`.
pub fn electrical_snr(b: &SnrBudget) -> f64 {
    let current = b.responsivity * b.channel_gain.value();
    current * current * 10f64.powf(b.pr_over_n0_db / 10.0) / b.bandwidth
}

/// Shannon capacity `B·log₂(1 + snr)` in bit/s.
pub fn link_capacity(snr: f64, bandwidth: f64) -> f64 {
    bandwidth * snr.ln_1p() / LN_2
}

/// Worst-link capacity of a cascade.
pub fn cascade_capacity(capacities: &[f64]) -> Result<f64, CapacityError> {
    let mut iter = capacities.iter().copied();
    let first = iter.next().ok_or(CapacityError::EmptyCascade)?;
    let mut min = first;
    for c in std::iter::once(first).chain(iter) {
        if !(c >= 0.0) {
            return Err(CapacityError::NegativeCapacity(c));
        }
        min = min.min(c);
    }
    Ok(min)
}

/// Per-hop capacities of the W-OWPAN for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OwpanCapacity {
    /// LED downlink inside the destination OWPAN.
    pub indoor: f64,
    /// RF uplink inside the source OWPAN (configured).
    pub rf_uplink: f64,
    /// Laser hop between the access points.
    pub outdoor: f64,
}

impl OwpanCapacity {
    pub fn end_to_end(&self) -> f64 {
        self.indoor.min(self.rf_uplink).min(self.outdoor)
    }
}

/// Capacity of the outdoor laser hop at attenuation `alpha` (dB/km), span
/// `span` (m) and received-power-to-noise ratio `pr_over_n0_db`.
pub fn outdoor_capacity(params: &LinkBudgetParams, alpha: f64, span: f64, pr_over_n0_db: f64) -> f64 {
    let outdoor = channel::OutdoorChannelParams {
        attenuation_db_per_km: alpha,
        span,
        ..params.outdoor.clone()
    };
    let snr = electrical_snr(&SnrBudget {
        pr_over_n0_db,
        bandwidth: params.bandwidth,
        responsivity: outdoor.responsivity,
        channel_gain: channel::fso_link_gain(&outdoor),
    });
    link_capacity(snr, params.bandwidth)
}

/// Capacity of the indoor LED hop. The amplify-and-forward gain feeding the
/// LED scales the optical gain.
pub fn indoor_capacity(params: &LinkBudgetParams, pr_over_n0_db: f64) -> f64 {
    let gain = channel::indoor_dc_gain(&params.indoor).value() * params.amplification_gain;
    let snr = electrical_snr(&SnrBudget {
        pr_over_n0_db,
        bandwidth: params.bandwidth,
        responsivity: params.indoor.responsivity,
        channel_gain: ChannelGain::saturating(gain),
    });
    link_capacity(snr, params.bandwidth)
}

pub fn owpan_capacity(params: &LinkBudgetParams, alpha: f64, span: f64, pr_over_n0_db: f64) -> OwpanCapacity {
    OwpanCapacity {
        indoor: indoor_capacity(params, pr_over_n0_db),
        rf_uplink: params.rf_uplink_capacity,
        outdoor: outdoor_capacity(params, alpha, span, pr_over_n0_db),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Received power over noise density, dB.
    PrOverN0Db,
    /// Outdoor span, m.
    SpanM,
}

impl SweepVariable {
    pub fn label(self) -> &'static str {
        match self {
            SweepVariable::PrOverN0Db => "Pr/N0 (dB)",
            SweepVariable::SpanM => "L (m)",
        }
    }
}

/// Which capacity a sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepTarget {
    /// The laser hop alone, the part that depends on attenuation and span.
    #[default]
    Outdoor,
    /// Worst-link capacity of the full RF → laser → LED cascade.
    EndToEnd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub target: SweepTarget,
}

impl SweepSpec {
    pub fn new(variable: SweepVariable, min: f64, max: f64) -> Self {
        SweepSpec {
            variable,
            min,
            max,
            points: DEFAULT_SWEEP_POINTS,
            target: SweepTarget::default(),
        }
    }

    /// Uniform grid from `min` to `max` inclusive. A zero-width range yields
    /// two identical points.
    pub fn grid(&self) -> Result<Vec<f64>, CapacityError> {
        if !self.min.is_finite() || !self.max.is_finite() {
            return Err(CapacityError::InvalidSweep("bounds must be finite".into()));
        }
        if self.max < self.min {
            return Err(CapacityError::InvalidSweep(format!(
                "max {} is below min {}",
                self.max, self.min
            )));
        }
        if self.min == self.max {
            return Ok(vec![self.min, self.max]);
        }
        if self.points < 2 {
            return Err(CapacityError::InvalidSweep("at least two points are needed".into()));
        }
        if self.variable == SweepVariable::SpanM && self.min < 0.0 {
            return Err(CapacityError::InvalidSweep("span must be >= 0".into()));
        }
        let step = (self.max - self.min) / (self.points - 1) as f64;
        let mut grid: Vec<f64> = (0..self.points).map(|i| self.min + step * i as f64).collect();
        // land exactly on the upper bound
        grid[self.points - 1] = self.max;
        Ok(grid)
    }
}

/// Capacity versus the swept variable for one attenuation coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityCurve {
    pub alpha_db_per_km: f64,
    /// `(x, capacity in bit/s)` in grid order.
    pub points: Vec<(f64, f64)>,
}

impl CapacityCurve {
    /// Forward finite-difference slopes `(C[i+1] − C[i]) / (x[i+1] − x[i])`.
    /// Zero-width steps give a slope of zero.
    pub fn slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| {
                let dx = w[1].0 - w[0].0;
                if dx == 0.0 {
                    0.0
                } else {
                    (w[1].1 - w[0].1) / dx
                }
            })
            .collect()
    }

    pub fn is_non_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    pub fn is_non_increasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// One curve per attenuation coefficient plus the parameters they share.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySweep {
    pub variable: SweepVariable,
    pub target: SweepTarget,
    pub fixed_params: LinkBudgetParams,
    pub curves: Vec<CapacityCurve>,
}

/// A grid interval where a higher-attenuation curve falls more slowly than a
/// lower-attenuation one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeInversion {
    pub x: f64,
    pub lower_alpha: f64,
    pub higher_alpha: f64,
    pub lower_alpha_slope: f64,
    pub higher_alpha_slope: f64,
}

impl CapacitySweep {
    /// Intervals where the slope magnitudes are not ordered by attenuation.
    pub fn slope_inversions(&self) -> Vec<SlopeInversion> {
        let mut curves: Vec<&CapacityCurve> = self.curves.iter().collect();
        curves.sort_by(|a, b| a.alpha_db_per_km.total_cmp(&b.alpha_db_per_km));
        let slopes: Vec<Vec<f64>> = curves.iter().map(|c| c.slopes()).collect();
        let mut out = Vec::new();
        for pair in 0..curves.len().saturating_sub(1) {
            let (lo, hi) = (&slopes[pair], &slopes[pair + 1]);
            for (i, (&s_lo, &s_hi)) in lo.iter().zip(hi).enumerate() {
                if s_hi.abs() < s_lo.abs() {
                    out.push(SlopeInversion {
                        x: curves[pair].points[i].0,
                        lower_alpha: curves[pair].alpha_db_per_km,
                        higher_alpha: curves[pair + 1].alpha_db_per_km,
                        lower_alpha_slope: s_lo,
                        higher_alpha_slope: s_hi,
                    });
                }
            }
        }
        out
    }

    /// CSV with header `x,alpha_dBkm,capacity_bps`, curves in attenuation
    /// order, points in grid order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,alpha_dBkm,capacity_bps\n");
        for curve in &self.curves {
            for &(x, c) in &curve.points {
                out.push_str(&format!("{},{},{:e}\n", x, curve.alpha_db_per_km, c));
            }
        }
        out
    }

    /// A gnuplot script plotting the CSV written to `csv_path`.
    pub fn gnuplot_script(&self, csv_path: &str) -> String {
        let mut s = String::new();
        s.push_str("set datafile separator ','\n");
        s.push_str(&format!("set xlabel '{}'\n", self.variable.label()));
        s.push_str("set ylabel 'capacity (bit/s)'\n");
        s.push_str("set key outside\n");
        let plots: Vec<String> = self
            .curves
            .iter()
            .map(|c| {
                format!(
                    "'{csv_path}' every ::1 using ($2=={a} ? $1 : 1/0):3 with lines title 'alpha = {a} dB/km'",
                    a = c.alpha_db_per_km
                )
            })
            .collect();
        s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        s
    }
}

/// Capacity curves over the sweep grid, one per attenuation coefficient in
/// `params`.
pub fn sweep_capacity(params: &LinkBudgetParams, spec: &SweepSpec) -> Result<CapacitySweep, CapacityError> {
    params.validate()?;
    let grid = spec.grid()?;
    let curves = params
        .attenuation_db_per_km
        .iter()
        .map(|&alpha| CapacityCurve {
            alpha_db_per_km: alpha,
            points: grid
                .iter()
                .map(|&x| {
                    let (span, pr) = match spec.variable {
                        SweepVariable::PrOverN0Db => (params.outdoor.span, x),
                        SweepVariable::SpanM => (x, params.pr_over_n0_db),
                    };
                    let c = owpan_capacity(params, alpha, span, pr);
                    let value = match spec.target {
                        SweepTarget::Outdoor => c.outdoor,
                        SweepTarget::EndToEnd => c.end_to_end(),
                    };
                    (x, value)
                })
                .collect(),
        })
        .collect();
    Ok(CapacitySweep {
        variable: spec.variable,
        target: spec.target,
        fixed_params: params.clone(),
        curves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(pr: f64, gain: f64) -> SnrBudget {
        SnrBudget {
            pr_over_n0_db: pr,
            bandwidth: 10e6,
            responsivity: 0.8,
            channel_gain: ChannelGain::new(gain).unwrap(),
        }
    }

    #[test]
    fn snr_examples() {
        assert_eq!(electrical_snr(&budget(30.0, 0.0)), 0.0);
        let unit = SnrBudget {
            pr_over_n0_db: 0.0,
            bandwidth: 1.0,
            responsivity: 1.0,
            channel_gain: ChannelGain::UNITY,
        };
        assert_eq!(electrical_snr(&unit), 1.0);
        let g = channel::fso_link_gain(&channel::OutdoorChannelParams::default()).value();
        let ratio = electrical_snr(&budget(30.0, g)) / electrical_snr(&budget(20.0, g));
        assert!((ratio - 10.0).abs() < 1e-12);
    }

    #[test]
    fn snr_increasing() {
        assert!(electrical_snr(&budget(21.0, 0.1)) > electrical_snr(&budget(20.0, 0.1)));
        assert!(electrical_snr(&budget(20.0, 0.2)) > electrical_snr(&budget(20.0, 0.1)));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(link_capacity(0.0, 10e6), 0.0);
        assert!((link_capacity(1.0, 10e6) - 10e6).abs() < 1e-6);
        assert!((link_capacity(3.0, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_examples() {
        assert_eq!(cascade_capacity(&[3.0, 5.0, 2.0]).unwrap(), 2.0);
        assert_eq!(cascade_capacity(&[7.5]).unwrap(), 7.5);
        assert_eq!(cascade_capacity(&[2.0, 3.0, 5.0]).unwrap(), 2.0);
        assert_eq!(cascade_capacity(&[]), Err(CapacityError::EmptyCascade));
        assert!(cascade_capacity(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn end_to_end_bounded_by_each_hop() {
        let p = LinkBudgetParams::default();
        for &alpha in &p.attenuation_db_per_km {
            let c = owpan_capacity(&p, alpha, 160.0, 30.0);
            let e = c.end_to_end();
            assert!(e <= c.indoor && e <= c.outdoor && e <= c.rf_uplink);
        }
    }

    #[test]
    fn zero_width_sweep_two_identical_points() {
        let p = LinkBudgetParams::default();
        let spec = SweepSpec::new(SweepVariable::SpanM, 160.0, 160.0);
        let sweep = sweep_capacity(&p, &spec).unwrap();
        for curve in &sweep.curves {
            assert_eq!(curve.points.len(), 2);
            assert_eq!(curve.points[0], curve.points[1]);
        }
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        let p = LinkBudgetParams::default();
        let spec = SweepSpec::new(SweepVariable::SpanM, 10.0, 0.0);
        assert!(matches!(sweep_capacity(&p, &spec), Err(CapacityError::InvalidSweep(_))));
        let spec = SweepSpec { points: 1, ..SweepSpec::new(SweepVariable::SpanM, 0.0, 10.0) };
        assert!(sweep_capacity(&p, &spec).is_err());
        let spec = SweepSpec::new(SweepVariable::SpanM, -5.0, 10.0);
        assert!(sweep_capacity(&p, &spec).is_err());
        let bad = LinkBudgetParams {
            bandwidth: 0.0,
            ..LinkBudgetParams::default()
        };
        let spec = SweepSpec::new(SweepVariable::SpanM, 0.0, 10.0);
        assert!(matches!(sweep_capacity(&bad, &spec), Err(CapacityError::Params(_))));
    }

    #[test]
    fn grid_is_uniform_and_inclusive() {
        let g = SweepSpec::new(SweepVariable::SpanM, 0.0, 2000.0).grid().unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[199], 2000.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn pr_sweep_monotone_and_l_sweep_ordered_by_alpha() {
        let p = LinkBudgetParams::default();
        let pr = sweep_capacity(&p, &SweepSpec::new(SweepVariable::PrOverN0Db, 0.0, 30.0)).unwrap();
        assert_eq!(pr.curves.len(), 4);
        assert!(pr.curves.iter().all(CapacityCurve::is_non_decreasing));

        let l = sweep_capacity(&p, &SweepSpec::new(SweepVariable::SpanM, 0.0, 2000.0)).unwrap();
        assert!(l.curves.iter().all(CapacityCurve::is_non_increasing));
        for i in 0..200 {
            let c5 = l.curves[0].points[i].1;
            let c80 = l.curves[3].points[i].1;
            assert!(c5 >= c80);
        }
    }

    #[test]
    fn responsivity_gain_scaling_invariance() {
        let a = SnrBudget {
            responsivity: 0.8,
            channel_gain: ChannelGain::new(0.01).unwrap(),
            ..budget(30.0, 0.0)
        };
        let b = SnrBudget {
            responsivity: 0.8 * 4.0,
            channel_gain: ChannelGain::new(0.01 / 4.0).unwrap(),
            ..a
        };
        let ca = link_capacity(electrical_snr(&a), a.bandwidth);
        let cb = link_capacity(electrical_snr(&b), b.bandwidth);
        assert!((ca - cb).abs() <= 1e-12 * ca);
    }

    #[test]
    fn csv_layout() {
        let p = LinkBudgetParams {
            attenuation_db_per_km: vec![5.0, 80.0],
            ..LinkBudgetParams::default()
        };
        let spec = SweepSpec {
            points: 3,
            ..SweepSpec::new(SweepVariable::SpanM, 0.0, 100.0)
        };
        let csv = sweep_capacity(&p, &spec).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,alpha_dBkm,capacity_bps");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0,5,"));
        assert!(lines[2].starts_with("50,5,"));
        assert!(lines[4].starts_with("0,80,"));
        for line in &lines[1..] {
            let cap: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            assert!(cap.is_finite() && cap >= 0.0);
        }
    }
}
