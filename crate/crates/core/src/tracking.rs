//! User tracking along a straight path past the RIS, comparing ideal
//! continuous phase steering against threshold-triggered reconfiguration.
//!
//! Frame: the RIS lies in the `z = 0` plane with its center at the origin,
//! `x` runs parallel to the user path and `y` points up. The path is the line
//! `(x, rx_height - h_ris, d_path)` and the TX sits at
//! `(tx_lateral_offset, tx_height - h_ris, d_tx)`, where `h_ris` is the RIS
//! center height implied by the TX-RIS distance.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::channel::{draw_channels, ChannelRealization, FadingParams, PhaseModel, Placement, Point3, RisGeometry};
use crate::error::{Error, Result};
use crate::link::{max_snr, optimal_phases, snr_with_phases, PhaseConfig};
use crate::units::to_db;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackingScenario {
    /// m.
    pub tx_height: f64,
    pub rx_height: f64,
    pub path_start: f64,
    pub path_end: f64,
    /// m/s.
    pub user_speed: f64,
    pub ris_to_path_ground_distance: f64,
    pub tx_to_ris_ground_distance: f64,
    pub tx_ris_distance: f64,
    /// TX offset parallel to the path, m.
    pub tx_lateral_offset: f64,
    pub snr_drop_threshold_db: f64,
    pub alpha: f64,
    pub geometry: RisGeometry,
    /// Spatial sampling step along the path, m.
    pub step: f64,
    pub g_t: f64,
    pub g_r: f64,
    pub p_t: f64,
    /// Noise power, W. Cadence does not depend on it.
    pub sigma_sq: f64,
    pub phase_model: PhaseModel,
}

impl TrackingScenario {
    /// 28 GHz half-wavelength `m x m` surface with the walking-user defaults.
    pub fn square(m: usize) -> Result<Self> {
        Ok(Self {
            tx_height: 3.0,
            rx_height: 1.5,
            path_start: -40.0,
            path_end: 40.0,
            user_speed: 1.4,
            ris_to_path_ground_distance: 17.0,
            tx_to_ris_ground_distance: 17.0,
            tx_ris_distance: 19.0,
            tx_lateral_offset: 0.0,
            snr_drop_threshold_db: 3.0,
            alpha: 1.0,
            geometry: RisGeometry::half_wavelength(m, m, 28e9)?,
            step: 0.01,
            g_t: 1e4,
            g_r: 10f64.powf(2.2),
            p_t: 1.0,
            sigma_sq: 4.003_882_1e-11,
            phase_model: PhaseModel::Exact,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tx_height", self.tx_height),
            ("rx_height", self.rx_height),
            ("user_speed", self.user_speed),
            ("ris_to_path_ground_distance", self.ris_to_path_ground_distance),
            ("tx_to_ris_ground_distance", self.tx_to_ris_ground_distance),
            ("tx_ris_distance", self.tx_ris_distance),
            ("snr_drop_threshold_db", self.snr_drop_threshold_db),
            ("step", self.step),
            ("g_t", self.g_t),
            ("g_r", self.g_r),
            ("p_t", self.p_t),
            ("sigma_sq", self.sigma_sq),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.path_end > self.path_start) || !self.path_start.is_finite() || !self.path_end.is_finite() {
            return Err(Error::domain("path end must lie beyond path start"));
        }
        if !self.tx_lateral_offset.is_finite() {
            return Err(Error::domain("TX lateral offset must be finite"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!("state-change probability {} outside (0, 1]", self.alpha)));
        }
        self.derived_geometry().map(|_| ())
    }

    /// RIS center height and TX position consistent with the stated distances.
    pub fn derived_geometry(&self) -> Result<DerivedGeometry> {
        let vertical_sq = self.tx_ris_distance.powi(2) - self.tx_to_ris_ground_distance.powi(2) - self.tx_lateral_offset.powi(2);
        if vertical_sq < 0.0 {
            return Err(Error::domain(format!(
                "TX-RIS distance {} m is shorter than its ground projection",
                self.tx_ris_distance
            )));
        }
        let ris_height = self.tx_height + vertical_sq.sqrt();
        Ok(DerivedGeometry {
            ris_height,
            tx_position: [self.tx_lateral_offset, self.tx_height - ris_height, self.tx_to_ris_ground_distance],
        })
    }

    /// Sample positions `path_start + i step` up to `path_end`.
    pub fn positions(&self) -> Vec<f64> {
        let n = ((self.path_end - self.path_start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.path_start + i as f64 * self.step).collect()
    }

    pub fn time_at(&self, position: f64) -> f64 {
        (position - self.path_start) / self.user_speed
    }

    fn channels_at(&self, derived: &DerivedGeometry, x: f64) -> Result<ChannelRealization> {
        let rx: Point3 = [x, self.rx_height - derived.ris_height, self.ris_to_path_ground_distance];
        let placement = Placement::from_positions(derived.tx_position, rx, self.g_t, self.g_r)?.with_phase_model(self.phase_model);
        draw_channels(&self.geometry, &placement, &FadingParams::free_space(), 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedGeometry {
    /// Height of the RIS center above ground, m.
    pub ris_height: f64,
    /// TX position in the RIS frame, m.
    pub tx_position: Point3,
}

/// One phase configuration applied at `position`. Index 0 is the initial
/// configuration at the path start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconfigEvent {
    pub index: usize,
    pub position: f64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    pub position: f64,
    pub time: f64,
    /// Linear SNR under continuous re-optimization.
    pub snr_continuous: f64,
    /// Linear SNR under the currently frozen configuration.
    pub snr_stale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackingRun {
    pub geometry: DerivedGeometry,
    pub trace: Vec<TracePoint>,
    /// Applied configurations in path order, starting with the initial one.
    pub configurations: Vec<ReconfigEvent>,
}

impl TrackingRun {
    /// Threshold-triggered reconfigurations after the initial configuration.
    pub fn events(&self) -> &[ReconfigEvent] {
        &self.configurations[1..]
    }

    /// Spacings between consecutive configurations, each tagged with its midpoint.
    pub fn intervals(&self) -> Vec<Interval> {
        self.configurations
            .windows(2)
            .map(|w| Interval {
                midpoint: 0.5 * (w[0].position + w[1].position),
                length: w[1].position - w[0].position,
                duration: w[1].time - w[0].time,
            })
            .collect()
    }

    /// Intervals whose midpoint satisfies `lo <= |midpoint| <= hi`.
    pub fn intervals_in(&self, lo: f64, hi: f64) -> Vec<Interval> {
        self.intervals()
            .into_iter()
            .filter(|i| (lo..=hi).contains(&i.midpoint.abs()))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub midpoint: f64,
    /// m.
    pub length: f64,
    /// s.
    pub duration: f64,
}

/// Mean spacing in the near (`|x| < near_limit`) and far
/// (`far_range.0 <= |x| <= far_range.1`) regions plus the fastest cadence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CadenceSummary {
    pub near_mean_spacing: Option<f64>,
    pub far_mean_spacing: Option<f64>,
    pub min_spacing: Option<f64>,
    pub min_interval_time: Option<f64>,
    pub configurations: usize,
}

pub fn cadence_summary(run: &TrackingRun, near_limit: f64, far_range: (f64, f64)) -> CadenceSummary {
    let mean = |v: &[Interval]| (!v.is_empty()).then(|| v.iter().map(|i| i.length).sum::<f64>() / v.len() as f64);
    let all = run.intervals();
    let near: Vec<Interval> = all.iter().copied().filter(|i| i.midpoint.abs() < near_limit).collect();
    let far = run.intervals_in(far_range.0, far_range.1);
    CadenceSummary {
        near_mean_spacing: mean(&near),
        far_mean_spacing: mean(&far),
        min_spacing: all.iter().map(|i| i.length).reduce(f64::min),
        min_interval_time: all.iter().map(|i| i.duration).reduce(f64::min),
        configurations: run.configurations.len(),
    }
}

/// `(position, linear SNR)` with all cells reflecting and phases
/// re-optimized at every sample.
pub fn continuous_snr_trace(scenario: &TrackingScenario) -> Result<Vec<(f64, f64)>> {
    scenario.validate()?;
    let derived = scenario.derived_geometry()?;
    let all: Vec<usize> = (0..scenario.geometry.num_cells()).collect();
    scenario
        .positions()
        .into_iter()
        .map(|x| {
            let ch = scenario.channels_at(&derived, x)?;
            Ok((x, max_snr(&ch, &all, scenario.p_t, scenario.sigma_sq)?))
        })
        .collect()
}

/// Walks the path with a frozen configuration and re-optimizes at the first
/// sample where it falls more than the threshold below continuous tracking.
pub fn simulate_tracking(scenario: &TrackingScenario) -> Result<TrackingRun> {
    scenario.validate()?;
    let derived = scenario.derived_geometry()?;
    let all: Vec<usize> = (0..scenario.geometry.num_cells()).collect();
    let positions = scenario.positions();
    let mut phases: Option<PhaseConfig> = None;
    let mut trace = Vec::with_capacity(positions.len());
    let mut configurations = Vec::new();

    for &x in &positions {
        let ch = scenario.channels_at(&derived, x)?;
        let cont = max_snr(&ch, &all, scenario.p_t, scenario.sigma_sq)?;
        let time = scenario.time_at(x);
        let mut stale = match &phases {
            Some(cfg) => snr_with_phases(&ch, &all, cfg, scenario.p_t, scenario.sigma_sq)?,
            None => f64::NEG_INFINITY,
        };
        if phases.is_none() || to_db(cont) - to_db(stale) > scenario.snr_drop_threshold_db {
            phases = Some(optimal_phases(&ch, &all)?);
            configurations.push(ReconfigEvent {
                index: configurations.len(),
                position: x,
                time,
            });
            stale = cont;
        }
        trace.push(TracePoint {
            position: x,
            time,
            snr_continuous: cont,
            snr_stale: stale,
        });
    }
    Ok(TrackingRun {
        geometry: derived,
        trace,
        configurations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerPoint {
    pub p_dynamic: f64,
    pub reconfig_duration: f64,
    pub p_r: f64,
    pub p_d_avg: f64,
}

/// `p_r = duration / (fastest inter-configuration time)` and
/// `P_d^avg = alpha p_r P_dynamic` for each grid value.
pub fn dynamic_power_curve(
    run: &TrackingRun,
    scenario: &TrackingScenario,
    reconfig_duration: f64,
    p_dynamic_grid: &[f64],
) -> Result<Vec<PowerPoint>> {
    if run.configurations.len() < 2 {
        return Err(Error::UndefinedCadence(format!(
            "{} configuration(s) recorded, at least two are needed",
            run.configurations.len()
        )));
    }
    if !(reconfig_duration >= 0.0) {
        return Err(Error::domain("reconfiguration duration must be non-negative"));
    }
    let fastest = run.intervals().iter().map(|i| i.duration).fold(f64::INFINITY, f64::min);
    if !(fastest > 0.0) {
        return Err(Error::UndefinedCadence("zero-length reconfiguration interval".into()));
    }
    let p_r = reconfig_duration / fastest;
    if p_r > 1.0 {
        return Err(Error::domain(format!("reconfiguration duty {p_r} exceeds one")));
    }
    p_dynamic_grid
        .iter()
        .map(|&p| {
            if !(p >= 0.0) {
                return Err(Error::domain("dynamic power must be non-negative"));
            }
            Ok(PowerPoint {
                p_dynamic: p,
                reconfig_duration,
                p_r,
                p_d_avg: scenario.alpha * p_r * p,
            })
        })
        .collect()
}

fn num(x: f64) -> String {
    format!("{x:?}")
}

/// `position_m,time_s,snr_db_continuous,snr_db_stale`.
pub fn write_trace_csv<W: Write>(run: &TrackingRun, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["position_m", "time_s", "snr_db_continuous", "snr_db_stale"])?;
    for p in &run.trace {
        w.write_record([num(p.position), num(p.time), num(to_db(p.snr_continuous)), num(to_db(p.snr_stale))])?;
    }
    w.flush()?;
    Ok(())
}

/// `index,position_m,time_s`, including the initial configuration.
pub fn write_events_csv<W: Write>(run: &TrackingRun, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "position_m", "time_s"])?;
    for e in &run.configurations {
        w.write_record([e.index.to_string(), num(e.position), num(e.time)])?;
    }
    w.flush()?;
    Ok(())
}

/// `p_dynamic_w,reconfig_duration_s,p_r,p_d_avg_w`.
pub fn write_pdavg_csv<W: Write>(points: &[PowerPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p_dynamic_w", "reconfig_duration_s", "p_r", "p_d_avg_w"])?;
    for p in points {
        w.write_record([num(p.p_dynamic), num(p.reconfig_duration), num(p.p_r), num(p.p_d_avg)])?;
    }
    w.flush()?;
    Ok(())
}
