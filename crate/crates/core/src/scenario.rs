//! Deterministic replays of the three measurement campaigns: the rotation
//! sweep of the array, the straight-ahead distance run, and the trajectory
//! run with automatic switching compared against an omni-only run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::antenna::{AntennaArray, AntennaSelection, ArrayParams, ElementId};
use crate::error::{invalid, Error, Result};
use crate::geometry::{bearing, normalize_angle, relative_bearing, Angle, Position};
use crate::linkbudget::LinkBudget;
use crate::propagation::{dominant_path_loss, Environment};
use crate::switching::{SwitchModel, SwitchPolicy, SwitchState};

pub const DEFAULT_FREQUENCY_HZ: f64 = 5.9e9;
pub const DEFAULT_TX_POWER_DBM: f64 = 0.0;
pub const DEFAULT_RX_GAIN_DBI: f64 = 16.0;
/// RSSI sits this many dB from the CW received power.
pub const DEFAULT_RSSI_OFFSET_DB: f64 = -8.0;
/// Time from a position fix (and switch command) to the level measurement.
pub const DEFAULT_MEASUREMENT_DELAY_S: f64 = 1e-3;
pub const DEFAULT_SAMPLE_SPACING_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Switched,
    #[serde(rename = "omni")]
    OmniOnly,
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunMode::Switched => "switched",
            RunMode::OmniOnly => "omni",
        })
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "switched" => Ok(RunMode::Switched),
            "omni" => Ok(RunMode::OmniOnly),
            other => Err(invalid(format!("unknown mode {other:?}, expected switched or omni"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// 1-based, contiguous.
    pub index: usize,
    pub time: f64,
    pub position: Position,
    pub heading: Angle,
}

/// A trajectory point as written by a user; missing heading and time are
/// filled in by [`build_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrajectoryPoint {
    pub position: Position,
    pub heading: Option<Angle>,
    pub time: Option<f64>,
}

/// Numbers the points from 1, fills missing times with 1 s spacing and
/// missing headings with the bearing toward the next distinct point (the
/// final point keeps the heading before it).
pub fn build_trajectory(points: &[TrajectoryPoint]) -> Result<Vec<TrajectorySample>> {
    if points.is_empty() {
        return Err(invalid("trajectory must contain at least one sample"));
    }
    let mut out: Vec<TrajectorySample> = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        p.position.validate()?;
        let time = match (p.time, out.last()) {
            (Some(t), _) => t,
            (None, Some(prev)) => prev.time + DEFAULT_SAMPLE_SPACING_S,
            (None, None) => 0.0,
        };
        if !time.is_finite() {
            return Err(invalid(format!("trajectory sample {} has non-finite time", i + 1)));
        }
        if let Some(prev) = out.last() {
            if time < prev.time {
                return Err(invalid(format!(
                    "trajectory time decreases at sample {} ({} < {})",
                    i + 1,
                    time,
                    prev.time
                )));
            }
        }
        let heading = match p.heading {
            Some(h) => h,
            None => points[i + 1..]
                .iter()
                .find(|q| !q.position.same_horizontal(&p.position))
                .map(|q| bearing(&p.position, &q.position))
                .transpose()?
                .or_else(|| out.last().map(|s| s.heading))
                .unwrap_or(Angle::ZERO),
        };
        out.push(TrajectorySample {
            index: i + 1,
            time,
            position: p.position,
            heading,
        });
    }
    Ok(out)
}

/// Validated inputs of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub environment: Environment,
    pub antenna: ArrayParams,
    pub array: AntennaArray,
    pub policy: SwitchPolicy,
    pub switch_model: SwitchModel,
    pub rsu_position: Position,
    pub trajectory: Vec<TrajectorySample>,
    pub frequency: f64,
    pub tx_power: f64,
    pub rx_gain: f64,
    pub rx_losses: f64,
    /// Transmit-side cable/connector losses in addition to the switch.
    pub tx_extra_losses: f64,
    pub rssi_offset: f64,
    pub mode: RunMode,
    pub measurement_delay: f64,
}

impl Default for ScenarioConfig {
    /// Vehicle at the origin heading north, roadside unit 100 m ahead.
    fn default() -> Self {
        let antenna = ArrayParams::default();
        Self {
            environment: Environment::free_space(),
            antenna,
            array: AntennaArray::default(),
            policy: SwitchPolicy::default(),
            switch_model: SwitchModel::default(),
            rsu_position: Position::new(0.0, 100.0),
            trajectory: vec![TrajectorySample {
                index: 1,
                time: 0.0,
                position: Position::new(0.0, 0.0),
                heading: Angle::ZERO,
            }],
            frequency: DEFAULT_FREQUENCY_HZ,
            tx_power: DEFAULT_TX_POWER_DBM,
            rx_gain: DEFAULT_RX_GAIN_DBI,
            rx_losses: 0.0,
            tx_extra_losses: 0.0,
            rssi_offset: DEFAULT_RSSI_OFFSET_DB,
            mode: RunMode::Switched,
            measurement_delay: DEFAULT_MEASUREMENT_DELAY_S,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |field: &str, msg: String| Error::Config(format!("{field}: {msg}"));
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(cfg(
                "frequency",
                format!("{} must be a positive number of Hz", self.frequency),
            ));
        }
        for (field, v) in [
            ("tx_power", self.tx_power),
            ("rx_gain", self.rx_gain),
            ("rssi_offset", self.rssi_offset),
        ] {
            if !v.is_finite() {
                return Err(cfg(field, format!("{v} must be finite")));
            }
        }
        for (field, v) in [
            ("rx_losses", self.rx_losses),
            ("tx_extra_losses", self.tx_extra_losses),
            ("measurement_delay", self.measurement_delay),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(cfg(field, format!("{v} must be finite and non-negative")));
            }
        }
        self.rsu_position
            .validate()
            .map_err(|e| cfg("rsu_position", e.to_string()))?;
        self.policy.validate().map_err(|e| cfg("switching", e.to_string()))?;
        self.switch_model
            .validate()
            .map_err(|e| cfg("switching", e.to_string()))?;
        if self.trajectory.is_empty() {
            return Err(cfg("trajectory", "must contain at least one sample".into()));
        }
        for (i, s) in self.trajectory.iter().enumerate() {
            if s.index != i + 1 {
                return Err(cfg(
                    "trajectory",
                    format!("sample indices must run 1..={}", self.trajectory.len()),
                ));
            }
            s.position.validate().map_err(|e| cfg("trajectory", e.to_string()))?;
            if i > 0 && s.time < self.trajectory[i - 1].time {
                return Err(cfg("trajectory", format!("time decreases at sample {}", s.index)));
            }
        }
        Ok(())
    }

    /// C_T for `selection`: the switch loss only applies to sector elements,
    /// the omni antenna has its own feed.
    pub fn tx_losses(&self, selection: AntennaSelection) -> f64 {
        match selection {
            AntennaSelection::Element(_) => self.tx_extra_losses + self.switch_model.insertion_loss,
            AntennaSelection::Omni => self.tx_extra_losses,
        }
    }

    /// Link budget template with everything but antenna and path terms.
    pub fn budget_template(&self, selection: AntennaSelection) -> LinkBudget {
        LinkBudget {
            tx_power: self.tx_power,
            tx_losses: self.tx_losses(selection),
            rx_gain: self.rx_gain,
            rx_losses: self.rx_losses,
            ..LinkBudget::default()
        }
    }

    /// Received power from a vehicle antenna at `tx` to a receiver at `rx`.
    pub fn received_power(
        &self,
        tx: &Position,
        heading: Angle,
        rx: &Position,
        selection: AntennaSelection,
    ) -> Result<LinkPower> {
        let theta_rel = relative_bearing(tx, heading, rx)?;
        let tx_gain = self.array.gain(selection, theta_rel);
        let path = dominant_path_loss(&self.environment, tx, rx, self.frequency)?;
        let p_r = LinkBudget {
            tx_gain,
            path_loss_fs: path.free_space_loss(),
            path_loss_div: path.excess_loss,
            ..self.budget_template(selection)
        }
        .received_power();
        Ok(LinkPower {
            theta_rel,
            tx_gain,
            p_r,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPower {
    pub theta_rel: Angle,
    pub tx_gain: f64,
    pub p_r: f64,
}

pub fn rssi_from_pr(p_r: f64, offset: f64) -> f64 {
    p_r + offset
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub element: ElementId,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    /// One row per (angle, element), angle-major.
    pub rows: Vec<SweepRow>,
    /// Strongest element per angle.
    pub best: Vec<SweepRow>,
}

impl SweepTable {
    pub fn min_best_gain(&self) -> f64 {
        self.best.iter().map(|r| r.gain).fold(f64::INFINITY, f64::min)
    }
}

/// Turntable replay: the array is rotated so the fixed receiver appears at
/// θ ∈ [−half_range, +half_range] in steps of `step` degrees, and every
/// element is read out at each stop.
pub fn rotation_sweep(array: &AntennaArray, half_range: f64, step: f64) -> Result<SweepTable> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid(format!("sweep step {step} must be positive")));
    }
    if !(0.0..=180.0).contains(&half_range) {
        return Err(invalid(format!("sweep half range {half_range} must lie in [0, 180]")));
    }
    let stops = ((2.0 * half_range) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity((stops + 1) * 8);
    let mut best = Vec::with_capacity(stops + 1);
    for i in 0..=stops {
        let theta = -half_range + i as f64 * step;
        let rel = normalize_angle(theta)?;
        for (element, pattern) in array.elements() {
            rows.push(SweepRow {
                theta,
                element,
                gain: pattern.gain(rel),
            });
        }
        let element = array.best_element_by_gain(rel);
        best.push(SweepRow {
            theta,
            element,
            gain: array.element(element).gain(rel),
        });
    }
    Ok(SweepTable { rows, best })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceRow {
    pub distance: f64,
    pub selection: AntennaSelection,
    pub p_r: f64,
}

/// Every selection in output order: ant1..ant8, then omni.
pub fn all_selections() -> impl Iterator<Item = AntennaSelection> {
    ElementId::all()
        .map(AntennaSelection::Element)
        .chain(std::iter::once(AntennaSelection::Omni))
}

/// Straight-ahead CW run: the receiver sits on the vehicle axis at each
/// distance and every radiator is measured in turn.
pub fn distance_run(config: &ScenarioConfig, distances: &[f64]) -> Result<Vec<DistanceRow>> {
    let tx = Position::new(0.0, 0.0);
    let mut rows = Vec::with_capacity(distances.len() * 9);
    for &d in distances {
        if !(d > 0.0 && d.is_finite()) {
            return Err(invalid(format!("distance {d} m must be positive")));
        }
        let rx = Position::new(0.0, d);
        for selection in all_selections() {
            let link = config.received_power(&tx, Angle::ZERO, &rx, selection)?;
            rows.push(DistanceRow {
                distance: d,
                selection,
                p_r: link.p_r,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStatus {
    Ok,
    /// Vehicle and roadside unit coincide horizontally; no link values.
    DegenerateGeometry,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleResult {
    pub index: usize,
    pub time: f64,
    pub position: Position,
    pub heading: Angle,
    pub status: SampleStatus,
    /// NaN when degenerate.
    pub theta_rel: f64,
    pub selection: AntennaSelection,
    pub tx_gain: f64,
    pub p_r: f64,
    pub rssi: f64,
    pub switch_count: u64,
}

/// Drives the trajectory through selection, switching and the link budget.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<SampleResult>> {
    config.validate()?;
    let rsu = config.rsu_position;
    let mut state = SwitchState::new(AntennaSelection::Omni);
    let mut out = Vec::with_capacity(config.trajectory.len());
    for s in &config.trajectory {
        let t_meas = s.time + config.measurement_delay;
        let theta = match relative_bearing(&s.position, s.heading, &rsu) {
            Ok(theta) => theta,
            Err(Error::DegenerateGeometry(_)) => {
                out.push(SampleResult {
                    index: s.index,
                    time: s.time,
                    position: s.position,
                    heading: s.heading,
                    status: SampleStatus::DegenerateGeometry,
                    theta_rel: f64::NAN,
                    selection: state.effective_selection(t_meas),
                    tx_gain: f64::NAN,
                    p_r: f64::NAN,
                    rssi: f64::NAN,
                    switch_count: state.switch_count,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let desired = match config.mode {
            RunMode::Switched => config.policy.select(&config.array, theta),
            RunMode::OmniOnly => AntennaSelection::Omni,
        };
        // A command issued while the previous switch is still settling is dropped.
        if let Ok(next) = state.apply(&config.switch_model, desired, s.time) {
            state = next;
        }
        let selection = state.effective_selection(t_meas);
        let link = config.received_power(&s.position, s.heading, &rsu, selection)?;
        out.push(SampleResult {
            index: s.index,
            time: s.time,
            position: s.position,
            heading: s.heading,
            status: SampleStatus::Ok,
            theta_rel: link.theta_rel.degrees(),
            selection,
            tx_gain: link.tx_gain,
            p_r: link.p_r,
            rssi: rssi_from_pr(link.p_r, config.rssi_offset),
            switch_count: state.switch_count,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonResult {
    /// (sample index, switched rssi − omni rssi).
    pub deltas: Vec<(usize, f64)>,
    /// Mean over samples where both runs produced a level.
    pub mean_delta: f64,
}

pub fn compare_runs(switched: &[SampleResult], omni: &[SampleResult]) -> Result<ComparisonResult> {
    if switched.len() != omni.len() {
        return Err(invalid(format!(
            "runs differ in length ({} vs {})",
            switched.len(),
            omni.len()
        )));
    }
    let mut deltas = Vec::with_capacity(switched.len());
    for (a, b) in switched.iter().zip(omni) {
        if a.index != b.index {
            return Err(invalid(format!("sample index mismatch: {} vs {}", a.index, b.index)));
        }
        deltas.push((a.index, a.rssi - b.rssi));
    }
    let valid: Vec<f64> = deltas.iter().map(|d| d.1).filter(|d| d.is_finite()).collect();
    let mean_delta = if valid.is_empty() {
        f64::NAN
    } else {
        valid.iter().sum::<f64>() / valid.len() as f64
    };
    Ok(ComparisonResult { deltas, mean_delta })
}

/// Runs the configured trajectory twice, switched and omni-only.
pub fn run_comparison(config: &ScenarioConfig) -> Result<(Vec<SampleResult>, Vec<SampleResult>, ComparisonResult)> {
    let switched = run_scenario(&ScenarioConfig {
        mode: RunMode::Switched,
        ..config.clone()
    })?;
    let omni = run_scenario(&ScenarioConfig {
        mode: RunMode::OmniOnly,
        ..config.clone()
    })?;
    let cmp = compare_runs(&switched, &omni)?;
    Ok((switched, omni, cmp))
}
