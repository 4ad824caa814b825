//! TOML scenario files.
//!
//! Every table rejects unknown keys. Only `rsu_position` and `trajectory` are
//! required; everything else falls back to the documented defaults. See
//! `scenarios/l_shaped_approach.toml` for an annotated example.

use serde::{Deserialize, Serialize};

use crate::antenna::{AntennaArray, AntennaSelection, ArrayParams, ElementId};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Angle, Position};
use crate::propagation::{DominantPathParams, Environment, GridRegion, Obstacle};
use crate::scenario::{
    build_trajectory, RunMode, ScenarioConfig, TrajectoryPoint, DEFAULT_FREQUENCY_HZ, DEFAULT_MEASUREMENT_DELAY_S,
    DEFAULT_RSSI_OFFSET_DB, DEFAULT_RX_GAIN_DBI, DEFAULT_TX_POWER_DBM,
};
use crate::switching::{
    SwitchModel, SwitchPolicy, DEFAULT_ACTIVATION_HALFWIDTH_DEG, DEFAULT_INSERTION_LOSS_DB, DEFAULT_ISOLATION_DB,
    DEFAULT_SWITCH_LATENCY_S,
};

fn config_err(field: &str, e: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwitchingDoc {
    pub activation_halfwidth: f64,
    pub switch_latency: f64,
    pub insertion_loss: f64,
    pub isolation: f64,
}

impl Default for SwitchingDoc {
    fn default() -> Self {
        Self {
            activation_halfwidth: DEFAULT_ACTIVATION_HALFWIDTH_DEG,
            switch_latency: DEFAULT_SWITCH_LATENCY_S,
            insertion_loss: DEFAULT_INSERTION_LOSS_DB,
            isolation: DEFAULT_ISOLATION_DB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointDoc {
    pub east: f64,
    pub north: f64,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<f64>,
}

fn default_height() -> f64 {
    crate::geometry::DEFAULT_HEIGHT_M
}

/// Settings of the `sweep` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSettings {
    pub half_range: f64,
    pub step: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            half_range: 60.0,
            step: 5.0,
        }
    }
}

/// Settings of the `link` subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinkSettings {
    pub distances: Vec<f64>,
}

impl Default for LinkSettings {
    fn default() -> Self {
        let mut distances: Vec<f64> = (1..=12).map(|i| f64::from(i) * 10.0).collect();
        distances.push(127.0);
        Self { distances }
    }
}

/// Settings of the `coverage` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverageSettings {
    pub tx: Position,
    pub heading: f64,
    pub selection: AntennaSelection,
    /// South-west corner of the raster.
    pub origin: Position,
    pub width: usize,
    pub height: usize,
    pub cell_size: f64,
}

impl Default for CoverageSettings {
    fn default() -> Self {
        Self {
            tx: Position::new(0.0, 0.0),
            heading: 0.0,
            selection: AntennaSelection::Element(ElementId::new(4).expect("valid id")),
            origin: Position::new(-60.0, -20.0),
            width: 120,
            height: 160,
            cell_size: 1.0,
        }
    }
}

impl CoverageSettings {
    pub fn region(&self) -> GridRegion {
        GridRegion {
            origin: self.origin,
            cell_size: self.cell_size,
            width: self.width,
            height: self.height,
        }
    }

    pub fn heading(&self) -> Result<Angle> {
        normalize_angle(self.heading).map_err(|e| config_err("coverage.heading", e))
    }
}

/// On-disk layout of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(default = "d_frequency")]
    pub frequency: f64,
    #[serde(default = "d_tx_power")]
    pub tx_power: f64,
    #[serde(default = "d_rx_gain")]
    pub rx_gain: f64,
    #[serde(default)]
    pub rx_losses: f64,
    #[serde(default)]
    pub tx_extra_losses: f64,
    #[serde(default = "d_rssi_offset")]
    pub rssi_offset: f64,
    #[serde(default)]
    pub mode: RunMode,
    #[serde(default = "d_measurement_delay")]
    pub measurement_delay: f64,
    pub rsu_position: Position,
    #[serde(default)]
    pub antenna: ArrayParams,
    #[serde(default)]
    pub switching: SwitchingDoc,
    #[serde(default)]
    pub propagation: DominantPathParams,
    #[serde(default)]
    pub sweep: SweepSettings,
    #[serde(default)]
    pub link: LinkSettings,
    #[serde(default)]
    pub coverage: CoverageSettings,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub trajectory: Vec<PointDoc>,
}

fn d_frequency() -> f64 {
    DEFAULT_FREQUENCY_HZ
}
fn d_tx_power() -> f64 {
    DEFAULT_TX_POWER_DBM
}
fn d_rx_gain() -> f64 {
    DEFAULT_RX_GAIN_DBI
}
fn d_rssi_offset() -> f64 {
    DEFAULT_RSSI_OFFSET_DB
}
fn d_measurement_delay() -> f64 {
    DEFAULT_MEASUREMENT_DELAY_S
}

/// A parsed scenario file: the run configuration plus per-command settings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioFile {
    pub scenario: ScenarioConfig,
    pub sweep: SweepSettings,
    pub link: LinkSettings,
    pub coverage: CoverageSettings,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if !(self.sweep.step > 0.0 && self.sweep.step.is_finite()) {
            return Err(config_err("sweep.step", "must be positive"));
        }
        if !(0.0..=180.0).contains(&self.sweep.half_range) {
            return Err(config_err("sweep.half_range", "must lie in [0, 180]"));
        }
        if let Some(d) = self.link.distances.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(config_err("link.distances", format!("{d} is not a positive distance")));
        }
        self.coverage
            .region()
            .validate()
            .map_err(|e| config_err("coverage", e))?;
        self.coverage.tx.validate().map_err(|e| config_err("coverage.tx", e))?;
        self.coverage.heading()?;
        Ok(())
    }

    pub fn to_document(&self) -> ScenarioDocument {
        let s = &self.scenario;
        ScenarioDocument {
            frequency: s.frequency,
            tx_power: s.tx_power,
            rx_gain: s.rx_gain,
            rx_losses: s.rx_losses,
            tx_extra_losses: s.tx_extra_losses,
            rssi_offset: s.rssi_offset,
            mode: s.mode,
            measurement_delay: s.measurement_delay,
            rsu_position: s.rsu_position,
            antenna: s.antenna,
            switching: SwitchingDoc {
                activation_halfwidth: s.policy.activation_halfwidth,
                switch_latency: s.switch_model.switch_latency,
                insertion_loss: s.switch_model.insertion_loss,
                isolation: s.switch_model.isolation,
            },
            propagation: s.environment.params(),
            sweep: self.sweep,
            link: self.link.clone(),
            coverage: self.coverage,
            obstacles: s.environment.obstacles().to_vec(),
            trajectory: s
                .trajectory
                .iter()
                .map(|t| PointDoc {
                    east: t.position.east,
                    north: t.position.north,
                    height: t.position.height,
                    heading: Some(t.heading.degrees()),
                    time: Some(t.time),
                })
                .collect(),
        }
    }

    /// Serializes back to TOML; parsing the result yields an equal file.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_document()).map_err(|e| Error::Config(e.to_string()))
    }
}

impl TryFrom<ScenarioDocument> for ScenarioFile {
    type Error = Error;

    fn try_from(doc: ScenarioDocument) -> Result<Self> {
        let environment = Environment::new(doc.obstacles, doc.propagation).map_err(|e| config_err("obstacles", e))?;
        let array = AntennaArray::new(doc.antenna).map_err(|e| config_err("antenna", e))?;
        let points = doc
            .trajectory
            .iter()
            .map(|p| {
                Ok(TrajectoryPoint {
                    position: Position::with_height(p.east, p.north, p.height),
                    heading: p.heading.map(normalize_angle).transpose()?,
                    time: p.time,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(|e| config_err("trajectory", e))?;
        let trajectory = build_trajectory(&points).map_err(|e| config_err("trajectory", e))?;
        let file = ScenarioFile {
            scenario: ScenarioConfig {
                environment,
                antenna: doc.antenna,
                array,
                policy: SwitchPolicy {
                    activation_halfwidth: doc.switching.activation_halfwidth,
                },
                switch_model: SwitchModel {
                    switch_latency: doc.switching.switch_latency,
                    insertion_loss: doc.switching.insertion_loss,
                    isolation: doc.switching.isolation,
                },
                rsu_position: doc.rsu_position,
                trajectory,
                frequency: doc.frequency,
                tx_power: doc.tx_power,
                rx_gain: doc.rx_gain,
                rx_losses: doc.rx_losses,
                tx_extra_losses: doc.tx_extra_losses,
                rssi_offset: doc.rssi_offset,
                mode: doc.mode,
                measurement_delay: doc.measurement_delay,
            },
            sweep: doc.sweep,
            link: doc.link,
            coverage: doc.coverage,
        };
        file.validate()?;
        Ok(file)
    }
}

/// A `key=value` override; dotted keys address nested tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Override {
    pub key: String,
    pub value: String,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override {s:?} is not of the form key=value")))?;
        let key = key.trim();
        if key.is_empty() || key.split('.').any(str::is_empty) {
            return Err(Error::Config(format!("override {s:?} has an empty key")));
        }
        Ok(Self {
            key: key.to_string(),
            value: value.trim().to_string(),
        })
    }
}

fn override_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_override(root: &mut toml::Table, ov: &Override) -> Result<()> {
    let mut parts: Vec<&str> = ov.key.split('.').collect();
    let last = parts.pop().expect("non-empty key");
    let mut table = root;
    for part in parts {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override {}: {part} is not a table", ov.key)))?;
    }
    table.insert(last.to_string(), override_value(&ov.value));
    Ok(())
}

/// Parses a scenario file, applies `overrides` on top and validates the result.
pub fn parse_scenario_file(text: &str, overrides: &[Override]) -> Result<ScenarioFile> {
    let mut table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    for ov in overrides {
        apply_override(&mut table, ov)?;
    }
    let doc: ScenarioDocument = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
    ScenarioFile::try_from(doc)
}

/// Applies `overrides` to an already parsed file by round-tripping it.
pub fn apply_overrides(file: &ScenarioFile, overrides: &[Override]) -> Result<ScenarioFile> {
    if overrides.is_empty() {
        return Ok(file.clone());
    }
    parse_scenario_file(&file.to_toml()?, overrides)
}

pub fn parse_scenario_config(text: &str) -> Result<ScenarioConfig> {
    parse_scenario_file(text, &[]).map(|f| f.scenario)
}
