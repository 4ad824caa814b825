//! Azimuth gain model of the switched horn array and the omni sleeve antenna.
//!
//! Each sector element uses a parabolic-in-dB main lobe clamped to a flat
//! floor:
//!
//! ```text
//! G(Δθ) = peak − min(12 · (Δθ / HPBW)², peak − floor)
//! ```
//!
//! where Δθ is the normalized offset from the element boresight. Elements are
//! spaced 15° apart and numbered left to right, so element 1 looks at −52.5°
//! and element 8 at +52.5° relative to the vehicle longitudinal axis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{normalize_angle, Angle};

pub const ELEMENT_COUNT: u8 = 8;
/// Angular spacing between adjacent element boresights.
pub const ELEMENT_SPACING_DEG: f64 = 15.0;

pub const DEFAULT_PEAK_GAIN_DBI: f64 = 11.0;
pub const DEFAULT_HALF_POWER_BEAMWIDTH_DEG: f64 = 45.0;
pub const DEFAULT_FLOOR_GAIN_DBI: f64 = -21.0;
pub const DEFAULT_OMNI_GAIN_DBI: f64 = 2.0;

/// Index of a sector element, 1..=8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(u8);

impl ElementId {
    pub fn new(id: u8) -> Result<Self> {
        if (1..=ELEMENT_COUNT).contains(&id) {
            Ok(Self(id))
        } else {
            Err(invalid(format!("element id {id} outside 1..={ELEMENT_COUNT}")))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// The element mirrored about the longitudinal axis (id ↔ 9 − id).
    pub fn mirrored(self) -> Self {
        Self(ELEMENT_COUNT + 1 - self.0)
    }

    pub fn all() -> impl Iterator<Item = ElementId> {
        (1..=ELEMENT_COUNT).map(ElementId)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which radiator is connected to the radio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AntennaSelection {
    Element(ElementId),
    Omni,
}

impl AntennaSelection {
    pub fn is_sector(self) -> bool {
        matches!(self, AntennaSelection::Element(_))
    }
}

impl fmt::Display for AntennaSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AntennaSelection::Element(id) => write!(f, "ant{id}"),
            AntennaSelection::Omni => f.write_str("omni"),
        }
    }
}

impl FromStr for AntennaSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "omni" {
            return Ok(AntennaSelection::Omni);
        }
        let id = s
            .strip_prefix("ant")
            .and_then(|n| n.parse::<u8>().ok())
            .ok_or_else(|| invalid(format!("unknown antenna selection {s:?}, expected ant1..ant8 or omni")))?;
        Ok(AntennaSelection::Element(ElementId::new(id)?))
    }
}

impl Serialize for AntennaSelection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AntennaSelection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Boresight of element `id`: (id − 4.5) × 15°.
pub fn element_boresight(id: u8) -> Result<Angle> {
    let id = ElementId::new(id)?;
    Ok(boresight_of(id))
}

fn boresight_of(id: ElementId) -> Angle {
    let offset = f64::from(id.0) - f64::from(ELEMENT_COUNT + 1) / 2.0;
    // |offset × 15| ≤ 52.5, already inside (−180, 180]
    normalize_angle(offset * ELEMENT_SPACING_DEG).expect("finite boresight")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorPattern {
    pub peak_gain: f64,
    pub boresight: Angle,
    /// Full width between the −3 dB points, in degrees.
    pub half_power_beamwidth: f64,
    pub floor_gain: f64,
}

impl SectorPattern {
    pub fn new(peak_gain: f64, boresight: Angle, half_power_beamwidth: f64, floor_gain: f64) -> Result<Self> {
        let p = Self {
            peak_gain,
            boresight,
            half_power_beamwidth,
            floor_gain,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.peak_gain.is_finite() && self.floor_gain.is_finite()) {
            return Err(invalid("sector gains must be finite"));
        }
        if self.peak_gain <= self.floor_gain {
            return Err(invalid(format!(
                "peak_gain {} must exceed floor_gain {}",
                self.peak_gain, self.floor_gain
            )));
        }
        if !(self.half_power_beamwidth > 0.0 && self.half_power_beamwidth < 180.0) {
            return Err(invalid(format!(
                "half_power_beamwidth {} must lie in (0, 180)",
                self.half_power_beamwidth
            )));
        }
        Ok(())
    }

    /// Gain in dBi toward `theta_rel` (angle relative to the vehicle axis).
    pub fn gain(&self, theta_rel: Angle) -> f64 {
        let offset = theta_rel.minus(self.boresight).degrees();
        let ratio = offset / self.half_power_beamwidth;
        let rolloff = 12.0 * ratio * ratio;
        self.peak_gain - rolloff.min(self.peak_gain - self.floor_gain)
    }
}

/// Free-function form of [`SectorPattern::gain`].
pub fn sector_gain(pattern: &SectorPattern, theta_rel: Angle) -> f64 {
    pattern.gain(theta_rel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmniPattern {
    pub gain: f64,
}

/// Shared element parameters used to build an [`AntennaArray`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayParams {
    pub peak_gain: f64,
    pub half_power_beamwidth: f64,
    pub floor_gain: f64,
    pub omni_gain: f64,
}

impl Default for ArrayParams {
    fn default() -> Self {
        Self {
            peak_gain: DEFAULT_PEAK_GAIN_DBI,
            half_power_beamwidth: DEFAULT_HALF_POWER_BEAMWIDTH_DEG,
            floor_gain: DEFAULT_FLOOR_GAIN_DBI,
            omni_gain: DEFAULT_OMNI_GAIN_DBI,
        }
    }
}

/// Eight sector elements plus the omni sleeve antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaArray {
    elements: Vec<SectorPattern>,
    omni: OmniPattern,
}

impl Default for AntennaArray {
    fn default() -> Self {
        Self::new(ArrayParams::default()).expect("default array parameters are valid")
    }
}

impl AntennaArray {
    pub fn new(params: ArrayParams) -> Result<Self> {
        if !params.omni_gain.is_finite() {
            return Err(invalid("omni_gain must be finite"));
        }
        let elements = ElementId::all()
            .map(|id| {
                SectorPattern::new(
                    params.peak_gain,
                    boresight_of(id),
                    params.half_power_beamwidth,
                    params.floor_gain,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            elements,
            omni: OmniPattern { gain: params.omni_gain },
        })
    }

    /// Builds an array from explicit element patterns, ordered by id.
    pub fn from_parts(elements: Vec<SectorPattern>, omni: OmniPattern) -> Result<Self> {
        if elements.len() != usize::from(ELEMENT_COUNT) {
            return Err(invalid(format!(
                "array needs exactly {ELEMENT_COUNT} elements, got {}",
                elements.len()
            )));
        }
        for e in &elements {
            e.validate()?;
        }
        if !elements
            .windows(2)
            .all(|w| w[0].boresight.degrees() < w[1].boresight.degrees())
        {
            return Err(invalid("element boresights must increase strictly with id"));
        }
        let n = elements.len();
        for i in 0..n / 2 {
            let sum = elements[i].boresight.degrees() + elements[n - 1 - i].boresight.degrees();
            if sum.abs() > 1e-9 {
                return Err(invalid("element boresights must be symmetric about 0°"));
            }
        }
        if !omni.gain.is_finite() {
            return Err(invalid("omni gain must be finite"));
        }
        Ok(Self { elements, omni })
    }

    pub fn element(&self, id: ElementId) -> &SectorPattern {
        &self.elements[usize::from(id.0 - 1)]
    }

    pub fn elements(&self) -> impl Iterator<Item = (ElementId, &SectorPattern)> {
        ElementId::all().zip(self.elements.iter())
    }

    pub fn omni(&self) -> OmniPattern {
        self.omni
    }

    /// Gain of the selected radiator toward `theta_rel`.
    pub fn gain(&self, selection: AntennaSelection, theta_rel: Angle) -> f64 {
        match selection {
            AntennaSelection::Element(id) => self.element(id).gain(theta_rel),
            AntennaSelection::Omni => self.omni.gain,
        }
    }

    /// Element with the highest gain toward `theta_rel`; lowest id wins ties.
    pub fn best_element_by_gain(&self, theta_rel: Angle) -> ElementId {
        let mut best = (ElementId(1), f64::NEG_INFINITY);
        for (id, pattern) in self.elements() {
            let g = pattern.gain(theta_rel);
            if g > best.1 {
                best = (id, g);
            }
        }
        best.0
    }
}

pub fn array_gain(array: &AntennaArray, selection: AntennaSelection, theta_rel: Angle) -> f64 {
    array.gain(selection, theta_rel)
}

pub fn best_element_by_gain(array: &AntennaArray, theta_rel: Angle) -> ElementId {
    array.best_element_by_gain(theta_rel)
}
