//! Planar geometry in a local east/north/up frame.
//!
//! Bearings follow the compass convention: 0° is the +north axis and angles
//! grow clockwise, so due east is +90°. All angles are kept in the half-open
//! interval (−180°, +180°].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Default antenna height above ground for both vehicle and roadside unit.
pub const DEFAULT_HEIGHT_M: f64 = 1.80;

/// A point in the local tangent plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Position {
    pub east: f64,
    pub north: f64,
    #[serde(default = "default_height")]
    pub height: f64,
}

fn default_height() -> f64 {
    DEFAULT_HEIGHT_M
}

impl Position {
    /// Position at the default 1.80 m antenna height.
    pub const fn new(east: f64, north: f64) -> Self {
        Self {
            east,
            north,
            height: DEFAULT_HEIGHT_M,
        }
    }

    pub const fn with_height(east: f64, north: f64, height: f64) -> Self {
        Self { east, north, height }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.east.is_finite() && self.north.is_finite() && self.height.is_finite()) {
            return Err(invalid(format!("position {self} has non-finite coordinates")));
        }
        if self.height < 0.0 {
            return Err(invalid(format!("position height {} is negative", self.height)));
        }
        Ok(())
    }

    /// Horizontal distance to `other`, ignoring height.
    pub fn horizontal_distance(&self, other: &Position) -> f64 {
        (other.east - self.east).hypot(other.north - self.north)
    }

    pub fn same_horizontal(&self, other: &Position) -> bool {
        self.east == other.east && self.north == other.north
    }
}

impl Default for Position {
    /// The origin at default antenna height.
    fn default() -> Self {
        Self::new(0.0, 0.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.east, self.north, self.height)
    }
}

/// An angle in degrees normalized to (−180, +180].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Normalizes `raw` degrees; fails on NaN or infinities.
    pub fn from_degrees(raw: f64) -> Result<Self> {
        normalize_angle(raw)
    }

    pub fn degrees(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }

    /// Normalized difference `self − other`.
    pub fn minus(self, other: Angle) -> Angle {
        Angle(wrap(self.0 - other.0))
    }

    pub fn plus(self, other: Angle) -> Angle {
        Angle(wrap(self.0 + other.0))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}°", self.0)
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = f64::deserialize(d)?;
        normalize_angle(raw).map_err(serde::de::Error::custom)
    }
}

// Finite input only.
fn wrap(raw: f64) -> f64 {
    let r = raw.rem_euclid(360.0);
    // rem_euclid can round up to exactly 360 for tiny negative inputs.
    if r > 180.0 {
        r - 360.0
    } else if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Maps any finite angle in degrees onto (−180, +180].
pub fn normalize_angle(raw: f64) -> Result<Angle> {
    if !raw.is_finite() {
        return Err(invalid(format!("angle {raw} is not finite")));
    }
    Ok(Angle(wrap(raw)))
}

/// Straight-line 3D distance in meters.
pub fn distance(a: &Position, b: &Position) -> f64 {
    let de = b.east - a.east;
    let dn = b.north - a.north;
    let dh = b.height - a.height;
    (de * de + dn * dn + dh * dh).sqrt()
}

/// Compass bearing from `from` towards `to`.
pub fn bearing(from: &Position, to: &Position) -> Result<Angle> {
    if from.same_horizontal(to) {
        return Err(Error::DegenerateGeometry(format!(
            "bearing between horizontally coincident points {from} and {to}"
        )));
    }
    let de = to.east - from.east;
    let dn = to.north - from.north;
    normalize_angle(de.atan2(dn).to_degrees())
}

/// Angle of `remote` seen from a vehicle at `own` travelling along `heading`.
/// Positive values lie to the right of the longitudinal axis.
pub fn relative_bearing(own: &Position, heading: Angle, remote: &Position) -> Result<Angle> {
    Ok(bearing(own, remote)?.minus(heading))
}
