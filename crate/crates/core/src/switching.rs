//! Geolocation-driven beam selection and the solid-state RF switch.
//!
//! While the roadside unit lies inside the activation window around the
//! vehicle axis, the element whose boresight is nearest to it is connected;
//! outside the window the omni sleeve antenna takes over.

use crate::antenna::{AntennaArray, AntennaSelection, ElementId};
use crate::error::{invalid, Result};
use crate::geometry::Angle;

pub const DEFAULT_ACTIVATION_HALFWIDTH_DEG: f64 = 100.0;
pub const DEFAULT_SWITCH_LATENCY_S: f64 = 150e-9;
pub const DEFAULT_INSERTION_LOSS_DB: f64 = 2.5;
pub const DEFAULT_ISOLATION_DB: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchPolicy {
    /// Sector elements are used while |θ_rel| ≤ this many degrees (inclusive).
    pub activation_halfwidth: f64,
}

impl Default for SwitchPolicy {
    fn default() -> Self {
        Self {
            activation_halfwidth: DEFAULT_ACTIVATION_HALFWIDTH_DEG,
        }
    }
}

impl SwitchPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.activation_halfwidth > 0.0 && self.activation_halfwidth <= 180.0) {
            return Err(invalid(format!(
                "activation_halfwidth {} must lie in (0, 180]",
                self.activation_halfwidth
            )));
        }
        Ok(())
    }

    pub fn select(&self, array: &AntennaArray, theta_rel: Angle) -> AntennaSelection {
        if theta_rel.abs() > self.activation_halfwidth {
            return AntennaSelection::Omni;
        }
        let mut best: Option<(ElementId, f64)> = None;
        for (id, pattern) in array.elements() {
            let off = theta_rel.minus(pattern.boresight).abs();
            if best.is_none_or(|(_, b)| off < b) {
                best = Some((id, off));
            }
        }
        AntennaSelection::Element(best.expect("array has elements").0)
    }
}

pub fn select_antenna(policy: &SwitchPolicy, array: &AntennaArray, theta_rel: Angle) -> AntennaSelection {
    policy.select(array, theta_rel)
}

/// Electrical constants of the RF switch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchModel {
    /// Seconds between command and the new port carrying signal.
    pub switch_latency: f64,
    pub insertion_loss: f64,
    /// Informational only; leakage through idle ports is not modeled.
    pub isolation: f64,
}

impl Default for SwitchModel {
    fn default() -> Self {
        Self {
            switch_latency: DEFAULT_SWITCH_LATENCY_S,
            insertion_loss: DEFAULT_INSERTION_LOSS_DB,
            isolation: DEFAULT_ISOLATION_DB,
        }
    }
}

impl SwitchModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.switch_latency >= 0.0 && self.switch_latency.is_finite()) {
            return Err(invalid(format!(
                "switch_latency {} must be non-negative",
                self.switch_latency
            )));
        }
        if !(self.insertion_loss >= 0.0 && self.insertion_loss.is_finite()) {
            return Err(invalid(format!(
                "insertion_loss {} must be non-negative",
                self.insertion_loss
            )));
        }
        if !self.isolation.is_finite() {
            return Err(invalid("isolation must be finite"));
        }
        Ok(())
    }
}

/// Switch position over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchState {
    pub active: AntennaSelection,
    /// Selection that carried signal before the last switch.
    pub previous: AntennaSelection,
    /// Instant the last switch completed (command time plus latency).
    pub last_switch_time: f64,
    pub switch_count: u64,
}

impl SwitchState {
    /// A switch resting on `initial` since forever.
    pub fn new(initial: AntennaSelection) -> Self {
        Self {
            active: initial,
            previous: initial,
            last_switch_time: f64::NEG_INFINITY,
            switch_count: 0,
        }
    }

    /// Commands `desired` at time `now`.
    pub fn apply(&self, model: &SwitchModel, desired: AntennaSelection, now: f64) -> Result<SwitchState> {
        if now.is_nan() || now < self.last_switch_time {
            return Err(invalid(format!(
                "switch command at t={now} precedes last switch completion at t={}",
                self.last_switch_time
            )));
        }
        if desired == self.active {
            return Ok(*self);
        }
        Ok(SwitchState {
            active: desired,
            previous: self.active,
            last_switch_time: now + model.switch_latency,
            switch_count: self.switch_count + 1,
        })
    }

    /// True while a commanded switch has not completed.
    pub fn is_switching(&self, t: f64) -> bool {
        t < self.last_switch_time
    }

    /// Radiator carrying signal at time `t`.
    pub fn effective_selection(&self, t: f64) -> AntennaSelection {
        if self.is_switching(t) {
            self.previous
        } else {
            self.active
        }
    }
}

pub fn apply_switch(
    state: &SwitchState,
    model: &SwitchModel,
    desired: AntennaSelection,
    now: f64,
) -> Result<SwitchState> {
    state.apply(model, desired, now)
}
