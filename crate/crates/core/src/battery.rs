//! Battery parameters, state, and the closed-form update for a
//! constant-current segment.
//!
//! Sign convention: positive current charges the battery, negative current
//! discharges it, zero is idle. Time is in hours, charge in ampere-hours.
//!
//! State of charge follows coulomb counting,
//! `soc(t) = soc(0) + ∫ i dt / (C_nom · SOH)`, and cycling stress is tracked in
//! full equivalent cycles, `FEC(t) = ∫ |i| dt / (2 · C_nom)`, so one FEC is one
//! full discharge plus one full recharge of the nominal capacity.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BatteryError {
    #[error("invalid battery parameters: {0}")]
    InvalidParams(String),
    #[error("invalid current segment: {0}")]
    InvalidSegment(String),
    /// The segment would drive SOC below `soc_min`. `at_clock` is the exact
    /// campaign clock (hours) at which the lower bound is reached.
    #[error("battery depleted: SOC reaches lower bound {soc_min} at t = {at_clock} h")]
    SocUnderflow { at_clock: f64, soc_min: f64 },
    /// The segment would drive SOC above `soc_max`. `at_clock` is the exact
    /// campaign clock (hours) at which the upper bound is reached.
    #[error("battery overcharged: SOC reaches upper bound {soc_max} at t = {at_clock} h")]
    SocOverflow { at_clock: f64, soc_max: f64 },
}

/// Battery operating mode, derived from the sign of the current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Discharge,
    Idle,
    Charge,
}

impl Mode {
    pub fn from_current(current: f64) -> Self {
        if current > 0.0 {
            Mode::Charge
        } else if current < 0.0 {
            Mode::Discharge
        } else {
            Mode::Idle
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Discharge => "discharge",
            Mode::Idle => "idle",
            Mode::Charge => "charge",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Static battery description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryParams {
    /// Nominal capacity in ampere-hours.
    pub nominal_capacity: f64,
    /// State of health in (0, 1]. Held constant over a run.
    pub soh: f64,
    pub soc_min: f64,
    pub soc_max: f64,
}

impl BatteryParams {
    /// Battery with the given nominal capacity, `soh = 1` and SOC bounds `[0, 1]`.
    pub fn new(nominal_capacity: f64) -> Result<Self, BatteryError> {
        let params = BatteryParams {
            nominal_capacity,
            soh: 1.0,
            soc_min: 0.0,
            soc_max: 1.0,
        };
        params.check()?;
        Ok(params)
    }

    pub fn with_soh(mut self, soh: f64) -> Result<Self, BatteryError> {
        self.soh = soh;
        self.check()?;
        Ok(self)
    }

    pub fn with_soc_bounds(mut self, soc_min: f64, soc_max: f64) -> Result<Self, BatteryError> {
        self.soc_min = soc_min;
        self.soc_max = soc_max;
        self.check()?;
        Ok(self)
    }

    /// Every invariant violation, as human-readable messages keyed by field.
    pub fn issues(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        if !(self.nominal_capacity.is_finite() && self.nominal_capacity > 0.0) {
            out.push((
                "nominal_capacity",
                format!("must be a positive finite number of Ah, got {}", self.nominal_capacity),
            ));
        }
        if !(self.soh > 0.0 && self.soh <= 1.0) {
            out.push(("soh", format!("must lie in (0, 1], got {}", self.soh)));
        }
        if !(self.soc_min >= 0.0 && self.soc_min < self.soc_max && self.soc_max <= 1.0) {
            out.push((
                "soc_bounds",
                format!(
                    "require 0 <= soc_min < soc_max <= 1, got [{}, {}]",
                    self.soc_min, self.soc_max
                ),
            ));
        }
        out
    }

    pub fn check(&self) -> Result<(), BatteryError> {
        match self.issues().into_iter().next() {
            None => Ok(()),
            Some((field, msg)) => Err(BatteryError::InvalidParams(format!("{field}: {msg}"))),
        }
    }

    /// Usable capacity in Ah, `C_nom · SOH`.
    pub fn effective_capacity(&self) -> f64 {
        self.nominal_capacity * self.soh
    }

    pub fn contains_soc(&self, soc: f64) -> bool {
        soc >= self.soc_min && soc <= self.soc_max
    }
}

/// A span of constant current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurrentSegment {
    /// Signed current in amperes; positive charges.
    pub current: f64,
    /// Duration in hours, strictly positive.
    pub duration: f64,
}

impl CurrentSegment {
    pub fn new(current: f64, duration: f64) -> Result<Self, BatteryError> {
        if !current.is_finite() {
            return Err(BatteryError::InvalidSegment(format!(
                "current must be finite, got {current}"
            )));
        }
        if !(duration.is_finite() && duration > 0.0) {
            return Err(BatteryError::InvalidSegment(format!(
                "duration must be positive and finite, got {duration}"
            )));
        }
        Ok(CurrentSegment { current, duration })
    }

    pub fn mode(&self) -> Mode {
        Mode::from_current(self.current)
    }

    /// Absolute charge moved through the battery, in Ah.
    pub fn throughput(&self) -> f64 {
        self.current.abs() * self.duration
    }
}

/// Instantaneous battery state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    /// Hours since campaign start.
    pub clock: f64,
    pub soc: f64,
    /// Accumulated full equivalent cycles.
    pub fec: f64,
    pub mode: Mode,
}

impl BatteryState {
    /// Fresh state at `t = 0` with no accumulated cycling.
    pub fn new(soc: f64) -> Self {
        BatteryState {
            clock: 0.0,
            soc,
            fec: 0.0,
            mode: Mode::Idle,
        }
    }
}

/// Mean C-rate over a segment. For a constant current the time average equals
/// the instantaneous `|i| / C_nom`.
pub fn mean_c_rate(segment: &CurrentSegment, params: &BatteryParams) -> f64 {
    segment.current.abs() / params.nominal_capacity
}

/// FEC increment of one mode interval: `½ · C_rate · Δt`.
pub fn delta_fec(segment: &CurrentSegment, params: &BatteryParams) -> f64 {
    0.5 * mean_c_rate(segment, params) * segment.duration
}

/// SOC change of a segment by coulomb counting, `i · Δt / (C_nom · SOH)`.
pub fn delta_soc(segment: &CurrentSegment, params: &BatteryParams) -> f64 {
    segment.current * segment.duration / params.effective_capacity()
}

/// Time (hours) for a constant current to move SOC from `from` to `to`.
/// Returns `None` when the current is zero or points away from `to`.
pub fn time_to_soc(from: f64, to: f64, current: f64, params: &BatteryParams) -> Option<f64> {
    if current == 0.0 {
        return None;
    }
    let t = (to - from) * params.effective_capacity() / current;
    (t >= 0.0).then_some(t)
}

/// Advances `state` across one constant-current segment.
///
/// SOC is monotone inside a constant-current segment, so checking the end
/// point is enough. A bound violation is reported with the exact clock at
/// which the bound is crossed; SOC is never clamped.
pub fn apply_segment(
    state: &BatteryState,
    segment: &CurrentSegment,
    params: &BatteryParams,
) -> Result<BatteryState, BatteryError> {
    let soc = state.soc + delta_soc(segment, params);
    if soc < params.soc_min {
        let dt = time_to_soc(state.soc, params.soc_min, segment.current, params).unwrap_or(0.0);
        return Err(BatteryError::SocUnderflow {
            at_clock: state.clock + dt,
            soc_min: params.soc_min,
        });
    }
    if soc > params.soc_max {
        let dt = time_to_soc(state.soc, params.soc_max, segment.current, params).unwrap_or(0.0);
        return Err(BatteryError::SocOverflow {
            at_clock: state.clock + dt,
            soc_max: params.soc_max,
        });
    }
    Ok(BatteryState {
        clock: state.clock + segment.duration,
        soc,
        fec: state.fec + delta_fec(segment, params),
        mode: segment.mode(),
    })
}

/// Total FEC of a profile evaluated in one shot as
/// `Σ |i_k| · Δt_k / (2 · C_nom)`. Agrees with summing [`delta_fec`] over the
/// same segments up to floating-point reassociation.
pub fn fec_closed_form(segments: &[CurrentSegment], params: &BatteryParams) -> f64 {
    let throughput: f64 = segments.iter().map(CurrentSegment::throughput).sum();
    throughput / (2.0 * params.nominal_capacity)
}
