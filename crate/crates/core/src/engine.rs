//! Campaign execution.
//!
//! Every phase is a constant-current segment, so SOC is linear in time and a
//! charge-to-target crossing is solved in closed form rather than searched
//! for. FEC is booked once per phase, at the mode-change boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battery::{
    apply_segment, delta_fec, time_to_soc, BatteryError, BatteryParams, BatteryState,
    CurrentSegment, Mode,
};
use crate::mission::{apply_scenario, expand, validate, CampaignPlan, Issue, MissionError, Phase, Scenario};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CampaignError {
    #[error("sample interval must be positive and finite, got {0} h")]
    SampleInterval(f64),
    #[error("campaign failed validation ({} issue(s)): {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Issue>),
    #[error(transparent)]
    Scenario(#[from] MissionError),
    #[error("day {day}, mission {mission}, phase '{phase}': {source}")]
    Phase {
        day: u32,
        /// 0 for the inter-day gap.
        mission: u32,
        phase: String,
        #[source]
        source: BatteryError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    DurationCap,
    SocTarget,
}

/// Result of running one phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    /// Signed current held during the phase (A).
    pub current: f64,
    /// Hours actually spent in the phase; never more than its cap.
    pub actual_duration: f64,
    pub terminated_by: Termination,
    pub end_state: BatteryState,
}

impl PhaseOutcome {
    /// The constant-current segment this phase realized, if it had any length.
    pub fn segment(&self) -> Option<CurrentSegment> {
        CurrentSegment::new(self.current, self.actual_duration).ok()
    }
}

/// Runs a single phase from `state`.
///
/// A charge phase with a target stops at the analytically solved crossing
/// time `(target − soc) · C_nom · SOH / i` when that comes before the cap, and
/// its end SOC is set to the target exactly. If the battery already sits at
/// or above the target the phase ends immediately.
pub fn run_phase(
    state: &BatteryState,
    phase: &Phase,
    params: &BatteryParams,
) -> Result<PhaseOutcome, BatteryError> {
    let current = phase.signed_current();
    let mode = Mode::from_current(current);

    if let Some(target) = phase.target_soc.filter(|_| current > 0.0) {
        let crossing = if state.soc >= target {
            Some(0.0)
        } else {
            time_to_soc(state.soc, target, current, params).filter(|&t| t <= phase.max_duration)
        };
        if let Some(t) = crossing {
            let fec = match CurrentSegment::new(current, t) {
                Ok(seg) => state.fec + delta_fec(&seg, params),
                Err(_) => state.fec,
            };
            let soc = if t > 0.0 { target } else { state.soc };
            return Ok(PhaseOutcome {
                current,
                actual_duration: t,
                terminated_by: Termination::SocTarget,
                end_state: BatteryState {
                    clock: state.clock + t,
                    soc,
                    fec,
                    mode,
                },
            });
        }
    }

    let segment = CurrentSegment::new(current, phase.max_duration)?;
    let end_state = apply_segment(state, &segment, params)?;
    Ok(PhaseOutcome {
        current,
        actual_duration: phase.max_duration,
        terminated_by: Termination::DurationCap,
        end_state,
    })
}

/// One row of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_hours: f64,
    pub current_a: f64,
    pub soc: f64,
    pub fec: f64,
    pub mode: Mode,
    pub day: u32,
    /// 1-based mission index within the day; 0 during inter-day gaps.
    pub mission: u32,
}

/// Sampled trajectory with strictly increasing clocks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignRun {
    pub scenario: String,
    pub series: TimeSeries,
    pub final_state: BatteryState,
    /// One entry per slot of `expand(plan)`, in order.
    pub outcomes: Vec<PhaseOutcome>,
}

impl CampaignRun {
    /// The realized constant-current segments, zero-length phases dropped.
    pub fn segments(&self) -> Vec<CurrentSegment> {
        self.outcomes.iter().filter_map(PhaseOutcome::segment).collect()
    }
}

/// Runs the whole campaign under `scenario`.
///
/// The series holds the initial state, a sample at every phase end, and
/// interior samples on the global grid `k · sample_interval` (hours). Interior
/// SOC and FEC are interpolated linearly, which is exact for constant
/// current. The final state does not depend on `sample_interval`.
pub fn run_campaign(
    plan: &CampaignPlan,
    scenario: &Scenario,
    sample_interval: f64,
) -> Result<CampaignRun, CampaignError> {
    if !(sample_interval.is_finite() && sample_interval > 0.0) {
        return Err(CampaignError::SampleInterval(sample_interval));
    }
    let issues = validate(plan, std::slice::from_ref(scenario));
    if !issues.is_empty() {
        return Err(CampaignError::Invalid(issues));
    }
    let profile = apply_scenario(&plan.profile, scenario)?;
    let plan = CampaignPlan {
        profile,
        ..plan.clone()
    };
    let params = &plan.battery;
    let slots = expand(&plan);

    let mut state = BatteryState::new(plan.initial_soc);
    let mut outcomes = Vec::with_capacity(slots.len());
    let mut series = TimeSeries::default();
    series.samples.push(Sample {
        t_hours: state.clock,
        current_a: 0.0,
        soc: state.soc,
        fec: state.fec,
        mode: state.mode,
        day: 1,
        mission: slots.first().map_or(0, |s| s.mission()),
    });

    for slot in &slots {
        let outcome = run_phase(&state, &slot.phase, params).map_err(|source| CampaignError::Phase {
            day: slot.day,
            mission: slot.mission(),
            phase: slot.phase.name.clone(),
            source,
        })?;
        if outcome.actual_duration > 0.0 {
            push_interior(&mut series, &state, &outcome, params, sample_interval, slot.day, slot.mission());
            let end = outcome.end_state;
            series.samples.push(Sample {
                t_hours: end.clock,
                current_a: outcome.current,
                soc: end.soc,
                fec: end.fec,
                mode: end.mode,
                day: slot.day,
                mission: slot.mission(),
            });
        }
        state = outcome.end_state;
        outcomes.push(outcome);
    }

    Ok(CampaignRun {
        scenario: scenario.name.clone(),
        series,
        final_state: state,
        outcomes,
    })
}

fn push_interior(
    series: &mut TimeSeries,
    start: &BatteryState,
    outcome: &PhaseOutcome,
    params: &BatteryParams,
    dt: f64,
    day: u32,
    mission: u32,
) {
    let end_clock = outcome.end_state.clock;
    let soc_rate = (outcome.end_state.soc - start.soc) / outcome.actual_duration;
    let fec_rate = 0.5 * outcome.current.abs() / params.nominal_capacity;
    let mut k = (start.clock / dt).floor() as u64;
    loop {
        let t = k as f64 * dt;
        if t <= start.clock {
            k += 1;
            continue;
        }
        if t >= end_clock {
            break;
        }
        let elapsed = t - start.clock;
        series.samples.push(Sample {
            t_hours: t,
            current_a: outcome.current,
            soc: start.soc + soc_rate * elapsed,
            fec: start.fec + fec_rate * elapsed,
            mode: outcome.end_state.mode,
            day,
            mission,
        });
        k += 1;
    }
}
