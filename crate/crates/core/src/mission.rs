//! Declarative mission model: phases, profiles, campaign schedules and
//! current-override scenarios, plus validation and expansion into an ordered
//! list of execution slots.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battery::{BatteryParams, Mode};

/// Initial SOC used when a campaign does not specify one.
pub const DEFAULT_INITIAL_SOC: f64 = 0.95;

/// Length of the day that the default inter-day gap pads out to, in hours.
pub const DAY_HOURS: f64 = 24.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MissionError {
    #[error("scenario '{scenario}' overrides unknown phase '{phase}'")]
    UnknownPhase { scenario: String, phase: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Discharge,
    Idle,
    Charge,
}

impl PhaseKind {
    pub fn mode(&self) -> Mode {
        match self {
            PhaseKind::Discharge => Mode::Discharge,
            PhaseKind::Idle => Mode::Idle,
            PhaseKind::Charge => Mode::Charge,
        }
    }

    /// Whether `magnitude` is an admissible current for this kind.
    pub fn accepts_magnitude(&self, magnitude: f64) -> bool {
        match self {
            PhaseKind::Idle => magnitude == 0.0,
            _ => magnitude.is_finite() && magnitude > 0.0,
        }
    }
}

impl fmt::Display for PhaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.mode().fmt(f)
    }
}

/// One constant-current step of a mission.
///
/// A charge phase with a `target_soc` ends at whichever comes first: the
/// target being reached or `max_duration` elapsing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    pub kind: PhaseKind,
    /// Unsigned current in amperes; the sign comes from `kind`.
    pub current_magnitude: f64,
    /// Hours.
    pub max_duration: f64,
    pub target_soc: Option<f64>,
}

impl Phase {
    pub fn discharge(name: impl Into<String>, amps: f64, hours: f64) -> Self {
        Phase {
            name: name.into(),
            kind: PhaseKind::Discharge,
            current_magnitude: amps,
            max_duration: hours,
            target_soc: None,
        }
    }

    pub fn idle(name: impl Into<String>, hours: f64) -> Self {
        Phase {
            name: name.into(),
            kind: PhaseKind::Idle,
            current_magnitude: 0.0,
            max_duration: hours,
            target_soc: None,
        }
    }

    pub fn charge(name: impl Into<String>, amps: f64, hours: f64, target_soc: Option<f64>) -> Self {
        Phase {
            name: name.into(),
            kind: PhaseKind::Charge,
            current_magnitude: amps,
            max_duration: hours,
            target_soc,
        }
    }

    /// Signed current: positive while charging, negative while discharging.
    pub fn signed_current(&self) -> f64 {
        match self.kind {
            PhaseKind::Discharge => -self.current_magnitude,
            PhaseKind::Idle => 0.0,
            PhaseKind::Charge => self.current_magnitude,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionProfile {
    pub name: String,
    pub phases: Vec<Phase>,
}

impl MissionProfile {
    pub fn phase(&self, name: &str) -> Option<&Phase> {
        self.phases.iter().find(|p| p.name == name)
    }

    /// Sum of phase duration caps, in hours.
    pub fn nominal_duration(&self) -> f64 {
        self.phases.iter().map(|p| p.max_duration).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignPlan {
    pub battery: BatteryParams,
    pub initial_soc: f64,
    pub profile: MissionProfile,
    pub missions_per_day: u32,
    pub days: u32,
    /// Idle hours between the last mission of a day and the first of the next.
    pub inter_day_gap: f64,
}

impl CampaignPlan {
    /// Plan with the default initial SOC and an inter-day gap that pads each
    /// day out to 24 h of nominal mission time.
    pub fn new(
        battery: BatteryParams,
        profile: MissionProfile,
        missions_per_day: u32,
        days: u32,
    ) -> Self {
        let inter_day_gap = default_inter_day_gap(&profile, missions_per_day);
        CampaignPlan {
            battery,
            initial_soc: DEFAULT_INITIAL_SOC,
            profile,
            missions_per_day,
            days,
            inter_day_gap,
        }
    }

    pub fn mission_count(&self) -> usize {
        self.missions_per_day as usize * self.days as usize
    }
}

/// Hours left in a 24 h day after `missions_per_day` missions at their nominal
/// (capped) duration, floored at zero.
pub fn default_inter_day_gap(profile: &MissionProfile, missions_per_day: u32) -> f64 {
    (DAY_HOURS - missions_per_day as f64 * profile.nominal_duration()).max(0.0)
}

/// Named set of per-phase current replacements.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Phase name to replacement current magnitude (A).
    pub overrides: BTreeMap<String, f64>,
}

impl Scenario {
    pub fn new(name: impl Into<String>) -> Self {
        Scenario {
            name: name.into(),
            overrides: BTreeMap::new(),
        }
    }

    pub fn with_override(mut self, phase: impl Into<String>, amps: f64) -> Self {
        self.overrides.insert(phase.into(), amps);
        self
    }
}

/// A single validation finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    /// Dotted path to the offending item, e.g. `profile.phases[idle]`.
    pub location: String,
    pub message: String,
}

impl Issue {
    fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        Issue {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Checks every structural invariant of a plan and its scenarios. Returns all
/// findings; an empty list means the inputs are valid.
pub fn validate(plan: &CampaignPlan, scenarios: &[Scenario]) -> Vec<Issue> {
    let mut issues = Vec::new();
    let battery = &plan.battery;

    for (field, msg) in battery.issues() {
        issues.push(Issue::new(format!("battery.{field}"), msg));
    }
    let bounds_ok = battery.soc_min >= 0.0 && battery.soc_min < battery.soc_max && battery.soc_max <= 1.0;

    if !plan.initial_soc.is_finite() || (bounds_ok && !battery.contains_soc(plan.initial_soc)) {
        issues.push(Issue::new(
            "battery.initial_soc",
            format!(
                "{} lies outside the SOC bounds [{}, {}]",
                plan.initial_soc, battery.soc_min, battery.soc_max
            ),
        ));
    }

    let profile = &plan.profile;
    if profile.phases.is_empty() {
        issues.push(Issue::new("profile.phases", "a profile needs at least one phase"));
    }
    let mut seen = HashSet::new();
    for (idx, phase) in profile.phases.iter().enumerate() {
        let loc = format!("profile.phases[{idx}:{}]", phase.name);
        if !seen.insert(phase.name.as_str()) {
            issues.push(Issue::new(&loc, format!("duplicate phase name '{}'", phase.name)));
        }
        issues.extend(phase_issues(phase, battery, &loc));
    }

    if plan.missions_per_day < 1 {
        issues.push(Issue::new("schedule.missions_per_day", "must be at least 1"));
    }
    if plan.days < 1 {
        issues.push(Issue::new("schedule.days", "must be at least 1"));
    }
    if !(plan.inter_day_gap.is_finite() && plan.inter_day_gap >= 0.0) {
        issues.push(Issue::new(
            "schedule.inter_day_gap",
            format!("must be a non-negative duration, got {}", plan.inter_day_gap),
        ));
    }

    let mut scenario_names = HashSet::new();
    for scenario in scenarios {
        let loc = format!("scenarios[{}]", scenario.name);
        if !scenario_names.insert(scenario.name.as_str()) {
            issues.push(Issue::new(&loc, format!("duplicate scenario name '{}'", scenario.name)));
        }
        for (phase_name, &amps) in &scenario.overrides {
            let oloc = format!("{loc}.overrides.{phase_name}");
            match profile.phase(phase_name) {
                None => issues.push(Issue::new(
                    oloc,
                    format!("no phase named '{phase_name}' in profile '{}'", profile.name),
                )),
                Some(phase) if !phase.kind.accepts_magnitude(amps) => {
                    issues.push(Issue::new(oloc, magnitude_message(phase.kind, amps)))
                }
                Some(_) => {}
            }
        }
    }

    issues
}

fn magnitude_message(kind: PhaseKind, amps: f64) -> String {
    match kind {
        PhaseKind::Idle => format!("idle phases draw no current, got {amps} A"),
        _ => format!("{kind} phases need a positive finite current, got {amps} A"),
    }
}

fn phase_issues(phase: &Phase, battery: &BatteryParams, loc: &str) -> Vec<Issue> {
    let mut issues = Vec::new();
    if phase.name.is_empty() {
        issues.push(Issue::new(loc, "phase name must not be empty"));
    }
    if !phase.kind.accepts_magnitude(phase.current_magnitude) {
        issues.push(Issue::new(loc, magnitude_message(phase.kind, phase.current_magnitude)));
    }
    if !(phase.max_duration.is_finite() && phase.max_duration > 0.0) {
        issues.push(Issue::new(
            loc,
            format!("max_duration must be positive, got {} h", phase.max_duration),
        ));
    }
    if let Some(target) = phase.target_soc {
        if phase.kind != PhaseKind::Charge {
            issues.push(Issue::new(loc, "target_soc is only allowed on charge phases"));
        } else if !(target > 0.0 && target <= 1.0) {
            issues.push(Issue::new(loc, format!("target_soc must lie in (0, 1], got {target}")));
        } else if target > battery.soc_max || target < battery.soc_min {
            issues.push(Issue::new(
                loc,
                format!(
                    "target_soc {target} lies outside the battery SOC bounds [{}, {}]",
                    battery.soc_min, battery.soc_max
                ),
            ));
        }
    }
    issues
}

/// Copy of `profile` with the scenario's current overrides applied.
pub fn apply_scenario(
    profile: &MissionProfile,
    scenario: &Scenario,
) -> Result<MissionProfile, MissionError> {
    if let Some(missing) = scenario.overrides.keys().find(|k| profile.phase(k).is_none()) {
        return Err(MissionError::UnknownPhase {
            scenario: scenario.name.clone(),
            phase: missing.clone(),
        });
    }
    let mut out = profile.clone();
    for phase in &mut out.phases {
        if let Some(&amps) = scenario.overrides.get(&phase.name) {
            phase.current_magnitude = amps;
        }
    }
    Ok(out)
}

/// Where a slot sits in the campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotKind {
    /// `mission` is 1-based within the day, `position` is the phase index.
    Mission { mission: u32, position: usize },
    /// Idle stretch after the last mission of `day`.
    InterDayGap,
}

/// One executable step of an expanded campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct Slot {
    /// 1-based day index.
    pub day: u32,
    pub kind: SlotKind,
    pub phase: Phase,
}

impl Slot {
    /// 1-based mission index, or 0 for inter-day gaps.
    pub fn mission(&self) -> u32 {
        match self.kind {
            SlotKind::Mission { mission, .. } => mission,
            SlotKind::InterDayGap => 0,
        }
    }

    pub fn is_gap(&self) -> bool {
        self.kind == SlotKind::InterDayGap
    }
}

/// Name given to the idle phase inserted between days.
pub const GAP_PHASE_NAME: &str = "inter-day-gap";

/// Flattens the plan into execution order: day, then mission, then phase
/// position. An idle gap slot separates consecutive days when the gap is
/// non-zero.
pub fn expand(plan: &CampaignPlan) -> Vec<Slot> {
    let per_day = plan.missions_per_day as usize * plan.profile.phases.len();
    let mut slots = Vec::with_capacity(per_day * plan.days as usize + plan.days as usize);
    for day in 1..=plan.days {
        for mission in 1..=plan.missions_per_day {
            for (position, phase) in plan.profile.phases.iter().enumerate() {
                slots.push(Slot {
                    day,
                    kind: SlotKind::Mission { mission, position },
                    phase: phase.clone(),
                });
            }
        }
        if day < plan.days && plan.inter_day_gap > 0.0 {
            slots.push(Slot {
                day,
                kind: SlotKind::InterDayGap,
                phase: Phase::idle(GAP_PHASE_NAME, plan.inter_day_gap),
            });
        }
    }
    slots
}

/// The flight / idle / recharge mission from the ceiling-effect inspection
/// study: 20 min flight at 9.5 A, 5 min rest, then 2C (10.4 A) recharge back
/// to 95 % SOC capped at 20 min, flown 15 times a day for 30 days on a
/// 5.2 Ah pack.
pub fn inspection_campaign() -> CampaignPlan {
    let battery = BatteryParams::new(5.2).expect("valid pack");
    let profile = MissionProfile {
        name: "inspection".into(),
        phases: vec![
            Phase::discharge("flight", 9.5, 20.0 / 60.0),
            Phase::idle("idle", 5.0 / 60.0),
            Phase::charge("charge", 10.4, 20.0 / 60.0, Some(0.95)),
        ],
    };
    CampaignPlan::new(battery, profile, 15, 30)
}

/// Baseline (free flight) and ceiling-assisted scenarios for
/// [`inspection_campaign`].
pub fn inspection_scenarios() -> Vec<Scenario> {
    vec![
        Scenario::new("baseline"),
        Scenario::new("ceiling").with_override("flight", 8.0),
    ]
}
