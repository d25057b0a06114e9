//! Campaign aggregates and scenario comparison.
//!
//! Cycle-driven loss of state of health is taken as proportional to FEC, so
//! the relative FEC reduction between two scenarios is also the relative
//! reduction of cycling degradation. No aging constant is assumed; absolute
//! ΔSOH is only reported when the caller supplies one.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battery::BatteryState;
use crate::engine::{PhaseOutcome, TimeSeries};
use crate::mission::{expand, CampaignPlan, PhaseKind, SlotKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("run does not match plan: {0}")]
    Mismatch(String),
    #[error("campaigns are not comparable: {0}")]
    Incomparable(String),
    #[error("baseline {0} is zero while the variant's is not; reduction is undefined")]
    ZeroBaseline(&'static str),
    #[error("aging coefficient must be a non-negative finite number, got {0}")]
    InvalidCoefficient(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MissionStats {
    pub day: u32,
    pub mission: u32,
    pub start_soc: f64,
    pub min_soc: f64,
    /// Mission-start SOC minus the lowest SOC reached in the mission.
    pub depth_of_discharge: f64,
    pub delta_fec: f64,
    /// Minutes from mission start until the last charge phase ended.
    pub charge_complete_minutes: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub scenario_name: String,
    pub days: u32,
    pub missions: usize,
    pub total_fec: f64,
    pub fec_per_day: f64,
    pub fec_per_mission: f64,
    pub min_soc_overall: f64,
    pub mean_dod: f64,
    pub total_flight_hours: f64,
    pub mean_charge_complete_minutes: Option<f64>,
    pub final_state: BatteryState,
    pub per_mission: Vec<MissionStats>,
}

/// Builds the campaign aggregates from a run of `plan`.
///
/// Per-mission figures come from phase boundaries; SOC is linear inside a
/// phase so boundary extrema are the true extrema.
pub fn summarize(
    scenario_name: &str,
    series: &TimeSeries,
    outcomes: &[PhaseOutcome],
    plan: &CampaignPlan,
) -> Result<CampaignSummary, AnalysisError> {
    let slots = expand(plan);
    if slots.len() != outcomes.len() {
        return Err(AnalysisError::Mismatch(format!(
            "plan expands to {} slots but {} phase outcomes were given",
            slots.len(),
            outcomes.len()
        )));
    }
    let initial = BatteryState::new(plan.initial_soc);
    let final_state = outcomes.last().map_or(initial, |o| o.end_state);
    match series.last() {
        Some(s) if s.t_hours == final_state.clock && s.fec == final_state.fec && s.soc == final_state.soc => {}
        Some(s) => {
            return Err(AnalysisError::Mismatch(format!(
                "series ends at t = {} h (fec {}), outcomes end at t = {} h (fec {})",
                s.t_hours, s.fec, final_state.clock, final_state.fec
            )))
        }
        None => return Err(AnalysisError::Mismatch("time series is empty".into())),
    }

    let mut per_mission: Vec<MissionStats> = Vec::with_capacity(plan.mission_count());
    let mut prev = initial;
    let mut min_soc_overall = initial.soc;
    let mut total_flight_hours = 0.0;
    let mut mission_start = initial;

    for (slot, outcome) in slots.iter().zip(outcomes) {
        let end = outcome.end_state;
        min_soc_overall = min_soc_overall.min(end.soc);
        if let SlotKind::Mission { mission, position } = slot.kind {
            if position == 0 {
                mission_start = prev;
                per_mission.push(MissionStats {
                    day: slot.day,
                    mission,
                    start_soc: prev.soc,
                    min_soc: prev.soc,
                    depth_of_discharge: 0.0,
                    delta_fec: 0.0,
                    charge_complete_minutes: None,
                });
            }
            let stats = per_mission.last_mut().expect("mission opened at position 0");
            stats.min_soc = stats.min_soc.min(end.soc);
            stats.depth_of_discharge = stats.start_soc - stats.min_soc;
            stats.delta_fec = end.fec - mission_start.fec;
            match slot.phase.kind {
                PhaseKind::Charge => {
                    stats.charge_complete_minutes = Some((end.clock - mission_start.clock) * 60.0)
                }
                PhaseKind::Discharge => total_flight_hours += outcome.actual_duration,
                PhaseKind::Idle => {}
            }
        }
        prev = end;
    }

    let missions = per_mission.len();
    let total_fec = final_state.fec;
    let mean_dod = mean(per_mission.iter().map(|m| m.depth_of_discharge)).unwrap_or(0.0);
    let mean_charge_complete_minutes = mean(per_mission.iter().filter_map(|m| m.charge_complete_minutes));

    Ok(CampaignSummary {
        scenario_name: scenario_name.to_string(),
        days: plan.days,
        missions,
        total_fec,
        fec_per_day: total_fec / plan.days as f64,
        fec_per_mission: if missions == 0 { 0.0 } else { total_fec / missions as f64 },
        min_soc_overall,
        mean_dod,
        total_flight_hours,
        mean_charge_complete_minutes,
        final_state,
        per_mission,
    })
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub baseline: CampaignSummary,
    pub variant: CampaignSummary,
    /// `1 − variant.total_fec / baseline.total_fec`.
    pub fec_reduction_fraction: f64,
    /// Same ratio computed from per-day FEC rounded to two decimals.
    pub fec_reduction_rounded_daily: f64,
    /// Same ratio computed from total FEC rounded to whole cycles.
    pub fec_reduction_rounded_total: f64,
    /// `1 − variant.mean_dod / baseline.mean_dod`.
    pub dod_reduction_fraction: f64,
    /// Baseline minus variant mean charge-completion time, in minutes.
    pub charge_time_saving_minutes: Option<f64>,
    pub soh_note: String,
}

fn reduction(baseline: f64, variant: f64, what: &'static str) -> Result<f64, AnalysisError> {
    if baseline == 0.0 {
        return if variant == 0.0 { Ok(0.0) } else { Err(AnalysisError::ZeroBaseline(what)) };
    }
    Ok(1.0 - variant / baseline)
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

/// Compares a variant campaign against a baseline with the same schedule.
///
/// When the two differ only in flight current (`I_a` baseline, `I_b`
/// variant) and both recharge to the same target, discharge and recharge
/// throughput both scale with the flight current and the FEC reduction is
/// exactly `1 − I_b / I_a`.
pub fn compare(
    baseline: &CampaignSummary,
    variant: &CampaignSummary,
) -> Result<ComparisonReport, AnalysisError> {
    if baseline.days != variant.days || baseline.missions != variant.missions {
        return Err(AnalysisError::Incomparable(format!(
            "baseline has {} missions over {} days, variant {} over {}",
            baseline.missions, baseline.days, variant.missions, variant.days
        )));
    }
    let flight_scale = baseline.total_flight_hours.abs().max(variant.total_flight_hours.abs()).max(1.0);
    if (baseline.total_flight_hours - variant.total_flight_hours).abs() > 1e-9 * flight_scale {
        return Err(AnalysisError::Incomparable(format!(
            "flight time differs: {} h vs {} h",
            baseline.total_flight_hours, variant.total_flight_hours
        )));
    }

    let fec_reduction_fraction = reduction(baseline.total_fec, variant.total_fec, "FEC")?;
    let fec_reduction_rounded_daily = reduction(
        round_to(baseline.fec_per_day, 2),
        round_to(variant.fec_per_day, 2),
        "FEC",
    )?;
    let fec_reduction_rounded_total = reduction(
        round_to(baseline.total_fec, 0),
        round_to(variant.total_fec, 0),
        "FEC",
    )?;
    let dod_reduction_fraction = reduction(baseline.mean_dod, variant.mean_dod, "depth of discharge")?;
    let charge_time_saving_minutes = baseline
        .mean_charge_complete_minutes
        .zip(variant.mean_charge_complete_minutes)
        .map(|(b, v)| b - v);

    let soh_note = format!(
        "Cycle-driven SOH loss is proportional to FEC, so '{}' accrues {:.2}% of the cycling degradation of '{}'.",
        variant.scenario_name,
        100.0 * (1.0 - fec_reduction_fraction),
        baseline.scenario_name
    );

    Ok(ComparisonReport {
        baseline: baseline.clone(),
        variant: variant.clone(),
        fec_reduction_fraction,
        fec_reduction_rounded_daily,
        fec_reduction_rounded_total,
        dod_reduction_fraction,
        charge_time_saving_minutes,
        soh_note,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationEstimate {
    /// Variant cycling degradation as a fraction of the baseline's.
    pub relative_factor: f64,
    pub reduction_percent: f64,
    pub k_cycle: Option<f64>,
    /// `k_cycle · total_fec`, only with a coefficient.
    pub baseline_delta_soh: Option<f64>,
    pub variant_delta_soh: Option<f64>,
    pub statement: String,
}

pub fn estimate_relative_degradation(
    report: &ComparisonReport,
    k_cycle: Option<f64>,
) -> Result<DegradationEstimate, AnalysisError> {
    if let Some(k) = k_cycle {
        if !(k.is_finite() && k >= 0.0) {
            return Err(AnalysisError::InvalidCoefficient(k));
        }
    }
    let reduction_percent = 100.0 * report.fec_reduction_fraction;
    let mut statement = format!("cycling degradation reduced by {reduction_percent:.2}%");
    let baseline_delta_soh = k_cycle.map(|k| k * report.baseline.total_fec);
    let variant_delta_soh = k_cycle.map(|k| k * report.variant.total_fec);
    if let (Some(b), Some(v)) = (baseline_delta_soh, variant_delta_soh) {
        statement.push_str(&format!(
            "; ΔSOH {}: {b:.6}, {}: {v:.6}",
            report.baseline.scenario_name, report.variant.scenario_name
        ));
    }
    Ok(DegradationEstimate {
        relative_factor: 1.0 - report.fec_reduction_fraction,
        reduction_percent,
        k_cycle,
        baseline_delta_soh,
        variant_delta_soh,
        statement,
    })
}
