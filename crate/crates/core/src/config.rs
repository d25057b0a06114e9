//! TOML campaign configuration.
//!
//! The document uses operator-facing units (minutes, amperes, ampere-hours);
//! durations are converted to hours here and nowhere else. Unknown keys are
//! rejected.
//!
//! ```toml
//! [battery]
//! nominal_capacity_ah = 5.2
//!
//! [profile]
//! name = "inspection"
//! phases = [
//!   { name = "flight", kind = "discharge", current_a = 9.5, max_duration_min = 20 },
//!   { name = "idle", kind = "idle", current_a = 0.0, max_duration_min = 5 },
//!   { name = "charge", kind = "charge", current_a = 10.4, max_duration_min = 20, target_soc = 0.95 },
//! ]
//!
//! [schedule]
//! missions_per_day = 15
//! days = 30
//!
//! [[scenarios]]
//! name = "ceiling"
//! overrides = { flight = 8.0 }
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battery::BatteryParams;
use crate::mission::{
    default_inter_day_gap, validate, CampaignPlan, Issue, MissionProfile, Phase, PhaseKind, Scenario,
    DEFAULT_INITIAL_SOC,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid configuration at '{path}': {message}")]
    Semantic { path: String, message: String },
    #[error("configuration failed validation:\n{}", format_issues(.0))]
    Invalid(Vec<Issue>),
}

fn format_issues(issues: &[Issue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    pub battery: BatterySection,
    pub profile: ProfileSection,
    pub schedule: ScheduleSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<ScenarioSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatterySection {
    pub nominal_capacity_ah: f64,
    #[serde(default = "one")]
    pub soh: f64,
    #[serde(default = "default_initial_soc")]
    pub initial_soc: f64,
    #[serde(default)]
    pub soc_min: f64,
    #[serde(default = "one")]
    pub soc_max: f64,
}

fn one() -> f64 {
    1.0
}

fn default_initial_soc() -> f64 {
    DEFAULT_INITIAL_SOC
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub name: String,
    pub phases: Vec<PhaseSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    pub name: String,
    pub kind: PhaseKind,
    pub current_a: f64,
    pub max_duration_min: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_soc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub missions_per_day: u32,
    pub days: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inter_day_gap_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: String,
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

fn minutes_to_hours(minutes: f64) -> f64 {
    minutes / 60.0
}

/// Minutes value that converts back to exactly `hours`. `hours · 60` is tried
/// first; if rounding breaks the round trip a neighbouring float is used.
fn hours_to_minutes(hours: f64) -> f64 {
    let guess = hours * 60.0;
    if !guess.is_finite() || minutes_to_hours(guess) == hours {
        return guess;
    }
    let (mut down, mut up) = (guess, guess);
    for _ in 0..4 {
        down = down.next_down();
        up = up.next_up();
        if minutes_to_hours(down) == hours {
            return down;
        }
        if minutes_to_hours(up) == hours {
            return up;
        }
    }
    guess
}

impl ConfigDocument {
    pub fn into_domain(self) -> (CampaignPlan, Vec<Scenario>) {
        let b = self.battery;
        let battery = BatteryParams {
            nominal_capacity: b.nominal_capacity_ah,
            soh: b.soh,
            soc_min: b.soc_min,
            soc_max: b.soc_max,
        };
        let profile = MissionProfile {
            name: self.profile.name,
            phases: self
                .profile
                .phases
                .into_iter()
                .map(|p| Phase {
                    name: p.name,
                    kind: p.kind,
                    current_magnitude: p.current_a,
                    max_duration: minutes_to_hours(p.max_duration_min),
                    target_soc: p.target_soc,
                })
                .collect(),
        };
        let inter_day_gap = match self.schedule.inter_day_gap_min {
            Some(min) => minutes_to_hours(min),
            None => default_inter_day_gap(&profile, self.schedule.missions_per_day),
        };
        let plan = CampaignPlan {
            battery,
            initial_soc: b.initial_soc,
            profile,
            missions_per_day: self.schedule.missions_per_day,
            days: self.schedule.days,
            inter_day_gap,
        };
        let scenarios = self
            .scenarios
            .into_iter()
            .map(|s| Scenario {
                name: s.name,
                overrides: s.overrides,
            })
            .collect();
        (plan, scenarios)
    }

    pub fn from_domain(plan: &CampaignPlan, scenarios: &[Scenario]) -> Self {
        ConfigDocument {
            battery: BatterySection {
                nominal_capacity_ah: plan.battery.nominal_capacity,
                soh: plan.battery.soh,
                initial_soc: plan.initial_soc,
                soc_min: plan.battery.soc_min,
                soc_max: plan.battery.soc_max,
            },
            profile: ProfileSection {
                name: plan.profile.name.clone(),
                phases: plan
                    .profile
                    .phases
                    .iter()
                    .map(|p| PhaseSection {
                        name: p.name.clone(),
                        kind: p.kind,
                        current_a: p.current_magnitude,
                        max_duration_min: hours_to_minutes(p.max_duration),
                        target_soc: p.target_soc,
                    })
                    .collect(),
            },
            schedule: ScheduleSection {
                missions_per_day: plan.missions_per_day,
                days: plan.days,
                inter_day_gap_min: Some(hours_to_minutes(plan.inter_day_gap)),
            },
            scenarios: scenarios
                .iter()
                .map(|s| ScenarioSection {
                    name: s.name.clone(),
                    overrides: s.overrides.clone(),
                })
                .collect(),
        }
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses a document without validating its contents.
pub fn parse_document(text: &str) -> Result<ConfigDocument, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        ConfigError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::Semantic {
            path,
            message: e.into_inner().message().to_string(),
        }
    })
}

/// Parses and validates a configuration into a campaign plan and scenarios.
pub fn parse_config(text: &str) -> Result<(CampaignPlan, Vec<Scenario>), ConfigError> {
    let (plan, scenarios) = parse_document(text)?.into_domain();
    let issues = validate(&plan, &scenarios);
    if issues.is_empty() {
        Ok((plan, scenarios))
    } else {
        Err(ConfigError::Invalid(issues))
    }
}

/// Renders a plan and scenarios back to TOML.
pub fn to_config_string(plan: &CampaignPlan, scenarios: &[Scenario]) -> String {
    toml::to_string(&ConfigDocument::from_domain(plan, scenarios))
        .expect("config document always serializes")
}

/// The shipped configuration for the 30-day inspection campaign.
pub const SHIPPED_CONFIG: &str = include_str!("../../../configs/paper_baseline.toml");

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::{inspection_campaign, inspection_scenarios};

    #[test]
    fn shipped_config_matches_builtin_plan() {
        let (plan, scenarios) = parse_config(SHIPPED_CONFIG).unwrap();
        let expected = inspection_campaign();
        assert_eq!(plan.profile, expected.profile);
        assert_eq!(plan.battery, expected.battery);
        assert_eq!(plan.initial_soc, 0.95);
        assert_eq!((plan.missions_per_day, plan.days), (15, 30));
        assert!((plan.inter_day_gap - 12.75).abs() < 1e-12);
        assert_eq!(scenarios, inspection_scenarios());

        let flight = &plan.profile.phases[0];
        assert_eq!(flight.signed_current(), -9.5);
        assert_eq!(flight.max_duration, 20.0 / 60.0);
        assert_eq!(plan.profile.phases[2].target_soc, Some(0.95));
    }

    #[test]
    fn missing_battery_names_section() {
        let text = SHIPPED_CONFIG.replace("[battery]", "[unused]");
        // the renamed table is itself unknown, so drop it instead
        let text: String = text
            .lines()
            .filter(|l| !l.starts_with("[unused]") && !l.starts_with("nominal_capacity_ah"))
            .collect::<Vec<_>>()
            .join("\n");
        match parse_config(&text) {
            Err(ConfigError::Semantic { message, .. }) => assert!(message.contains("battery"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn target_above_one_rejected() {
        let text = SHIPPED_CONFIG.replace("target_soc = 0.95", "target_soc = 1.2");
        match parse_config(&text) {
            Err(ConfigError::Invalid(issues)) => {
                assert!(issues.iter().any(|i| i.message.contains("target_soc")))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let text = "[battery]\nnominal_capacity_ah = = 5\n";
        match parse_config(text) {
            Err(ConfigError::Syntax { line, column, .. }) => {
                assert_eq!(line, 2);
                assert!(column > 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_path() {
        let text = SHIPPED_CONFIG.replace("days = 30", "days = 30\nweeks = 4");
        match parse_config(&text) {
            Err(ConfigError::Semantic { path, message }) => {
                assert!(path.contains("schedule"), "{path}");
                assert!(message.contains("weeks"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_days_is_semantic_error() {
        let text = SHIPPED_CONFIG.replace("days = 30", "days = -3");
        assert!(matches!(parse_config(&text), Err(ConfigError::Semantic { .. })));
    }

    #[test]
    fn negative_duration_is_invalid() {
        let text = SHIPPED_CONFIG.replace("max_duration_min = 5", "max_duration_min = -5");
        assert!(matches!(parse_config(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn defaults_applied() {
        let text = r#"
            [battery]
            nominal_capacity_ah = 2.0
            [profile]
            name = "p"
            phases = [{ name = "f", kind = "discharge", current_a = 1, max_duration_min = 30 }]
            [schedule]
            missions_per_day = 2
            days = 1
        "#;
        let (plan, scenarios) = parse_config(text).unwrap();
        assert_eq!(plan.battery.soh, 1.0);
        assert_eq!((plan.battery.soc_min, plan.battery.soc_max), (0.0, 1.0));
        assert_eq!(plan.initial_soc, 0.95);
        assert_eq!(plan.inter_day_gap, 23.0);
        assert!(scenarios.is_empty());
    }

    #[test]
    fn serialize_round_trip_is_fixed_point() {
        let (plan, scenarios) = parse_config(SHIPPED_CONFIG).unwrap();
        let text = to_config_string(&plan, &scenarios);
        let (plan2, scenarios2) = parse_config(&text).unwrap();
        assert_eq!(plan, plan2);
        assert_eq!(scenarios, scenarios2);
    }

    #[test]
    fn minute_conversion_inverts() {
        for m in [0.1, 1.0, 5.0, 7.3, 20.0, 45.0, 765.0, 1e-3, 12345.678] {
            let h = minutes_to_hours(m);
            assert_eq!(minutes_to_hours(hours_to_minutes(h)), h, "{m}");
        }
    }
}
