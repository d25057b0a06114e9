//! Battery-lifetime simulation for repetitive UAV missions.
//!
//! Missions are sequences of constant-current phases (flight, rest,
//! recharge). The engine integrates state of charge by coulomb counting and
//! cycling stress as full equivalent cycles (FEC), both in closed form per
//! phase, and the analysis layer compares scenarios, e.g. free flight against
//! ceiling-assisted flight that draws less current.
//!
//! ```
//! use batlife_core::{analysis, engine, mission};
//!
//! let plan = mission::inspection_campaign();
//! let scenarios = mission::inspection_scenarios();
//! let run = engine::run_campaign(&plan, &scenarios[0], 1.0 / 60.0).unwrap();
//! let summary = analysis::summarize(&run.scenario, &run.series, &run.outcomes, &plan).unwrap();
//! assert!((summary.fec_per_day - 9.1346).abs() < 1e-4);
//! ```

pub mod analysis;
pub mod battery;
pub mod config;
pub mod engine;
pub mod export;
pub mod mission;

pub use analysis::{compare, estimate_relative_degradation, summarize, CampaignSummary, ComparisonReport};
pub use battery::{BatteryParams, BatteryState, CurrentSegment, Mode};
pub use config::{parse_config, ConfigError};
pub use engine::{run_campaign, run_phase, CampaignRun, PhaseOutcome, TimeSeries};
pub use mission::{CampaignPlan, MissionProfile, Phase, PhaseKind, Scenario};
