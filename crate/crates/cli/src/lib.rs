//! `batlife` command-line interface.
//!
//! Exit status: 0 success, 1 validation failure, 2 simulation error (SOC
//! bound violated), 3 I/O or usage error.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use batlife_core::analysis::{compare, estimate_relative_degradation, summarize, CampaignSummary, ComparisonReport, DegradationEstimate};
use batlife_core::config::{parse_document, ConfigError};
use batlife_core::engine::{run_campaign, CampaignError, CampaignRun};
use batlife_core::export::{write_timeseries_file, Format};
use batlife_core::mission::{validate, CampaignPlan, Scenario};
use clap::{Parser, Subcommand};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SIMULATION: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "batlife", version, about = "UAV battery cycling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a configuration file and list every problem found.
    Validate { config: PathBuf },
    /// Run one scenario and write its time series and summary.
    Simulate {
        config: PathBuf,
        /// Scenario to run; defaults to the first one in the file.
        #[arg(long)]
        scenario: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Spacing of interior samples, in seconds.
        #[arg(long, default_value_t = 60.0)]
        sample_interval_s: f64,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Run two scenarios and report the cycling and depth-of-discharge reduction.
    Compare {
        config: PathBuf,
        #[arg(long)]
        baseline: String,
        #[arg(long)]
        variant: String,
        #[arg(long)]
        out: PathBuf,
        /// Optional cycle-aging coefficient (ΔSOH per FEC) for absolute estimates.
        #[arg(long)]
        k_cycle: Option<f64>,
        #[arg(long, default_value_t = 60.0)]
        sample_interval_s: f64,
    },
}

/// Failure carrying the exit status it maps to.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<CampaignError> for Failure {
    fn from(e: CampaignError) -> Self {
        let code = match e {
            CampaignError::Phase { .. } => EXIT_SIMULATION,
            CampaignError::Invalid(_) | CampaignError::Scenario(_) => EXIT_INVALID,
            CampaignError::SampleInterval(_) => EXIT_USAGE,
        };
        Failure::new(code, e.to_string())
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{rendered}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Validate { config } => cmd_validate(&config, out),
        Command::Simulate {
            config,
            scenario,
            out: dir,
            sample_interval_s,
            format,
        } => cmd_simulate(&config, scenario.as_deref(), &dir, sample_interval_s, format, out),
        Command::Compare {
            config,
            baseline,
            variant,
            out: dir,
            k_cycle,
            sample_interval_s,
        } => cmd_compare(&config, &baseline, &variant, &dir, k_cycle, sample_interval_s, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_config(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("reading {}: {e}", path.display())))
}

/// Reads and fully validates a config file.
fn load(path: &Path) -> Result<(CampaignPlan, Vec<Scenario>), Failure> {
    let text = read_config(path)?;
    let (plan, scenarios) = parse_document(&text)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?
        .into_domain();
    let issues = validate(&plan, &scenarios);
    if !issues.is_empty() {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{}: {}", path.display(), ConfigError::Invalid(issues)),
        ));
    }
    Ok((plan, scenarios))
}

fn pick<'a>(scenarios: &'a [Scenario], name: &str) -> Result<&'a Scenario, Failure> {
    scenarios.iter().find(|s| s.name == name).ok_or_else(|| {
        let available: Vec<_> = scenarios.iter().map(|s| s.name.as_str()).collect();
        Failure::new(
            EXIT_USAGE,
            format!(
                "unknown scenario '{name}'; available: {}",
                if available.is_empty() { "(none)".to_string() } else { available.join(", ") }
            ),
        )
    })
}

fn sample_hours(seconds: f64) -> Result<f64, Failure> {
    if seconds.is_finite() && seconds > 0.0 {
        Ok(seconds / 3600.0)
    } else {
        Err(Failure::new(EXIT_USAGE, format!("--sample-interval-s must be positive, got {seconds}")))
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::new(EXIT_USAGE, format!("creating {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(EXIT_USAGE, format!("writing {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn cmd_validate(path: &Path, out: &mut dyn Write) -> Result<(), Failure> {
    let text = read_config(path)?;
    let doc = parse_document(&text).map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let (plan, scenarios) = doc.into_domain();
    let issues = validate(&plan, &scenarios);
    if issues.is_empty() {
        let _ = writeln!(
            out,
            "{}: ok ({} phases, {} missions/day, {} days, {} scenario(s))",
            path.display(),
            plan.profile.phases.len(),
            plan.missions_per_day,
            plan.days,
            scenarios.len()
        );
        Ok(())
    } else {
        for issue in &issues {
            let _ = writeln!(out, "{issue}");
        }
        Err(Failure::new(EXIT_INVALID, format!("{}: {} issue(s)", path.display(), issues.len())))
    }
}

fn simulate_one(plan: &CampaignPlan, scenario: &Scenario, dt_h: f64) -> Result<(CampaignRun, CampaignSummary), Failure> {
    let run = run_campaign(plan, scenario, dt_h)?;
    let summary = summarize(&scenario.name, &run.series, &run.outcomes, plan)
        .map_err(|e| Failure::new(EXIT_SIMULATION, e.to_string()))?;
    Ok((run, summary))
}

fn cmd_simulate(
    path: &Path,
    scenario: Option<&str>,
    dir: &Path,
    sample_interval_s: f64,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let dt_h = sample_hours(sample_interval_s)?;
    let (plan, scenarios) = load(path)?;
    let default = Scenario::new("default");
    let scenario = match scenario {
        Some(name) => pick(&scenarios, name)?,
        None => scenarios.first().unwrap_or(&default),
    };
    let (run, summary) = simulate_one(&plan, scenario, dt_h)?;

    ensure_dir(dir)?;
    let series_path = dir.join(format!("timeseries.{}", format.extension()));
    write_timeseries_file(&run.series, format, &series_path).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    write_file(&dir.join("summary.json"), &to_json(&summary))?;

    let _ = writeln!(
        out,
        "{}: total FEC {:.4} ({:.4}/day), min SOC {:.4}, mean DoD {:.4}; wrote {} samples to {}",
        summary.scenario_name,
        summary.total_fec,
        summary.fec_per_day,
        summary.min_soc_overall,
        summary.mean_dod,
        run.series.len(),
        series_path.display()
    );
    Ok(())
}

fn cmd_compare(
    path: &Path,
    baseline: &str,
    variant: &str,
    dir: &Path,
    k_cycle: Option<f64>,
    sample_interval_s: f64,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let dt_h = sample_hours(sample_interval_s)?;
    let (plan, scenarios) = load(path)?;
    let (b, v) = (pick(&scenarios, baseline)?, pick(&scenarios, variant)?);

    let (base, var) = std::thread::scope(|s| {
        let handle = s.spawn(|| simulate_one(&plan, v, dt_h));
        let base = simulate_one(&plan, b, dt_h);
        (base, handle.join().expect("variant run panicked"))
    });
    let (base, var) = (base?.1, var?.1);

    let report = compare(&base, &var).map_err(|e| Failure::new(EXIT_SIMULATION, e.to_string()))?;
    let degradation =
        estimate_relative_degradation(&report, k_cycle).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;

    let text = render_report(&report, &degradation);
    ensure_dir(dir)?;
    write_file(&dir.join("comparison.txt"), &text)?;
    write_file(
        &dir.join("comparison.json"),
        &to_json(&serde_json::json!({ "report": report, "degradation": degradation })),
    )?;
    let _ = write!(out, "{text}");
    Ok(())
}

/// Human-readable comparison table.
pub fn render_report(report: &ComparisonReport, degradation: &DegradationEstimate) -> String {
    let (b, v) = (&report.baseline, &report.variant);
    let mut s = String::new();
    let _ = writeln!(s, "comparison: {} vs {}", b.scenario_name, v.scenario_name);
    let _ = writeln!(s, "{:<28}{:>14}{:>14}", "", b.scenario_name, v.scenario_name);
    let mut row = |label: &str, x: f64, y: f64| {
        let _ = writeln!(s, "{label:<28}{x:>14.4}{y:>14.4}");
    };
    row("total FEC", b.total_fec, v.total_fec);
    row("FEC per day", b.fec_per_day, v.fec_per_day);
    row("FEC per mission", b.fec_per_mission, v.fec_per_mission);
    row("min SOC", b.min_soc_overall, v.min_soc_overall);
    row("mean depth of discharge", b.mean_dod, v.mean_dod);
    if let (Some(x), Some(y)) = (b.mean_charge_complete_minutes, v.mean_charge_complete_minutes) {
        row("charge complete [min]", x, y);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "fec_reduction        {:.6} ({:.3} %)", report.fec_reduction_fraction, 100.0 * report.fec_reduction_fraction);
    let _ = writeln!(
        s,
        "  from rounded values  {:.3} % (FEC/day to 0.01), {:.3} % (total FEC to 1)",
        100.0 * report.fec_reduction_rounded_daily,
        100.0 * report.fec_reduction_rounded_total
    );
    let _ = writeln!(s, "dod_reduction        {:.6} ({:.3} %)", report.dod_reduction_fraction, 100.0 * report.dod_reduction_fraction);
    match report.charge_time_saving_minutes {
        Some(m) => {
            let _ = writeln!(s, "charge_time_saving   {m:.3} min");
        }
        None => {
            let _ = writeln!(s, "charge_time_saving   n/a");
        }
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "{}", report.soh_note);
    let _ = writeln!(s, "{}", degradation.statement);
    s
}
