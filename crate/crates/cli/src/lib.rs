//! Command implementations behind the `cnnpart` binary.
//!
//! Every `cmd_*` function returns its standard-output text so it can be
//! driven from tests without spawning a process.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cnnpart_core::{
    battery_lifetime, breakdown_rows, comm_heights, estimate, load_profile, make_plan, parse_model, plan_data, plan_horizontal,
    report, run_sweep, simulate_data_volumes, simulate_horizontal_volumes, synthesize_profile, CommCostModel, DataPlan,
    DeviceProfile, GaConfig, HorizontalPlan, NetworkModel, Objective, Plan, PlanFile, PlannerInfo, SearchMethod, Strategy,
};

#[derive(Debug, Parser)]
#[command(name = "cnnpart", version, about = "Plan CNN partitions across edge devices and estimate per-device energy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Max,
    Spread,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = GaConfig::default().population_size)]
    pub population: usize,
    #[arg(long, default_value_t = GaConfig::default().generations)]
    pub generations: usize,
    #[arg(long, default_value_t = GaConfig::default().mutation_rate)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = GaConfig::default().tournament_size)]
    pub tournament: usize,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Max)]
    pub objective: ObjectiveArg,
    /// Use dynamic programming (sequential) and exhaustive search (vertical) instead of the GA.
    #[arg(long)]
    pub exact: bool,
}

impl Default for SearchArgs {
    fn default() -> Self {
        let d = GaConfig::default();
        Self {
            seed: d.seed,
            population: d.population_size,
            generations: d.generations,
            mutation_rate: d.mutation_rate,
            tournament: d.tournament_size,
            objective: ObjectiveArg::Max,
            exact: false,
        }
    }
}

impl SearchArgs {
    pub fn method(&self) -> SearchMethod {
        if self.exact {
            return SearchMethod::Exact;
        }
        SearchMethod::Genetic(GaConfig {
            population_size: self.population,
            generations: self.generations,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament,
            seed: self.seed,
            objective: match self.objective {
                ObjectiveArg::Max => Objective::Max,
                ObjectiveArg::Spread => Objective::Spread,
            },
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a partition plan.
    Plan {
        #[arg(long)]
        model: PathBuf,
        /// Required for sequential and vertical.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long)]
        strategy: Strategy,
        #[arg(long)]
        partitions: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the plan here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Per-partition energy breakdown of a plan.
    Estimate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Maximum per-device energy for every strategy and device count.
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        max_devices: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the closed-form halo and channel counts against row and channel enumeration.
    Validate {
        #[arg(long)]
        model: PathBuf,
        /// Check this data or horizontal plan instead of balanced plans for 1..=6 partitions.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Battery lifetime under continuous inference.
    Lifetime {
        #[arg(long)]
        capacity_mah: f64,
        #[arg(long)]
        voltage: f64,
        #[arg(long)]
        energy_per_image: f64,
        #[arg(long)]
        time_per_image: f64,
        /// Print only the JSON report.
        #[arg(long, value_enum)]
        format: Option<LifetimeFormat>,
    },
    /// Write a synthetic profile for a model from per-operation and per-element costs.
    SynthProfile {
        #[arg(long)]
        model: PathBuf,
        /// Computation energy per output element per window tap, in joules.
        #[arg(long)]
        comp_cost: f64,
        #[arg(long, default_value_t = 0.0)]
        internal_base: f64,
        #[arg(long, default_value_t = 0.0)]
        internal_per_element: f64,
        #[arg(long, default_value_t = 0.0)]
        external_base: f64,
        #[arg(long, default_value_t = 0.0)]
        external_per_element: f64,
        #[arg(long)]
        device_name: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LifetimeFormat {
    Json,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<NetworkModel> {
    parse_model(&read(path)?).with_context(|| format!("in model {}", path.display()))
}

pub fn load_device(path: &Path, model: &NetworkModel) -> Result<DeviceProfile> {
    load_profile(&read(path)?, model).with_context(|| format!("in profile {}", path.display()))
}

pub fn load_plan(path: &Path) -> Result<PlanFile> {
    PlanFile::from_json(&read(path)?).with_context(|| format!("in plan {}", path.display()))
}

pub fn cmd_plan(model_path: &Path, profile_path: Option<&Path>, strategy: Strategy, partitions: usize, search: &SearchArgs) -> Result<String> {
    let model = load_model(model_path)?;
    let file = match (strategy, profile_path) {
        (Strategy::Data, _) => PlanFile {
            plan: Plan::Data(plan_data(&model, partitions)?),
            planner: Some(PlannerInfo { method: "balanced".into(), ga: None }),
        },
        (Strategy::Horizontal, _) => PlanFile {
            plan: Plan::Horizontal(plan_horizontal(&model, partitions)?),
            planner: Some(PlannerInfo { method: "balanced".into(), ga: None }),
        },
        (_, None) => bail!("--profile is required for the {strategy} strategy"),
        (_, Some(p)) => {
            let profile = load_device(p, &model)?;
            make_plan(&model, &profile, strategy, partitions, &search.method())?
        }
    };
    Ok(file.to_json()?)
}

pub fn cmd_estimate(model_path: &Path, profile_path: &Path, plan_path: &Path, format: Format) -> Result<String> {
    let model = load_model(model_path)?;
    let profile = load_device(profile_path, &model)?;
    let file = load_plan(plan_path)?;
    let summary = estimate(&model, &profile, &file.plan)?;
    let rows = breakdown_rows(file.plan.strategy(), &summary);
    emit(&rows, format)
}

pub fn cmd_sweep(model_path: &Path, profile_path: &Path, max_devices: usize, search: &SearchArgs, format: Format) -> Result<String> {
    if max_devices < 2 {
        bail!("--max-devices must be at least 2");
    }
    let model = load_model(model_path)?;
    let profile = load_device(profile_path, &model)?;
    let sweep = run_sweep(&model, &profile, max_devices, &search.method())?;
    emit(&sweep.rows, format)
}

fn emit<T: Serialize>(rows: &[T], format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => report::to_csv(rows)?,
        Format::Json => report::to_json(rows)?,
    })
}

/// Outcome of a validation run; `mismatches == 0` means full agreement.
#[derive(Debug, Clone)]
pub struct Validation {
    pub report: String,
    pub mismatches: usize,
    pub checks: usize,
}

#[derive(Default)]
struct Table {
    text: String,
    mismatches: usize,
    checks: usize,
}

impl Table {
    fn row(&mut self, strategy: &str, m: usize, consumer: usize, closed: &[u64], oracle: &[u64]) {
        self.checks += 1;
        let ok = closed == oracle;
        if !ok {
            self.mismatches += 1;
        }
        let _ = writeln!(
            self.text,
            "{strategy:<10} {m:>2} {consumer:>5}  {:<28} {:<28} {}",
            format!("{closed:?}"),
            format!("{oracle:?}"),
            if ok { "ok" } else { "MISMATCH" }
        );
    }

    fn data(&mut self, model: &NetworkModel, plan: &DataPlan) {
        let closed = comm_heights(model, plan);
        let oracle = simulate_data_volumes(model, plan);
        for (i, rows) in closed.iter().enumerate() {
            let closed: Vec<u64> = rows.iter().map(|&h| h as u64).collect();
            self.row("data", plan.partitions, model.layers[i + 1].id, &closed, &oracle.remote_units[i]);
        }
        if !oracle.is_balanced() {
            self.mismatches += 1;
            let _ = writeln!(self.text, "data       {:>2}  sent and received element counts differ", plan.partitions);
        }
    }

    fn horizontal(&mut self, model: &NetworkModel, plan: &HorizontalPlan) {
        let oracle = simulate_horizontal_volumes(model, plan);
        for (i, pair) in model.layers.windows(2).enumerate() {
            let total = pair[0].out_shape.channels as u64;
            let closed: Vec<u64> = plan.channels[i].iter().map(|&c| total - c as u64).collect();
            self.row("horizontal", plan.partitions, pair[1].id, &closed, &oracle.remote_units[i]);
        }
        if !oracle.is_balanced() {
            self.mismatches += 1;
            let _ = writeln!(self.text, "horizontal {:>2}  sent and received element counts differ", plan.partitions);
        }
    }
}

/// Compares closed-form remote rows (data) and remote channels (horizontal)
/// with the enumeration oracle for every consumer layer.
pub fn cmd_validate(model_path: &Path, plan_path: Option<&Path>) -> Result<Validation> {
    let model = load_model(model_path)?;
    let mut table = Table::default();
    let _ = writeln!(table.text, "{:<10} {:>2} {:>5}  {:<28} {:<28} status", "strategy", "M", "layer", "closed_form", "oracle");
    match plan_path {
        Some(path) => {
            let file = load_plan(path)?;
            file.plan.validate(&model)?;
            match &file.plan {
                Plan::Data(p) => table.data(&model, p),
                Plan::Horizontal(p) => table.horizontal(&model, p),
                other => bail!("{} plans have no intra-layer communication to validate", other.strategy()),
            }
        }
        None => {
            for m in 1..=6 {
                table.data(&model, &plan_data(&model, m)?);
                table.horizontal(&model, &plan_horizontal(&model, m)?);
            }
        }
    }
    let _ = writeln!(table.text, "{} checks, {} mismatches", table.checks, table.mismatches);
    Ok(Validation { report: table.text, mismatches: table.mismatches, checks: table.checks })
}

pub fn cmd_lifetime(capacity_mah: f64, voltage: f64, energy_per_image: f64, time_per_image: f64, json_only: bool) -> Result<String> {
    let life = battery_lifetime(capacity_mah, voltage, energy_per_image, time_per_image)?;
    let json = serde_json::to_string(&life)?;
    if json_only {
        return Ok(json + "\n");
    }
    Ok(format!(
        "battery: {:.0} J\npower: {:.4} W\nlifetime: {:.1} days ({:.0} s)\nimages: {}\n{json}\n",
        life.battery_joules, life.power_watts, life.days, life.seconds, life.images
    ))
}

pub fn cmd_synth_profile(model_path: &Path, comp_cost: f64, internal: CommCostModel, external: CommCostModel, device_name: Option<String>) -> Result<String> {
    let model = load_model(model_path)?;
    let mut profile = synthesize_profile(&model, comp_cost, internal, external);
    if let Some(name) = device_name {
        profile.device_name = name;
    }
    Ok(profile.to_document()?)
}

fn deliver(text: &str, output: Option<&Path>) -> Result<String> {
    match output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(text.to_string()),
    }
}

/// Runs a parsed command and returns what goes to standard output.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Plan { model, profile, strategy, partitions, search, output } => {
            let text = cmd_plan(&model, profile.as_deref(), strategy, partitions, &search)?;
            deliver(&text, output.as_deref())
        }
        Command::Estimate { model, profile, plan, format } => cmd_estimate(&model, &profile, &plan, format),
        Command::Sweep { model, profile, max_devices, search, format, output } => {
            let text = cmd_sweep(&model, &profile, max_devices, &search, format)?;
            deliver(&text, output.as_deref())
        }
        Command::Validate { model, plan } => {
            let v = cmd_validate(&model, plan.as_deref())?;
            if v.mismatches > 0 {
                bail!("{}closed form and oracle disagree", v.report);
            }
            Ok(v.report)
        }
        Command::Lifetime { capacity_mah, voltage, energy_per_image, time_per_image, format } => {
            cmd_lifetime(capacity_mah, voltage, energy_per_image, time_per_image, format.is_some())
        }
        Command::SynthProfile {
            model,
            comp_cost,
            internal_base,
            internal_per_element,
            external_base,
            external_per_element,
            device_name,
            output,
        } => {
            let text = cmd_synth_profile(
                &model,
                comp_cost,
                CommCostModel::new(internal_base, internal_per_element),
                CommCostModel::new(external_base, external_per_element),
                device_name,
            )?;
            deliver(&text, output.as_deref())
        }
    }
}
