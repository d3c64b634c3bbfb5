//! End-to-end run: load, check compatibility, sample, aggregate, write reports.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::elicitation::{compile, load_statements, ConstraintSystem, PreferenceStatement};
use crate::error::{Error, Result};
use crate::lp::{max_epsilon, LpConfig, LpOutcome, LpStatus};
use crate::model::PerformanceTable;
use crate::report::SmaaReport;
use crate::sampler::{sample, SamplerConfig};
use crate::smaa::{aggregate, validate_against_exact_ror, Mode, RorEntry, SmaaResults};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModePolicy {
    /// Classical when compatible, otherwise bipolar.
    #[default]
    Auto,
    Classical,
    Bipolar,
}

impl FromStr for ModePolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(ModePolicy::Auto),
            "classical" => Ok(ModePolicy::Classical),
            "bipolar" => Ok(ModePolicy::Bipolar),
            _ => Err(Error::validation(format!("unknown mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Text,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" | "txt" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::validation(format!("unknown report format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: PathBuf,
    /// `None` runs with the structural rows only.
    pub statements: Option<PathBuf>,
    pub sampler: SamplerConfig,
    pub lp: LpConfig<f64>,
    pub mode: ModePolicy,
    pub out: PathBuf,
    pub formats: Vec<ReportFormat>,
    pub exact_ror: bool,
    pub dump_samples: bool,
}

impl RunConfig {
    pub fn new(problem: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        RunConfig {
            problem: problem.into(),
            statements: None,
            sampler: SamplerConfig::default(),
            lp: LpConfig::default(),
            mode: ModePolicy::Auto,
            out: out.into(),
            formats: vec![ReportFormat::Json, ReportFormat::Text, ReportFormat::Csv],
            exact_ror: false,
            dump_samples: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.problem.is_file() {
            return Err(Error::validation(format!(
                "problem file {} not found",
                self.problem.display()
            )));
        }
        if let Some(s) = self.statements.as_ref().filter(|s| !s.is_file()) {
            return Err(Error::validation(format!(
                "statements file {} not found",
                s.display()
            )));
        }
        if self.formats.is_empty() {
            return Err(Error::validation("at least one report format is required"));
        }
        self.sampler.validate()
    }
}

/// One max-epsilon solve, reduced to what the report needs.
#[derive(Debug, Clone, Serialize)]
pub struct ModelFeasibility {
    pub status: LpStatus,
    /// `None` when the system has no solution at all.
    pub epsilon_star: Option<f64>,
    pub compatible: bool,
    /// Provenance of the binding rows.
    pub binding: Vec<String>,
}

impl ModelFeasibility {
    fn new(system: &ConstraintSystem<f64>, outcome: &LpOutcome<f64>, threshold: f64) -> Self {
        ModelFeasibility {
            status: outcome.status,
            epsilon_star: outcome
                .epsilon_star
                .is_finite()
                .then_some(outcome.epsilon_star),
            compatible: outcome.is_compatible(threshold),
            binding: outcome
                .binding
                .iter()
                .map(|&i| system.rows()[i].provenance.to_string())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Feasibility {
    pub statements: usize,
    pub classical: ModelFeasibility,
    pub bipolar: ModelFeasibility,
    /// Model used for sampling, `None` when the requested one is incompatible.
    pub mode: Option<Mode>,
}

impl Feasibility {
    pub fn epsilon_classical(&self) -> Option<f64> {
        self.classical.epsilon_star
    }

    pub fn epsilon_bipolar(&self) -> Option<f64> {
        self.bipolar.epsilon_star
    }
}

/// Compiled systems for both models.
pub struct Systems {
    pub bipolar: ConstraintSystem<f64>,
    pub classical: ConstraintSystem<f64>,
}

impl Systems {
    pub fn compile(
        statements: &[PreferenceStatement],
        table: &PerformanceTable<f64>,
    ) -> Result<Self> {
        let bipolar = compile(statements, table)?;
        let classical = bipolar.restrict_classical();
        Ok(Systems { bipolar, classical })
    }

    pub fn get(&self, mode: Mode) -> &ConstraintSystem<f64> {
        match mode {
            Mode::Classical => &self.classical,
            Mode::Bipolar => &self.bipolar,
        }
    }
}

/// Solves both max-epsilon programs and applies the mode policy. Compatible
/// means `epsilon* > epsilon_min`.
pub fn assess(
    systems: &Systems,
    statements: usize,
    policy: ModePolicy,
    lp: &LpConfig<f64>,
) -> Result<Feasibility> {
    let c = max_epsilon(&systems.classical, lp)?;
    let b = max_epsilon(&systems.bipolar, lp)?;
    let classical = ModelFeasibility::new(&systems.classical, &c, lp.epsilon_min);
    let bipolar = ModelFeasibility::new(&systems.bipolar, &b, lp.epsilon_min);
    let mode = match policy {
        ModePolicy::Auto if classical.compatible => Some(Mode::Classical),
        ModePolicy::Auto | ModePolicy::Bipolar => bipolar.compatible.then_some(Mode::Bipolar),
        ModePolicy::Classical => classical.compatible.then_some(Mode::Classical),
    };
    Ok(Feasibility {
        statements,
        classical,
        bipolar,
        mode,
    })
}

/// Samples the chosen model's polytope and aggregates. Classical results
/// carry only the `n` weight columns.
pub fn analyse(
    table: &PerformanceTable<f64>,
    systems: &Systems,
    mode: Mode,
    sampler: &SamplerConfig,
    lp: &LpConfig<f64>,
) -> Result<(SmaaResults<f64>, crate::sampler::SampleBatch<f64>)> {
    let system = systems.get(mode);
    let batch = sample(system, sampler, lp)?;
    let batch = match mode {
        Mode::Classical => batch.leading_columns(table.n()),
        Mode::Bipolar => batch,
    };
    let results = aggregate(table, &batch, mode)?;
    results.check_invariants(Some(system), sampler.delta_strict)?;
    Ok((results, batch))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    Incompatible,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::Incompatible => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: RunStatus,
    pub feasibility: Feasibility,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct RorFile<'a> {
    alternatives: &'a [String],
    necessary: Vec<Vec<bool>>,
    possible: Vec<Vec<bool>>,
    violations: usize,
    discrepancies: &'a [RorEntry],
}

fn write(out: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    let path = out.join(name);
    std::fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

/// Runs the whole pipeline. Errors are input or numerical failures;
/// incompatibility is a status, reported after `feasibility.json` is written.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let table = PerformanceTable::load(&config.problem)?;
    let statements = match &config.statements {
        Some(p) => load_statements(p, &table)?,
        None => Vec::new(),
    };
    let systems = Systems::compile(&statements, &table)?;
    let feasibility = assess(&systems, statements.len(), config.mode, &config.lp)?;

    std::fs::create_dir_all(&config.out)?;
    let mut files = Vec::new();
    let out = config.out.as_path();
    write(
        out,
        "feasibility.json",
        &serde_json::to_string_pretty(&feasibility)?,
        &mut files,
    )?;
    let Some(mode) = feasibility.mode else {
        return Ok(RunSummary {
            status: RunStatus::Incompatible,
            feasibility,
            files,
        });
    };

    let (results, batch) = analyse(&table, &systems, mode, &config.sampler, &config.lp)?;
    if config.dump_samples {
        let path = out.join("samples.bin");
        let sidecar = batch.dump(&path)?;
        files.extend([path, sidecar]);
    }
    let report = SmaaReport::from_results(&results);
    let mut formats = config.formats.clone();
    formats.sort();
    formats.dedup();
    for f in formats {
        match f {
            ReportFormat::Json => write(out, "smaa_report.json", &report.to_json()?, &mut files)?,
            ReportFormat::Text => write(out, "smaa_report.txt", &report.to_text(), &mut files)?,
            ReportFormat::Csv => write(out, "smaa_report.csv", &report.to_csv()?, &mut files)?,
        }
    }
    if config.exact_ror {
        let ror = validate_against_exact_ror(&results, systems.get(mode), &table, &config.lp)?;
        let file = RorFile {
            alternatives: table.alternatives(),
            necessary: ror
                .exact
                .iter()
                .map(|r| r.iter().map(|p| p.necessary).collect())
                .collect(),
            possible: ror
                .exact
                .iter()
                .map(|r| r.iter().map(|p| p.possible).collect())
                .collect(),
            violations: ror.violations().count(),
            discrepancies: &ror.entries,
        };
        write(
            out,
            "ror_report.json",
            &serde_json::to_string_pretty(&file)?,
            &mut files,
        )?;
    }
    Ok(RunSummary {
        status: RunStatus::Completed,
        feasibility,
        files,
    })
}
