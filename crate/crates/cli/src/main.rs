use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use smaa_promethee::pipeline::{run, Feasibility, ModePolicy, ReportFormat, RunConfig, RunStatus};
use smaa_promethee::{LpConfig, SamplerConfig};

/// Classical and bipolar PROMETHEE with SMAA over compatible parameters.
///
/// Exit status: 0 on success, 2 when the requested model cannot restore the
/// statements, 1 on input or numerical errors. `SMAA_THREADS` caps the
/// worker count.
#[derive(Debug, Parser)]
#[command(name = "smaa-promethee", version)]
struct Cli {
    /// Performance table (`.json` with criteria, or `.csv` evaluation matrix).
    #[arg(long)]
    problem: PathBuf,
    /// JSON-lines preference statements; omitted means none.
    #[arg(long)]
    statements: Option<PathBuf>,
    /// Number of parameter samples.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto", value_parser = parse_mode)]
    mode: ModePolicy,
    /// Also solve the exact necessary/possible relations and write ror_report.json.
    #[arg(long)]
    exact_ror: bool,
    #[arg(long, default_value = "smaa-out")]
    out: PathBuf,
    /// Comma-separated subset of json, text, csv.
    #[arg(long, value_delimiter = ',', default_value = "json,text,csv", value_parser = parse_format)]
    format: Vec<ReportFormat>,
    /// Value the strictness margin is fixed to while sampling.
    #[arg(long, default_value_t = 0.0)]
    delta_strict: f64,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Independent sampling chains.
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Write samples.bin (row-major little-endian f64) plus a JSON sidecar.
    #[arg(long)]
    dump_samples: bool,
}

fn parse_mode(s: &str) -> Result<ModePolicy, String> {
    s.parse().map_err(|e: smaa_promethee::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: smaa_promethee::Error| e.to_string())
}

impl Cli {
    fn config(self) -> RunConfig {
        RunConfig {
            problem: self.problem,
            statements: self.statements,
            sampler: SamplerConfig {
                sample_count: self.samples,
                burn_in: self.burn_in,
                thinning: self.thin,
                seed: self.seed,
                delta_strict: self.delta_strict,
                chains: self.chains,
            },
            lp: LpConfig::default(),
            mode: self.mode,
            out: self.out,
            formats: self.format,
            exact_ror: self.exact_ror,
            dump_samples: self.dump_samples,
        }
    }
}

fn epsilon(e: Option<f64>) -> String {
    e.map_or_else(|| "infeasible".to_string(), |v| format!("{v:.6}"))
}

fn describe(f: &Feasibility) -> String {
    format!(
        "epsilon classical = {}, epsilon bipolar = {}",
        epsilon(f.epsilon_classical()),
        epsilon(f.epsilon_bipolar())
    )
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("SMAA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SMAA_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let config = cli.config();
    match run(&config) {
        Ok(summary) => {
            let f = &summary.feasibility;
            match summary.status {
                RunStatus::Completed => {
                    let mode = f.mode.expect("completed runs have a mode");
                    // a closed stdout must not turn a finished run into a failure
                    let mut out = std::io::stdout().lock();
                    let _ = writeln!(out, "{}; sampled the {mode} model", describe(f));
                    for p in &summary.files {
                        let _ = writeln!(out, "wrote {}", p.display());
                    }
                }
                RunStatus::Incompatible => {
                    eprintln!("incompatible statements: {}", describe(f));
                    let model = match config.mode {
                        ModePolicy::Classical => &f.classical,
                        _ => &f.bipolar,
                    };
                    for b in &model.binding {
                        eprintln!("  binding: {b}");
                    }
                }
            }
            ExitCode::from(summary.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
