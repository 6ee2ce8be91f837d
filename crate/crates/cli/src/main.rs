use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use secmanet::crypto::aes;
use secmanet::metrics::MetricsReport;
use secmanet::scenario::{parse_scenario, ScenarioConfig};
use secmanet::{sim, sweep};

const EXIT_CONFIG: u8 = 1;
const EXIT_ASSERTION: u8 = 2;

#[derive(Parser)]
#[command(name = "secmanet", version, about = "Keyed OLSR MANET simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write the metrics report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the seed set in the scenario file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Also write the event trace, one line per event.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the scenario once per seed, concurrently, and write one report per seed.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Seeds `first..=last`.
        #[arg(long, default_value_t = 1)]
        first: u64,
        #[arg(long)]
        last: u64,
        /// Output directory; reports are named `seed-<n>.<ext>`.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// AES-128 known-answer suite.
    Selftest,
    /// Parse and validate a scenario file without running it.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load(path: &Path) -> Result<ScenarioConfig, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn render(report: &MetricsReport, format: Format) -> String {
    match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn check(report: &MetricsReport) -> bool {
    for f in &report.assertion_failures {
        eprintln!("assertion failed (seed {}): {f}", report.seed);
    }
    report.assertion_failures.is_empty()
}

fn run(cmd: Command) -> Result<bool, String> {
    match cmd {
        Command::Run {
            scenario,
            seed,
            out,
            format,
            trace,
        } => {
            let mut cfg = load(&scenario)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = if let Some(trace_path) = trace {
                let (report, lines) = sim::run_traced(&cfg).map_err(|e| e.to_string())?;
                let mut text = lines.join("\n");
                text.push('\n');
                write(&trace_path, &text)?;
                report
            } else {
                sim::run(&cfg).map_err(|e| e.to_string())?
            };
            write(&out, &render(&report, format))?;
            Ok(check(&report))
        }
        Command::Sweep {
            scenario,
            first,
            last,
            out,
            format,
        } => {
            let cfg = load(&scenario)?;
            if last < first {
                return Err(format!("--last {last} is below --first {first}"));
            }
            let seeds: Vec<u64> = (first..=last).collect();
            let reports = sweep::run_seeds(&cfg, &seeds).map_err(|e| e.to_string())?;
            fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let ext = match format {
                Format::Csv => "csv",
                Format::Json => "json",
            };
            let mut ok = true;
            for r in &reports {
                write(
                    &out.join(format!("seed-{}.{ext}", r.seed)),
                    &render(r, format),
                )?;
                println!(
                    "seed {:>4}  pdr {:.4}  throughput {:.1} bit/s",
                    r.seed, r.aggregate.pdr, r.aggregate.throughput_bps
                );
                ok &= check(r);
            }
            Ok(ok)
        }
        Command::Selftest => {
            let cases = aes::self_test();
            for c in &cases {
                println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            }
            Ok(cases.iter().all(|c| c.passed))
        }
        Command::Validate { scenario } => {
            let cfg = load(&scenario)?;
            println!(
                "ok: {} nodes, {} flows, {} attacks",
                cfg.nodes,
                cfg.flows.len(),
                cfg.attacks.len()
            );
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_ASSERTION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
