use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tensor_gauge_cli::config::{Config, DEFAULT_SEED};
use tensor_gauge_cli::experiments::{self, Suite};
use tensor_gauge_cli::report::ExperimentReport;
use tensor_gauge_cli::{CliError, EXIT_CONFIG, EXIT_FAIL};

#[derive(Parser)]
#[command(name = "tensor-gauge", version, about = "Certified brackets for tensor norms and Grothendieck-type constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run one registered experiment and emit its report.
    Run {
        id: String,
        #[arg(long)]
        n: Option<usize>,
        /// Exponent; `inf` is accepted.
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, help = format!("Master seed [default: {DEFAULT_SEED}]"))]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON config file; flags override its values.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, hide = true)]
        tamper_nuclear: Option<f64>,
    },
    /// Run the acceptance criteria and print one row per criterion.
    Verify {
        #[arg(long, value_enum, default_value = "fast")]
        suite: SuiteArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, hide = true)]
        tamper_nuclear: Option<f64>,
    },
    /// List experiment ids.
    List,
}

fn set_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TENSOR_GAUGE_THREADS") {
        let k: usize = v.parse().map_err(|_| CliError::Config(format!("TENSOR_GAUGE_THREADS must be a positive integer, got `{v}`")))?;
        if k == 0 {
            return Err(CliError::Config("TENSOR_GAUGE_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

fn say(text: &str) -> Result<(), CliError> {
    std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

fn emit(report: &ExperimentReport, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = match format {
        Format::Json => report.to_json_string(),
        Format::Csv => report.to_csv()?,
    };
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => say(&text),
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    set_threads()?;
    match cli.command {
        Command::Run { id, n, p, ns, seed, samples, restarts, format, out, config, tamper_nuclear } => {
            let exp = experiments::find(&id)?;
            let flags = Config { n, p, ns, seed, samples, restarts, tamper_nuclear };
            let base = match config {
                Some(path) => Config::from_file(&path)?,
                None => Config::default(),
            };
            let report = experiments::run(exp, &flags.over(base))?;
            for c in &report.checks {
                eprintln!("{c}");
            }
            emit(&report, format, out.as_ref())?;
            Ok(report.pass())
        }
        Command::Verify { suite, seed, tamper_nuclear } => {
            let suite = match suite {
                SuiteArg::Fast => Suite::Fast,
                SuiteArg::Full => Suite::Full,
            };
            let cfg = Config { seed, tamper_nuclear, ..Config::default() };
            let mut all = true;
            for exp in experiments::criteria(suite) {
                let report = experiments::run(exp, &cfg);
                all &= report.as_ref().is_ok_and(|r| r.pass());
                say(&format!("{}\n", experiments::summary_row(exp, &report)))?;
            }
            say(if all { "all criteria pass\n" } else { "some criteria FAIL\n" })?;
            Ok(all)
        }
        Command::List => {
            for e in experiments::REGISTRY {
                let tag = e.criterion.map(|c| format!("criterion {c}")).unwrap_or_else(|| "exploratory".into());
                say(&format!("{:<24} {:<12} {}\n", e.id, tag, e.claim))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG as u8)
        }
    }
}
