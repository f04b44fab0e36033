use clap::{Parser, Subcommand};
use naq::{eval_report, jacobiator_report, run_session, SessionConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Exact checks of nearly-associative identities for truncated star products.
#[derive(Parser)]
#[command(name = "naq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run bracket diagnostics and the configured identity checks.
    Check { config: PathBuf },
    /// Emit the nonzero Jacobiator components of the configured bivector.
    Jacobiator { config: PathBuf },
    /// Evaluate a star expression under the configured product.
    Eval {
        config: PathBuf,
        #[arg(long)]
        expr: String,
    },
}

fn threads_from_env() -> Result<(), String> {
    let Ok(raw) = std::env::var("NAQ_THREADS") else { return Ok(()) };
    let n: usize = raw.trim().parse().map_err(|_| format!("NAQ_THREADS must be a non-negative integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn run(cli: &Cli) -> Result<(String, u8), String> {
    threads_from_env()?;
    let load = |path: &Path| SessionConfig::from_path(path).map_err(|e| e.to_string());
    match &cli.command {
        Command::Check { config } => {
            let report = run_session(&load(config)?, &base_dir(config)).map_err(|e| e.to_string())?;
            Ok((report.to_json(), report.exit_code() as u8))
        }
        Command::Jacobiator { config } => {
            let report = jacobiator_report(&load(config)?).map_err(|e| e.to_string())?;
            Ok((pretty(&report), 0))
        }
        Command::Eval { config, expr } => {
            let report = eval_report(&load(config)?, &base_dir(config), expr).map_err(|e| e.to_string())?;
            Ok((pretty(&report), 0))
        }
    }
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((json, code)) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, json) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{json}"),
            }
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
