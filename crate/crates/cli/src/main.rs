use std::path::PathBuf;
use std::process;
use std::time::Instant;

use clap::Parser;

use ioncav_cli::config::{from_table, parse_table};
use ioncav_cli::output::{pick_format, write};
use ioncav_cli::sweep::parse_sweep;
use ioncav_cli::{execute, Experiment, Format, RunError};

/// Ion-cavity squeezing simulations driven by a TOML config.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[arg(value_enum)]
    experiment: Experiment,
    #[arg(short, long)]
    config: PathBuf,
    /// Result file; the table goes to stdout when absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(short, long, value_enum)]
    format: Option<Format>,
    /// key=start:stop:steps
    #[arg(long)]
    sweep: Option<String>,
}

fn run(args: &Args) -> Result<(), RunError> {
    let start = Instant::now();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| RunError::Io(format!("{}: {e}", args.config.display())))?;
    let table = parse_table(&text)?;
    let parsed = from_table(table.clone())?;
    let outcome = match &args.sweep {
        Some(spec) => parse_sweep(spec, &table)?.run(&table, args.experiment)?,
        None => {
            let mut out = execute(&parsed.config, args.experiment)?;
            out.warnings.splice(0..0, parsed.warnings.iter().cloned());
            out
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let path = args.out.as_deref().or(parsed.config.output.path.as_deref());
    let format = pick_format(args.format, parsed.config.output.format, path);
    write(&outcome, path, format, start.elapsed().as_secs_f64())
}

fn main() {
    let args = Args::parse();
    if let Err(e) = run(&args) {
        eprintln!("error[{}]: {}", e.class(), e.to_string().replace('\n', " "));
        process::exit(e.exit_code());
    }
}
