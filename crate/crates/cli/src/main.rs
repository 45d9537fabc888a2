use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wsn_cli::{execute, resolve, CliError, DefenseSelect, Options};

/// Run simulator sweeps and write results as CSV.
#[derive(Debug, Parser)]
#[command(name = "wsn-sim", version)]
struct Args {
    /// Experiment file with `key = value` lines.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Axis to vary, optionally with its values.
    #[arg(long, value_name = "AXIS=V1,V2,...")]
    sweep: Option<String>,
    /// Replications per grid point.
    #[arg(long, value_name = "N")]
    seeds: Option<u32>,
    #[arg(long, value_name = "on|off|both", value_parser = parse_defense)]
    defense: Option<DefenseSelect>,
    #[arg(long, value_name = "PATH", default_value = "results.csv")]
    out: PathBuf,
    /// One of: ratio, nodes, sim_time, attack_interval, smoke.
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
}

fn parse_defense(s: &str) -> Result<DefenseSelect, String> {
    s.parse().map_err(|e: CliError| e.to_string())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error code=usage message={first:?}");
            return ExitCode::from(2);
        }
    };
    let opts = Options {
        config: args.config,
        sweep: args.sweep,
        seeds: args.seeds,
        defense: args.defense,
        scenario: args.scenario,
    };
    let result = resolve(&opts).and_then(|spec| execute(&spec, &args.out));
    match result {
        Ok(r) => {
            println!("ok rows={} out={} summary={}", r.rows, r.out.display(), r.summary.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.machine_line());
            ExitCode::FAILURE
        }
    }
}
