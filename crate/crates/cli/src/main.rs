use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hdlss_tda_cli::{emit_report, run, CliError, ExperimentConfig, Format};

/// Runs one experiment and writes `<experiment>-<config hash>.{csv,json}`.
#[derive(Debug, Parser)]
#[command(name = "hdlss-tda", version)]
struct Args {
    /// INI-style config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// curse | mitigation | simplex_check | eigengap | weingarten_check | validation
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    nu: Option<String>,
    /// circle | uniform_square | zeros
    #[arg(long)]
    shape: Option<String>,
    /// Comma-separated, e.g. 1e2,1e3,1e4
    #[arg(long)]
    d_grid: Option<String>,
    #[arg(long)]
    degrees: Option<String>,
    #[arg(long)]
    reps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// rips | cech
    #[arg(long)]
    filtration: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// csv | json; both when omitted
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    max_simplices: Option<String>,
    /// Record per-cell wall time in runtime_ms.
    #[arg(long)]
    timing: bool,
}

fn build_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = [
        ("experiment", &args.experiment),
        ("n", &args.n),
        ("s", &args.s),
        ("nu", &args.nu),
        ("shape", &args.shape),
        ("d_grid", &args.d_grid),
        ("degrees", &args.degrees),
        ("reps", &args.reps),
        ("seed", &args.seed),
        ("filtration", &args.filtration),
        ("out", &args.out),
        ("format", &args.format),
        ("max_simplices", &args.max_simplices),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if args.timing {
        cfg.timing = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = build_config(&args).and_then(|cfg| {
        let report = run(&cfg)?;
        let formats = match cfg.format {
            Some(f) => vec![f],
            None => vec![Format::Csv, Format::Json],
        };
        for f in formats {
            println!("{}", emit_report(&report, f)?.display());
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            let failed: Vec<_> = report.aggregate.oracle_results.iter().filter(|o| !o.passed).collect();
            for o in &failed {
                eprintln!("FAIL {}: {}", o.name, o.detail);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
