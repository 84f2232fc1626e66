//! Command-line surface: build chains from a JSON config, export sampled
//! potentials as CSV/JSON, run the verification suite, census poles and
//! wells.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 configuration or
//! usage error, 3 all-singular grid.

use clap::{Args, Parser, Subcommand};
use susy_chain_cli::checks::{self, VerifyInput};
use susy_chain_cli::config::ChainConfig;
use susy_chain_cli::output;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "susy-chain", version, about = "Backlund chains of free-particle SUSY partner potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the chain potential on the configured grid and export it
    Generate(CommonArgs),
    /// Run the configured verification checks and emit a JSON report
    Verify(CommonArgs),
    /// Emit the pole and well census of the configured chain as JSON
    Census(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the flat JSON configuration
    #[arg(long)]
    config: PathBuf,
    /// Output path (overrides the config's output.path)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Data format for `generate`: csv or json (overrides the config)
    #[arg(long)]
    format: Option<String>,
    /// Print the data document to stdout and write no files
    #[arg(long)]
    stdout: bool,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ALL_SINGULAR: u8 = 3;

fn main() -> ExitCode {
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Census(args) => cmd_census(args),
    };
    match code {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

/// `SUSY_CHAIN_THREADS` caps the worker pool; 0 (or unset) lets the pool
/// size itself.
fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SUSY_CHAIN_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("SUSY_CHAIN_THREADS must be a non-negative integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("thread pool: {e}"))
}

fn load(args: &CommonArgs) -> Result<(ChainConfig, susy_chain::BacklundChain), String> {
    let cfg = ChainConfig::load(&args.config)?;
    let chain = cfg.chain()?;
    Ok((cfg, chain))
}

fn cmd_generate(args: &CommonArgs) -> Result<ExitCode, String> {
    let (cfg, chain) = load(args)?;
    let sample = chain
        .eval_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.samples)
        .map_err(|e| e.to_string())?;
    if sample.flags.iter().all(|&f| f != susy_chain::PoleKind::None) {
        eprintln!("error: every grid point is singular");
        return Ok(ExitCode::from(EXIT_ALL_SINGULAR));
    }

    let format = args
        .format
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| o.format.clone()))
        .unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(format!("--format must be csv or json, got {format:?}"));
    }

    let sidecar = output::sidecar(&cfg.seeds, cfg.grid, &sample);
    let document = if format == "json" {
        output::to_json_pretty(&output::GridDocument {
            sidecar,
            points: output::points(&sample),
        })
    } else {
        output::grid_csv(&sample)
    };

    if args.stdout {
        print!("{document}");
        return Ok(ExitCode::SUCCESS);
    }

    let out: PathBuf = match args.out.clone().or_else(|| {
        cfg.output
            .as_ref()
            .and_then(|o| o.path.clone())
            .map(PathBuf::from)
    }) {
        Some(p) => p,
        None => return Err("no output path: set output.path, --out, or --stdout".into()),
    };
    output::write_atomic(&out, &document)?;
    eprintln!("wrote {}", out.display());
    if format == "csv" {
        let meta = output::sidecar_path(&out);
        let sidecar = output::sidecar(&cfg.seeds, cfg.grid, &sample);
        output::write_atomic(&meta, &output::to_json_pretty(&sidecar))?;
        eprintln!("wrote {}", meta.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &CommonArgs) -> Result<ExitCode, String> {
    let (cfg, chain) = load(args)?;
    let seeds = cfg.seed_specs()?;
    let report = checks::run_checks(
        &VerifyInput {
            chain: &chain,
            seeds: &seeds,
            x_min: cfg.grid.x_min,
            x_max: cfg.grid.x_max,
            samples: cfg.grid.samples,
        },
        &cfg.verify,
    );
    for check in &report.checks {
        let status = if check.skipped {
            "skip"
        } else if check.pass {
            "pass"
        } else {
            "FAIL"
        };
        eprintln!(
            "{status}  {:<12} residual {:>12.3e}  threshold {:>9.1e}{}",
            check.name,
            check.max_residual,
            check.threshold,
            check
                .note
                .as_ref()
                .map(|n| format!("  ({n})"))
                .unwrap_or_default()
        );
    }
    let doc = output::to_json_pretty(&report);
    emit_json(args, &doc)?;
    Ok(if report.all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    })
}

fn cmd_census(args: &CommonArgs) -> Result<ExitCode, String> {
    let (cfg, chain) = load(args)?;
    let sample = chain
        .eval_grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.samples)
        .map_err(|e| e.to_string())?;
    let doc = output::to_json_pretty(&output::sidecar(&cfg.seeds, cfg.grid, &sample));
    emit_json(args, &doc)?;
    Ok(ExitCode::SUCCESS)
}

/// Reports go to stdout unless an explicit file was requested (and
/// `--stdout` forces stdout-only).
fn emit_json(args: &CommonArgs, doc: &str) -> Result<(), String> {
    if args.stdout || args.out.is_none() {
        println!("{doc}");
    }
    if !args.stdout {
        if let Some(out) = &args.out {
            output::write_atomic(out, doc)?;
            eprintln!("wrote {}", out.display());
        }
    }
    Ok(())
}
