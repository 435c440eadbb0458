use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gausslocal_cli::config::{Format, RunConfig};
use gausslocal_cli::report::ReportBundle;
use gausslocal_cli::{execute, Command};

#[derive(Parser)]
#[command(
    name = "gausslocal",
    version,
    about = "Checks and experiments for local operators on Gaussian measure spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Halo, measure-equivalence, doubling and profile checks.
    Measure(RunArgs),
    /// Sampled weight constants and class conditions.
    Weights(RunArgs),
    /// Operator values at sites.
    Op(RunArgs),
    /// Pointwise inequalities and norm-ratio experiments.
    Verify(RunArgs),
    /// Summarize or convert existing JSON reports.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run config; the bundled default battery when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for the report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long = "n-grid")]
    n_grid: Option<usize>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    dim: Option<u8>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON bundles written by the other commands.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

const EXIT_CONFIG: u8 = 2;

fn load(args: &RunArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default_battery(),
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.n_grid {
        cfg.space.n = n;
    }
    if let Some(d) = args.dim {
        cfg.space.dim = d as usize;
    }
    if let Some(f) = args.format {
        cfg.output.format = f.into();
    }
    if let Some(o) = &args.out {
        cfg.output.dir = Some(o.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(bundle: &ReportBundle, dir: Option<&PathBuf>, format: Format) -> anyhow::Result<()> {
    match dir {
        Some(d) => {
            let path = bundle.write_to(d, format)?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{}", bundle.render(format)?),
    }
    let s = &bundle.summary;
    eprintln!(
        "{}: {} records, {} pass, {} fail, {} evidence, {} skipped, {} numerical errors",
        bundle.command, s.records, s.pass, s.fail, s.evidence, s.skipped, s.numerical_error
    );
    Ok(())
}

fn run(command: Command, args: &RunArgs) -> ExitCode {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let bundle = match execute(command, &cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Err(e) = emit(&bundle, cfg.output.dir.as_ref(), cfg.output.format) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_CONFIG);
    }
    ExitCode::from(bundle.exit_code() as u8)
}

fn report(args: &ReportArgs) -> ExitCode {
    let mut worst = 0;
    for p in &args.inputs {
        let bundle = match ReportBundle::read_json(p) {
            Ok(b) => b,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_CONFIG);
            }
        };
        let format = args.format.map_or(Format::Csv, Format::from);
        if let Err(e) = emit(&bundle, args.out.as_ref(), format) {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_CONFIG);
        }
        worst = worst.max(bundle.exit_code());
    }
    ExitCode::from(worst as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Cmd::Measure(a) => run(Command::Measure, a),
        Cmd::Weights(a) => run(Command::Weights, a),
        Cmd::Op(a) => run(Command::Op, a),
        Cmd::Verify(a) => run(Command::Verify, a),
        Cmd::Report(a) => report(a),
    }
}
