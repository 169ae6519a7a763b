use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use h2recover::catalog;
use h2recover::harness::{self, Command, ExperimentConfig, Format, HarnessError, OutputOptions};

/// Quenched Cauchy approximants: growth, convergence and contour experiments.
#[derive(Parser)]
#[command(name = "h2recover", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit the growth exponent of |g_lambda(x)| outside the interval.
    Growth(RunArgs),
    /// Error against the reference function across the lambda grid.
    Converge(RunArgs),
    /// Residual of the contour identity for the configured cases.
    Contour(RunArgs),
    /// Catalog operations.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List the catalog entries.
    List {
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report path; overrides output_path in the config. Standard output if neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format; overrides the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Leave the generation timestamp out of the report.
    #[arg(long)]
    reproducible: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    harness::configure_threads()?;
    let (command, args) = match cli.command {
        Cmd::Growth(a) => (Command::Growth, a),
        Cmd::Converge(a) => (Command::Converge, a),
        Cmd::Contour(a) => (Command::Contour, a),
        Cmd::Catalog {
            action: CatalogCmd::List { format },
        } => {
            let entries = catalog::list().map_err(|e| HarnessError::Config(e.to_string()))?;
            harness::write_output(None, &harness::render_catalog(&entries, format.into()))?;
            return Ok(true);
        }
    };
    let cfg = ExperimentConfig::from_path(&args.config)?;
    let opts = OutputOptions {
        format: args.format.map(Format::from),
        out: args.out,
        reproducible: args.reproducible,
    };
    harness::execute(command, &cfg, &opts)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("h2recover: verdict failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("h2recover: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
