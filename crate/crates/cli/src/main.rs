//! `lad`: binarize records, run the rule-finding workflow headlessly or
//! through the local HTTP service, and re-check or re-render reports.
//!
//! Exit codes: 0 success, 2 verification mismatch, 3 input error, 1 other
//! failures (for instance an unwritable output directory).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "lad", version, about = "Rule finding over Boolean polynomial rings")]
struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut numeric records into binary patterns.
    Binarize {
        #[command(flatten)]
        records: RecordsArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run the workflow with a policy or a recorded trace and write the report.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        /// Policy as key=value pairs, e.g. `min_support=30,max_monomials=2`.
        #[arg(long, conflicts_with = "trace")]
        policy: Option<String>,
        /// Decision trace to replay.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Serve the interactive session over HTTP.
    Serve {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        order: OrderArgs,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Directory with the built review UI.
        #[arg(long, env = "LAD_UI_DIR")]
        ui: Option<PathBuf>,
    },
    /// Recount every rule of a report directly on the records.
    Verify {
        #[arg(long)]
        report: PathBuf,
        #[command(flatten)]
        records: RecordsArgs,
    },
    /// Re-render a report document.
    Report {
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
    },
}

#[derive(Args)]
struct RecordsArgs {
    /// Records CSV.
    #[arg(long)]
    records: PathBuf,
    /// Variable map JSON (columns, codes, class labels).
    #[arg(long)]
    map: PathBuf,
    /// Thresholds document whose cuts replace the computed ones.
    #[arg(long)]
    thresholds: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "source")]
struct SourceArgs {
    /// Patterns document written by `binarize`.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Records CSV, binarized on the fly (needs --map).
    #[arg(long, requires = "map")]
    records: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, requires = "records")]
    map: Option<PathBuf>,
    /// Thresholds document; overrides computed cuts, or is recorded in the
    /// report when the input is a patterns file.
    #[arg(long)]
    thresholds: Option<PathBuf>,
}

#[derive(Args)]
struct OrderArgs {
    #[arg(long, value_enum, default_value_t = OrderName::Deglex)]
    order: OrderName,
    /// Variable codes from largest to smallest; defaults to table order.
    #[arg(long)]
    precedence: Option<String>,
}

#[derive(Args)]
struct OutArgs {
    /// Output directory.
    #[arg(long, env = "LAD_OUT_DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderName {
    Deglex,
    Degrevlex,
    Lex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Markdown,
    Json,
}

fn main() -> ExitCode {
    // usage errors are input errors; clap's own code 2 means a mismatch here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let verbose = cli.verbose > 0;
    let result = match cli.command {
        Command::Binarize { records, out } => commands::binarize(&records, &out.out),
        Command::Analyze {
            input,
            order,
            policy,
            trace,
            out,
        } => commands::analyze(&input, &order, policy.as_deref(), trace.as_deref(), &out.out, verbose),
        Command::Serve {
            input,
            order,
            port,
            bind,
            ui,
        } => commands::serve(&input, &order, &bind, port, ui.as_deref()),
        Command::Verify { report, records } => commands::verify(&report, &records),
        Command::Report { report, format } => commands::render(&report, format == Format::Json),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lad: {e}");
            ExitCode::from(e.code())
        }
    }
}
