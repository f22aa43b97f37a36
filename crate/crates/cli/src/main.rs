use std::path::PathBuf;
use std::process::ExitCode;

use chcmodel::oracle::Window;
use chcmodel::saturation::Limits;
use chcmodel_cli::{run, Command, Format, RunConfig, EXIT_OK, EXIT_USAGE};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Saturate constrained Horn clauses over linear arithmetic and print
/// their least model.
#[derive(Parser)]
#[command(name = "chcmodel", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the saturation loop and print its trace and final clause set.
    Saturate(Common),
    /// Saturate, then print the least model.
    Model {
        #[command(flatten)]
        common: Common,
        /// Print the model even if saturation hit a resource limit.
        #[arg(long)]
        force: bool,
        /// Skip saturation and print the candidate model of the input.
        #[arg(long)]
        no_saturate: bool,
    },
    /// Check a query clause against the least model.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Query in input syntax, e.g. `(clause (<= x 0) (P x))`.
        query: String,
        #[arg(long)]
        force: bool,
    },
    /// Explain why the candidate model of the input is not a model.
    Explain(Common),
    /// Compare the model with a brute-force fixpoint on an integer window.
    CheckLeast(Common),
}

#[derive(Args)]
struct Common {
    input: PathBuf,
    /// Predicate precedence, smallest first.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    order: Option<Vec<String>>,
    #[arg(long, default_value_t = Limits::default().max_derived)]
    max_derived: usize,
    #[arg(long, default_value_t = Limits::default().max_seconds)]
    max_seconds: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    window: Option<Vec<i64>>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

fn config(command: Command, c: Common) -> Result<RunConfig, String> {
    let window = match c.window {
        Some(w) => Some(Window::new(w[0], w[1]).map_err(|e| e.to_string())?),
        None => None,
    };
    Ok(RunConfig {
        command,
        input_path: c.input,
        order_override: c.order,
        limits: Limits {
            max_derived: c.max_derived,
            max_seconds: c.max_seconds,
        },
        window,
        format: match c.format {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
        },
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match cli.command {
        Cmd::Saturate(c) => config(Command::Saturate, c),
        Cmd::Model {
            common,
            force,
            no_saturate,
        } => config(Command::Model { force, raw: no_saturate }, common),
        Cmd::Eval { common, query, force } => config(Command::Eval { query, force }, common),
        Cmd::Explain(c) => config(Command::Explain, c),
        Cmd::CheckLeast(c) => config(Command::CheckLeast, c),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(m) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    let code = run(&cfg, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code as u8)
}
