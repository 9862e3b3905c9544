mod bench;
mod evaluate;
mod generate;
mod solve;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plp_core::exact::{export_mip, MipExportOptions};
use plp_core::{Instance, Objective, PlpError, Solution};

#[derive(Parser)]
#[command(name = "plp", version, about = "Production leveling: solve, generate, evaluate and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write the solution.
    Solve(solve::SolveArgs),
    /// Generate an instance.
    Generate(generate::GenerateArgs),
    /// Print the objective breakdown and load table of a solution.
    Evaluate(evaluate::EvaluateArgs),
    /// Run an algorithm matrix over a directory of instances.
    Bench(bench::BenchArgs),
    /// Write the MIP model as a CPLEX-LP file.
    ExportMip(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Abs,
    Quad,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Abs => Objective::Absolute,
            ObjectiveArg::Quad => Objective::Quadratic,
        }
    }
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Output LP file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "abs")]
    objective: ObjectiveArg,
    /// Leave out the ordering rows for interchangeable orders.
    #[arg(long)]
    no_symmetry: bool,
    /// Leave out the rows linking total and per-product slacks.
    #[arg(long)]
    no_slack_link: bool,
}

/// Failure classes mapped to exit statuses 2 and 3.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl From<PlpError> for Failure {
    fn from(e: PlpError) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Internal(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

pub fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// Reads an input file; any failure, including a missing file, is an input error.
pub fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| input_err(format!("cannot read {}: {e}", path.display())))
}

pub fn load_instance(path: &Path) -> CliResult<Instance> {
    plp_core::io::parse_instance(&read_input(path)?)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

pub fn load_solution(path: &Path) -> CliResult<Solution> {
    plp_core::io::parse_solution(&read_input(path)?)
        .map_err(|e| input_err(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn export(args: ExportArgs) -> CliResult<()> {
    let instance = load_instance(&args.instance)?;
    let options = MipExportOptions {
        objective: args.objective.into(),
        include_symmetry: !args.no_symmetry,
        include_slack_link: !args.no_slack_link,
    };
    let mut buf = Vec::new();
    export_mip(&instance, &options, &mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("LP text is ASCII"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Generate(a) => generate::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Bench(a) => bench::run(a),
        Command::ExportMip(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
