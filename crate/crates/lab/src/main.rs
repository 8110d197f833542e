use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use setmap_lab::{run, write_report, Experiment, ExperimentSpec, Format, LabError};

#[derive(Parser)]
#[command(name = "setmap-lab", version, about = "Batch experiments on finite set mappings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest free set, or every free set of size --m.
    Freeset(Shared),
    /// Emit a constructed mapping; enumeration families also check descent.
    Construct(Shared),
    /// Amalgamate seeded Δ-system pairs (--flavor quad|ranked).
    Amalgamate(Shared),
    /// Build a generic mapping meeting every inclusion goal.
    Force(Shared),
    /// Singleton images killing every free --m-set, or UNSAT.
    Diagonalize(Shared),
    /// Decide --a → (--b, --c)^--r.
    Ramsey(Shared),
    /// The t-ladder up to index --n.
    Ladder(Shared),
    /// Position scans for chain sizes 5..=--n.
    PositionLemma(Shared),
    /// Run the acceptance criteria (all, or those given by --criteria).
    Acceptance(Shared),
}

#[derive(Args, Debug, Default)]
struct Shared {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    mu: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cap_nodes: Option<u64>,
    #[arg(long)]
    cap_seconds: Option<f64>,
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// interval, prefix, enumeration, complete or random.
    #[arg(long)]
    family: Option<String>,
    /// quad, ranked or pair.
    #[arg(long)]
    flavor: Option<String>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    cases: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<u8>,
}

impl Shared {
    fn into_spec(self, experiment: Experiment) -> ExperimentSpec {
        ExperimentSpec {
            n: self.n,
            k: self.k,
            mu: self.mu,
            m: self.m,
            seed: self.seed,
            cap_nodes: self.cap_nodes,
            cap_seconds: self.cap_seconds,
            input: self.input,
            output: self.output,
            format: self.format,
            family: self.family,
            flavor: self.flavor,
            a: self.a,
            b: self.b,
            c: self.c,
            r: self.r,
            cases: self.cases,
            criteria: self.criteria,
            ..ExperimentSpec::new(experiment)
        }
    }
}

fn spec_of(command: Command) -> ExperimentSpec {
    let (experiment, args) = match command {
        Command::Freeset(a) => (Experiment::Freeset, a),
        Command::Construct(a) => (Experiment::Construct, a),
        Command::Amalgamate(a) => (Experiment::Amalgamate, a),
        Command::Force(a) => (Experiment::Force, a),
        Command::Diagonalize(a) => (Experiment::Diagonalize, a),
        Command::Ramsey(a) => (Experiment::Ramsey, a),
        Command::Ladder(a) => (Experiment::Ladder, a),
        Command::PositionLemma(a) => (Experiment::PositionLemma, a),
        Command::Acceptance(a) => (Experiment::Acceptance, a),
    };
    args.into_spec(experiment)
}

fn execute(spec: &ExperimentSpec) -> Result<i32, LabError> {
    let report = run(spec)?;
    if let Some(path) = write_report(&report, spec)? {
        eprintln!("{}: {:?}, report written to {}", spec.experiment, report.status, path.display());
    }
    Ok(report.exit_code())
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
    let spec = spec_of(cli.command);
    match execute(&spec) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("setmap-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
