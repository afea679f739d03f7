use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fivevec_cli::{run, scenario, RunOptions};
use fivevec_core::{npo, parse, DIM5};

#[derive(Parser)]
#[command(name = "fivevec", version, about = "Numerical identity checks for five-vector connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run the identity checks of a scenario file.
    Check {
        scenario: PathBuf,
        /// Glob over check names.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario sample-point count.
        #[arg(long)]
        points: Option<usize>,
        /// Adds per-check wall time to the report.
        #[arg(long)]
        timings: bool,
    },
    /// Parse an expression and print it with its partial derivatives.
    ParseExpr { text: String },
    /// Print SU(n) generator diagnostics.
    Generators { n: usize },
}

const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            scenario: path,
            filter,
            format,
            seed,
            points,
            timings,
        } => {
            let s = match scenario::load(&path) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            let options = RunOptions {
                filter,
                seed,
                points,
                timings,
            };
            let report = match run(&s, &options) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_INPUT);
                }
            };
            match format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::ParseExpr { text } => match parse(&text) {
            Ok(e) => {
                println!("{e}");
                for mu in 0..DIM5 {
                    println!("d{mu}: {}", e.partial(mu));
                }
                ExitCode::SUCCESS
            }
            Err(err) => {
                eprintln!("error: {err}");
                eprintln!("  {text}");
                eprintln!("  {}^", " ".repeat(text[..err.offset.min(text.len())].chars().count()));
                ExitCode::from(EXIT_INPUT)
            }
        },
        Command::Generators { n } => match npo::su_generators(n) {
            Ok(gens) => {
                println!("n = {n}, {} generators", gens.count());
                println!("trace      {:.3e}", gens.trace_residual());
                println!("commutator {:.3e}", gens.commutator_residual());
                println!("f antisym  {:.3e}", gens.antisymmetry_residual());
                println!("traceless  {:.3e}", gens.tracelessness_residual());
                println!("epsilon    {:.3e}", gens.eps_residual());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_INPUT)
            }
        },
    }
}
