use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod report;

use report::Report;

#[derive(Parser, Debug)]
#[command(name = "forestalg", version, about = "Forest algebras and EF/EX definability")]
struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an algebra file and check the forest algebra axioms.
    Check { file: String },
    /// Evaluate a forest under the homomorphism of a file.
    Eval { file: String, forest: String },
    /// Whether a forest satisfies a forest formula.
    Models { forest: String, formula: String },
    /// Compile a forest formula into a recognizer file.
    Compile {
        formula: String,
        /// Letters, comma separated; defaults to the letters of the formula.
        #[arg(long)]
        alphabet: Option<String>,
        #[arg(short, long)]
        output: Option<String>,
    },
    /// Compute the syntactic recognizer.
    Syntactic {
        file: String,
        #[arg(short, long)]
        output: Option<String>,
        /// Search for an isomorphism with the homomorphism of this file.
        #[arg(long)]
        iso: Option<String>,
    },
    /// Reachability classes and their order.
    Reach {
        file: String,
        /// Print Graphviz instead of a listing.
        #[arg(long)]
        dot: bool,
    },
    /// Whether two forests are ~k equivalent.
    Simk {
        #[arg(long)]
        k: usize,
        s: String,
        t: String,
        /// Also classify with the recursive definition and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Least k with the homomorphism k-definite.
    Definiteness {
        file: String,
        /// Use `e s = s` instead of `e s = e` to rule out definiteness.
        #[arg(long)]
        transposed: bool,
        /// Cross-check with context enumeration up to this depth.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Decide definability in EF, EX or EF+EX.
    Decide {
        #[arg(long, value_parser = commands::parse_fragment)]
        logic: forestalg::decide::Fragment,
        /// A recognizer or homomorphism file, or a formula.
        input: String,
        /// Letters for a formula input.
        #[arg(long)]
        alphabet: Option<String>,
        /// Print the certificate terms.
        #[arg(long)]
        certificate: bool,
        /// Skip the syntactic algebra and decide the given homomorphism.
        #[arg(long)]
        hom: bool,
        /// Cross-check the fixpoint against brute force up to level 3.
        #[arg(long)]
        oracle: bool,
    },
    /// A confused pair of forests, if any.
    Witness {
        file: String,
        /// Level of the witness; defaults to the stable level.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        hom: bool,
    },
    /// Wreath product decomposition into U1 and 1-definite U2 stages.
    Decompose {
        #[arg(long, value_parser = commands::parse_fragment)]
        logic: forestalg::decide::Fragment,
        file: String,
        #[arg(long, default_value_t = forestalg::decompose::DEFAULT_MAX_SIZE)]
        max_size: usize,
        #[arg(long)]
        hom: bool,
        /// Assignment lines shown per stage.
        #[arg(long, default_value_t = 16)]
        lines: usize,
    },
    /// Compare the fixpoint with the brute-force oracle on every class.
    OracleCheck {
        file: String,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long)]
        hom: bool,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = commands::run(cli.command);
    match result {
        Ok(report) => {
            emit(&report, cli.json);
            ExitCode::from(report.code)
        }
        Err(err) => {
            let code = report::exit_code(&err);
            if cli.json {
                println!("{}", report::error_json(&err, code));
            }
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn emit(report: &Report, json: bool) {
    if json {
        println!("{}", report.json_string());
    } else {
        print!("{}", report.text);
    }
}
