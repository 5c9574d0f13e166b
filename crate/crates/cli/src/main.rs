mod commands;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Report};

#[derive(Parser, Debug)]
#[command(name = "floercalc", version, about = "Knot Floer homology and contact vanishing checks over GF(2)")]
pub struct Cli {
    /// Print a JSON report on stdout
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized verifiers
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Mapping cones and their long exact sequences
    #[command(subcommand)]
    Cone(ConeCmd),
    /// Combinatorial Heegaard diagrams
    #[command(subcommand)]
    Diagram(DiagramCmd),
    /// Grid diagrams
    #[command(subcommand)]
    Grid(GridCmd),
    /// PD-code knot polynomials
    #[command(subcommand)]
    Knot(KnotCmd),
    /// Legendrian fronts
    #[command(subcommand)]
    Legendrian(LegendrianCmd),
    /// Contact surgery diagrams
    #[command(subcommand)]
    Surgery(SurgeryCmd),
}

#[derive(Subcommand, Debug)]
pub enum ConeCmd {
    /// Check exactness of the cone sequence on random chain maps
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 20)]
        max_dim: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FlavorArg {
    Hat,
    KnotHat,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    WeakAllSpinc,
    ExtremelyWeakConservative,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SignArg {
    Positive,
    Negative,
}

#[derive(Subcommand, Debug)]
pub enum DiagramCmd {
    /// Homology of the nice differential
    Homology {
        file: String,
        #[arg(long, value_enum, default_value = "hat")]
        flavor: FlavorArg,
    },
    /// Admissibility check with a witness domain on failure
    Admissible {
        file: String,
        #[arg(long, value_enum, default_value = "weak-all-spinc")]
        mode: ModeArg,
    },
    /// Dehn twist of the first beta curve and the block-triangularity check
    Twist {
        file: String,
        #[arg(long)]
        delta: String,
        #[arg(long, value_enum, default_value = "positive")]
        sign: SignArg,
    },
}

#[derive(Args, Debug)]
pub struct GridArgs {
    pub file: String,
    /// Largest grid size to enumerate (default 8, or FLOERCALC_MAX_N; at most 10)
    #[arg(long)]
    pub max_n: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum GridCmd {
    /// Bigraded ranks of the hat knot Floer homology
    Hfk(GridArgs),
    /// Graded Euler characteristic of the hat homology
    Euler(GridArgs),
}

#[derive(Subcommand, Debug)]
pub enum KnotCmd {
    /// Conway-normalized Alexander polynomial
    Alexander { file: String },
    Signature { file: String },
    /// Rank table predicted for an alternating knot
    AlternatingHfk {
        file: String,
        /// Use the mirror image
        #[arg(long)]
        mirror: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum LegendrianCmd {
    /// tb, rot, gradings and zigzags
    Invariants { file: String },
    /// Vanishing test against a rank table of the mirror knot
    Vanishing {
        file: String,
        #[arg(long)]
        hfk: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum SurgeryCmd {
    /// Apply the vanishing rules
    Check { file: String },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let start = std::time::Instant::now();
    let outcome = commands::run(&cli);
    let elapsed = start.elapsed();
    let code = match &outcome {
        Ok(_) => 0,
        Err(CliError::Domain { .. }) => 1,
        Err(CliError::Input(_)) => 2,
    };
    let report = Report::new(&argv[1..], outcome, elapsed);
    report.emit(cli.json);
    ExitCode::from(code)
}
