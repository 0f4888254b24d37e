//! Command-line front end for the vector-field analyzer.
//!
//! Exit codes: 0 success, 2 parse errors (with location), 3 numeric
//! failures, 1 anything else.

mod output;
mod runners;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "univalens",
    about = "Symbolic-numeric analysis of meromorphic vector fields: blow-up reduction, \
             local-model classification, affine structures, analytic continuation and \
             Riccati monodromy",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Args)]
struct CommonOut {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<std::path::PathBuf>,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: output::Format,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce the singularities of a plane vector field by blow-ups.
    Reduce {
        /// Vector field, e.g. "(2*y, 3*x^2)" or "x*y*(2*x, -y)".
        #[arg(long)]
        field: String,
        /// Blow-up budget.
        #[arg(long, default_value_t = 24)]
        max_depth: usize,
        /// Write the blow-up tree (charts, divisors, singular points).
        #[arg(long)]
        emit_tree: Option<std::path::PathBuf>,
        /// Write the dual graph of the exceptional divisors as DOT.
        #[arg(long)]
        dot: Option<std::path::PathBuf>,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Classify a reduced local model and print its order/index/CS table.
    Classify {
        #[arg(long)]
        field: String,
        /// Point "a,b" with exact rational coordinates (default origin).
        #[arg(long, default_value = "0,0")]
        point: String,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Affine-structure computations on curves.
    Affine {
        #[command(subcommand)]
        sub: AffineCmd,
    },
    /// Continue a solution along a path in complex time.
    Continue {
        #[arg(long)]
        field: String,
        /// Start point "re,im re,im" as two complex numbers, comma/space separated.
        #[arg(long)]
        start: String,
        /// Path JSON file {"kind":"segment"|"loop","waypoints":[[re,im],...]}.
        #[arg(long)]
        path: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Stream dense output samples as CSV (t_re,t_im,x_re,x_im,y_re,y_im).
        #[arg(long)]
        csv: Option<std::path::PathBuf>,
        /// Plot the trajectory projections as SVG.
        #[arg(long)]
        plot: Option<std::path::PathBuf>,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Monodromy representation of a Riccati equation around loops.
    Monodromy {
        /// Equation JSON {"a": "...", "b": "...", "c": "..."} in t.
        #[arg(long)]
        eq: std::path::PathBuf,
        /// Loops JSON: array of path specs.
        #[arg(long)]
        loops: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Monodromy plus the fixed-point census of the kernel representation.
    Census {
        #[arg(long)]
        eq: std::path::PathBuf,
        #[arg(long)]
        loops: std::path::PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Run bundled examples against their expected verdicts.
    Examples {
        /// Example name (omit to list the corpus).
        name: Option<String>,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Verify a built-in closed-form solution against its field.
    Verify {
        /// One of: e8, bb-power, bb-weierstrass, wittich.
        #[arg(long)]
        solution: String,
        /// Exponent for bb-power.
        #[arg(long, default_value_t = 3)]
        n: i64,
        /// Invariants for bb-weierstrass.
        #[arg(long, default_value_t = 4)]
        g2: i64,
        #[arg(long, default_value_t = 0)]
        g3: i64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        common: CommonOut,
    },
}

#[derive(Subcommand)]
enum AffineCmd {
    /// Uniformizability of a compact-curve signature.
    Signature {
        #[arg(long, default_value_t = 0)]
        genus: u8,
        /// Comma-separated indices; "inf" for infinity, e.g. "2,2,inf".
        #[arg(long, default_value = "")]
        indices: String,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Univalence of a rational field f(z) d/dz on the projective line.
    Univalence1d {
        #[arg(long)]
        field: String,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Ramification index from a defect residue.
    Ramification {
        /// Residue as a rational, e.g. "-1/2".
        #[arg(long)]
        residue: String,
        #[command(flatten)]
        common: CommonOut,
    },
    /// Defect form between two rational charts.
    Defect {
        #[arg(long)]
        chart1: String,
        #[arg(long)]
        chart2: String,
        #[command(flatten)]
        common: CommonOut,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    };
    std::process::exit(code);
}

pub struct CliError {
    pub exit_code: i32,
    pub message: String,
}

impl CliError {
    pub fn parse(msg: impl std::fmt::Display) -> Self {
        CliError {
            exit_code: 2,
            message: msg.to_string(),
        }
    }
    pub fn numeric(msg: impl std::fmt::Display) -> Self {
        CliError {
            exit_code: 3,
            message: msg.to_string(),
        }
    }
    pub fn io(msg: impl std::fmt::Display) -> Self {
        CliError {
            exit_code: 1,
            message: msg.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Reduce {
            field,
            max_depth,
            emit_tree,
            dot,
            common,
        } => runners::reduce(&field, max_depth, emit_tree, dot, &common),
        Command::Classify {
            field,
            point,
            common,
        } => runners::classify(&field, &point, &common),
        Command::Affine { sub } => match sub {
            AffineCmd::Signature {
                genus,
                indices,
                common,
            } => runners::signature(genus, &indices, &common),
            AffineCmd::Univalence1d { field, common } => runners::univalence(&field, &common),
            AffineCmd::Ramification { residue, common } => {
                runners::ramification(&residue, &common)
            }
            AffineCmd::Defect {
                chart1,
                chart2,
                common,
            } => runners::defect(&chart1, &chart2, &common),
        },
        Command::Continue {
            field,
            start,
            path,
            tol,
            csv,
            plot,
            common,
        } => runners::continue_cmd(&field, &start, &path, tol, csv, plot, &common),
        Command::Monodromy {
            eq,
            loops,
            tol,
            common,
        } => runners::monodromy_cmd(&eq, &loops, tol, false, &common),
        Command::Census {
            eq,
            loops,
            tol,
            common,
        } => runners::monodromy_cmd(&eq, &loops, tol, true, &common),
        Command::Examples { name, common } => runners::examples(name.as_deref(), &common),
        Command::Verify {
            solution,
            n,
            g2,
            g3,
            tol,
            common,
        } => runners::verify(&solution, n, g2, g3, tol, &common),
    }
}
