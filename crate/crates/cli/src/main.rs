//! `lambdap`: batch checks for families of grid functions.
//!
//! Exit status: 0 when every requested condition or certificate passes,
//! 2 when one fails, 1 on usage, parse or I/O errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "lambdap",
    version,
    about = "F-norm compactness checks and epsilon-nets for grid functions"
)]
struct Cli {
    /// Worker threads (default: all cores). RAYON_NUM_THREADS is honoured too.
    #[arg(long, global = true, env = "LAMBDAP_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Family file: a JSON array of functions.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "gen",
        required_unless_present = "gen"
    )]
    pub family: Option<PathBuf>,

    /// Generator such as "f:k=1..100,p=2", "h:k=1..8,K=9" or "v:k=1/2/4,p=2,h=1/64".
    /// Families: f, g, h, u, v. Keys: k (a..b or a/b/c), p, K, h.
    #[arg(long = "gen", value_name = "SPEC")]
    pub gen: Option<String>,

    /// Exponent p >= 1 (a generator's own p takes precedence).
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,

    /// Also write the ingested family to FILE.
    #[arg(long, value_name = "FILE")]
    pub emit: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Scan {
    /// Shift lattice "STEP,COUNT" (shifts ±j·STEP, j <= COUNT); STEP may be "1/64".
    /// Default: the coarsest member spacing common to all members, 16 shifts.
    #[arg(long, value_name = "STEP,COUNT")]
    pub shifts: Option<String>,

    /// Upper bound for tail radii (default: what the leading half of the family needs).
    #[arg(long, value_name = "R")]
    pub r_max: Option<f64>,

    /// Upper bound for levels (default: what the leading half of the family needs).
    #[arg(long, value_name = "M")]
    pub m_max: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Greedy,
    TruncationLift,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Per-member F-norm and L^p norm table.
    Norm {
        #[command(flatten)]
        input: Input,
        /// Write the table to FILE instead of stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Tail, translation and level conditions plus the classical L^p pair.
    Check {
        #[command(flatten)]
        input: Input,
        /// Radius; repeat for several (default 0.5).
        #[arg(long, value_name = "EPS")]
        eps: Vec<f64>,
        #[command(flatten)]
        scan: Scan,
        /// Write the JSON report to FILE.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Print the JSON report instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Build and verify an epsilon-net.
    Net {
        #[command(flatten)]
        input: Input,
        /// Net radius (default 0.5).
        #[arg(long, value_name = "EPS", default_value_t = 0.5)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Method::Greedy)]
        method: Method,
        /// Write the JSON net to FILE.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Verdicts of the five benchmark families.
    Examples {
        /// Print the markdown verdict table.
        #[arg(long)]
        table: bool,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Markdown summary: norms, conditions and nets per radius.
    Report {
        #[command(flatten)]
        input: Input,
        /// Radius; repeat for several (default 0.5).
        #[arg(long, value_name = "EPS")]
        eps: Vec<f64>,
        #[command(flatten)]
        scan: Scan,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Norm { input, out } => commands::norm(&input, out.as_deref()),
        Command::Check {
            input,
            eps,
            scan,
            out,
            json,
        } => commands::check(&input, &eps, &scan, out.as_deref(), json),
        Command::Net {
            input,
            eps,
            method,
            out,
        } => commands::net(&input, eps, method, out.as_deref()),
        Command::Examples { table, out } => commands::examples(table, out.as_deref()),
        Command::Report {
            input,
            eps,
            scan,
            out,
        } => commands::report(&input, &eps, &scan, out.as_deref()),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
