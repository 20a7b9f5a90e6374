//! Instance files, commands and reports for the `formalpatch` binary.

pub mod commands;
pub mod error;
pub mod instance;
pub mod report;
pub mod repro;
pub mod selftest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use formalpatch_core::par::Exec;

pub use error::CliError;
pub use instance::Instance;
pub use report::{Record, Report};

/// Instances shipped with the binary, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "a1-partial-fractions",
        include_str!("../instances/a1-partial-fractions.json"),
    ),
    ("a1-symbolic", include_str!("../instances/a1-symbolic.json")),
    ("a2-ideal-xy", include_str!("../instances/a2-ideal-xy.json")),
    (
        "flat-free-a2",
        include_str!("../instances/flat-free-a2.json"),
    ),
    ("two-planes", include_str!("../instances/two-planes.json")),
    ("xm-tn", include_str!("../instances/xm-tn.json")),
];

pub fn bundled(name: &str) -> Option<Instance> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name)?;
    Some(Instance::parse(&format!("{name}.json"), name, text).expect("bundled instances are valid"))
}

/// A path on disk, or else the name of a bundled instance.
pub fn resolve(arg: &str) -> Result<Instance, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        return Instance::load(path);
    }
    let stem = path
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_default();
    bundled(&stem).ok_or_else(|| CliError::instance(arg, "", "no such file or bundled instance"))
}

#[derive(Debug, Parser)]
#[command(
    name = "formalpatch",
    version,
    about = "Patching modules over formal tubular neighbourhoods"
)]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Run every check on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the patching problem of an instance.
    Solve {
        instance: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: Option<u32>,
        /// Try denominator exponents 0..=N.
        #[arg(long)]
        dmax: Option<u32>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the tower laws on the instance's tower modules.
    TowerVerify {
        instance: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: Option<u32>,
    },
    /// Compare a symbolic power with the ordinary power.
    SymbolicPower {
        instance: String,
        /// 1-based prime index.
        #[arg(long)]
        prime: usize,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long)]
        sep: Option<String>,
    },
    /// Pick an open cover from a pool of functions.
    Cover {
        instance: String,
        #[arg(long, value_delimiter = ',', required = true)]
        pool: Vec<String>,
    },
    /// Certify a candidate solution.
    Certify {
        instance: String,
        #[arg(long)]
        candidate: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        depth: Option<u32>,
    },
    /// Re-run a bundled worked example.
    Repro { id: String },
    /// Run the seeded invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn execute(command: Command, exec: Exec) -> Result<Report, CliError> {
    match command {
        Command::Solve {
            instance,
            depth,
            dmax,
            seed,
        } => commands::solve(&resolve(&instance)?, depth, dmax, seed, exec),
        Command::TowerVerify { instance, depth } => {
            commands::tower_verify(&resolve(&instance)?, depth, exec)
        }
        Command::SymbolicPower {
            instance,
            prime,
            n,
            sep,
        } => commands::symbolic_power(&resolve(&instance)?, prime, n, sep.as_deref()),
        Command::Cover { instance, pool } => commands::cover(&resolve(&instance)?, &pool),
        Command::Certify {
            instance,
            candidate,
            depth,
        } => commands::certify(&resolve(&instance)?, &candidate, depth, exec),
        Command::Repro { id } => repro::repro(&id, exec),
        Command::Selftest { seed } => selftest::selftest(seed, exec),
    }
}

/// Run the command line `argv` (program name first) and return the exit
/// code. Reports go to standard output, diagnostics to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    match execute(cli.command, exec) {
        Ok(report) => {
            let text = report.render(cli.json);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {}: {e}", path.display());
                    return 3;
                }
            }
            print!("{text}");
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
