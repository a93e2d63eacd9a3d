//! `polarforge`: build polar spaces, run the constructions, verify files.
//!
//! Exit codes: 0 when every certificate is ok, 2 when a verification (or a
//! search) comes out negative, 1 on usage and IO errors.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use polarforge::forms::SpaceSpec;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "polarforge", version, about = "Exact constructions in finite polar spaces")]
struct Cli {
    /// Worker threads for generator verification (default: all cores).
    #[arg(long, global = true, env = "POLARFORGE_THREADS")]
    threads: Option<usize>,
    /// Summary printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory receiving the JSON artifacts and manifest.json.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpreadMethod {
    Char3,
    Desarguesian,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Type, rank, parameter and counts of a polar space.
    Info {
        /// Space spec TYPE:projdim:q, TYPE one of Q+, Q, Q-, W.
        space: SpaceSpec,
    },
    /// Enumerate the generators of a polar space.
    Generators { space: SpaceSpec },
    /// Search for an m-ovoid.
    OvoidSearch {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Point file whose points must be in the result.
        #[arg(long)]
        include: Option<PathBuf>,
        /// Point file whose points must stay out of the result.
        #[arg(long)]
        exclude: Option<PathBuf>,
    },
    /// Check a point file against every generator.
    OvoidVerify {
        /// Defaults to the space recorded in the file.
        #[arg(long)]
        space: Option<SpaceSpec>,
        #[arg(long)]
        file: PathBuf,
    },
    /// Build a line spread of PG(3,q) and its census.
    SpreadBuild {
        #[arg(long)]
        q: u64,
        #[arg(long, value_enum)]
        method: SpreadMethod,
        /// Non-square for the Desarguesian method (default: smallest non-square).
        #[arg(long)]
        alpha: Option<u32>,
    },
    /// Count external, tangent and bisecant lines of a spread.
    SpreadCensus {
        #[arg(long, required_unless_present = "file")]
        q: Option<u64>,
        #[arg(long, value_enum, required_unless_present = "file")]
        method: Option<SpreadMethod>,
        #[arg(long)]
        alpha: Option<u32>,
        /// Spread file; the census form follows its recorded method.
        #[arg(long, conflicts_with_all = ["q", "method"])]
        file: Option<PathBuf>,
    },
    /// Plücker images of all lines of PG(3,q).
    KleinMap {
        #[arg(long)]
        q: u64,
    },
    /// The glued (q+1)-ovoid of Q+(7,q).
    Glue {
        #[arg(long, default_value_t = 3)]
        q: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Allow q > 3.
        #[arg(long)]
        stretch: bool,
    },
    /// Five pairwise disjoint 2-ovoids of Q+(7,3) and their unions.
    DisjointFamily {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Union sizes to emit, each in {2,4,6,8,10}.
        #[arg(long, value_delimiter = ',', default_values_t = [2, 4, 6, 8, 10])]
        m: Vec<usize>,
    },
    /// Section intersection patterns of an m-ovoid, or the zero cases.
    Patterns {
        #[arg(long)]
        space: Option<SpaceSpec>,
        /// m-ovoid to sweep against all sections.
        #[arg(long, required_unless_present = "q")]
        file: Option<PathBuf>,
        /// Zero-case table for this q (needs --n).
        #[arg(long, requires = "n", conflicts_with = "file")]
        q: Option<u64>,
        #[arg(long, requires = "q")]
        n: Option<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Info { .. } => "info",
            Command::Generators { .. } => "generators",
            Command::OvoidSearch { .. } => "ovoid-search",
            Command::OvoidVerify { .. } => "ovoid-verify",
            Command::SpreadBuild { .. } => "spread-build",
            Command::SpreadCensus { .. } => "spread-census",
            Command::KleinMap { .. } => "klein-map",
            Command::Glue { .. } => "glue",
            Command::DisjointFamily { .. } => "disjoint-family",
            Command::Patterns { .. } => "patterns",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::OvoidSearch { seed, .. } | Command::Glue { seed, .. } | Command::DisjointFamily { seed, .. } => {
                Some(*seed)
            }
            _ => None,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli.command).and_then(|outcome| manifest::emit(&cli.out, &cli.command, outcome)) {
        Ok(outcome) => {
            match cli.format {
                Format::Text => print!("{}", outcome.text),
                Format::Json => print!("{}", polarforge::io::to_json(&outcome.summary)),
            }
            ExitCode::from(if outcome.ok { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
