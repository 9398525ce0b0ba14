use std::net::IpAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use summit_core::algorithms::Algorithm;
use summit_core::payload::SeedingKind;

#[derive(Parser)]
#[command(name = "summit", version, about = "Summarize top-ranked aggregate answers as diverse wildcard clusters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Run one heuristic and print its clusters.
    Summarize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: Run,
        /// List the member rows of every cluster with their global ranks.
        #[arg(long)]
        expand: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Build a store over a (k, D) grid and write it to a file.
    Precompute {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the (k, D) -> objective grid from a store file or a fresh build.
    Guidance {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        store: Option<PathBuf>,
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_enum, default_value_t = GuidanceFormat::Csv)]
        format: GuidanceFormat,
    },
    /// Overlap and crossing-minimizing order between two solutions.
    Compare {
        #[command(flatten)]
        input: Input,
        /// Previous parameters as k,L,D.
        #[arg(long, value_parser = parse_triple)]
        prev: Triple,
        /// Current parameters as k,L,D.
        #[arg(long, value_parser = parse_triple)]
        cur: Triple,
        /// Take the previous solution from this store instead of rerunning.
        #[arg(long)]
        store: Option<PathBuf>,
        #[command(flatten)]
        run: Run,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exhaustive optimum for small instances.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        k: usize,
        #[arg(long = "L")]
        l: usize,
        #[arg(long = "D")]
        d: usize,
        #[arg(long, default_value_t = summit_core::oracle::DEFAULT_MAX_SUBSETS)]
        max_subsets: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Start the HTTP service.
    Serve {
        #[command(flatten)]
        input: Input,
        /// Prebuilt store to answer guidance requests from (repeatable).
        #[arg(long = "store")]
        stores: Vec<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "SUMMIT_PORT", default_value_t = 8080)]
        port: u16,
        /// Largest `grid points × L` built inside a request.
        #[arg(long, default_value_t = summit_service::DEFAULT_BUILD_BUDGET)]
        build_budget: u64,
    },
}

#[derive(Args, Clone, Debug)]
pub struct Input {
    #[arg(long, conflicts_with = "dsn")]
    pub csv: Option<PathBuf>,
    /// Database to query, e.g. `sqlite:path/to.db`. Defaults to `$SUMMIT_DSN`.
    #[arg(long)]
    pub dsn: Option<String>,
    /// Query passed verbatim to the database.
    #[arg(long)]
    pub query: Option<String>,
    #[arg(long, default_value = "val")]
    pub value_column: String,
    /// Attribute columns, comma separated. Defaults to every other column.
    #[arg(long, value_delimiter = ',')]
    pub attributes: Option<Vec<String>>,
    #[arg(long)]
    pub allow_duplicates: bool,
}

impl Input {
    pub fn given(&self) -> bool {
        self.csv.is_some() || self.dsn.is_some()
    }
}

#[derive(Args, Clone, Debug)]
pub struct Run {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long = "D")]
    pub d: Option<usize>,
    #[arg(long, default_value = "hybrid", value_parser = parse_algo)]
    pub algo: Algorithm,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Seeding for the fixed-order scan; random when only --seed is given.
    #[arg(long, value_enum)]
    pub seeding: Option<SeedingArg>,
    #[arg(long)]
    pub hybrid_c: Option<f64>,
    /// Fixed-order budget for hybrid; matches a store built with this budget.
    #[arg(long)]
    pub phase_a_budget: Option<usize>,
}

impl Run {
    pub fn with_triple(&self, t: Triple) -> Run {
        Run { k: Some(t.k), l: Some(t.l), d: Some(t.d), ..self.clone() }
    }
}

#[derive(Args, Clone, Debug)]
pub struct Grid {
    #[arg(long = "L")]
    pub l: Option<usize>,
    #[arg(long)]
    pub k_min: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub d_min: usize,
    /// Defaults to the attribute count.
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long, default_value = "hybrid", value_parser = parse_algo)]
    pub algo: Algorithm,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub seeding: Option<SeedingArg>,
    #[arg(long)]
    pub hybrid_c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeedingArg {
    None,
    Random,
    Kmodes,
}

impl From<SeedingArg> for SeedingKind {
    fn from(s: SeedingArg) -> Self {
        match s {
            SeedingArg::None => SeedingKind::None,
            SeedingArg::Random => SeedingKind::Random,
            SeedingArg::Kmodes => SeedingKind::Kmodes,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GuidanceFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triple {
    pub k: usize,
    pub l: usize,
    pub d: usize,
}

fn parse_triple(s: &str) -> Result<Triple, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [k, l, d] = parts.as_slice() else {
        return Err(format!("expected k,L,D, got {s:?}"));
    };
    let num = |x: &str| x.parse::<usize>().map_err(|_| format!("{x:?} is not a non-negative integer"));
    Ok(Triple { k: num(k)?, l: num(l)?, d: num(d)? })
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: summit_core::Error| e.to_string())
}
