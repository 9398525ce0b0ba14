//! `summit`: summarize the top of an aggregate query result as a few
//! diverse wildcard clusters.

mod args;
mod table;

use std::io::Write;
use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use summit_core::ingest::{self, IngestConfig, DSN_ENV};
use summit_core::oracle::{brute_force, OracleLimits};
use summit_core::payload::{self, SummarizeRequest};
use summit_core::store::{precompute, ParamStore, PrecomputeOptions};
use summit_core::{Dataset, Error, Params};

use args::{Cli, Command, Format, GuidanceFormat, Input, Run};

/// Exit 2 for bad input, 1 for everything else.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Outcome {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Summarize { input, run, expand, format } => {
            let ds = load(&input)?;
            let req = request(&run)?;
            let sol = req.run(&ds)?;
            match format {
                Format::Json => writeln!(out, "{}", payload::canonical(&payload::summarize_payload(&ds, &req, &sol)?))?,
                Format::Table => table::solution(&mut out, &ds, &sol, expand)?,
            }
        }
        Command::Precompute { input, grid, out: path } => {
            let ds = load(&input)?;
            let store = build(&ds, &grid)?;
            store.save(&path)?;
            let points = store.guidance_matrix().values().map(Vec::len).sum::<usize>();
            writeln!(out, "wrote {} ({points} grid points, L={})", path.display(), store.l())?;
        }
        Command::Guidance { input, store, grid, format } => {
            let store = match store {
                Some(path) => {
                    let store = ParamStore::load(path)?;
                    if input.given() {
                        let ds = load(&input)?;
                        if ds.fingerprint() != store.fingerprint() {
                            return Err(Error::StoreMismatch.into());
                        }
                    }
                    store
                }
                None => build(&load(&input)?, &grid)?,
            };
            match format {
                GuidanceFormat::Csv => write!(out, "{}", payload::guidance_csv(&store))?,
                GuidanceFormat::Json => writeln!(out, "{}", payload::canonical(&payload::guidance_payload(&store)))?,
            }
        }
        Command::Compare { input, prev, cur, store, run, format } => {
            let ds = load(&input)?;
            let old = match store {
                Some(path) => {
                    let store = ParamStore::load(path)?;
                    if store.l() != prev.l {
                        return Err(Failure::Usage(format!("store is for L={}, --prev asks for L={}", store.l(), prev.l)));
                    }
                    store.retrieve(&ds, prev.k, prev.d)?
                }
                None => request(&run.with_triple(prev))?.run(&ds)?,
            };
            let new = request(&run.with_triple(cur))?.run(&ds)?;
            let v = payload::compare_payload(&ds, &old, &new)?;
            match format {
                Format::Json => writeln!(out, "{}", payload::canonical(&v))?,
                Format::Table => table::compare(&mut out, &v)?,
            }
        }
        Command::Oracle { input, k, l, d, max_subsets, format } => {
            let ds = load(&input)?;
            let res = brute_force(&ds, Params::new(k, l, d), OracleLimits { max_subsets })?;
            match format {
                Format::Json => writeln!(out, "{}", payload::canonical(&payload::oracle_payload(&ds, &res)?))?,
                Format::Table => {
                    writeln!(out, "evaluated {} subsets, {} feasible", res.evaluated_count, res.feasible_count)?;
                    if let Some(sol) = &res.optimal {
                        table::solution(&mut out, &ds, sol, false)?;
                    }
                }
            }
        }
        Command::Serve { input, stores, host, port, build_budget } => {
            let ds = if input.given() || std::env::var_os(DSN_ENV).is_some() { Some(load(&input)?) } else { None };
            let mut state = summit_service::AppState::new(ds).with_build_budget(build_budget);
            for path in stores {
                state = state.with_store(ParamStore::load(path)?)?;
            }
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new()?;
            eprintln!("listening on http://{addr}");
            rt.block_on(summit_service::serve(Arc::new(state), addr))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn load(input: &Input) -> Result<Dataset, Failure> {
    let config = IngestConfig {
        value_column: input.value_column.clone(),
        attribute_columns: input.attributes.clone(),
        l_default: None,
        allow_duplicates: input.allow_duplicates,
    };
    if let Some(path) = &input.csv {
        if input.query.is_some() {
            return Err(Failure::Usage("--query only applies to --dsn input".into()));
        }
        return Ok(ingest::load_csv(path, &config)?);
    }
    let dsn = match &input.dsn {
        Some(d) => d.clone(),
        None => std::env::var(DSN_ENV)
            .map_err(|_| Failure::Usage(format!("one of --csv or --dsn (or {DSN_ENV}) is required")))?,
    };
    let query = input.query.as_deref().ok_or_else(|| Failure::Usage("--dsn input needs --query".into()))?;
    Ok(ingest::load_sql(&dsn, query, &config)?)
}

fn request(run: &Run) -> Result<SummarizeRequest, Failure> {
    let (Some(k), Some(l), Some(d)) = (run.k, run.l, run.d) else {
        return Err(Failure::Usage("--k, --L and --D are required".into()));
    };
    Ok(SummarizeRequest {
        k,
        l,
        d,
        algo: run.algo,
        seed: run.seed,
        seeding: run.seeding.map(Into::into),
        hybrid_c: run.hybrid_c,
        phase_a_budget: run.phase_a_budget,
    })
}

fn build(ds: &Dataset, grid: &args::Grid) -> Result<ParamStore, Failure> {
    let (Some(l), Some(k_min), Some(k_max)) = (grid.l, grid.k_min, grid.k_max) else {
        return Err(Failure::Usage("--L, --k-min and --k-max are required to build a grid".into()));
    };
    let d_max = grid.d_max.unwrap_or(ds.m());
    let seeding = SummarizeRequest { seed: grid.seed, seeding: grid.seeding.map(Into::into), ..SummarizeRequest::new(1, 1, 0, grid.algo) }.seeding();
    let opts = PrecomputeOptions {
        algorithm: grid.algo,
        hybrid_c: grid.hybrid_c.unwrap_or(summit_core::algorithms::DEFAULT_HYBRID_C),
        seeding,
    };
    Ok(precompute(ds, l, (k_min, k_max), (grid.d_min, d_max), opts)?)
}
