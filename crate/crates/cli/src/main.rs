//! `pipedist`: bounds on the Skorokhod distance between two polytope flowpipes.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pipedist::distance::decide_prepared;
use pipedist::freespace::build_boundary_prepared;
use pipedist::oracle::pipe_min_max;
use pipedist::pipeline::{lifted_pair, write_freespace};
use pipedist::{
    compute_bounds, load_instance, Error, NormName, PipelineOptions, SampledPipe, StrategyOptions,
    StrategyRegistry,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "pipedist", version, about = "Skorokhod distance bounds between polytope flowpipes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bounds (beta_min, beta_max) on the distance.
    Distance(Common),
    /// Whether the end of the free space is reachable at one delta.
    Decide {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        phi: Phi,
        #[arg(long)]
        delta: f64,
    },
    /// Writes the free-space boundary at one delta as line-delimited JSON.
    Freespace {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        phi: Phi,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Phi between time-lifted sample `i` of the first pipe and sample `j` of the second.
    Phi {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        op: Phi,
        #[arg(long, default_value_t = 0)]
        i: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
    },
    /// Cross-checks the bounds against brute-force trace sampling (box pipes only).
    Validate {
        #[command(flatten)]
        common: Common,
        /// Grid points per box coordinate.
        #[arg(long, default_value_t = 3)]
        grid: usize,
        /// Points per polyline segment.
        #[arg(long, default_value_t = 50)]
        refinement: usize,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
}

#[derive(Args)]
struct Common {
    /// Instance JSON file.
    instance: PathBuf,
    /// Overrides the instance norm.
    #[arg(long, value_enum)]
    norm: Option<Norm>,
    /// Sliding window half-width (cells with |i - j| > W are excluded).
    #[arg(long)]
    window: Option<usize>,
    /// Per-edge sampling resolution for phi max.
    #[arg(long)]
    k: Option<usize>,
    /// Fractional bits of the binary searches.
    #[arg(long)]
    bits: Option<u32>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Norm {
    Linf,
    L1max,
}

#[derive(Clone, Copy, ValueEnum)]
enum Phi {
    Min,
    Max,
}

impl Phi {
    fn name(self) -> &'static str {
        match self {
            Phi::Min => "min",
            Phi::Max => "max",
        }
    }
}

struct Loaded {
    sp1: SampledPipe,
    sp2: SampledPipe,
    opts: PipelineOptions,
    json: bool,
}

fn load(c: &Common) -> Result<Loaded, Error> {
    let (sp1, sp2, mut opts) = load_instance(&c.instance)?;
    if let Some(n) = c.norm {
        opts.norm = match n {
            Norm::Linf => NormName::LInf,
            Norm::L1max => NormName::L1Max,
        };
    }
    opts.window = c.window.or(opts.window);
    opts.k = c.k.unwrap_or(opts.k);
    opts.bits = c.bits.unwrap_or(opts.bits);
    Ok(Loaded { sp1, sp2, opts, json: c.json })
}

fn emit(json: bool, value: serde_json::Value, text: String) {
    if json {
        println!("{value}");
    } else {
        println!("{text}");
    }
}

fn distance(c: &Common) -> Result<bool, Error> {
    let l = load(c)?;
    let b = pipedist::run_pipeline(&l.sp1, &l.sp2, &l.opts)?;
    let mut text = format!("beta_min = {}\nbeta_max = {}\nupper_bound = {}", b.beta_min, b.beta_max, b.upper_bound);
    if b.k_sensitive {
        text.push_str("\nnote: beta_max is limited by k; a larger --k may tighten it");
    }
    emit(l.json, serde_json::to_value(&b).expect("bounds serialize"), text);
    Ok(true)
}

fn decide(c: &Common, phi: Phi, delta: f64) -> Result<bool, Error> {
    let l = load(c)?;
    let (r1, r2, nk) = lifted_pair(&l.sp1, &l.sp2, l.opts.norm)?;
    let strategy = StrategyRegistry::with_defaults().create(phi.name(), &StrategyOptions { k: l.opts.k })?;
    let pair = strategy.prepare(&r1, &r2, nk)?;
    let reachable = decide_prepared(pair.as_ref(), delta, l.opts.window)?;
    emit(l.json, json!({ "phi": phi.name(), "delta": delta, "reachable": reachable }), reachable.to_string());
    Ok(true)
}

fn freespace(c: &Common, phi: Phi, delta: f64, out: &Path) -> Result<bool, Error> {
    let l = load(c)?;
    let (r1, r2, nk) = lifted_pair(&l.sp1, &l.sp2, l.opts.norm)?;
    let strategy = StrategyRegistry::with_defaults().create(phi.name(), &StrategyOptions { k: l.opts.k })?;
    let pair = strategy.prepare(&r1, &r2, nk)?;
    let fsb = build_boundary_prepared(pair.as_ref(), delta, l.opts.window)?;
    let records = write_freespace(&fsb, BufWriter::new(File::create(out)?))?;
    emit(
        l.json,
        json!({ "phi": phi.name(), "delta": delta, "records": records, "out": out.display().to_string() }),
        format!("wrote {records} records to {}", out.display()),
    );
    Ok(true)
}

fn phi(c: &Common, op: Phi, i: usize, j: usize) -> Result<bool, Error> {
    let l = load(c)?;
    // Corner values of the free space: lifted samples, so the time gap counts.
    let (r1, r2, nk) = lifted_pair(&l.sp1, &l.sp2, l.opts.norm)?;
    for (k, r, which) in [(i, &r1, "pipe1"), (j, &r2, "pipe2")] {
        if k > r.m() {
            return Err(Error::InvalidArgument(format!("{which} has no sample {k}")));
        }
    }
    let strategy = StrategyRegistry::with_defaults().create(op.name(), &StrategyOptions { k: l.opts.k })?;
    let value = strategy.phi(r1.sample(i), r2.sample(j), nk)?;
    emit(l.json, json!({ "op": op.name(), "i": i, "j": j, "value": value }), value.to_string());
    Ok(true)
}

fn validate(c: &Common, grid: usize, refinement: usize, tol: f64) -> Result<bool, Error> {
    let l = load(c)?;
    let (r1, r2, nk) = lifted_pair(&l.sp1, &l.sp2, l.opts.norm)?;
    let b = compute_bounds(&r1, &r2, nk, &l.opts.bounds())?;
    let (lo, hi) = pipe_min_max(&r1, &r2, nk, grid, refinement)?;
    let consistent = b.beta_min <= lo + tol && hi <= b.beta_max + tol;
    emit(
        l.json,
        json!({
            "beta_min": b.beta_min,
            "beta_max": b.beta_max,
            "oracle_min": lo,
            "oracle_max": hi,
            "tol": tol,
            "consistent": consistent,
        }),
        format!(
            "beta_min = {}\nbeta_max = {}\noracle_min = {lo}\noracle_max = {hi}\n{}",
            b.beta_min,
            b.beta_max,
            if consistent { "consistent" } else { "INCONSISTENT" }
        ),
    );
    Ok(consistent)
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        2
    } else if e.is_numerical() {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Distance(c) => distance(c),
        Command::Decide { common, phi, delta } => decide(common, *phi, *delta),
        Command::Freespace { common, phi, delta, out } => freespace(common, *phi, *delta, out),
        Command::Phi { common, op, i, j } => phi(common, *op, *i, *j),
        Command::Validate { common, grid, refinement, tol } => validate(common, *grid, *refinement, *tol),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
