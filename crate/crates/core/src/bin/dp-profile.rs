use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dp_profile::eval::{fit_scaling, sweep, Distribution, SynthSpec};
use dp_profile::io::{
    eval_csv, profile_csv, protocol_csv, read_counts, read_histogram, read_sketch, sketch_to_json, write_atomic,
};
use dp_profile::reconstruct::OperatorCache;
use dp_profile::twoparty::run_protocol;
use dp_profile::{
    privatize, reconstruct_profile, seeded_rng, update, Error, Histogram, Norm, ReconstructionConfig, Result,
};

#[derive(Parser)]
#[command(name = "dp-profile", version, about = "Private histogram sketches and profile reconstruction")]
struct Cli {
    /// Seed for all randomness.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Privatize a histogram file into a JSON sketch.
    Sketch(SketchArgs),
    /// Reconstruct the profile from a sketch.
    Reconstruct(ReconstructArgs),
    /// Add a count delta to an unclipped sketch.
    Update(UpdateArgs),
    /// Error sweep over synthetic histograms.
    Eval(EvalArgs),
    /// Two-party inner-product protocol.
    Innerprod(InnerprodArgs),
}

#[derive(Args)]
struct SketchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    n: u64,
    /// Clip noisy counts into [0, n].
    #[arg(long)]
    clip: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    eta: f64,
    /// l1, l2 or linf.
    #[arg(long)]
    norm: Norm,
}

#[derive(Args)]
struct UpdateArgs {
    #[arg(long)]
    sketch: PathBuf,
    /// Text file with one signed integer per item.
    #[arg(long)]
    delta: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// point_mass:C, uniform or zipf:A.
    #[arg(long)]
    dist: Distribution,
    /// Comma-separated domain sizes.
    #[arg(long = "d-list", value_delimiter = ',', num_args = 0..)]
    d_list: Vec<usize>,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    output: PathBuf,
    /// Append fitted log-log slopes as comment lines.
    #[arg(long)]
    fit: bool,
    /// Record wall-clock seconds (otherwise the column is 0).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct InnerprodArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    output: PathBuf,
}

fn cmd_sketch(args: &SketchArgs, seed: u64) -> Result<()> {
    let h = Histogram::new(read_histogram(&args.input)?, args.n)?;
    let s = privatize(&h, args.epsilon, args.clip, &mut seeded_rng(seed))?;
    write_atomic(&args.output, sketch_to_json(&s).as_bytes())
}

fn cmd_reconstruct(args: &ReconstructArgs, seed: u64) -> Result<()> {
    let s = read_sketch(&args.input)?;
    let cfg = ReconstructionConfig::new(s.epsilon, args.eta, s.n, s.d(), args.norm)?;
    let start = Instant::now();
    let op = OperatorCache::global().get(&cfg)?;
    let r = reconstruct_profile(&s, &cfg, &mut seeded_rng(seed))?;
    eprintln!("B = {}", cfg.b());
    eprintln!("P_norm = {}", op.p_norm());
    eprintln!("reconstruction took {:.3} s", start.elapsed().as_secs_f64());
    write_atomic(&args.output, profile_csv(&r).as_bytes())
}

fn cmd_update(args: &UpdateArgs) -> Result<()> {
    let s = read_sketch(&args.sketch)?;
    let delta = read_counts(&args.delta)?;
    let updated = update(&s, &delta)?;
    write_atomic(&args.output, sketch_to_json(&updated).as_bytes())
}

fn cmd_eval(args: &EvalArgs, seed: u64) -> Result<()> {
    if args.d_list.is_empty() {
        return Err(Error::InvalidParameter {
            name: "d-list",
            reason: "at least one domain size is required".into(),
        });
    }
    let grid = args
        .d_list
        .iter()
        .map(|&d| {
            let cfg = ReconstructionConfig::new(args.epsilon, args.eta, args.n, d, Norm::L2)?;
            let spec = SynthSpec {
                distribution: args.dist,
                d,
                n: args.n,
                seed,
            };
            Ok((spec, cfg))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = sweep(&grid, args.trials, seed)?;
    let mut text = eval_csv(&rows, args.timing);
    if args.fit {
        for p in Norm::ALL {
            text.push_str(&format!("# slope_{p}={}\n", fit_scaling(&rows, p)?));
        }
    }
    write_atomic(&args.output, text.as_bytes())
}

fn cmd_innerprod(args: &InnerprodArgs, seed: u64) -> Result<()> {
    let rows = run_protocol(args.d, args.epsilon, args.trials, seed)?;
    write_atomic(&args.output, protocol_csv(&rows).as_bytes())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("DP_PROFILE_THREADS") else {
        return Ok(());
    };
    let threads = raw.trim().parse::<usize>().ok().filter(|&t| t > 0).ok_or_else(|| Error::InvalidParameter {
        name: "DP_PROFILE_THREADS",
        reason: format!("expected a positive integer, got `{raw}`"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Sketch(a) => cmd_sketch(a, cli.seed),
        Command::Reconstruct(a) => cmd_reconstruct(a, cli.seed),
        Command::Update(a) => cmd_update(a),
        Command::Eval(a) => cmd_eval(a, cli.seed),
        Command::Innerprod(a) => cmd_innerprod(a, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_user_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
