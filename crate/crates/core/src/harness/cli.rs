//! Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::benchmarks::{make_objective, FunctionId};
use crate::ddpg::{load_model, new_agent, save_model, train, Mode, ModelMeta, TrainConfig, Variant, DEFAULT_POOL};
use crate::swarm::{DEFAULT_SUBGROUPS, DEFAULT_SWARM_SIZE};

use super::algorithms::{run_algorithm, Algorithm, LoadedModel};
use super::config::ExperimentConfig;
use super::experiment::{execute, run_experiment};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rlam", about = "Reinforcement-learning parameter adaptation for particle swarms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an actor network and write it with its sidecar.
    Train(TrainArgs),
    /// Run one algorithm on one function and write its convergence curve.
    Run(RunArgs),
    /// Run an experiment described by a config file.
    Compare(CompareArgs),
    /// Quick smoke benchmark of the baseline algorithms.
    Bench(BenchArgs),
}

fn parse_function(s: &str) -> Result<FunctionId, String> {
    s.parse::<FunctionId>().map_err(|_| {
        let names: Vec<&str> = FunctionId::ALL.iter().map(|f| f.name()).collect();
        format!("valid functions: {}", names.join(", "))
    })
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse::<Algorithm>()
        .map_err(|_| format!("valid algorithms: {}", Algorithm::valid_names()))
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, default_value = "pso", value_parser = parse_variant)]
    variant: Variant,
    #[arg(long, default_value = "absolute", value_parser = parse_mode)]
    mode: Mode,
    /// Comma-separated training pool.
    #[arg(long, value_delimiter = ',', value_parser = parse_function)]
    functions: Vec<FunctionId>,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 300)]
    episodes: usize,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SWARM_SIZE)]
    swarm_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weights file; the sidecar is written next to it with a `.meta` suffix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_function)]
    function: FunctionId,
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    fn_seed: u64,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// Trained model, required by rlam-pso, rlam-clpso and rlpso.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SWARM_SIZE)]
    swarm_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Convergence curve CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 4000)]
    budget: usize,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args, out, err),
        Command::Run(args) => cmd_run(args, out),
        Command::Compare(args) => cmd_compare(args, out),
        Command::Bench(args) => cmd_bench(args, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn runtime<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Runtime(e.to_string())
}

fn cmd_train(args: TrainArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    let pool = if args.functions.is_empty() {
        DEFAULT_POOL.to_vec()
    } else {
        args.functions
    };
    let config = TrainConfig {
        variant: args.variant,
        mode: args.mode,
        pool,
        dim: args.dim,
        episodes: args.episodes,
        budget: args.budget,
        swarm_size: args.swarm_size,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let mut agent = new_agent(&config).map_err(runtime)?;
    let log = train(&mut agent, &config).map_err(runtime)?;
    for (k, ep) in log.iter().enumerate() {
        if (k + 1) % 10 == 0 || k + 1 == log.len() {
            let loss = ep.mean_critic_loss.map_or("NA".to_string(), |l| format!("{l:.4}"));
            let _ = writeln!(
                err,
                "episode {:>4}: {} final {} critic loss {}",
                k + 1,
                ep.function,
                ep.final_gbest,
                loss
            );
        }
    }
    let meta = ModelMeta {
        mode: config.mode,
        variant: config.variant,
        subgroups: DEFAULT_SUBGROUPS,
        action_width: config.action_dim(),
        state_width: crate::ddpg::STATE_WIDTH,
        pool: config.pool.clone(),
        episodes: config.episodes,
        seed: config.seed,
    };
    save_model(&args.out, agent.actor(), &meta).map_err(runtime)?;
    let _ = writeln!(out, "wrote {}", args.out.display());
    Ok(())
}

fn cmd_run(args: RunArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let model = match (&args.model, args.algo.needs_model()) {
        (None, true) => {
            return Err(Failure::Usage(format!("--algo {} requires --model", args.algo)));
        }
        (Some(path), true) => {
            let (actor, meta) =
                load_model(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
            Some(LoadedModel { actor, meta })
        }
        (_, false) => None,
    };
    let objective = Arc::new(make_objective(args.function, args.dim, args.fn_seed).map_err(runtime)?);
    let record = run_algorithm(args.algo, objective, args.budget, args.swarm_size, args.seed, model.as_ref())
        .map_err(runtime)?;
    fs::write(&args.out, record.curve_csv())
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", args.out.display())))?;
    let _ = writeln!(out, "{} {} final {}", args.algo, args.function, record.final_fit);
    Ok(())
}

fn cmd_compare(args: CompareArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let config = ExperimentConfig::load(&args.config).map_err(runtime)?;
    let output = run_experiment(&config).map_err(runtime)?;
    let _ = out.write_all(output.summary.to_csv().as_bytes());
    let _ = writeln!(out, "wrote {}", config.out_dir.join("summary.csv").display());
    Ok(())
}

fn cmd_bench(args: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut config = ExperimentConfig::new(
        vec![FunctionId::Sphere, FunctionId::Rastrigin, FunctionId::Griewank],
        vec![Algorithm::Pso, Algorithm::PsoLdw, Algorithm::HpsoTvac, Algorithm::Clpso],
        PathBuf::new(),
    );
    config.runs = args.runs;
    config.budget = args.budget;
    let start = std::time::Instant::now();
    let output = execute(&config).map_err(runtime)?;
    let _ = out.write_all(output.summary.to_csv().as_bytes());
    let _ = writeln!(
        out,
        "{} runs in {:.2?}",
        output.records.len(),
        start.elapsed()
    );
    Ok(())
}
