//! Command-line front end wiring projection, training, bootstrapping and
//! evaluation into one workflow.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use srl_core::bootstrap::{BootstrapConfig, Variant};
use srl_core::pipeline::PredicateSource;
use srl_core::project::{CostMode, RoleBlacklist};

use config::{
    resolve, FileConfig, DEFAULT_COST, DEFAULT_EPOCHS, DEFAULT_ROUNDS, DEFAULT_SEED,
    DEFAULT_THRESHOLD, DEFAULT_VARIANT,
};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl From<srl_core::Error> for CliError {
    fn from(e: srl_core::Error) -> Self {
        match e {
            srl_core::Error::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "srl", version, about = "Cross-lingual semantic role projection toolkit")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Cap on worker threads for the parallel stages.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for every randomized stage.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic parallel corpus with gold annotations.
    Synth(SynthCli),
    /// Filter pairs by projection density and project the annotations.
    Project(ProjectCli),
    /// Train the supervised pipeline on a fully labeled corpus.
    Train(TrainCli),
    /// Self-train on a projected corpus and write per-round checkpoints.
    Bootstrap(BootstrapCli),
    /// Label a corpus with a trained model.
    Predict(PredictCli),
    /// Score predictions against gold annotations.
    Evaluate(EvaluateCli),
}

#[derive(Args)]
struct SynthCli {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long, default_value_t = 50)]
    vocab: usize,
    #[arg(long, default_value_t = 8)]
    mean_length: usize,
    #[arg(long, default_value_t = 0.0)]
    shift_rate: f64,
    #[arg(long, default_value_t = 0.0)]
    dropout: f64,
    #[arg(long, default_value_t = 0.0)]
    label_noise: f64,
}

#[derive(Args)]
struct ProjectCli {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Source-to-target alignment file (Pharaoh format).
    #[arg(long, requires = "backward", conflicts_with = "intersected")]
    forward: Option<PathBuf>,
    /// Target-to-source alignment file.
    #[arg(long, requires = "forward", conflicts_with = "intersected")]
    backward: Option<PathBuf>,
    /// Pair order inside the backward file.
    #[arg(long, value_enum, default_value_t = BackwardOrder::TargetSource)]
    backward_order: BackwardOrder,
    /// Pre-intersected alignment file; skips the intersection step.
    #[arg(long)]
    intersected: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Density threshold in [0, 1].
    #[arg(long)]
    threshold: Option<f64>,
    /// Roles excluded from projection (comma separated).
    #[arg(long, value_delimiter = ',')]
    blacklist: Option<Vec<String>>,
    /// Treat "X" in the blacklist as exact only, not "X-*".
    #[arg(long)]
    blacklist_no_prefixes: bool,
    /// Alignment files use 1-based indices.
    #[arg(long)]
    one_based: bool,
    /// Accept any POS tag instead of the universal tagset.
    #[arg(long)]
    any_pos: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackwardOrder {
    /// Lines hold target-source pairs and get swapped on read.
    TargetSource,
    /// Lines already hold source-target pairs.
    SourceTarget,
}

#[derive(Args)]
struct TrainCli {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    epochs: Option<u32>,
    #[arg(long)]
    any_pos: bool,
}

#[derive(Args)]
struct BootstrapCli {
    #[arg(long)]
    projected: PathBuf,
    /// Cost sidecar written by `project`; required for cost-sensitive
    /// modes.
    #[arg(long)]
    costs: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Gold development set for per-round metrics.
    #[arg(long)]
    dev: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    /// uniform | comp | dep | comp+dep
    #[arg(long)]
    cost: Option<String>,
    /// Number of self-training rounds m.
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    epochs: Option<u32>,
    /// Start each round from the previous round's weights.
    #[arg(long)]
    warm_start: bool,
    /// Keys for the iteration-curve CSV, e.g. VERB+A0 (comma separated).
    #[arg(long, value_delimiter = ',')]
    curve_keys: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    blacklist: Option<Vec<String>>,
    #[arg(long)]
    blacklist_no_prefixes: bool,
    #[arg(long)]
    any_pos: bool,
}

#[derive(Args)]
struct PredictCli {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// gold: copy predicate positions and senses from the input;
    /// predict: run the predicate stages too.
    #[arg(long, value_enum, default_value_t = PredicateMode::Gold)]
    predicates: PredicateMode,
    #[arg(long)]
    any_pos: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PredicateMode {
    Gold,
    Predict,
}

#[derive(Args)]
struct EvaluateCli {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    /// Also write the report as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Score predicate senses as dependencies instead of the
    /// gold-predicate regime.
    #[arg(long)]
    score_senses: bool,
    #[arg(long, value_delimiter = ',')]
    blacklist: Option<Vec<String>>,
    #[arg(long)]
    blacklist_no_prefixes: bool,
    #[arg(long)]
    any_pos: bool,
}

fn blacklist_from(
    flag: Option<Vec<String>>,
    no_prefixes: bool,
    file: &FileConfig,
) -> RoleBlacklist {
    let roles = resolve(flag, file.blacklist.clone(), vec!["AM".to_string()]);
    let prefixes = if no_prefixes {
        false
    } else {
        file.blacklist_prefixes.unwrap_or(true)
    };
    RoleBlacklist::new(roles, prefixes)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load(cli.config.as_deref())?;
    if let Some(workers) = cli.workers.or(file.workers) {
        if workers == 0 {
            return Err(CliError::Usage("--workers must be at least 1".to_string()));
        }
        // Ignore the error when a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    let seed = resolve(cli.seed, file.seed, DEFAULT_SEED);

    match cli.command {
        Command::Synth(args) => commands::cmd_synth(&commands::SynthArgs {
            out_dir: args.out_dir,
            pairs: args.pairs,
            vocab: args.vocab,
            mean_length: args.mean_length,
            shift_rate: args.shift_rate,
            dropout: args.dropout,
            label_noise: args.label_noise,
            seed,
        }),
        Command::Project(args) => {
            let blacklist = blacklist_from(
                args.blacklist.clone(),
                args.blacklist_no_prefixes,
                &file,
            );
            commands::cmd_project(&commands::ProjectArgs {
                source: args.source,
                target: args.target,
                forward: args.forward,
                backward: args.backward,
                backward_swapped: args.backward_order == BackwardOrder::TargetSource,
                intersected: args.intersected,
                out_dir: args.out_dir,
                threshold: resolve(args.threshold, file.threshold, DEFAULT_THRESHOLD),
                blacklist,
                one_based: args.one_based,
                any_pos: args.any_pos,
            })
        }
        Command::Train(args) => commands::cmd_train(&commands::TrainArgs {
            input: args.input,
            model: args.model,
            epochs: resolve(args.epochs, file.epochs, DEFAULT_EPOCHS),
            seed,
            any_pos: args.any_pos,
        }),
        Command::Bootstrap(args) => {
            let variant: Variant = resolve(
                args.variant.clone(),
                file.variant.clone(),
                DEFAULT_VARIANT.to_string(),
            )
            .parse()?;
            let cost_mode: CostMode = resolve(
                args.cost.clone(),
                file.cost.clone(),
                DEFAULT_COST.to_string(),
            )
            .parse()?;
            let blacklist = blacklist_from(
                args.blacklist.clone(),
                args.blacklist_no_prefixes,
                &file,
            );
            let curve_keys = args
                .curve_keys
                .clone()
                .unwrap_or_else(|| vec!["VERB+A0".to_string(), "VERB+A1".to_string()])
                .iter()
                .map(|key| {
                    key.split_once('+')
                        .map(|(pos, role)| (pos.to_string(), role.to_string()))
                        .ok_or_else(|| {
                            CliError::Usage(format!(
                                "curve key '{}' is not of the form POS+ROLE",
                                key
                            ))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            commands::cmd_bootstrap(&commands::BootstrapArgs {
                projected: args.projected,
                costs: args.costs,
                out_dir: args.out_dir,
                dev: args.dev,
                config: BootstrapConfig {
                    rounds: resolve(args.rounds, file.rounds, DEFAULT_ROUNDS),
                    variant,
                    cost_mode,
                    epochs_per_round: resolve(args.epochs, file.epochs, DEFAULT_EPOCHS),
                    seed,
                    warm_start: args.warm_start,
                },
                blacklist,
                curve_keys,
                any_pos: args.any_pos,
            })
        }
        Command::Predict(args) => commands::cmd_predict(&commands::PredictArgs {
            model: args.model,
            input: args.input,
            output: args.output,
            predicates: match args.predicates {
                PredicateMode::Gold => PredicateSource::Gold,
                PredicateMode::Predict => PredicateSource::Predict,
            },
            any_pos: args.any_pos,
        }),
        Command::Evaluate(args) => {
            let blacklist = blacklist_from(
                args.blacklist.clone(),
                args.blacklist_no_prefixes,
                &file,
            );
            commands::cmd_evaluate(&commands::EvaluateArgs {
                gold: args.gold,
                pred: args.pred,
                csv: args.csv,
                score_senses: args.score_senses,
                blacklist,
                any_pos: args.any_pos,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not usage errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {}", msg);
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("data error: {}", msg);
            ExitCode::from(2)
        }
    }
}
