use clap::{Args, Parser, Subcommand, ValueEnum};
use emorank::assets::{assets_dir, list_assets};
use emorank::pipeline::{
    build_index_file, eval_from_run, radar_from_run, run_batch, AggregateChoice, PipelineError,
    PmingScope, ProviderSpec, RunConfig,
};
use emorank::proximity::MeasureKind;
use emorank::ranking::Aggregate;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "emorank", version, about = "Rank basic emotions for short texts from corpus co-occurrence proximity")]
struct Cli {
    /// Assets directory (overrides EMORANK_ASSETS and ./assets)
    #[arg(long, global = true)]
    assets: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process a batch of sentences end to end
    Run(RunArgs),
    /// Render a radar SVG for one sentence of a prior run
    Radar(RadarArgs),
    /// Re-score a prior run's outputs against ground truth
    Eval(EvalArgs),
    /// List models, profiles, engines, and fixtures with validation status
    Assets,
    /// Build a reusable corpus index from NDJSON documents
    Index(IndexArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Confidence,
    Pmi,
    Ngd,
    Pming,
}

impl From<MeasureArg> for MeasureKind {
    fn from(value: MeasureArg) -> Self {
        match value {
            MeasureArg::Confidence => MeasureKind::Confidence,
            MeasureArg::Pmi => MeasureKind::Pmi,
            MeasureArg::Ngd => MeasureKind::Ngd,
            MeasureArg::Pming => MeasureKind::Pming,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregateArg {
    Avg,
    Max,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum OneAggregateArg {
    Avg,
    Max,
}

impl From<OneAggregateArg> for Aggregate {
    fn from(value: OneAggregateArg) -> Self {
        match value {
            OneAggregateArg::Avg => Aggregate::Average,
            OneAggregateArg::Max => Aggregate::Max,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Sentence,
    Dataset,
}

impl From<ScopeArg> for PmingScope {
    fn from(value: ScopeArg) -> Self {
        match value {
            ScopeArg::Sentence => PmingScope::Sentence,
            ScopeArg::Dataset => PmingScope::Dataset,
        }
    }
}

impl From<AggregateArg> for AggregateChoice {
    fn from(value: AggregateArg) -> Self {
        match value {
            AggregateArg::Avg => AggregateChoice::Avg,
            AggregateArg::Max => AggregateChoice::Max,
            AggregateArg::Both => AggregateChoice::Both,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Emotion model name (builtin: ekman, plutchik, lovheim)
    #[arg(long, default_value = "ekman")]
    model: String,

    /// Proximity measure
    #[arg(long, value_enum)]
    measure: MeasureArg,

    /// PMING weight between PMI and NGD terms
    #[arg(long, default_value_t = 0.5)]
    rho: f64,

    /// Pair context for the PMING maxima
    #[arg(long, value_enum, default_value = "sentence")]
    pming_scope: ScopeArg,

    /// Language profile name
    #[arg(long, default_value = "english")]
    profile: String,

    /// NDJSON corpus or prebuilt index file
    #[arg(long, group = "provider")]
    corpus: Option<PathBuf>,

    /// JSON count fixture
    #[arg(long, group = "provider")]
    fixture: Option<PathBuf>,

    /// Live engine config
    #[arg(long, group = "provider")]
    engine: Option<PathBuf>,

    /// Input sentences, one "id@text" per line
    #[arg(long)]
    sentences: PathBuf,

    /// Ground-truth headlines ("id@text" lines); enables evaluation
    #[arg(long, requires = "truth_scores")]
    truth_headlines: Option<PathBuf>,

    /// Ground-truth scores ("id s1 s2 s3 s4 s5 s6" lines)
    #[arg(long, requires = "truth_headlines")]
    truth_scores: Option<PathBuf>,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Which sentence aggregates to emit
    #[arg(long, value_enum, default_value = "both")]
    aggregate: AggregateArg,

    /// Worker pool size (default: 1 for --engine, all cores otherwise)
    #[arg(long)]
    workers: Option<usize>,

    /// Abort the batch on the first failing sentence
    #[arg(long)]
    fail_fast: bool,
}

#[derive(Args)]
struct RadarArgs {
    /// A prior run's output directory
    #[arg(long)]
    run: PathBuf,

    /// Sentence id to visualize
    #[arg(long)]
    sentence: String,

    /// Which aggregate vector to draw
    #[arg(long, value_enum, default_value = "avg")]
    aggregate: OneAggregateArg,

    /// Output SVG path (default: <run>/radar_<sentence>_<aggregate>.svg)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// A prior run's output directory
    #[arg(long)]
    run: PathBuf,

    #[arg(long)]
    truth_headlines: PathBuf,

    #[arg(long)]
    truth_scores: PathBuf,

    #[arg(long, value_enum, default_value = "both")]
    aggregate: AggregateArg,

    /// Where to write evaluation.csv and summary.json (default: the run dir)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IndexArgs {
    /// NDJSON corpus, one {"id", "text"} per line
    #[arg(long)]
    corpus: PathBuf,

    /// Output index file
    #[arg(long)]
    out: PathBuf,
}

fn provider_spec(args: &RunArgs) -> Result<ProviderSpec, String> {
    match (&args.corpus, &args.fixture, &args.engine) {
        (Some(p), None, None) => Ok(ProviderSpec::Corpus(p.clone())),
        (None, Some(p), None) => Ok(ProviderSpec::Fixture(p.clone())),
        (None, None, Some(p)) => Ok(ProviderSpec::Engine(p.clone())),
        _ => Err("exactly one of --corpus, --fixture, --engine is required".into()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, PipelineError> {
    match cli.command {
        Command::Run(args) => {
            let provider = provider_spec(&args).map_err(PipelineError::Config)?;
            let config = RunConfig {
                model: args.model,
                measure: args.measure.into(),
                rho: args.rho,
                profile: args.profile,
                provider,
                sentences: args.sentences,
                truth: args.truth_headlines.zip(args.truth_scores),
                out_dir: args.out,
                aggregate: args.aggregate.into(),
                workers: args.workers,
                fail_fast: args.fail_fast,
                assets_dir: cli.assets,
                pming_scope: args.pming_scope.into(),
            };
            let outcome = run_batch(&config)?;
            eprintln!(
                "processed {} sentence(s), {} failure(s); outputs in {}",
                outcome.processed,
                outcome.failures.len(),
                outcome.out_dir.display()
            );
            if outcome.is_success() {
                Ok(ExitCode::SUCCESS)
            } else {
                for (id, error) in &outcome.failures {
                    eprintln!("  sentence {id}: {error}");
                }
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Radar(args) => {
            let how = match AggregateChoice::from(args.aggregate) {
                AggregateChoice::Max => Aggregate::Max,
                _ => Aggregate::Average,
            };
            let svg = radar_from_run(&args.run, &args.sentence, how)?;
            let out = args.out.unwrap_or_else(|| {
                args.run.join(format!("radar_{}_{}.svg", args.sentence, how.as_str()))
            });
            std::fs::write(&out, svg)?;
            eprintln!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval(args) => {
            let out = args.out.unwrap_or_else(|| args.run.clone());
            let count = eval_from_run(
                &args.run,
                &args.truth_headlines,
                &args.truth_scores,
                args.aggregate.into(),
                &out,
            )?;
            eprintln!("scored {count} row(s); outputs in {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Assets => {
            let dir = assets_dir(cli.assets.as_deref());
            let inventory = list_assets(dir.as_deref());
            println!("{}", serde_json::to_string_pretty(&inventory).expect("inventory serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Index(args) => {
            let index = build_index_file(&args.corpus, &args.out)?;
            eprintln!(
                "indexed {} document(s), {} term(s) -> {}",
                index.doc_count(),
                index.term_count(),
                args.out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
