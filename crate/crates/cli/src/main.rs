use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::LazyLock;

use clap::{Args, Parser, Subcommand};
use log::info;

use wnlink::learning::MODEL_FORMAT_VERSION;
use wnlink::pipeline::{run_all, PipelineConfig, Stage};
use wnlink::synthgen::{generate_world, WorldSpec, CONFIG_FILE, MANIFEST_FORMAT_VERSION};

static VERSION: LazyLock<String> = LazyLock::new(|| {
    format!(
        "{} (model format {MODEL_FORMAT_VERSION}, manifest format {MANIFEST_FORMAT_VERSION})",
        env!("CARGO_PKG_VERSION")
    )
});

/// Induce a wordnet for a new language by classifying dictionary-induced
/// links to the synsets of an existing wordnet.
#[derive(Debug, Parser)]
#[command(name = "wnlink", version = VERSION.as_str())]
struct Cli {
    /// Pipeline configuration file (flat `key = value` lines).
    #[arg(long, short, global = true, default_value = "pipeline.ini")]
    config: PathBuf,

    /// Override a configuration key; may be repeated. Wins over the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Threads for parallel stages; 1 is bitwise deterministic.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Only log warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build context vectors for both corpora.
    BuildCv,
    /// Train skip-gram embeddings on the target corpus.
    TrainEmbeddings,
    /// Compute per-word category distributions.
    BuildDomains,
    /// Generate and POS-prune candidate links.
    GenCandidates,
    /// Compute the seven features of every candidate link.
    Featurize,
    /// Assemble labeled training instances from seeds and random negatives.
    BuildTrainset,
    /// Fit the configured classifier.
    Train,
    /// Stratified cross-validation of the configured classifier.
    Crossval,
    /// Rank features by information gain and evaluate ranking prefixes.
    RankFeatures,
    /// Classify every candidate link and write the induced wordnet.
    Induce,
    /// Score the induced wordnet against the judged test links.
    Evaluate,
    /// Size, polysemy and coverage statistics of the induced wordnet.
    Stats,
    /// Run every stage in order, stopping at the first failure.
    Pipeline,
    /// Generate a synthetic world with a ready-to-run configuration.
    Synth(Box<SynthArgs>),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    source_words: Option<usize>,
    #[arg(long)]
    synsets: Option<usize>,
    #[arg(long)]
    target_words: Option<usize>,
    #[arg(long)]
    documents: Option<usize>,
    #[arg(long)]
    categories: Option<usize>,
    #[arg(long)]
    ambiguity_rate: Option<f64>,
    #[arg(long)]
    misleading_rate: Option<f64>,
    #[arg(long)]
    target_polysemy_rate: Option<f64>,
    #[arg(long)]
    gloss_length: Option<usize>,
    #[arg(long)]
    gloss_noise: Option<f64>,
    #[arg(long)]
    sentences_per_doc: Option<usize>,
    #[arg(long)]
    context_words: Option<usize>,
    #[arg(long)]
    context_noise: Option<usize>,
    #[arg(long)]
    source_sentences: Option<usize>,
    #[arg(long)]
    seed_fraction: Option<f64>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    core_fraction: Option<f64>,
}

impl SynthArgs {
    fn spec(&self) -> WorldSpec {
        let mut spec = WorldSpec::default();
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { spec.$field = v; })*
            };
        }
        apply!(
            seed,
            source_words,
            synsets,
            target_words,
            documents,
            categories,
            ambiguity_rate,
            misleading_rate,
            target_polysemy_rate,
            gloss_length,
            gloss_noise,
            sentences_per_doc,
            context_words,
            context_noise,
            source_sentences,
            seed_fraction,
            test_fraction,
            core_fraction
        );
        spec
    }
}

/// A failure with the exit status it maps to.
struct Failure {
    status: u8,
    message: String,
}

impl From<wnlink::Error> for Failure {
    fn from(e: wnlink::Error) -> Self {
        Failure {
            status: if e.is_internal() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn usage(message: String) -> Failure {
    Failure { status: 1, message }
}

fn stage_of(command: &Command) -> Option<Stage> {
    Some(match command {
        Command::BuildCv => Stage::BuildCv,
        Command::TrainEmbeddings => Stage::TrainEmbeddings,
        Command::BuildDomains => Stage::BuildDomains,
        Command::GenCandidates => Stage::GenCandidates,
        Command::Featurize => Stage::Featurize,
        Command::BuildTrainset => Stage::BuildTrainset,
        Command::Train => Stage::Train,
        Command::Crossval => Stage::Crossval,
        Command::RankFeatures => Stage::RankFeatures,
        Command::Induce => Stage::Induce,
        Command::Evaluate => Stage::Evaluate,
        Command::Stats => Stage::Stats,
        Command::Pipeline | Command::Synth(_) => return None,
    })
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    let mut cfg = PipelineConfig::load(&cli.config)?;
    for pair in &cli.overrides {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{pair}`")))?;
        cfg.set(key.trim(), value, Path::new(""))
            .map_err(|m| usage(format!("--set {pair}: {m}")))?;
    }
    if let Some(w) = cli.workers {
        cfg.set("workers", &w.to_string(), Path::new(""))
            .map_err(|m| usage(format!("--workers: {m}")))?;
    }
    Ok(cfg)
}

fn print_reports(cfg: &PipelineConfig, stage: Stage) -> Result<(), Failure> {
    for name in stage.reports() {
        let path = cfg.work(name);
        let text = std::fs::read_to_string(&path).map_err(|e| wnlink::Error::io(&path, e))?;
        println!("{}", text.trim_end());
        println!();
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Command::Synth(args) = &cli.command {
        let (manifest, _) = generate_world(&args.spec(), &args.out)?;
        for (name, count) in &manifest.counts {
            println!("{name}\t{count}");
        }
        println!("config\t{}", args.out.join(CONFIG_FILE).display());
        return Ok(());
    }

    let cfg = load_config(cli)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .map_err(|e| usage(format!("cannot start {} workers: {e}", cfg.workers)))?;

    match stage_of(&cli.command) {
        Some(stage) => {
            stage.run(&cfg)?;
            print_reports(&cfg, stage)?;
        }
        None => {
            let summary = run_all(&cfg)?;
            info!("all stages done; outputs in {}", cfg.work_dir.display());
            if summary.evaluation.is_some() {
                print_reports(&cfg, Stage::Evaluate)?;
            }
            print_reports(&cfg, Stage::Stats)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet {
        "warn"
    } else {
        "info"
    }))
    .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.status)
        }
    }
}
