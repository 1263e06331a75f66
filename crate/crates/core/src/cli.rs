//! Command-line front end.
//!
//! Settings come from an optional TOML config file with `[model]`, `[train]`
//! and `[evaluate]` sections; every key has a flag of the same name (with
//! dashes) that overrides it. Each command writes the fully resolved settings
//! next to its outputs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chem::{parse_complex, write_jsonl, Category, ComplexSource};
use crate::error::{Error, Result};
use crate::graph::{preprocess, read_cache, write_cache, GraphSample, Skip};
use crate::io::write_atomic;
use crate::metrics::{evaluate, pr_csv, roc_csv, topn_success, MetricKind, ScoredItem};
use crate::model::{load_params, ModelConfig};
use crate::synth::{generate, SynthConfig, SynthMode};
use crate::train::{score_samples, split_by_protein, train, TrainConfig, TrainOutputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const HISTOGRAM_BINS: usize = 50;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::NonFinite(_)
        | Error::Shape { .. }
        | Error::EmptyMaskRow { .. }
        | Error::MissingSelfLoop { .. }
        | Error::NonScalarLoss { .. } => EXIT_NUMERIC,
        _ => EXIT_DATA,
    }
}

#[derive(Debug, Parser)]
#[command(name = "gnn-dti", version, about = "Graph attention scoring of protein-ligand complexes")]
pub struct Cli {
    /// TOML settings file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic corpus as canonical JSON lines.
    Synth(SynthArgs),
    /// Parse, prune and featurize complexes into a binary cache.
    Featurize(FeaturizeArgs),
    /// Train a model on one or more caches.
    Train(TrainArgs),
    /// Score a labelled cache and write metric reports.
    Evaluate(EvaluateArgs),
    /// Score complexes and write a probability table plus histogram.
    Predict(PredictArgs),
    /// Top-N pose success for docking poses with RMSD annotations.
    Poses(PosesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SynthModeArg {
    Screening,
    Mixed,
    Poses,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 10)]
    pub proteins: usize,
    #[arg(long, value_enum, default_value_t = SynthModeArg::Mixed)]
    pub mode: SynthModeArg,
    #[arg(long, default_value_t = 0.5)]
    pub positive_fraction: f64,
    #[arg(long, default_value_t = 4)]
    pub poses_per_complex: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// JSON-lines files, or directories scanned for `*.jsonl`.
    pub inputs: Vec<PathBuf>,
    /// SDF ligand file (use with --protein).
    #[arg(long, requires = "protein")]
    pub ligand: Option<PathBuf>,
    /// PDB protein file (use with --ligand).
    #[arg(long, requires = "ligand")]
    pub protein: Option<PathBuf>,
    /// Category of the SDF poses.
    #[arg(long, default_value = "unlabeled")]
    pub category: String,
    #[arg(long)]
    pub protein_id: Option<String>,
    /// Output cache file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Flags mirroring the `[model]` and `[train]` config keys.
#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFlags {
    #[arg(long)]
    pub num_gat_layers: Option<usize>,
    #[arg(long)]
    pub gat_dim: Option<usize>,
    /// Comma separated, e.g. `128,128,1`.
    #[arg(long, value_delimiter = ',')]
    pub fc_dims: Option<Vec<usize>>,
    #[arg(long)]
    pub dropout_rate: Option<f64>,
    #[arg(long)]
    pub gat_dropout: Option<bool>,
}

#[derive(Debug, Default, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainFlags {
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub iterations: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub checkpoint_every: Option<u64>,
    /// Train on the two screening categories only.
    #[arg(long)]
    pub screening: Option<bool>,
    /// Fraction of proteins held out for validation when no validation cache
    /// is given.
    #[arg(long)]
    pub val_fraction: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub cache: Vec<PathBuf>,
    #[arg(long)]
    pub val_cache: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub train: TrainFlags,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Metric list: `all`, `auroc`, `logauc`, `prauc`, `re`, `re@1`, ...
    #[arg(long)]
    pub metrics: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, conflicts_with = "input")]
    pub cache: Option<PathBuf>,
    /// A JSON-lines file, featurized on the fly.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PosesArgs {
    #[arg(long)]
    pub cache: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Comma separated N values.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10")]
    pub top_n: Vec<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Contents of the `--config` file.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub model: ModelFlags,
    #[serde(default)]
    pub train: TrainFlags,
    #[serde(default)]
    pub evaluate: EvaluateSection,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateSection {
    pub metrics: Option<String>,
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

/// Merges flags over file values over defaults.
pub fn resolve_model(flags: &ModelFlags, file: &ModelFlags, base: ModelConfig) -> ModelConfig {
    ModelConfig {
        num_gat_layers: pick(&flags.num_gat_layers, &file.num_gat_layers, base.num_gat_layers),
        gat_dim: pick(&flags.gat_dim, &file.gat_dim, base.gat_dim),
        fc_dims: pick(&flags.fc_dims, &file.fc_dims, base.fc_dims),
        dropout_rate: pick(&flags.dropout_rate, &file.dropout_rate, base.dropout_rate),
        gat_dropout: pick(&flags.gat_dropout, &file.gat_dropout, base.gat_dropout),
        input_dim: base.input_dim,
    }
}

fn model_flags_given(f: &ModelFlags) -> bool {
    f.num_gat_layers.is_some()
        || f.gat_dim.is_some()
        || f.fc_dims.is_some()
        || f.dropout_rate.is_some()
        || f.gat_dropout.is_some()
}

/// Resolved settings of a run, echoed as `resolved_config.toml`.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub val_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthConfig>,
}

impl RunConfig {
    fn new(command: &str, inputs: &[PathBuf]) -> Self {
        Self {
            command: command.into(),
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            model: None,
            train: None,
            val_fraction: None,
            metrics: None,
            synth: None,
        }
    }

    fn echo(&self, path: &Path) -> Result<()> {
        let text = toml::to_string(self)
            .map_err(|e| Error::InvalidArgument(format!("cannot serialize config: {e}")))?;
        write_atomic(path, text.as_bytes())
    }
}

/// Companion path for single-file outputs: `out.cache` -> `out.cache.config.toml`.
fn sidecar(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".config.toml");
    PathBuf::from(s)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// Parses arguments and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_OK
                }
                _ => EXIT_USAGE,
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .try_init();
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => load_config_file(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Train(a) => cmd_train(a, &file),
        Command::Evaluate(a) => cmd_evaluate(a, &file),
        Command::Predict(a) => cmd_predict(a),
        Command::Poses(a) => cmd_poses(a),
    }
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let cfg = SynthConfig {
        num_complexes: a.count,
        num_proteins: a.proteins,
        positive_fraction: a.positive_fraction,
        poses_per_complex: a.poses_per_complex,
        mode: match a.mode {
            SynthModeArg::Screening => SynthMode::Screening,
            SynthModeArg::Mixed => SynthMode::Mixed,
            SynthModeArg::Poses => SynthMode::Poses,
        },
        seed: a.seed,
        ..SynthConfig::default()
    };
    let records = generate(&cfg)?;
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records)?;
    write_atomic(&a.out, &buf)?;
    let mut rc = RunConfig::new("synth", &[]);
    rc.synth = Some(cfg);
    rc.echo(&sidecar(&a.out))?;
    println!("wrote {} records to {}", records.len(), a.out.display());
    Ok(())
}

fn jsonl_files(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Counts and rejections gathered while featurizing.
#[derive(Debug, Default, Serialize)]
pub struct FeaturizeSummary {
    pub samples: usize,
    pub records: usize,
    pub per_category: BTreeMap<String, usize>,
    pub dropped_atoms: usize,
    pub omitted_poses: usize,
    pub rejected: Vec<(String, String)>,
    pub failed_files: Vec<(String, String)>,
}

impl FeaturizeSummary {
    fn render(&self) -> String {
        let mut s = format!("featurized {}/{} records\n", self.samples, self.records);
        for (c, n) in &self.per_category {
            let _ = writeln!(s, "  {c}: {n}");
        }
        let _ = writeln!(s, "dropped atoms: {}", self.dropped_atoms);
        let _ = writeln!(s, "omitted poses: {}", self.omitted_poses);
        let _ = writeln!(s, "rejected: {}", self.rejected.len());
        for (k, why) in &self.rejected {
            let _ = writeln!(s, "  {k}: {why}");
        }
        for (f, why) in &self.failed_files {
            let _ = writeln!(s, "failed file {f}: {why}");
        }
        s
    }
}

/// Parses every source and preprocesses the records in parallel. Files that
/// fail to parse are reported and skipped.
pub fn featurize_sources(sources: &[ComplexSource]) -> (Vec<GraphSample>, FeaturizeSummary) {
    let mut summary = FeaturizeSummary::default();
    let mut records = Vec::new();
    for src in sources {
        let name = match src {
            ComplexSource::Jsonl(p) => p.display().to_string(),
            ComplexSource::SdfPdb { ligand, .. } => ligand.display().to_string(),
        };
        match parse_complex(src) {
            Ok(ing) => {
                summary.dropped_atoms += ing.dropped_atoms;
                summary.records += ing.records.len() + ing.rejected.len();
                summary.rejected.extend(ing.rejected);
                records.extend(ing.records);
            }
            Err(e) => {
                log::error!("{name}: {e}");
                summary.failed_files.push((name, e.to_string()));
            }
        }
    }
    let results: Vec<_> = records.par_iter().map(preprocess).collect();
    let mut samples = Vec::new();
    for (r, res) in records.iter().zip(results) {
        match res {
            Ok(s) => {
                *summary
                    .per_category
                    .entry(s.category.name().to_string())
                    .or_default() += 1;
                samples.push(s);
            }
            Err(Skip::OmittedPose) => summary.omitted_poses += 1,
            Err(Skip::Rejected(why)) => summary.rejected.push((r.key(), why)),
        }
    }
    summary.samples = samples.len();
    (samples, summary)
}

fn cmd_featurize(a: &FeaturizeArgs) -> Result<()> {
    let mut sources: Vec<ComplexSource> =
        jsonl_files(&a.inputs)?.into_iter().map(ComplexSource::Jsonl).collect();
    if let (Some(l), Some(p)) = (&a.ligand, &a.protein) {
        let category = Category::from_name(&a.category)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown category `{}`", a.category)))?;
        sources.push(ComplexSource::SdfPdb {
            ligand: l.clone(),
            protein: p.clone(),
            protein_id: a.protein_id.clone(),
            category,
        });
    }
    if sources.is_empty() {
        return Err(Error::InvalidArgument("no inputs given".into()));
    }
    let total = sources.len();
    let (samples, summary) = featurize_sources(&sources);
    print!("{}", summary.render());
    if summary.failed_files.len() == total {
        return Err(Error::Format {
            path: a.out.clone(),
            msg: "every input failed to parse".into(),
        });
    }
    if samples.is_empty() {
        return Err(Error::Format {
            path: a.out.clone(),
            msg: "no sample survived preprocessing".into(),
        });
    }
    write_cache(&a.out, &samples)?;
    let mut inputs = a.inputs.clone();
    inputs.extend(a.ligand.iter().cloned());
    inputs.extend(a.protein.iter().cloned());
    RunConfig::new("featurize", &inputs).echo(&sidecar(&a.out))?;
    Ok(())
}

fn read_caches(paths: &[PathBuf]) -> Result<Vec<GraphSample>> {
    let mut out = Vec::new();
    for p in paths {
        out.extend(read_cache(p)?);
    }
    Ok(out)
}

fn cmd_train(a: &TrainArgs, file: &ConfigFile) -> Result<()> {
    let model = resolve_model(&a.model, &file.model, ModelConfig::default());
    let (f, t) = (&a.train, &file.train);
    let base = TrainConfig::default();
    let screening = pick(&f.screening, &t.screening, false);
    let config = TrainConfig {
        batch_size: pick(&f.batch_size, &t.batch_size, base.batch_size),
        iterations: pick(&f.iterations, &t.iterations, base.iterations),
        learning_rate: pick(&f.learning_rate, &t.learning_rate, base.learning_rate),
        seed: pick(&f.seed, &t.seed, base.seed),
        checkpoint_every: pick(&f.checkpoint_every, &t.checkpoint_every, base.checkpoint_every),
        categories: if screening {
            vec![Category::DudeActive, Category::DudeInactive]
        } else {
            base.categories
        },
    };
    let val_fraction = pick(&f.val_fraction, &t.val_fraction, 0.1);
    model.validate()?;
    config.validate()?;

    let samples = read_caches(&a.cache)?;
    let (train_set, val_set) = match &a.val_cache {
        Some(v) => (samples, read_cache(v)?),
        None => split_by_protein(samples, val_fraction, config.seed),
    };
    ensure_dir(&a.out)?;
    let mut inputs = a.cache.clone();
    inputs.extend(a.val_cache.iter().cloned());
    let mut rc = RunConfig::new("train", &inputs);
    rc.model = Some(model.clone());
    rc.train = Some(config.clone());
    rc.val_fraction = a.val_cache.is_none().then_some(val_fraction);
    rc.echo(&a.out.join("resolved_config.toml"))?;

    let outputs = TrainOutputs::in_dir(&a.out);
    let outcome = train(&train_set, &val_set, &model, &config, Some(&outputs)).inspect_err(|e| {
        if matches!(e, Error::EmptyPool(_)) && !screening {
            eprintln!("hint: pass --screening true to train on the two screening categories only");
        }
    })?;
    println!(
        "trained {} iterations on {} samples ({} validation); best validation AUROC {}",
        config.iterations,
        train_set.len(),
        val_set.len(),
        outcome
            .best_val_auroc
            .map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
    );
    Ok(())
}

fn scored_items(samples: &[GraphSample], scores: &[f64]) -> Vec<ScoredItem> {
    samples
        .iter()
        .zip(scores)
        .filter_map(|(s, &p)| {
            s.label.map(|l| ScoredItem {
                score: p,
                label: l,
                protein_id: s.protein_id.clone(),
                complex_id: s.complex_id.clone(),
                rmsd: s.rmsd,
            })
        })
        .collect()
}

fn load_checkpoint(path: &Path, flags: Option<(&ModelFlags, &ModelFlags)>) -> Result<crate::model::Checkpoint> {
    let ckpt = load_params(path)?;
    if let Some((f, file)) = flags {
        if model_flags_given(f) || model_flags_given(file) {
            ckpt.ensure_compatible(&resolve_model(f, file, ckpt.config.clone()))?;
        }
    }
    Ok(ckpt)
}

fn cmd_evaluate(a: &EvaluateArgs, file: &ConfigFile) -> Result<()> {
    let ckpt = load_checkpoint(&a.checkpoint, Some((&a.model, &file.model)))?;
    let metric_list = a
        .metrics
        .clone()
        .or_else(|| file.evaluate.metrics.clone())
        .unwrap_or_else(|| "all".into());
    let kinds = MetricKind::parse_list(&metric_list)?;
    let samples = read_cache(&a.cache)?;
    let scores = score_samples(&samples, &ckpt.params, &ckpt.config)?;
    let items = scored_items(&samples, &scores);
    let report = evaluate(&items, &kinds)?;

    ensure_dir(&a.out)?;
    write_atomic(&a.out.join("report.json"), report.to_json()?.as_bytes())?;
    write_atomic(&a.out.join("report.csv"), report.to_csv().as_bytes())?;
    if let Ok(roc) = roc_csv(&items) {
        write_atomic(&a.out.join("roc.csv"), roc.as_bytes())?;
    }
    if let Ok(pr) = pr_csv(&items) {
        write_atomic(&a.out.join("pr.csv"), pr.as_bytes())?;
    }
    let mut rc = RunConfig::new("evaluate", &[a.cache.clone(), a.checkpoint.clone()]);
    rc.model = Some(ckpt.config.clone());
    rc.metrics = Some(report.metrics.clone());
    rc.echo(&a.out.join("resolved_config.toml"))?;
    for m in &report.metrics {
        let v = report.aggregate_value(m);
        println!(
            "{m}: {}",
            v.map_or_else(|| "undefined".to_string(), |v| format!("{v:.6}"))
        );
    }
    Ok(())
}

/// Counts of `scores` in `bins` equal-width bins over `[0, 1]`; 1.0 falls in
/// the last bin.
pub fn histogram(scores: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &s in scores {
        let k = ((s * bins as f64).floor() as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
}

fn cmd_predict(a: &PredictArgs) -> Result<()> {
    let ckpt = load_checkpoint(&a.checkpoint, None)?;
    let (samples, source) = match (&a.cache, &a.input) {
        (Some(c), None) => (read_cache(c)?, c.clone()),
        (None, Some(i)) => {
            let (s, summary) = featurize_sources(&[ComplexSource::Jsonl(i.clone())]);
            if let Some((_, why)) = summary.failed_files.first() {
                return Err(Error::Format {
                    path: i.clone(),
                    msg: why.clone(),
                });
            }
            (s, i.clone())
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --cache or --input".into())),
    };
    let scores = score_samples(&samples, &ckpt.params, &ckpt.config)?;
    let mut csv = String::from("complex_id,protein_id,probability\n");
    for (s, p) in samples.iter().zip(&scores) {
        let _ = writeln!(csv, "{},{},{}", s.key(), s.protein_id, p);
    }
    let mut hist = String::from("bin_start,bin_end,count\n");
    for (k, c) in histogram(&scores, HISTOGRAM_BINS).into_iter().enumerate() {
        let w = 1.0 / HISTOGRAM_BINS as f64;
        let _ = writeln!(hist, "{},{},{}", k as f64 * w, (k + 1) as f64 * w, c);
    }
    ensure_dir(&a.out)?;
    write_atomic(&a.out.join("scores.csv"), csv.as_bytes())?;
    write_atomic(&a.out.join("histogram.csv"), hist.as_bytes())?;
    let mut rc = RunConfig::new("predict", &[source, a.checkpoint.clone()]);
    rc.model = Some(ckpt.config);
    rc.echo(&a.out.join("resolved_config.toml"))?;
    println!("scored {} complexes", samples.len());
    Ok(())
}

fn cmd_poses(a: &PosesArgs) -> Result<()> {
    let ckpt = load_checkpoint(&a.checkpoint, None)?;
    let samples = read_cache(&a.cache)?;
    if let Some(s) = samples.iter().find(|s| s.rmsd.is_none()) {
        return Err(Error::Metric(format!("pose {} has no rmsd", s.key())));
    }
    if a.top_n.is_empty() || a.top_n.contains(&0) {
        return Err(Error::InvalidArgument("top-n values must be positive".into()));
    }
    let scores = score_samples(&samples, &ckpt.params, &ckpt.config)?;
    let items: Vec<ScoredItem> = samples
        .iter()
        .zip(&scores)
        .map(|(s, &p)| ScoredItem {
            score: p,
            label: s.label.unwrap_or(0),
            protein_id: s.protein_id.clone(),
            complex_id: s.complex_id.clone(),
            rmsd: s.rmsd,
        })
        .collect();
    let mut table = String::from("n,success_percent\n");
    for &n in &a.top_n {
        let v = topn_success(&items, n)? * 100.0;
        let _ = writeln!(table, "{n},{v}");
        println!("top-{n}: {v:.1}%");
    }
    ensure_dir(&a.out)?;
    write_atomic(&a.out.join("topn.csv"), table.as_bytes())?;
    let mut rc = RunConfig::new("poses", &[a.cache.clone(), a.checkpoint.clone()]);
    rc.model = Some(ckpt.config);
    rc.echo(&a.out.join("resolved_config.toml"))?;
    Ok(())
}
