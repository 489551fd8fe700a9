//! The `refilter` command line.
//!
//! Every option can also come from a TOML file given with `--config`, using
//! the same names with dashes or underscores; flags win over the file. The
//! seed falls back to `REFILTER_SEED`, then 0.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::corpus::synth::{generate_synthetic, PlantedModel, SynthConfig};
use crate::corpus::{load_corpus_dir, write_corpus_dir, Corpus, Instance, InstanceId};
use crate::experiments::output::{
    curve_csv, ids_text, metrics_csv, ranking_csv, scatter_csv, scores_csv, write_text,
};
use crate::experiments::{
    build_dataset, evaluate, learning_curve, rank_features, scatter_export, top_features, DatasetSplits,
    EvalSet, SplitSpec,
};
use crate::features::{
    background_idf, CollectionPolicy, FeatureContext, FeatureId, FeatureVector, KeywordConfig,
};
use crate::learner::{train, Hyper, Model};

pub const SEED_ENV: &str = "REFILTER_SEED";
pub const SPLITS_FILE: &str = "splits.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "refilter", version, about = "Personalized retweet filter experiments")]
struct Cli {
    /// TOML file supplying defaults for any option.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic corpus with a planted retweet model.
    Synth(Options),
    /// Build balanced batches and train/dev/test splits.
    Build(Options),
    /// Rank features by cross-validated Pearson correlation on the training set.
    Rank(Options),
    /// Train a model on the first k training batches.
    Train(Options),
    /// Precision, recall and F1 of a model on an evaluation set.
    Eval(Options),
    /// Learning curve: one row per number of training batches.
    Curve(Options),
    /// Retweet probability for every corpus instance.
    Score(Options),
    /// Two-feature scatter data with the model's separator.
    Scatter(Options),
}

/// All options; each subcommand reads the ones it needs.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Corpus directory (profiles.jsonl, history.jsonl, instances.jsonl, optional vocab.txt).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Directory written by `build`.
    #[arg(long)]
    pub splits: Option<PathBuf>,
    /// Model file written by `train`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output file, or directory for `synth` and `build`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// dev, dev-unbalanced, test or test-unbalanced.
    #[arg(long)]
    pub set: Option<String>,
    /// Comma-separated feature ids such as FT10,FT43; overrides top-m.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long)]
    pub top_m: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Number of training batches (default: all).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Most recent history events per similarity collection.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub share_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub good_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub bad_lexicon: Option<PathBuf>,

    #[arg(long)]
    pub num_recipients: Option<usize>,
    #[arg(long)]
    pub neighbours_per_user: Option<usize>,
    #[arg(long)]
    pub vocab_size: Option<usize>,
    #[arg(long)]
    pub topics: Option<usize>,
    #[arg(long)]
    pub days: Option<u32>,
    #[arg(long)]
    pub retweet_rate: Option<f64>,
    #[arg(long)]
    pub signal_strength: Option<f64>,

    #[arg(long)]
    pub batch_pos: Option<usize>,
    #[arg(long)]
    pub batch_neg: Option<usize>,
    #[arg(long)]
    pub train_batches: Option<usize>,
    #[arg(long)]
    pub dev_batches: Option<usize>,
    #[arg(long)]
    pub test_batches: Option<usize>,
    #[arg(long)]
    pub unbalanced_pos_per_batch: Option<usize>,
    #[arg(long)]
    pub unbalanced_neg_per_batch: Option<usize>,
}

macro_rules! prefer_flags {
    ($flags:ident, $file:ident; $($field:ident),* $(,)?) => {
        Options { $($field: $flags.$field.or($file.$field),)* }
    };
}

impl Options {
    /// Flags in `self` win over values from `file`.
    pub fn merged_over(self, file: Options) -> Options {
        let flags = self;
        prefer_flags!(flags, file;
            corpus, splits, model, out, set, features, top_m, folds, k, threshold, lambda, tol,
            max_iter, seed, cap, share_lexicon, good_lexicon, bad_lexicon, num_recipients,
            neighbours_per_user, vocab_size, topics, days, retweet_rate, signal_strength, batch_pos,
            batch_neg, train_batches, dev_batches, test_batches, unbalanced_pos_per_batch,
            unbalanced_neg_per_batch,
        )
    }

    /// Parses a TOML config; dashes in keys are accepted.
    pub fn from_toml(text: &str) -> anyhow::Result<Options> {
        let table: toml::Table = text.parse().context("config is not valid TOML")?;
        let normalized: toml::Table = table.into_iter().map(|(k, v)| (k.replace('-', "_"), v)).collect();
        normalized.try_into().context("unrecognized config")
    }

    fn seed(&self) -> anyhow::Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .with_context(|| format!("{SEED_ENV}={v:?} is not an unsigned integer")),
            Err(_) => Ok(0),
        }
    }

    fn need<'a, T>(value: &'a Option<T>, name: &str) -> anyhow::Result<&'a T> {
        value.as_ref().with_context(|| format!("--{name} is required"))
    }

    fn synth_config(&self) -> SynthConfig {
        let d = SynthConfig::default();
        SynthConfig {
            num_recipients: self.num_recipients.unwrap_or(d.num_recipients),
            neighbours_per_user: self.neighbours_per_user.unwrap_or(d.neighbours_per_user),
            vocab_size: self.vocab_size.unwrap_or(d.vocab_size),
            topics: self.topics.unwrap_or(d.topics),
            days: self.days.unwrap_or(d.days),
            retweet_rate: self.retweet_rate.unwrap_or(d.retweet_rate),
            signal_strength: self.signal_strength.unwrap_or(d.signal_strength),
        }
    }

    fn split_spec(&self) -> anyhow::Result<SplitSpec> {
        let d = SplitSpec::default();
        Ok(SplitSpec {
            batch_pos: self.batch_pos.unwrap_or(d.batch_pos),
            batch_neg: self.batch_neg.unwrap_or(d.batch_neg),
            train_batches: self.train_batches.unwrap_or(d.train_batches),
            dev_batches: self.dev_batches.unwrap_or(d.dev_batches),
            test_batches: self.test_batches.unwrap_or(d.test_batches),
            unbalanced_pos_per_batch: self
                .unbalanced_pos_per_batch
                .unwrap_or(d.unbalanced_pos_per_batch),
            unbalanced_neg_per_batch: self
                .unbalanced_neg_per_batch
                .unwrap_or(d.unbalanced_neg_per_batch),
            seed: self.seed()?,
        })
    }

    fn hyper(&self) -> Hyper {
        let d = Hyper::default();
        Hyper {
            lambda: self.lambda.unwrap_or(d.lambda),
            tol: self.tol.unwrap_or(d.tol),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
        }
    }

    fn eval_set(&self) -> anyhow::Result<EvalSet> {
        self.set
            .as_deref()
            .unwrap_or("dev")
            .parse()
            .map_err(|e: String| anyhow::anyhow!(e))
    }

    fn feature_list(&self) -> anyhow::Result<Option<Vec<FeatureId>>> {
        self.features
            .as_ref()
            .map(|list| {
                list.iter()
                    .map(|s| s.trim().parse::<FeatureId>().map_err(|e| anyhow::anyhow!(e)))
                    .collect()
            })
            .transpose()
    }

    fn keywords(&self) -> anyhow::Result<KeywordConfig> {
        Ok(KeywordConfig::from_files(
            self.share_lexicon.as_deref(),
            self.good_lexicon.as_deref(),
            self.bad_lexicon.as_deref(),
        )?)
    }

    fn policy(&self) -> CollectionPolicy {
        self.cap
            .map_or_else(CollectionPolicy::default, |cap| CollectionPolicy { cap })
    }
}

/// What `synth` records next to the corpus files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub config: SynthConfig,
    pub planted: PlantedModel,
}

/// Parses arguments and runs one subcommand.
pub fn run<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Options::from_toml(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Options::default(),
    };
    let merge = |o: &Options| o.clone().merged_over(file.clone());
    match &cli.command {
        Command::Synth(o) => cmd_synth(&merge(o)),
        Command::Build(o) => cmd_build(&merge(o)),
        Command::Rank(o) => cmd_rank(&merge(o)),
        Command::Train(o) => cmd_train(&merge(o)),
        Command::Eval(o) => cmd_eval(&merge(o)),
        Command::Curve(o) => cmd_curve(&merge(o)),
        Command::Score(o) => cmd_score(&merge(o)),
        Command::Scatter(o) => cmd_scatter(&merge(o)),
    }
}

fn existing_dir(path: &Path) -> anyhow::Result<()> {
    if !path.is_dir() {
        bail!("output directory {} does not exist", path.display());
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn cmd_synth(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    existing_dir(out)?;
    let config = o.synth_config();
    let seed = o.seed()?;
    let corpus = generate_synthetic(&config, seed)?;
    write_corpus_dir(&corpus, out)?;
    let manifest = SynthManifest {
        seed,
        planted: config.planted_model(),
        config,
    };
    write_text(&out.join(MANIFEST_FILE), &to_json(&manifest))?;
    Ok(())
}

pub fn cmd_build(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    existing_dir(out)?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = build_dataset(&corpus, &o.split_spec()?)?;

    let batch_dir = out.join("batches");
    fs::create_dir_all(&batch_dir).with_context(|| format!("creating {}", batch_dir.display()))?;
    let all = splits.train.iter().chain(&splits.dev).chain(&splits.test);
    for (i, batch) in all.enumerate() {
        write_text(
            &batch_dir.join(format!("batch_{:03}.ids", i + 1)),
            &ids_text(batch.ids()),
        )?;
    }
    write_text(
        &out.join("train.ids"),
        &ids_text(splits.train_ids(splits.train.len())),
    )?;
    for set in [
        EvalSet::Dev,
        EvalSet::DevUnbalanced,
        EvalSet::Test,
        EvalSet::TestUnbalanced,
    ] {
        write_text(
            &out.join(format!("{}.ids", set.name())),
            &ids_text(splits.eval_ids(set)),
        )?;
    }
    write_text(&out.join(SPLITS_FILE), &to_json(&splits))?;
    Ok(())
}

fn load_splits(o: &Options) -> anyhow::Result<DatasetSplits> {
    let path = Options::need(&o.splits, "splits")?.join(SPLITS_FILE);
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Feature vectors for the requested instances, keyed by id.
struct Extracted {
    vectors: HashMap<InstanceId, FeatureVector>,
}

impl Extracted {
    fn new(o: &Options, corpus: &Corpus, ids: impl IntoIterator<Item = InstanceId>) -> anyhow::Result<Self> {
        let idf = background_idf(corpus);
        let ctx = FeatureContext::new(corpus, &idf, &o.keywords()?, o.policy());
        let index = corpus.instance_index();
        let mut wanted: Vec<&Instance> = Vec::new();
        for id in ids {
            let &i = index
                .get(&id)
                .with_context(|| format!("instance {id} from the splits is not in the corpus"))?;
            wanted.push(&corpus.instances[i]);
        }
        wanted.sort_by_key(|i| i.instance_id);
        wanted.dedup_by_key(|i| i.instance_id);
        let vectors = ctx
            .assemble_all(&wanted)
            .into_iter()
            .map(|v| (v.instance_id, v))
            .collect();
        Ok(Extracted { vectors })
    }

    fn take(&self, ids: &[InstanceId]) -> Vec<FeatureVector> {
        ids.iter().map(|id| self.vectors[id].clone()).collect()
    }
}

fn train_k(o: &Options, splits: &DatasetSplits) -> anyhow::Result<usize> {
    let k = o.k.unwrap_or(splits.train.len());
    if k == 0 || k > splits.train.len() {
        bail!("--k must be in 1..={}, got {k}", splits.train.len());
    }
    Ok(k)
}

fn folds(o: &Options) -> usize {
    o.folds.unwrap_or(10)
}

pub fn cmd_rank(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = load_splits(o)?;
    let ids = splits.train_ids(splits.train.len());
    let vectors = Extracted::new(o, &corpus, ids.iter().copied())?.take(&ids);
    let ranking = rank_features(&vectors, folds(o))?;
    write_text(out, &ranking_csv(&ranking))?;
    Ok(())
}

pub fn cmd_train(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = load_splits(o)?;
    let k = train_k(o, &splits)?;
    let all_ids = splits.train_ids(splits.train.len());
    let extracted = Extracted::new(o, &corpus, all_ids.iter().copied())?;
    let selected = match o.feature_list()? {
        Some(list) => list,
        None => {
            let ranking = rank_features(&extracted.take(&all_ids), folds(o))?;
            top_features(&ranking, o.top_m.unwrap_or(10))
        }
    };
    let model = train(&extracted.take(&splits.train_ids(k)), &selected, &o.hyper())?;
    model.save(out)?;
    Ok(())
}

pub fn cmd_eval(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let model = Model::load(Options::need(&o.model, "model")?)?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = load_splits(o)?;
    let ids = splits.eval_ids(o.eval_set()?);
    let vectors = Extracted::new(o, &corpus, ids.iter().copied())?.take(&ids);
    let metrics = evaluate(&model, &vectors, o.threshold.unwrap_or(0.5))?;
    write_text(out, &metrics_csv(&metrics))?;
    Ok(())
}

pub fn cmd_curve(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = load_splits(o)?;
    let eval_ids = splits.eval_ids(o.eval_set()?);
    let train_ids = splits.train_ids(splits.train.len());
    let extracted = Extracted::new(o, &corpus, train_ids.iter().chain(&eval_ids).copied())?;
    let batches: Vec<Vec<FeatureVector>> = splits
        .train
        .iter()
        .map(|b| extracted.take(&b.ids().collect::<Vec<_>>()))
        .collect();
    let eval = extracted.take(&eval_ids);
    let threshold = o.threshold.unwrap_or(0.5);
    let rows = match o.feature_list()? {
        Some(selected) => {
            crate::experiments::incremental_eval(&batches, &eval, &selected, &o.hyper(), threshold)?
        }
        None => {
            let top_m = o.top_m.unwrap_or(10);
            learning_curve(&batches, &eval, top_m, folds(o), &o.hyper(), threshold)?.1
        }
    };
    write_text(out, &curve_csv(&rows))?;
    Ok(())
}

pub fn cmd_score(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let model = Model::load(Options::need(&o.model, "model")?)?;
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let ids: Vec<InstanceId> = corpus.instances.iter().map(|i| i.instance_id).collect();
    let vectors = Extracted::new(o, &corpus, ids.iter().copied())?.take(&ids);
    let scores = vectors
        .iter()
        .map(|v| Ok((v.instance_id, model.predict_proba(&v.values)?)))
        .collect::<crate::Result<Vec<_>>>()?;
    write_text(out, &scores_csv(&scores))?;
    Ok(())
}

pub fn cmd_scatter(o: &Options) -> anyhow::Result<()> {
    let out = Options::need(&o.out, "out")?;
    let model = Model::load(Options::need(&o.model, "model")?)?;
    let (a, b) = match o.feature_list()?.as_deref() {
        Some(&[a, b]) => (a, b),
        Some(other) => bail!("--features must name exactly two features, got {}", other.len()),
        None => match model.selected.as_slice() {
            &[a, b] => (a, b),
            other => bail!("scatter needs a two-feature model, this one uses {}", other.len()),
        },
    };
    let corpus = load_corpus_dir(Options::need(&o.corpus, "corpus")?)?;
    let splits = load_splits(o)?;
    let ids = splits.eval_ids(o.eval_set()?);
    let vectors = Extracted::new(o, &corpus, ids.iter().copied())?.take(&ids);
    let scatter = scatter_export(&vectors, a, b, &model)?;
    write_text(out, &scatter_csv(&scatter))?;
    Ok(())
}
