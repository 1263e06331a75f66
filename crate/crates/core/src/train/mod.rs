//! Loss, balanced batches, Adam, and the training loop.

mod adam;
mod sampler;

pub use adam::Adam;
pub use sampler::BalancedSampler;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chem::Category;
use crate::error::{Error, Result};
use crate::graph::GraphSample;
use crate::math::{Matrix, Tape, Var};
use crate::metrics::{auroc, ScoredItem};
use crate::model::{forward, predict, save_params, ModelConfig, ModelParams};

/// Probabilities are clamped to `[LOG_EPS, 1 - LOG_EPS]` inside the logs.
pub const LOG_EPS: f64 = 1e-12;

fn check_label(label: u8) -> Result<()> {
    if label > 1 {
        return Err(Error::InvalidArgument(format!("label {label} not in {{0,1}}")));
    }
    Ok(())
}

/// Binary cross-entropy of one prediction.
pub fn bce_loss(pred: f64, label: u8) -> Result<f64> {
    check_label(label)?;
    Ok(if label == 1 {
        -pred.max(LOG_EPS).ln()
    } else {
        -(1.0 - pred).max(LOG_EPS).ln()
    })
}

/// Mean binary cross-entropy of a batch.
pub fn batch_bce(pairs: &[(f64, u8)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    let mut total = 0.0;
    for &(p, y) in pairs {
        total += bce_loss(p, y)?;
    }
    Ok(total / pairs.len() as f64)
}

/// [`bce_loss`] recorded on the tape.
pub fn bce_on_tape<'t>(prob: Var<'t>, label: u8) -> Result<Var<'t>> {
    check_label(label)?;
    Ok(if label == 1 {
        prob.clamped_ln(LOG_EPS).scale(-1.0)
    } else {
        prob.scale(-1.0)
            .add_scalar(1.0)
            .clamped_ln(LOG_EPS)
            .scale(-1.0)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub iterations: u64,
    pub learning_rate: f64,
    pub seed: u64,
    /// Categories mixed in equal shares within every batch.
    pub categories: Vec<Category>,
    /// Log, validate and checkpoint every this many iterations.
    pub checkpoint_every: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            batch_size: 32,
            iterations: 150_000,
            learning_rate: 1e-4,
            seed: 0,
            categories: Category::TRAINING.to_vec(),
            checkpoint_every: 1000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::InvalidArgument("no training categories".into()));
        }
        if self.batch_size == 0 || !self.batch_size.is_multiple_of(self.categories.len()) {
            return Err(Error::InvalidArgument(format!(
                "batch_size {} must be a positive multiple of {}",
                self.batch_size,
                self.categories.len()
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument("learning_rate must be positive".into()));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::InvalidArgument("checkpoint_every must be positive".into()));
        }
        Ok(())
    }
}

/// Splits samples so that a `fraction` of proteins (at least one when there
/// are two or more) is held out. No protein appears on both sides.
pub fn split_by_protein(
    samples: Vec<GraphSample>,
    fraction: f64,
    seed: u64,
) -> (Vec<GraphSample>, Vec<GraphSample>) {
    let mut proteins: Vec<String> = samples
        .iter()
        .map(|s| s.protein_id.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    proteins.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut n_val = (fraction * proteins.len() as f64).round() as usize;
    if fraction > 0.0 && proteins.len() >= 2 {
        n_val = n_val.clamp(1, proteins.len() - 1);
    }
    let held: BTreeSet<String> = proteins.into_iter().take(n_val).collect();
    samples
        .into_iter()
        .partition(|s| !held.contains(&s.protein_id))
}

/// Loss and parameter gradients of one sample.
pub fn sample_gradients(
    sample: &GraphSample,
    params: &ModelParams,
    config: &ModelConfig,
    dropout_seed: Option<u64>,
) -> Result<(f64, Vec<Matrix>)> {
    let label = sample
        .label
        .ok_or_else(|| Error::InvalidArgument(format!("sample {} has no label", sample.key())))?;
    let tape = Tape::new();
    let bound = params.bind(&tape);
    let mut rng = dropout_seed.map(ChaCha8Rng::seed_from_u64);
    let out = forward(sample, &bound, config, rng.as_mut())?;
    let loss = bce_on_tape(out.probability, label)?;
    let grads = tape.backward(loss)?;
    let value = loss.value().item();
    Ok((
        value,
        bound.vars().into_iter().map(|v| grads.get_or_zeros(v)).collect(),
    ))
}

/// Mean loss and mean gradients over `batch`, computed in parallel and
/// reduced in batch order.
pub fn batch_gradients(
    batch: &[&GraphSample],
    params: &ModelParams,
    config: &ModelConfig,
    dropout_seeds: Option<&[u64]>,
) -> Result<(f64, Vec<Matrix>)> {
    let per_sample: Vec<(f64, Vec<Matrix>)> = batch
        .par_iter()
        .enumerate()
        .map(|(k, s)| sample_gradients(s, params, config, dropout_seeds.map(|d| d[k])))
        .collect::<Result<_>>()?;
    let scale = 1.0 / batch.len() as f64;
    let mut iter = per_sample.into_iter();
    let (mut loss, mut grads) = iter.next().expect("non-empty batch");
    for (l, g) in iter {
        loss += l;
        for (acc, g) in grads.iter_mut().zip(&g) {
            acc.add_assign(g);
        }
    }
    for g in &mut grads {
        g.scale_in_place(scale);
    }
    Ok((loss * scale, grads))
}

/// Inference-mode scores, in input order.
pub fn score_samples(
    samples: &[GraphSample],
    params: &ModelParams,
    config: &ModelConfig,
) -> Result<Vec<f64>> {
    samples
        .par_iter()
        .map(|s| predict(s, params, config))
        .collect()
}

/// AUROC over labelled samples, `None` when undefined.
pub fn validation_auroc(
    samples: &[GraphSample],
    params: &ModelParams,
    config: &ModelConfig,
) -> Result<Option<f64>> {
    let labelled: Vec<GraphSample> = samples.iter().filter(|s| s.label.is_some()).cloned().collect();
    if labelled.is_empty() {
        return Ok(None);
    }
    let scores = score_samples(&labelled, params, config)?;
    let items: Vec<ScoredItem> = labelled
        .iter()
        .zip(scores)
        .map(|(s, p)| ScoredItem::new(p, s.label.expect("filtered")))
        .collect();
    Ok(auroc(&items).ok())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub iteration: u64,
    pub train_loss: f64,
    pub val_auroc: Option<f64>,
    pub mu: f64,
    pub sigma: f64,
    pub wall_time: f64,
}

pub const LOG_HEADER: &str = "iteration,train_loss,val_auroc,mu,sigma,wall_time";

impl LogRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{:.3}",
            self.iteration,
            self.train_loss,
            self.val_auroc.map(|v| v.to_string()).unwrap_or_default(),
            self.mu,
            self.sigma,
            self.wall_time
        )
    }
}

/// Files written by [`train`] into its output directory.
#[derive(Debug, Clone)]
pub struct TrainOutputs {
    pub log: PathBuf,
    pub latest: PathBuf,
    pub best: PathBuf,
}

impl TrainOutputs {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            log: dir.join("train_log.csv"),
            latest: dir.join("latest.ckpt"),
            best: dir.join("best.ckpt"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub log: Vec<LogRow>,
    pub best_val_auroc: Option<f64>,
    /// Loss of every iteration, in order.
    pub losses: Vec<f64>,
}

/// Stateful trainer: parameters, optimizer and batch stream.
pub struct Trainer<'a> {
    pub model_config: ModelConfig,
    pub config: TrainConfig,
    pub params: ModelParams,
    pub iteration: u64,
    adam: Adam,
    sampler: BalancedSampler,
    pools: BTreeMap<Category, Vec<&'a GraphSample>>,
}

impl<'a> Trainer<'a> {
    pub fn new(
        train: &'a [GraphSample],
        model_config: &ModelConfig,
        config: &TrainConfig,
        init: Option<ModelParams>,
    ) -> Result<Self> {
        model_config.validate()?;
        config.validate()?;
        let mut pools: BTreeMap<Category, Vec<&GraphSample>> = BTreeMap::new();
        for s in train {
            if config.categories.contains(&s.category) && s.label.is_some() {
                pools.entry(s.category).or_default().push(s);
            }
        }
        let sizes = config
            .categories
            .iter()
            .map(|c| (*c, pools.get(c).map_or(0, Vec::len)))
            .collect();
        let sampler = BalancedSampler::new(sizes, config.batch_size, config.seed)?;
        let params = match init {
            Some(p) => p,
            None => ModelParams::init(model_config, config.seed)?,
        };
        let shapes: Vec<_> = params.tensors().iter().map(|t| t.shape()).collect();
        Ok(Self {
            model_config: model_config.clone(),
            adam: Adam::new(config.learning_rate, &shapes),
            config: config.clone(),
            params,
            iteration: 0,
            sampler,
            pools,
        })
    }

    fn dropout_seeds(&self, n: usize) -> Vec<u64> {
        (0..n as u64)
            .map(|k| {
                self.config
                    .seed
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add(self.iteration.wrapping_mul(1_000_003))
                    .wrapping_add(k)
            })
            .collect()
    }

    /// One optimizer step on the next balanced batch; returns the batch loss.
    pub fn step(&mut self) -> Result<f64> {
        let batch: Vec<&GraphSample> = self
            .sampler
            .next_batch()
            .into_iter()
            .map(|(c, i)| self.pools[&c][i])
            .collect();
        self.step_on(&batch)
    }

    /// One optimizer step on an explicit batch.
    pub fn step_on(&mut self, batch: &[&GraphSample]) -> Result<f64> {
        let seeds = self.dropout_seeds(batch.len());
        let (loss, grads) = batch_gradients(batch, &self.params, &self.model_config, Some(&seeds))?;
        if !loss.is_finite() || grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!(
                "loss {loss} at iteration {}",
                self.iteration + 1
            )));
        }
        let mut next = self.params.clone();
        self.adam.update(next.tensors_mut(), &grads);
        if !next.is_finite() {
            return Err(Error::NonFinite(format!(
                "parameters after iteration {}",
                self.iteration + 1
            )));
        }
        self.params = next;
        self.iteration += 1;
        Ok(loss)
    }
}

/// Runs `config.iterations` optimizer steps. Every `checkpoint_every`
/// iterations the mean training loss and validation AUROC are logged and,
/// when `out` is given, the CSV log plus latest and best-validation
/// checkpoints are rewritten atomically. A non-finite loss aborts the run and
/// leaves the previous checkpoints in place.
pub fn train(
    train_data: &[GraphSample],
    val_data: &[GraphSample],
    model_config: &ModelConfig,
    config: &TrainConfig,
    out: Option<&TrainOutputs>,
) -> Result<TrainOutcome> {
    let mut trainer = Trainer::new(train_data, model_config, config, None)?;
    let start = Instant::now();
    let mut log = Vec::new();
    let mut losses = Vec::with_capacity(config.iterations as usize);
    let mut csv = format!("{LOG_HEADER}\n");
    let mut window = Vec::new();
    let mut best: Option<f64> = None;

    while trainer.iteration < config.iterations {
        let loss = trainer.step()?;
        losses.push(loss);
        window.push(loss);
        let it = trainer.iteration;
        if it % config.checkpoint_every == 0 || it == config.iterations {
            let val = validation_auroc(val_data, &trainer.params, model_config)?;
            let row = LogRow {
                iteration: it,
                train_loss: window.iter().sum::<f64>() / window.len() as f64,
                val_auroc: val,
                mu: trainer.params.mu(),
                sigma: trainer.params.sigma(),
                wall_time: start.elapsed().as_secs_f64(),
            };
            window.clear();
            log::info!("{}", row.to_csv());
            let _ = writeln!(csv, "{}", row.to_csv());
            let improved = match (val, best) {
                (Some(v), Some(b)) => v > b,
                (Some(_), None) => true,
                _ => false,
            };
            if improved {
                best = val;
            }
            if let Some(out) = out {
                crate::io::write_atomic(&out.log, csv.as_bytes())?;
                save_params(&out.latest, &trainer.params, model_config, it)?;
                if improved || (best.is_none() && !out.best.exists()) {
                    save_params(&out.best, &trainer.params, model_config, it)?;
                }
            }
            log.push(row);
        }
    }
    Ok(TrainOutcome {
        params: trainer.params,
        log,
        best_val_auroc: best,
        losses,
    })
}
