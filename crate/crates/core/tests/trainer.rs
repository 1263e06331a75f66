mod common;

use std::collections::BTreeSet;

use common::{small_config, tiny_record, tiny_sample};
use gnn_dti::chem::Category;
use gnn_dti::error::Error;
use gnn_dti::graph::{build_sample, preprocess, GraphSample};
use gnn_dti::model::{load_params, predict, ModelConfig};
use gnn_dti::synth::{generate, SynthConfig, SynthMode};
use gnn_dti::train::{
    batch_bce, bce_loss, split_by_protein, train, BalancedSampler, TrainConfig, TrainOutputs,
    Trainer, LOG_HEADER,
};

fn mixed(n: usize, seed: u64) -> Vec<GraphSample> {
    let cfg = SynthConfig {
        num_complexes: n,
        num_proteins: 6,
        ligand_atoms: (4, 6),
        protein_atoms: (8, 12),
        mode: SynthMode::Mixed,
        seed,
        ..SynthConfig::default()
    };
    generate(&cfg).unwrap().iter().filter_map(|r| preprocess(r).ok()).collect()
}

fn quick(iterations: u64) -> TrainConfig {
    TrainConfig {
        batch_size: 8,
        iterations,
        learning_rate: 1e-3,
        seed: 3,
        checkpoint_every: 25,
        ..TrainConfig::default()
    }
}

/// Upper 1% point of the chi-square distribution (Wilson–Hilferty).
fn chi2_critical_01(df: usize) -> f64 {
    let k = df as f64;
    let z = 2.326_347_874;
    let c = 2.0 / (9.0 * k);
    k * (1.0 - c + z * c.sqrt()).powi(3)
}

#[test]
fn bce_examples() {
    assert!((bce_loss(0.5, 1).unwrap() - 2f64.ln()).abs() <= 1e-15);
    assert!(bce_loss(1.0 - 1e-9, 1).unwrap() < 1e-8);
    assert!(bce_loss(1e-9, 0).unwrap() < 1e-8);
    let pairs = [(0.7, 1), (0.1, 0), (0.45, 1), (0.8, 0)];
    let hand = -(0.7f64.ln() + 0.9f64.ln() + 0.45f64.ln() + 0.2f64.ln()) / 4.0;
    assert!((batch_bce(&pairs).unwrap() - hand).abs() <= 1e-12);
    assert!(bce_loss(0.3, 3).is_err());
    // Logs are clamped, so certainty in the wrong direction stays finite.
    assert!(bce_loss(0.0, 1).unwrap().is_finite());
}

#[test]
fn batches_hold_equal_shares() {
    let pools: Vec<_> = Category::TRAINING.iter().map(|&c| (c, 5)).collect();
    let mut s = BalancedSampler::new(pools.clone(), 32, 1).unwrap();
    let batch = s.next_batch();
    assert_eq!(batch.len(), 32);
    for c in Category::TRAINING {
        assert_eq!(batch.iter().filter(|b| b.0 == c).count(), 8);
    }
    let a: Vec<_> = BalancedSampler::new(pools.clone(), 32, 9).unwrap().take(20).collect();
    let b: Vec<_> = BalancedSampler::new(pools, 32, 9).unwrap().take(20).collect();
    assert_eq!(a, b);
}

#[test]
fn draws_are_uniform_within_each_pool() {
    let sizes = [7, 13, 3, 20];
    let pools: Vec<_> = Category::TRAINING.iter().copied().zip(sizes).collect();
    let mut counts: Vec<Vec<usize>> = sizes.iter().map(|&n| vec![0; n]).collect();
    let sampler = BalancedSampler::new(pools, 32, 2024).unwrap();
    for batch in sampler.take(1000) {
        for (c, i) in batch {
            let k = Category::TRAINING.iter().position(|&t| t == c).unwrap();
            counts[k][i] += 1;
        }
    }
    for (k, pool) in counts.iter().enumerate() {
        let total: usize = pool.iter().sum();
        assert_eq!(total, 8000);
        let expected = total as f64 / pool.len() as f64;
        let stat: f64 = pool.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        let crit = chi2_critical_01(pool.len() - 1);
        assert!(stat < crit, "pool {k}: chi-square {stat:.2} >= {crit:.2}");
    }
}

#[test]
fn empty_pool_names_the_category() {
    let samples: Vec<_> = mixed(40, 1)
        .into_iter()
        .filter(|s| s.category != Category::PdbbindNegative)
        .collect();
    match Trainer::new(&samples, &small_config(), &quick(1), None) {
        Err(Error::EmptyPool(name)) => assert_eq!(name, "pdbbind_negative"),
        other => panic!("expected an empty-pool error, got {:?}", other.err()),
    }
}

#[test]
fn mu_moves_only_with_contacts() {
    let config = small_config();
    let cfg = TrainConfig {
        batch_size: 1,
        categories: vec![Category::DudeActive],
        ..quick(1)
    };
    let with = tiny_sample();
    let mut far = tiny_record();
    for a in far.atoms.iter_mut().filter(|a| !a.is_ligand) {
        a.position[2] += 7.0;
    }
    let without = build_sample(&far).unwrap();
    assert_eq!(without.num_contacts(), 0);

    let pool = [with.clone()];
    let mut t = Trainer::new(&pool, &config, &cfg, None).unwrap();
    let (mu0, s0) = (t.params.mu(), t.params.sigma());
    t.step_on(&[&without]).unwrap();
    assert_eq!(t.params.mu().to_bits(), mu0.to_bits());
    assert_eq!(t.params.sigma().to_bits(), s0.to_bits());
    t.step_on(&[&with]).unwrap();
    assert_ne!(t.params.mu(), mu0);
}

#[test]
fn seeded_runs_repeat_bitwise() {
    let data = mixed(60, 2);
    let config = small_config();
    let a = train(&data, &[], &config, &quick(100), None).unwrap();
    let b = train(&data, &[], &config, &quick(100), None).unwrap();
    assert_eq!(a.losses.len(), 100);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.losses), bits(&b.losses));
    assert_eq!(a.params, b.params);
}

#[test]
fn shapes_fixed_and_sigma_positive_throughout() {
    let data = mixed(40, 3);
    let config = ModelConfig {
        dropout_rate: 0.2,
        ..small_config()
    };
    let mut t = Trainer::new(&data, &config, &quick(0), None).unwrap();
    let shapes: Vec<_> = t.params.tensors().iter().map(|m| m.shape()).collect();
    let count = t.params.num_scalars();
    for _ in 0..40 {
        t.step().unwrap();
        assert!(t.params.sigma() > 0.0);
        assert_eq!(t.params.num_scalars(), count);
        let now: Vec<_> = t.params.tensors().iter().map(|m| m.shape()).collect();
        assert_eq!(now, shapes);
    }
    assert_eq!(t.iteration, 40);
}

#[test]
fn small_step_lowers_the_sample_loss() {
    let config = small_config();
    let cfg = TrainConfig {
        batch_size: 1,
        learning_rate: 1e-5,
        categories: vec![Category::DudeActive],
        ..quick(1)
    };
    for label in [1u8, 0] {
        let mut s = tiny_sample();
        s.label = Some(label);
        let pool = [s.clone()];
        let mut t = Trainer::new(&pool, &config, &cfg, None).unwrap();
        let before = bce_loss(predict(&s, &t.params, &config).unwrap(), label).unwrap();
        t.step_on(&[&s]).unwrap();
        let after = bce_loss(predict(&s, &t.params, &config).unwrap(), label).unwrap();
        assert!(after < before, "label {label}: {before} -> {after}");
    }
}

#[test]
fn validation_split_never_shares_a_protein() {
    let data = mixed(120, 4);
    let n = data.len();
    let (tr, va) = split_by_protein(data, 0.1, 5);
    assert_eq!(tr.len() + va.len(), n);
    assert!(!va.is_empty());
    let a: BTreeSet<_> = tr.iter().map(|s| s.protein_id.clone()).collect();
    let b: BTreeSet<_> = va.iter().map(|s| s.protein_id.clone()).collect();
    assert!(a.is_disjoint(&b));
}

#[test]
fn run_writes_log_and_checkpoints() {
    let data = mixed(60, 6);
    let (tr, va) = split_by_protein(data, 0.3, 1);
    let dir = tempfile::tempdir().unwrap();
    let out = TrainOutputs::in_dir(dir.path());
    let config = small_config();
    let outcome = train(&tr, &va, &config, &quick(60), Some(&out)).unwrap();
    let text = std::fs::read_to_string(&out.log).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(LOG_HEADER));
    let iters: Vec<u64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(iters, vec![25, 50, 60]);
    let latest = load_params(&out.latest).unwrap();
    assert_eq!(latest.iteration, 60);
    assert_eq!(latest.params, outcome.params);
    assert!(load_params(&out.best).is_ok());
}

#[test]
fn non_finite_run_keeps_last_good_checkpoint() {
    let data = mixed(40, 7);
    let dir = tempfile::tempdir().unwrap();
    let out = TrainOutputs::in_dir(dir.path());
    let cfg = TrainConfig {
        learning_rate: 1e300,
        checkpoint_every: 1,
        ..quick(50)
    };
    let err = train(&data, &[], &small_config(), &cfg, Some(&out)).unwrap_err();
    assert!(matches!(err, Error::NonFinite(_)), "{err}");
    let kept = load_params(&out.latest).unwrap();
    assert!(kept.iteration >= 1 && kept.iteration < 50);
    assert!(kept.params.is_finite());
}
