mod common;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use common::{atom, record, small_config};
use gnn_dti::chem::{write_jsonl, Category, Element};
use gnn_dti::graph::read_cache;
use gnn_dti::model::{save_params, ModelParams};

const SMALL_MODEL: [&str; 6] = ["--gat-dim", "8", "--num-gat-layers", "2", "--fc-dims", "8,1"];

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn gnn(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_gnn-dti"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn ok(args: &[&str]) -> Run {
    let r = gnn(args);
    assert_eq!(r.code, 0, "{args:?}\nstdout: {}\nstderr: {}", r.stdout, r.stderr);
    r
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn synth_cache(dir: &Path, name: &str, mode: &str, count: &str, seed: &str) -> PathBuf {
    let jsonl = dir.join(format!("{name}.jsonl"));
    let cache = dir.join(format!("{name}.cache"));
    ok(&["synth", "--out", s(&jsonl), "--count", count, "--mode", mode, "--seed", seed]);
    ok(&["featurize", s(&jsonl), "--out", s(&cache)]);
    cache
}

/// Untrained checkpoint for the small test model.
fn planted_checkpoint(dir: &Path, seed: u64) -> PathBuf {
    let config = small_config();
    let path = dir.join(format!("init{seed}.ckpt"));
    save_params(&path, &ModelParams::init(&config, seed).unwrap(), &config, 0).unwrap();
    path
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn featurize_fixture_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.cache");
    let r = ok(&["featurize", s(&fixture("complexes")), "--out", s(&cache)]);
    assert!(r.stdout.contains("featurized 10/10 records"), "{}", r.stdout);
    assert!(r.stdout.contains("rejected: 0"));
    assert_eq!(read_cache(&cache).unwrap().len(), 10);

    let again = dir.path().join("again.cache");
    ok(&["featurize", s(&fixture("complexes")), "--out", s(&again)]);
    assert_eq!(std::fs::read(&cache).unwrap(), std::fs::read(&again).unwrap());
    assert!(dir.path().join("c.cache.config.toml").exists());
}

#[test]
fn record_without_ligand_is_listed_and_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("c.cache");
    let r = ok(&[
        "featurize",
        s(&fixture("no_ligand.jsonl")),
        s(&fixture("screen20.jsonl")),
        "--out",
        s(&cache),
    ]);
    assert!(r.stdout.contains("featurized 1/2 records"), "{}", r.stdout);
    assert!(r.stdout.contains("rejected: 1"));
    assert!(r.stdout.contains("  no_ligand: "));
    let samples = read_cache(&cache).unwrap();
    assert_eq!(samples.len(), 1);
    assert_eq!(samples[0].complex_id, "fixture20");
}

#[test]
fn sdf_and_pdb_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("p.cache");
    let r = ok(&[
        "featurize",
        "--ligand",
        s(&fixture("lig1_poses.sdf")),
        "--protein",
        s(&fixture("gly_ala_gly.pdb")),
        "--category",
        "pdbbind_positive",
        "--out",
        s(&cache),
    ]);
    // Poses at 3.0 Å sit between the thresholds and are left out.
    assert!(r.stdout.contains("omitted poses: 1"), "{}", r.stdout);
    let labels: Vec<_> = read_cache(&cache).unwrap().iter().map(|s| s.label).collect();
    assert_eq!(labels, vec![Some(1), Some(1), Some(0)]);
}

#[test]
fn training_smoke_run() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "mixed", "mixed", "80", "3");
    let run = dir.path().join("run");
    let mut args = vec!["train", "--cache", s(&cache), "--out", s(&run), "--iterations", "100"];
    args.extend(["--checkpoint-every", "20", "--batch-size", "8"]);
    args.extend(SMALL_MODEL);
    ok(&args);
    let rows = csv_rows(&run.join("train_log.csv"));
    assert_eq!(rows[0].join(","), gnn_dti::train::LOG_HEADER);
    let iters: Vec<u64> = rows[1..].iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(iters, vec![20, 40, 60, 80, 100]);
    for r in &rows[1..] {
        assert_eq!(r.len(), 6);
        let loss: f64 = r[1].parse().unwrap();
        let sigma: f64 = r[4].parse().unwrap();
        assert!(loss.is_finite() && loss > 0.0);
        assert!(sigma > 0.0);
    }
    assert!(run.join("latest.ckpt").exists());
    assert!(run.join("best.ckpt").exists());
}

#[test]
fn missing_category_names_the_pool() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "scr", "screening", "40", "1");
    let run = dir.path().join("run");
    let mut args = vec!["train", "--cache", s(&cache), "--out", s(&run), "--iterations", "5"];
    args.extend(SMALL_MODEL);
    let r = gnn(&args);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("pdbbind_"), "{}", r.stderr);
    assert!(r.stderr.contains("--screening true"));

    args.extend(["--screening", "true"]);
    ok(&args);
}

/// Mann–Whitney by pair counting over (score, label) rows.
fn pair_auroc(rows: &[(f64, u8)]) -> f64 {
    let (mut twice, mut pairs) = (0u64, 0u64);
    for p in rows.iter().filter(|r| r.1 == 1) {
        for n in rows.iter().filter(|r| r.1 == 0) {
            pairs += 1;
            twice += if p.0 > n.0 { 2 } else { u64::from(p.0 == n.0) };
        }
    }
    twice as f64 / 2.0 / pairs as f64
}

#[test]
fn evaluate_reports_per_protein_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "scr", "screening", "120", "8");
    let ckpt = planted_checkpoint(dir.path(), 4);
    let (e1, e2, pred) = (dir.path().join("e1"), dir.path().join("e2"), dir.path().join("p"));
    ok(&["evaluate", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&e1)]);
    ok(&["evaluate", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&e2)]);
    for f in ["report.json", "report.csv", "roc.csv", "pr.csv"] {
        assert_eq!(std::fs::read(e1.join(f)).unwrap(), std::fs::read(e2.join(f)).unwrap(), "{f}");
    }

    // Per-protein AUROC rebuilt from the prediction table.
    ok(&["predict", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&pred)]);
    let samples = read_cache(&cache).unwrap();
    let scores = csv_rows(&pred.join("scores.csv"));
    let mut by_protein: BTreeMap<String, Vec<(f64, u8)>> = BTreeMap::new();
    for (sample, row) in samples.iter().zip(&scores[1..]) {
        assert_eq!(row[0], sample.key());
        by_protein
            .entry(sample.protein_id.clone())
            .or_default()
            .push((row[2].parse().unwrap(), sample.label.unwrap()));
    }
    let defined: Vec<f64> = by_protein
        .values()
        .filter(|v| v.iter().any(|r| r.1 == 1) && v.iter().any(|r| r.1 == 0))
        .map(|v| pair_auroc(v))
        .collect();
    let want = defined.iter().sum::<f64>() / defined.len() as f64;

    let report = csv_rows(&e1.join("report.csv"));
    let header = &report[0];
    let col = header.iter().position(|h| h == "auroc").unwrap();
    assert_eq!(report.len(), 1 + by_protein.len() + 1);
    let last = report.last().unwrap();
    assert_eq!(last[0], "aggregate");
    let got: f64 = last[col].parse().unwrap();
    assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    for h in ["auroc", "adjusted_logauc", "prauc", "re@0.5%", "re@1%", "re@2%", "re@5%"] {
        assert!(header.iter().any(|x| x == h), "missing column {h}");
    }
}

#[test]
fn predict_table_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "mix", "mixed", "60", "2");
    let ckpt = planted_checkpoint(dir.path(), 5);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["predict", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&a)]);
    ok(&["predict", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&b)]);
    assert_eq!(
        std::fs::read(a.join("scores.csv")).unwrap(),
        std::fs::read(b.join("scores.csv")).unwrap()
    );
    let n = read_cache(&cache).unwrap().len();
    let scores = csv_rows(&a.join("scores.csv"));
    assert_eq!(scores.len(), n + 1);
    for r in &scores[1..] {
        let p: f64 = r[2].parse().unwrap();
        assert!(p > 0.0 && p < 1.0);
    }
    let hist = csv_rows(&a.join("histogram.csv"));
    assert_eq!(hist.len(), 51);
    let total: usize = hist[1..].iter().map(|r| r[2].parse::<usize>().unwrap()).sum();
    assert_eq!(total, n);
}

#[test]
fn complexes_without_contacts_share_one_score() {
    let dir = tempfile::tempdir().unwrap();
    // Protein atoms 6 to 7 Å away: kept by pruning, never in contact.
    let far = |id: &str, lig: Element, prot: [Element; 2]| {
        let mut r = record(
            id,
            vec![
                atom(lig, [0.0, 0.0, 0.0], true),
                atom(prot[0], [6.2, 0.0, 0.0], false),
                atom(prot[1], [0.0, -6.8, 0.5], false),
            ],
            vec![],
        );
        r.category = Category::Unlabeled;
        r.label = None;
        r
    };
    let records = vec![
        far("far_a", Element::C, [Element::O, Element::N]),
        far("far_b", Element::S, [Element::C, Element::C]),
    ];
    let input = dir.path().join("far.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&mut buf, &records).unwrap();
    std::fs::write(&input, buf).unwrap();
    let ckpt = planted_checkpoint(dir.path(), 6);
    let out = dir.path().join("p");
    ok(&["predict", "--input", s(&input), "--checkpoint", s(&ckpt), "--out", s(&out)]);
    let rows = csv_rows(&out.join("scores.csv"));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][2], rows[2][2]);
}

#[test]
fn pose_table_matches_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "poses", "poses", "20", "4");
    let ckpt = planted_checkpoint(dir.path(), 7);
    let out = dir.path().join("t");
    ok(&["poses", "--cache", s(&cache), "--checkpoint", s(&ckpt), "--out", s(&out), "--top-n", "1,2,100"]);
    let rows = csv_rows(&out.join("topn.csv"));
    assert_eq!(rows[0], vec!["n", "success_percent"]);
    let v: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(v[0] <= v[1] && v[1] <= v[2]);

    // With N past every pose count, success is the share of complexes with
    // any near-native pose.
    let mut any: BTreeMap<String, bool> = BTreeMap::new();
    for s in read_cache(&cache).unwrap() {
        *any.entry(s.complex_id.clone()).or_default() |= s.rmsd.unwrap() < 2.0;
    }
    let want = 100.0 * any.values().filter(|&&b| b).count() as f64 / any.len() as f64;
    assert!((v[2] - want).abs() <= 1e-9, "{} vs {want}", v[2]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cache = synth_cache(dir.path(), "mix", "mixed", "60", "6");
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "[model]\ngat_dim = 6\nnum_gat_layers = 1\nfc_dims = [4, 1]\n\n[train]\niterations = 30\nbatch_size = 4\n",
    )
    .unwrap();
    let run = dir.path().join("run");
    ok(&[
        "--config", s(&cfg), "train", "--cache", s(&cache), "--out", s(&run), "--iterations", "12",
        "--checkpoint-every", "6",
    ]);
    let resolved: toml::Value =
        toml::from_str(&std::fs::read_to_string(run.join("resolved_config.toml")).unwrap()).unwrap();
    assert_eq!(resolved["train"]["iterations"].as_integer(), Some(12));
    assert_eq!(resolved["train"]["batch_size"].as_integer(), Some(4));
    assert_eq!(resolved["model"]["gat_dim"].as_integer(), Some(6));
    assert_eq!(resolved["model"]["num_gat_layers"].as_integer(), Some(1));
    let iters: Vec<String> = csv_rows(&run.join("train_log.csv"))[1..].iter().map(|r| r[0].clone()).collect();
    assert_eq!(iters, vec!["6", "12"]);

    // A checkpoint cannot be evaluated under a different architecture.
    let r = gnn(&[
        "evaluate", "--cache", s(&cache), "--checkpoint", s(&run.join("latest.ckpt")), "--out",
        s(&dir.path().join("e")), "--num-gat-layers", "3",
    ]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn exit_codes_by_failure_kind() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gnn(&["--help"]).code, 0);
    assert_eq!(gnn(&["train", "--no-such-flag"]).code, 1);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nwidth = 3\n").unwrap();
    assert_eq!(gnn(&["--config", s(&bad), "evaluate", "--cache", "x", "--checkpoint", "y", "--out", "z"]).code, 1);
    let missing = dir.path().join("missing.cache");
    let r = gnn(&["predict", "--cache", s(&missing), "--checkpoint", "nope.ckpt", "--out", s(dir.path())]);
    assert_eq!(r.code, 2);

    let cache = synth_cache(dir.path(), "mix", "mixed", "40", "9");
    let run = dir.path().join("run");
    let mut args = vec!["train", "--cache", s(&cache), "--out", s(&run), "--iterations", "50"];
    args.extend(["--learning-rate", "1e300", "--checkpoint-every", "1"]);
    args.extend(SMALL_MODEL);
    let r = gnn(&args);
    assert_eq!(r.code, 3, "{}", r.stderr);
}
