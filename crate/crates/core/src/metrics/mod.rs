//! Ranking metrics for virtual screening and pose selection.
//!
//! Tied scores are handled Mann-Whitney style everywhere: a tie group is a
//! single threshold step, and a tied positive/negative pair earns half credit.

mod report;

pub use report::{evaluate, pr_csv, roc_csv, EvalReport, MetricKind, MetricRow, RE_LEVELS};

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Early-recognition lower bound of the log-scaled ROC axis.
pub const LOGAUC_LAMBDA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredItem {
    pub score: f64,
    pub label: u8,
    pub protein_id: String,
    pub complex_id: String,
    pub rmsd: Option<f64>,
}

impl ScoredItem {
    pub fn new(score: f64, label: u8) -> Self {
        Self {
            score,
            label,
            protein_id: String::new(),
            complex_id: String::new(),
            rmsd: None,
        }
    }
}

/// A point on an empirical ROC curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub recall: f64,
    pub precision: f64,
}

struct Ranked {
    /// `(positives, negatives)` per tie group, highest score first.
    groups: Vec<(f64, usize, usize)>,
    pos: usize,
    neg: usize,
}

fn rank(items: &[ScoredItem]) -> Result<Ranked> {
    let mut sorted: Vec<(f64, u8)> = Vec::with_capacity(items.len());
    for it in items {
        if !it.score.is_finite() {
            return Err(Error::Metric(format!("non-finite score for {}", it.complex_id)));
        }
        if it.label > 1 {
            return Err(Error::Metric(format!("label {} not in {{0,1}}", it.label)));
        }
        sorted.push((it.score, it.label));
    }
    sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut groups: Vec<(f64, usize, usize)> = Vec::new();
    for (s, l) in sorted {
        match groups.last_mut() {
            Some(g) if g.0 == s => {
                if l == 1 {
                    g.1 += 1
                } else {
                    g.2 += 1
                }
            }
            _ => groups.push((s, usize::from(l == 1), usize::from(l == 0))),
        }
    }
    let pos = groups.iter().map(|g| g.1).sum();
    let neg = groups.iter().map(|g| g.2).sum();
    Ok(Ranked { groups, pos, neg })
}

fn require_both(r: &Ranked) -> Result<()> {
    if r.pos == 0 || r.neg == 0 {
        return Err(Error::Metric(format!(
            "need at least one positive and one negative (got {} / {})",
            r.pos, r.neg
        )));
    }
    Ok(())
}

/// Probability that a random positive outranks a random negative.
pub fn auroc(items: &[ScoredItem]) -> Result<f64> {
    let r = rank(items)?;
    require_both(&r)?;
    let mut neg_above = 0usize;
    // Twice the Mann-Whitney U keeps the tally integral.
    let mut twice_u: u128 = 0;
    for &(_, p, n) in &r.groups {
        twice_u += (p as u128) * (2 * (r.neg - neg_above - n) as u128 + n as u128);
        neg_above += n;
    }
    Ok(twice_u as f64 / 2.0 / (r.pos as f64 * r.neg as f64))
}

/// ROC curve from `(0, 0)` to `(1, 1)`, one point per distinct score.
pub fn roc_curve(items: &[ScoredItem]) -> Result<Vec<RocPoint>> {
    let r = rank(items)?;
    require_both(&r)?;
    let mut pts = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0, 0);
    for &(s, p, n) in &r.groups {
        tp += p;
        fp += n;
        pts.push(RocPoint {
            threshold: s,
            fpr: fp as f64 / r.neg as f64,
            tpr: tp as f64 / r.pos as f64,
        });
    }
    Ok(pts)
}

/// Area of the random classifier on the log-scaled axis, normalized.
pub fn random_logauc(lambda: f64) -> f64 {
    (1.0 - lambda) / (std::f64::consts::LN_10 * (1.0 / lambda).log10())
}

/// LogAUC minus the random-classifier area. The ROC is integrated by the
/// trapezoid rule over `log10(FPR)` on `[lambda, 1]`, with FPR values
/// clamped below at `lambda`.
pub fn adjusted_logauc(items: &[ScoredItem], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} not in (0, 1)")));
    }
    let pts = roc_curve(items)?;
    let mut area = 0.0;
    for w in pts.windows(2) {
        let x0 = w[0].fpr.max(lambda).log10();
        let x1 = w[1].fpr.max(lambda).log10();
        area += (x1 - x0) * (w[0].tpr + w[1].tpr) / 2.0;
    }
    let logauc = area / (1.0 / lambda).log10();
    Ok(logauc - random_logauc(lambda))
}

/// Precision-recall points, one per distinct score.
pub fn pr_curve(items: &[ScoredItem]) -> Result<Vec<PrPoint>> {
    let r = rank(items)?;
    if r.pos == 0 {
        return Err(Error::Metric("no positives".into()));
    }
    let (mut tp, mut seen) = (0, 0);
    Ok(r
        .groups
        .iter()
        .map(|&(s, p, n)| {
            tp += p;
            seen += p + n;
            PrPoint {
                threshold: s,
                recall: tp as f64 / r.pos as f64,
                precision: tp as f64 / seen as f64,
            }
        })
        .collect())
}

/// Area under the precision-recall curve in average-precision form:
/// `sum_k (R_k - R_{k-1}) P_k` over score thresholds.
pub fn prauc(items: &[ScoredItem]) -> Result<f64> {
    let pts = pr_curve(items)?;
    let mut prev = 0.0;
    let mut ap = 0.0;
    for p in pts {
        ap += (p.recall - prev) * p.precision;
        prev = p.recall;
    }
    Ok(ap)
}

/// ROC enrichment: TPR / FPR at the first threshold whose FPR reaches `fpr`.
pub fn re_score(items: &[ScoredItem], fpr: f64) -> Result<f64> {
    if !(fpr > 0.0 && fpr <= 1.0) {
        return Err(Error::InvalidArgument(format!("fpr level {fpr} not in (0, 1]")));
    }
    let r = rank(items)?;
    require_both(&r)?;
    if (r.neg as f64) * fpr < 1.0 - 1e-9 {
        return Err(Error::Metric(format!(
            "FPR {fpr} unrealizable with {} negatives",
            r.neg
        )));
    }
    let pts = roc_curve(items)?;
    let hit = pts
        .iter()
        .find(|p| p.fpr >= fpr - 1e-12)
        .expect("final point has fpr 1");
    Ok(hit.tpr / hit.fpr)
}

/// Per-protein values and their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ProteinAverage {
    pub values: Vec<(String, f64)>,
    /// Proteins whose metric was undefined, with the reason.
    pub skipped: Vec<(String, String)>,
    pub mean: f64,
}

/// Unweighted mean over proteins of `metric`; proteins where it is undefined
/// (e.g. single-class score sets) are skipped and reported.
pub fn per_protein_average(
    items: &[ScoredItem],
    metric: impl Fn(&[ScoredItem]) -> Result<f64>,
) -> Result<ProteinAverage> {
    let mut by_protein: BTreeMap<&str, Vec<ScoredItem>> = BTreeMap::new();
    for it in items {
        by_protein
            .entry(it.protein_id.as_str())
            .or_default()
            .push(it.clone());
    }
    let mut values = Vec::new();
    let mut skipped = Vec::new();
    for (protein, set) in by_protein {
        match metric(&set) {
            Ok(v) => values.push((protein.to_string(), v)),
            Err(e) => skipped.push((protein.to_string(), e.to_string())),
        }
    }
    let mean = mean_of(&values)?;
    Ok(ProteinAverage {
        values,
        skipped,
        mean,
    })
}

/// Unweighted mean of already computed per-protein values.
pub fn mean_of(values: &[(String, f64)]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Metric("no protein has a computable value".into()));
    }
    Ok(values.iter().map(|v| v.1).sum::<f64>() / values.len() as f64)
}

/// Fraction of complexes with a pose under 2 Å RMSD among their `n`
/// best-scored poses. Ties in score are broken by input order.
pub fn topn_success(items: &[ScoredItem], n: usize) -> Result<f64> {
    let mut groups: BTreeMap<&str, Vec<(f64, f64)>> = BTreeMap::new();
    for it in items {
        let rmsd = it
            .rmsd
            .ok_or_else(|| Error::Metric(format!("pose of {} has no rmsd", it.complex_id)))?;
        groups
            .entry(it.complex_id.as_str())
            .or_default()
            .push((it.score, rmsd));
    }
    if groups.is_empty() {
        return Err(Error::Metric("no poses".into()));
    }
    let total = groups.len();
    let hits = groups
        .into_values()
        .filter(|poses| {
            let mut poses = poses.clone();
            poses.sort_by(|a, b| b.0.total_cmp(&a.0));
            poses
                .iter()
                .take(n)
                .any(|&(_, r)| r < crate::graph::POSITIVE_RMSD)
        })
        .count();
    Ok(hits as f64 / total as f64)
}
