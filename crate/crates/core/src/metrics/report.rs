use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{
    adjusted_logauc, auroc, pr_curve, prauc, re_score, roc_curve, ScoredItem, LOGAUC_LAMBDA,
};
use crate::error::{Error, Result};

/// FPR levels at which ROC enrichment is reported.
pub const RE_LEVELS: [f64; 4] = [0.005, 0.01, 0.02, 0.05];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    Auroc,
    AdjustedLogAuc,
    Prauc,
    /// ROC enrichment at the given FPR.
    Re(f64),
}

impl MetricKind {
    pub fn all() -> Vec<MetricKind> {
        let mut v = vec![MetricKind::Auroc, MetricKind::AdjustedLogAuc, MetricKind::Prauc];
        v.extend(RE_LEVELS.iter().map(|&l| MetricKind::Re(l)));
        v
    }

    pub fn name(&self) -> String {
        match self {
            MetricKind::Auroc => "auroc".into(),
            MetricKind::AdjustedLogAuc => "adjusted_logauc".into(),
            MetricKind::Prauc => "prauc".into(),
            MetricKind::Re(l) => format!("re@{}%", l * 100.0),
        }
    }

    /// Accepts `auroc`, `logauc`, `prauc`, `re` (all four levels) or `re@1`
    /// style names with the level in percent.
    pub fn parse_list(s: &str) -> Result<Vec<MetricKind>> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "all" => out.extend(MetricKind::all()),
                "auroc" => out.push(MetricKind::Auroc),
                "logauc" | "adjusted_logauc" => out.push(MetricKind::AdjustedLogAuc),
                "prauc" => out.push(MetricKind::Prauc),
                "re" => out.extend(RE_LEVELS.iter().map(|&l| MetricKind::Re(l))),
                other => {
                    let level = other
                        .strip_prefix("re@")
                        .map(|l| l.trim_end_matches('%'))
                        .and_then(|l| l.parse::<f64>().ok())
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown metric `{other}`")))?;
                    out.push(MetricKind::Re(level / 100.0));
                }
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no metrics selected".into()));
        }
        Ok(out)
    }

    pub fn compute(&self, items: &[ScoredItem]) -> Result<f64> {
        match *self {
            MetricKind::Auroc => auroc(items),
            MetricKind::AdjustedLogAuc => adjusted_logauc(items, LOGAUC_LAMBDA),
            MetricKind::Prauc => prauc(items),
            MetricKind::Re(l) => re_score(items, l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub protein_id: String,
    pub num_items: usize,
    pub num_positive: usize,
    /// `None` where the metric is undefined for this protein.
    pub values: BTreeMap<String, Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub metrics: Vec<String>,
    pub proteins: Vec<MetricRow>,
    /// Unweighted mean over proteins with a defined value, per metric.
    pub aggregate: MetricRow,
    /// Number of proteins that contributed to each aggregate value.
    pub proteins_averaged: BTreeMap<String, usize>,
}

/// Computes every metric per protein and averages over proteins.
pub fn evaluate(items: &[ScoredItem], kinds: &[MetricKind]) -> Result<EvalReport> {
    let mut by_protein: BTreeMap<&str, Vec<ScoredItem>> = BTreeMap::new();
    for it in items {
        by_protein
            .entry(it.protein_id.as_str())
            .or_default()
            .push(it.clone());
    }
    let names: Vec<String> = kinds.iter().map(MetricKind::name).collect();
    let mut proteins = Vec::new();
    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for (protein, set) in &by_protein {
        let mut values = BTreeMap::new();
        for (kind, name) in kinds.iter().zip(&names) {
            let v = kind.compute(set).ok();
            if let Some(v) = v {
                let e = sums.entry(name.clone()).or_default();
                e.0 += v;
                e.1 += 1;
            }
            values.insert(name.clone(), v);
        }
        proteins.push(MetricRow {
            protein_id: protein.to_string(),
            num_items: set.len(),
            num_positive: set.iter().filter(|i| i.label == 1).count(),
            values,
        });
    }
    if sums.is_empty() {
        return Err(Error::Metric("no protein has a computable metric".into()));
    }
    let aggregate = MetricRow {
        protein_id: "aggregate".into(),
        num_items: items.len(),
        num_positive: items.iter().filter(|i| i.label == 1).count(),
        values: names
            .iter()
            .map(|n| (n.clone(), sums.get(n).map(|&(s, c)| s / c as f64)))
            .collect(),
    };
    Ok(EvalReport {
        metrics: names.clone(),
        proteins,
        aggregate,
        proteins_averaged: names
            .iter()
            .map(|n| (n.clone(), sums.get(n).map_or(0, |s| s.1)))
            .collect(),
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| format!("{v}")).unwrap_or_default()
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per protein followed by the aggregate row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("protein_id,num_items,num_positive");
        for m in &self.metrics {
            s.push(',');
            s.push_str(m);
        }
        s.push('\n');
        for row in self.proteins.iter().chain(std::iter::once(&self.aggregate)) {
            let _ = write!(s, "{},{},{}", row.protein_id, row.num_items, row.num_positive);
            for m in &self.metrics {
                s.push(',');
                s.push_str(&cell(row.values.get(m).copied().flatten()));
            }
            s.push('\n');
        }
        s
    }

    pub fn aggregate_value(&self, metric: &str) -> Option<f64> {
        self.aggregate.values.get(metric).copied().flatten()
    }
}

/// `threshold,fpr,tpr` over all items.
pub fn roc_csv(items: &[ScoredItem]) -> Result<String> {
    let mut s = String::from("threshold,fpr,tpr\n");
    for p in roc_curve(items)? {
        let _ = writeln!(s, "{},{},{}", p.threshold, p.fpr, p.tpr);
    }
    Ok(s)
}

/// `threshold,recall,precision` over all items.
pub fn pr_csv(items: &[ScoredItem]) -> Result<String> {
    let mut s = String::from("threshold,recall,precision\n");
    for p in pr_curve(items)? {
        let _ = writeln!(s, "{},{},{}", p.threshold, p.recall, p.precision);
    }
    Ok(s)
}
