use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{Metric, MetricsRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    InsufficientData(usize),
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1 ..= end.
        let rank = (start + end + 1) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties. `Ok(None)` when
/// either series is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Option<f64>, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::InsufficientData(xs.len()));
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correlation {
    /// `None` when undefined (a constant column).
    pub rho: Option<f64>,
    pub n: usize,
}

/// Pairwise Spearman coefficients over the nine metric columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CorrelationMatrix {
    pub entries: BTreeMap<Metric, BTreeMap<Metric, Correlation>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Metric, b: Metric) -> Option<&Correlation> {
        self.entries.get(&a).and_then(|row| row.get(&b))
    }

    pub fn rho(&self, a: Metric, b: Metric) -> Option<f64> {
        self.get(a, b).and_then(|c| c.rho)
    }
}

pub fn correlate(rows: &[MetricsRow]) -> Result<CorrelationMatrix, StatsError> {
    if rows.len() < 2 {
        return Err(StatsError::InsufficientData(rows.len()));
    }
    let columns: BTreeMap<Metric, Vec<f64>> = Metric::ALL
        .into_iter()
        .map(|m| (m, rows.iter().map(|r| r.get(m) as f64).collect()))
        .collect();
    let mut entries: BTreeMap<Metric, BTreeMap<Metric, Correlation>> = BTreeMap::new();
    for a in Metric::ALL {
        for b in Metric::ALL {
            if b < a {
                let mirrored = entries[&b][&a];
                entries.entry(a).or_default().insert(b, mirrored);
                continue;
            }
            let rho = spearman(&columns[&a], &columns[&b])?;
            entries
                .entry(a)
                .or_default()
                .insert(b, Correlation { rho, n: rows.len() });
        }
    }
    Ok(CorrelationMatrix { entries })
}
