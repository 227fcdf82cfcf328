//! Partition-quality measures: normalized mutual information, adjusted Rand
//! index, and weighted modularity.

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// Bundle of all three scores for one prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalScores {
    pub nmi: f64,
    pub ari: f64,
    pub modularity: f64,
}

fn contingency(truth: &Partition, pred: &Partition) -> Result<(Vec<u64>, Vec<u64>, Vec<u64>)> {
    if truth.len() != pred.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    let r = truth.n_communities();
    let c = pred.n_communities();
    let mut table = vec![0u64; r * c];
    let mut rows = vec![0u64; r];
    let mut cols = vec![0u64; c];
    for (&a, &b) in truth.labels().iter().zip(pred.labels()) {
        table[a * c + b] += 1;
        rows[a] += 1;
        cols[b] += 1;
    }
    Ok((table, rows, cols))
}

fn entropy(counts: &[u64], n: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2·I(Y;C) / (H(Y) + H(C))` with natural-log
/// entropies. Two single-cluster partitions are trivially identical and
/// score 1; if exactly one side carries no information the score is 0.
pub fn nmi(truth: &Partition, pred: &Partition) -> Result<f64> {
    let (table, rows, cols) = contingency(truth, pred)?;
    let n = truth.len() as f64;
    if n == 0.0 {
        return Err(Error::EmptyInput);
    }
    let h_truth = entropy(&rows, n);
    let h_pred = entropy(&cols, n);
    if h_truth == 0.0 && h_pred == 0.0 {
        return Ok(1.0);
    }
    if h_truth == 0.0 || h_pred == 0.0 {
        return Ok(0.0);
    }
    let c = pred.n_communities();
    // Sum the mutual-information terms in a canonical value order; swapping
    // the arguments transposes the table, and this keeps the result
    // bit-identical either way.
    let mut terms = Vec::new();
    for (idx, &count) in table.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let pij = count as f64 / n;
        let pi = rows[idx / c] as f64 / n;
        let qj = cols[idx % c] as f64 / n;
        terms.push(pij * (pij / (pi * qj)).ln());
    }
    terms.sort_by(f64::total_cmp);
    let mutual: f64 = terms.iter().sum();
    Ok((2.0 * mutual / (h_truth + h_pred)).clamp(0.0, 1.0))
}

fn choose2(x: u64) -> f64 {
    (x as f64) * (x as f64 - 1.0) / 2.0
}

/// Adjusted Rand index over the pair-counting contingency table.
pub fn ari(truth: &Partition, pred: &Partition) -> Result<f64> {
    let (table, rows, cols) = contingency(truth, pred)?;
    let n = truth.len() as u64;
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "partition",
            reason: "need at least 2 nodes for pair counting".into(),
        });
    }
    let index: f64 = table.iter().map(|&c| choose2(c)).sum();
    let sum_rows: f64 = rows.iter().map(|&c| choose2(c)).sum();
    let sum_cols: f64 = cols.iter().map(|&c| choose2(c)).sum();
    // Scaled by 2·C(n,2) to keep every operand integer-valued, so small
    // cases come out exact instead of drifting through 1/C(n,2) rounding.
    let pairs = choose2(n);
    let numerator = 2.0 * (index * pairs - sum_rows * sum_cols);
    let denominator = pairs * (sum_rows + sum_cols) - 2.0 * sum_rows * sum_cols;
    if denominator == 0.0 {
        // Both partitions are structurally trivial (all-singleton or
        // single-cluster on both sides): perfect agreement by convention.
        return Ok(1.0);
    }
    Ok(numerator / denominator)
}

/// Weighted modularity
/// `Q = (1/2m)·Σ_{v,w}[A_vw − k_v k_w/(2m)]·δ(c_v,c_w)`,
/// computed per community as `Σ_c [in_c/m − (deg_c/2m)²]` with generalized
/// degrees and `m = vol(G)/2`.
pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    if p.len() != g.n_nodes() {
        return Err(Error::DimensionMismatch {
            expected: g.n_nodes(),
            got: p.len(),
        });
    }
    if g.n_edges() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let two_m = g.volume();
    let m = two_m / 2.0;
    let k = p.n_communities();
    let mut internal = vec![0.0f64; k];
    let mut degree = vec![0.0f64; k];
    let labels = p.labels();
    for &(u, v, w) in g.edges() {
        if labels[u] == labels[v] {
            internal[labels[u]] += w;
        }
    }
    for (node, &label) in labels.iter().enumerate() {
        degree[label] += g.degree(node);
    }
    let mut q = 0.0;
    for c in 0..k {
        let frac = degree[c] / two_m;
        q += internal[c] / m - frac * frac;
    }
    Ok(q)
}
