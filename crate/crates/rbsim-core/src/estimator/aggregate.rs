//! Averaging error-probability records into the tables the decay fit reads.
//!
//! Aggregation is plain unweighted averaging: per base sequence over its
//! randomizations, and per length over the whole (j, m) grid.  What needs
//! care is the uncertainty attached to each length: sequence-to-sequence
//! scatter usually dwarfs shot noise, so the standard error of the mean comes
//! from the empirical spread across sequences whenever enough of them exist,
//! and only falls back to propagated binomial errors on tiny grids.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::record::ExperimentRecord;

/// The minimum grid size for which empirical scatter replaces binomial
/// uncertainty propagation.
const SCATTER_MINIMUM: usize = 4;

/// Mean error probability at one sequence length, with the uncertainty the
/// fit will weight it by.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthSummary {
    /// Number of computational gate slots before the closing gate.
    pub l_k: usize,
    /// Mean of the per-sequence error probabilities.
    pub mean: f64,
    /// Standard error of that mean.
    pub stderr: f64,
    /// Records averaged (the full (j, m) grid at this length).
    pub records: usize,
    /// Whether `stderr` comes from empirical scatter rather than binomial
    /// propagation.
    pub scatter_weighted: bool,
}

impl LengthSummary {
    /// The decay fit's abscissa: computational slots plus the closing gate.
    pub fn fit_length(&self) -> usize {
        self.l_k + 1
    }
}

/// Output of [`aggregate`]: both averaging stages.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregates {
    /// Per-(base sequence, length) means over randomizations, keyed `(j, l_k)`.
    pub per_sequence: BTreeMap<(usize, usize), f64>,
    /// Per-length summaries in ascending `l_k` order.
    pub per_length: Vec<LengthSummary>,
}

/// Collapses `(p̂, stderr)` pairs at one length into its summary.
pub(crate) fn summarize_length(l_k: usize, cells: &[(f64, f64)]) -> LengthSummary {
    let n = cells.len();
    let mean = cells.iter().map(|c| c.0).sum::<f64>() / n as f64;
    let binomial_stderr =
        cells.iter().map(|c| c.1 * c.1).sum::<f64>().sqrt() / n as f64;
    let mut stderr = binomial_stderr;
    let mut scatter_weighted = false;
    if n >= SCATTER_MINIMUM {
        let variance = cells
            .iter()
            .map(|c| (c.0 - mean) * (c.0 - mean))
            .sum::<f64>()
            / (n - 1) as f64;
        let scatter_stderr = (variance / n as f64).sqrt();
        // Identical cells (a noiseless run) carry no spread to estimate from;
        // keep the propagated floor so fit weights stay finite.
        if scatter_stderr > 0.0 {
            stderr = scatter_stderr;
            scatter_weighted = true;
        }
    }
    LengthSummary { l_k, mean, stderr, records: n, scatter_weighted }
}

/// Averages a complete record grid into per-sequence and per-length tables.
///
/// The grid is inferred from the records: every combination of the observed
/// base-sequence indices, lengths, and randomization indices must be present
/// exactly once.  Absent combinations are reported collectively in the error.
pub fn aggregate(records: &[ExperimentRecord]) -> Result<Aggregates> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records to aggregate".into()));
    }
    let mut cells: BTreeMap<(usize, usize, usize), (f64, f64)> = BTreeMap::new();
    let mut js = BTreeSet::new();
    let mut lengths = BTreeSet::new();
    let mut ms = BTreeSet::new();
    for r in records {
        if cells.insert((r.j, r.l_k, r.m), (r.p_hat, r.stderr)).is_some() {
            return Err(Error::InvalidParameter(format!(
                "duplicate record for (j, l_k, m) = ({}, {}, {})",
                r.j, r.l_k, r.m
            )));
        }
        js.insert(r.j);
        lengths.insert(r.l_k);
        ms.insert(r.m);
    }
    let mut missing = Vec::new();
    for &j in &js {
        for &l_k in &lengths {
            for &m in &ms {
                if !cells.contains_key(&(j, l_k, m)) {
                    missing.push((j, l_k, m));
                }
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing));
    }

    let mut per_sequence = BTreeMap::new();
    for &j in &js {
        for &l_k in &lengths {
            let sum: f64 = ms.iter().map(|&m| cells[&(j, l_k, m)].0).sum();
            per_sequence.insert((j, l_k), sum / ms.len() as f64);
        }
    }
    let mut per_length = Vec::with_capacity(lengths.len());
    for &l_k in &lengths {
        let mut cells_at = Vec::with_capacity(js.len() * ms.len());
        for &j in &js {
            for &m in &ms {
                cells_at.push(cells[&(j, l_k, m)]);
            }
        }
        per_length.push(summarize_length(l_k, &cells_at));
    }
    Ok(Aggregates { per_sequence, per_length })
}
