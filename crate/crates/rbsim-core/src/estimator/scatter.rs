//! Sequence-to-sequence scatter diagnostics at a fixed length.
//!
//! Shot noise alone makes every sequence's error estimate cluster tightly
//! around the common mean; coherent systematic errors instead make each
//! sequence a different near-pure state, spreading the estimates toward the
//! Uniform[0,1] distribution of |⟨1|ψ⟩|² for a random pure qubit state.  Two
//! numbers separate the regimes: how much the empirical variance exceeds the
//! binomial expectation, and how far the empirical distribution sits from
//! uniform.

use crate::error::{Error, Result};

use super::record::ExperimentRecord;

/// Regime suggested by the scatter statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScatterClass {
    /// Variance consistent with shot noise: depolarizing-like error, all
    /// estimates close to the common mean.
    DepolarizingLike,
    /// Excess variance with a broad, near-uniform spread around 1/2:
    /// coherent systematic error.
    CoherentSystematic,
    /// Excess variance without the uniform signature.
    Indeterminate,
}

/// Scatter statistics for the records at one length.
#[derive(Clone, Debug)]
pub struct ScatterReport {
    /// The common sequence length of the analyzed records.
    pub l_k: usize,
    /// Number of records analyzed.
    pub records: usize,
    /// Mean error estimate.
    pub mean: f64,
    /// Empirical variance of the estimates over the mean binomial variance.
    pub excess_variance_ratio: f64,
    /// Kolmogorov–Smirnov distance between the estimates and Uniform[0,1].
    pub uniformity_distance: f64,
    /// Regime hint derived from the two statistics.
    pub classification: ScatterClass,
}

/// Computes scatter statistics for records sharing one length.
///
/// Needs at least eight records, all at the same `l_k`.
pub fn scatter_diagnostic(records: &[ExperimentRecord]) -> Result<ScatterReport> {
    if records.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "scatter diagnostic needs ≥ 8 records at one length, got {}",
            records.len()
        )));
    }
    let l_k = records[0].l_k;
    if records.iter().any(|r| r.l_k != l_k) {
        return Err(Error::InvalidParameter(
            "scatter diagnostic mixes records from different lengths".into(),
        ));
    }

    let n = records.len() as f64;
    let mean = records.iter().map(|r| r.p_hat).sum::<f64>() / n;
    let empirical = records
        .iter()
        .map(|r| (r.p_hat - mean) * (r.p_hat - mean))
        .sum::<f64>()
        / (n - 1.0);
    let binomial = records.iter().map(|r| r.stderr * r.stderr).sum::<f64>() / n;
    let excess_variance_ratio = empirical / binomial;

    let mut sorted: Vec<f64> = records.iter().map(|r| r.p_hat).collect();
    sorted.sort_by(f64::total_cmp);
    let uniformity_distance = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i + 1) as f64 / n - x;
            let below = x - i as f64 / n;
            above.abs().max(below.abs())
        })
        .fold(0.0, f64::max);

    // The ratio estimate fluctuates by about √(2/(n−1)) relative under pure
    // shot noise; threshold the depolarizing call at three of those.
    let ratio_band = 3.0 * (2.0 / (n - 1.0)).sqrt();
    let classification = if excess_variance_ratio <= 1.0 + ratio_band {
        ScatterClass::DepolarizingLike
    } else if (mean - 0.5).abs() < 0.15 && uniformity_distance < 0.25 {
        ScatterClass::CoherentSystematic
    } else {
        ScatterClass::Indeterminate
    };

    Ok(ScatterReport {
        l_k,
        records: records.len(),
        mean,
        excess_variance_ratio,
        uniformity_distance,
        classification,
    })
}
