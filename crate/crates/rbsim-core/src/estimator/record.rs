//! The unit of measured data: one sequence's wrong-outcome estimate.

use crate::error::{Error, Result};
use crate::noise::ExperimentContext;

/// Outcome statistics for one `(j, l_k, m)` sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub j: usize,
    pub l_k: usize,
    pub m: usize,
    /// Shots that produced the wrong σ_z outcome (or wrong parity).
    pub wrong_count: u64,
    /// Total repetitions.
    pub shots: u64,
    /// Wrong-outcome estimate `wrong_count / shots`.
    pub p_hat: f64,
    /// Binomial standard error of `p_hat`, floored away from zero when the
    /// estimate sits on a boundary so weights stay finite.
    pub stderr: f64,
    /// Quasi-static contexts sampled for each shot batch, in batch order.
    pub contexts: Vec<ExperimentContext>,
}

impl ExperimentRecord {
    pub fn new(
        j: usize,
        l_k: usize,
        m: usize,
        wrong_count: u64,
        shots: u64,
        contexts: Vec<ExperimentContext>,
    ) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidParameter("record needs at least one shot".into()));
        }
        if wrong_count > shots {
            return Err(Error::InvalidParameter(format!(
                "wrong count {wrong_count} exceeds shot count {shots}"
            )));
        }
        let p_hat = wrong_count as f64 / shots as f64;
        let stderr = binomial_stderr(p_hat, shots);
        Ok(ExperimentRecord { j, l_k, m, wrong_count, shots, p_hat, stderr, contexts })
    }

    /// The decay fit's length variable for this record, `l_k + 1`.
    pub fn fit_length(&self) -> usize {
        self.l_k + 1
    }
}

/// `sqrt(p(1−p)/n)`, with a floor of `sqrt(0.25/n)·10⁻²` at the boundaries so
/// a boundary estimate never reports zero uncertainty.
pub fn binomial_stderr(p_hat: f64, shots: u64) -> f64 {
    let n = shots as f64;
    if p_hat == 0.0 || p_hat == 1.0 {
        (0.25 / n).sqrt() * 1e-2
    } else {
        (p_hat * (1.0 - p_hat) / n).sqrt()
    }
}
