//! Nonparametric bootstrap uncertainty for the per-gate error.
//!
//! The decay fit's own covariance only sees the per-length summary points;
//! the bootstrap instead resamples whole sequences — the (j, m) axis within
//! each length — re-aggregates, and refits, so the quoted uncertainty carries
//! the sequence-to-sequence scatter that dominates real runs.  Every
//! resample draws from its own deterministic stream, making the result
//! reproducible for a fixed seed and independent of record order.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

use super::aggregate::summarize_length;
use super::decay::fit_decay;
use super::record::ExperimentRecord;

/// Bootstrap distribution summary for the error per gate.
#[derive(Clone, Debug)]
pub struct Bootstrap {
    /// Standard deviation of the per-gate error across resamples.
    pub epg_stderr: f64,
    /// Central 68% percentile interval (16th to 84th) of the per-gate error.
    pub interval: (f64, f64),
    /// Resamples attempted.
    pub resamples: usize,
    /// Refits that failed (tolerated up to 5% of attempts).
    pub failures: usize,
}

/// Resamples sequences within each length, refits, and summarizes the
/// per-gate error distribution.
///
/// Needs a complete record grid (as [`super::aggregate`]) and at least 100
/// resamples.  Errors when more than 5% of refits fail.
pub fn bootstrap_epg(
    records: &[ExperimentRecord],
    n_resamples: usize,
    seed: u64,
) -> Result<Bootstrap> {
    if n_resamples < 100 {
        return Err(Error::InvalidParameter(format!(
            "bootstrap needs ≥ 100 resamples, got {n_resamples}"
        )));
    }
    // Validate the grid once up front so resampling can index freely.
    super::aggregate::aggregate(records)?;

    // Group by length with a canonical (j, m) order, so shuffled record
    // collections resample identically.
    let mut by_length: BTreeMap<usize, Vec<(usize, usize, f64, f64)>> = BTreeMap::new();
    for r in records {
        by_length
            .entry(r.l_k)
            .or_default()
            .push((r.j, r.m, r.p_hat, r.stderr));
    }
    for cells in by_length.values_mut() {
        cells.sort_by_key(|c| (c.0, c.1));
    }

    let mut epgs = Vec::with_capacity(n_resamples);
    let mut failures = 0usize;
    for b in 0..n_resamples {
        let mut stream = rng::stream(seed, "bootstrap", &[b as u64]);
        let points: Vec<(f64, f64, f64)> = by_length
            .iter()
            .map(|(&l_k, cells)| {
                let resampled: Vec<(f64, f64)> = (0..cells.len())
                    .map(|_| {
                        let c = cells[stream.random_range(0..cells.len())];
                        (c.2, c.3)
                    })
                    .collect();
                let summary = summarize_length(l_k, &resampled);
                (summary.fit_length() as f64, summary.mean, summary.stderr)
            })
            .collect();
        match fit_decay(&points) {
            Ok(fit) => epgs.push(fit.epg()),
            Err(_) => failures += 1,
        }
    }

    if failures * 20 > n_resamples {
        return Err(Error::BootstrapUnstable { failed: failures, total: n_resamples });
    }

    let n = epgs.len() as f64;
    let mean = epgs.iter().sum::<f64>() / n;
    let epg_stderr = if epgs.len() > 1 {
        (epgs.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    epgs.sort_by(f64::total_cmp);
    let interval = (percentile(&epgs, 0.16), percentile(&epgs, 0.84));
    Ok(Bootstrap { epg_stderr, interval, resamples: n_resamples, failures })
}

/// Linear-interpolation percentile of an ascending-sorted sample.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::decay::decay_model;
    use rand_distr::{Binomial, Distribution};

    const LENGTHS: [usize; 6] = [2, 4, 8, 16, 32, 64];

    fn noisy_records(
        d: f64,
        d_if: f64,
        n_g: usize,
        n_p: usize,
        shots: u64,
        seed: u64,
    ) -> Vec<ExperimentRecord> {
        let mut rng = rng::stream(seed, "bootstrap-test", &[0]);
        let mut records = Vec::new();
        for j in 0..n_g {
            for &l_k in &LENGTHS {
                let p = decay_model(d, d_if, (l_k + 1) as f64);
                for m in 0..n_p {
                    let wrong = Binomial::new(shots, p).unwrap().sample(&mut rng);
                    records.push(
                        ExperimentRecord::new(j, l_k, m, wrong, shots, Vec::new())
                            .unwrap(),
                    );
                }
            }
        }
        records
    }

    #[test]
    fn zero_noise_records_collapse_the_interval() {
        let records: Vec<_> = (0..2)
            .flat_map(|j| {
                LENGTHS.into_iter().flat_map(move |l_k| {
                    (0..4).map(move |m| {
                        ExperimentRecord::new(j, l_k, m, 0, 1000, Vec::new()).unwrap()
                    })
                })
            })
            .collect();
        let boot = bootstrap_epg(&records, 200, 7).unwrap();
        assert_eq!(boot.epg_stderr, 0.0);
        assert_eq!(boot.interval, (0.0, 0.0));
        assert_eq!(boot.failures, 0);
    }

    #[test]
    fn bootstrap_is_seed_deterministic_and_order_invariant() {
        let mut records = noisy_records(0.02, 0.01, 3, 4, 2000, 11);
        let a = bootstrap_epg(&records, 150, 99).unwrap();
        records.reverse();
        let b = bootstrap_epg(&records, 150, 99).unwrap();
        assert_eq!(a.epg_stderr, b.epg_stderr);
        assert_eq!(a.interval, b.interval);
        let c = bootstrap_epg(&records, 150, 100).unwrap();
        assert_ne!(a.epg_stderr, c.epg_stderr, "a new seed resamples differently");
    }

    #[test]
    fn bootstrap_spread_tracks_the_fit_uncertainty() {
        let records = noisy_records(0.015, 0.01, 4, 8, 8160, 13);
        let (_, fit) = super::super::decay::fit_records(&records).unwrap();
        let boot = bootstrap_epg(&records, 400, 21).unwrap();
        let ls_epg_stderr = fit.d_stderr / 2.0;
        assert!(
            boot.epg_stderr < 2.0 * ls_epg_stderr
                && boot.epg_stderr > ls_epg_stderr / 2.0,
            "bootstrap {} vs least-squares {}",
            boot.epg_stderr,
            ls_epg_stderr
        );
        // The percentile interval should bracket the point estimate.
        assert!(boot.interval.0 <= fit.epg() && fit.epg() <= boot.interval.1);
    }

    #[test]
    fn doubling_randomizations_shrinks_the_stderr_by_sqrt_two() {
        // Average several repetitions so the comparison is about the scaling
        // law rather than a single noisy draw.
        let mut ratios = Vec::new();
        for rep in 0..5 {
            let small = noisy_records(0.02, 0.01, 2, 4, 4000, 100 + rep);
            let large = noisy_records(0.02, 0.01, 2, 8, 4000, 200 + rep);
            let s = bootstrap_epg(&small, 150, 5).unwrap().epg_stderr;
            let l = bootstrap_epg(&large, 150, 5).unwrap().epg_stderr;
            ratios.push(s / l);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let target = 2f64.sqrt();
        assert!(
            (mean - target).abs() < 0.3 * target,
            "mean shrink ratio {mean} not near √2"
        );
    }

    #[test]
    fn too_few_resamples_are_rejected() {
        let records = noisy_records(0.02, 0.01, 2, 4, 1000, 17);
        assert!(matches!(
            bootstrap_epg(&records, 99, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn incomplete_grids_are_rejected_before_resampling() {
        let mut records = noisy_records(0.02, 0.01, 2, 4, 1000, 19);
        records.pop();
        assert!(matches!(
            bootstrap_epg(&records, 100, 1),
            Err(Error::MissingCells(_))
        ));
    }
}
