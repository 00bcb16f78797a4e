//! Fitting the benchmarking decay and deriving the headline error numbers.
//!
//! The fitted model is the exact two-parameter curve
//! `p_l = (1 − (1−d_if)(1−d)^l)/2`: `d` is the per-gate depolarization
//! accumulated by each of the `l` averaged gate slots and `d_if` collects the
//! length-independent preparation/measurement error.  Fitting the curve
//! itself, rather than log-linearizing the fidelity, stays unbiased when the
//! data bends toward the 1/2 asymptote at large `l`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

use super::aggregate::{aggregate, Aggregates};
use super::nls;
use super::record::ExperimentRecord;

/// The decay model evaluated at length `l`.
pub fn decay_model(d: f64, d_if: f64, l: f64) -> f64 {
    (1.0 - (1.0 - d_if) * (1.0 - d).powf(l)) / 2.0
}

/// A fitted benchmarking decay.
#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Per-gate depolarization probability.
    pub d: f64,
    /// Length-independent state-preparation/measurement depolarization.
    pub d_if: f64,
    /// Linearized standard error of `d`.
    pub d_stderr: f64,
    /// Linearized standard error of `d_if`.
    pub d_if_stderr: f64,
    /// Linearized covariance of `(d, d_if)`.
    pub covariance: [[f64; 2]; 2],
    /// Weighted residuals per fitted length, in ascending length order.
    pub residuals: Vec<f64>,
    /// Sum of squared weighted residuals.
    pub chi_squared: f64,
    /// Residual degrees of freedom.
    pub dof: usize,
    /// Set when the data carried no length dependence and `d` was pinned to
    /// the zero boundary instead of fitted.
    pub degenerate: bool,
    /// Solver iterations consumed (zero on the degenerate path).
    pub iterations: usize,
}

impl DecayFit {
    /// Error per randomized computational gate, `d/2`.
    pub fn epg(&self) -> f64 {
        self.d / 2.0
    }

    /// Average gate fidelity, `1 − d/2`.
    pub fn avg_fidelity(&self) -> f64 {
        1.0 - self.d / 2.0
    }

    /// The fitted curve evaluated at length `l`.
    pub fn model(&self, l: f64) -> f64 {
        decay_model(self.d, self.d_if, l)
    }
}

/// Fits the decay curve to `(length, probability, stderr)` points.
///
/// Needs at least three distinct lengths and strictly positive
/// uncertainties.  Initial values come from a log-linear regression of
/// `ln(1 − 2p)`; the minimization is exact weighted least squares on the
/// curve itself, with both parameters boxed to `[0, 1]`.  Data with no
/// length dependence at all cannot determine `d` and comes back as a flagged
/// boundary fit at `d = 0`.
pub fn fit_decay(points: &[(f64, f64, f64)]) -> Result<DecayFit> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "decay fit needs ≥ 3 distinct lengths, got {}",
            distinct.len()
        )));
    }
    for &(l, p, sigma) in points {
        if !(0.0..=1.0).contains(&p) || !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "unusable decay point (l = {l}, p = {p})"
            )));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay point at l = {l} has non-positive uncertainty {sigma}"
            )));
        }
    }

    let spread = points
        .iter()
        .map(|p| p.1)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p), hi.max(p))
        });
    if spread.1 - spread.0 < 1e-12 {
        return Ok(degenerate_fit(points, spread.1));
    }

    let init = initial_guess(points);
    let solution = nls::minimize(&init, &[0.0, 0.0], &[1.0, 1.0], |theta| {
        let (d, d_if) = (theta[0], theta[1]);
        let r = DVector::from_iterator(
            points.len(),
            points
                .iter()
                .map(|&(l, p, sigma)| (p - decay_model(d, d_if, l)) / sigma),
        );
        let j = DMatrix::from_fn(points.len(), 2, |i, col| {
            let (l, _, sigma) = points[i];
            if col == 0 {
                (1.0 - d_if) * l * (1.0 - d).powf(l - 1.0) / 2.0 / sigma
            } else {
                (1.0 - d).powf(l) / 2.0 / sigma
            }
        });
        (r, j)
    })?;

    let dof = points.len().saturating_sub(2);
    Ok(DecayFit {
        d: solution.params[0],
        d_if: solution.params[1],
        d_stderr: solution.covariance[(0, 0)].max(0.0).sqrt(),
        d_if_stderr: solution.covariance[(1, 1)].max(0.0).sqrt(),
        covariance: [
            [solution.covariance[(0, 0)], solution.covariance[(0, 1)]],
            [solution.covariance[(1, 0)], solution.covariance[(1, 1)]],
        ],
        residuals: solution.residuals.iter().copied().collect(),
        chi_squared: solution.cost,
        dof,
        degenerate: false,
        iterations: solution.iterations,
    })
}

/// Length-independent data: `d` sits on its zero boundary and the offset
/// parameter absorbs the common level.
fn degenerate_fit(points: &[(f64, f64, f64)], level: f64) -> DecayFit {
    let d_if = (2.0 * level).clamp(0.0, 1.0);
    let residuals: Vec<f64> = points
        .iter()
        .map(|&(l, p, sigma)| (p - decay_model(0.0, d_if, l)) / sigma)
        .collect();
    let chi_squared = residuals.iter().map(|r| r * r).sum();
    // The offset is a weighted mean here; its variance is the usual
    // 1/Σ(1/σ²) scaled by the model's ∂p/∂d_if = 1/2.
    let inv_var: f64 = points.iter().map(|p| 1.0 / (p.2 * p.2)).sum();
    let d_if_stderr = 2.0 / inv_var.sqrt();
    DecayFit {
        d: 0.0,
        d_if,
        d_stderr: 0.0,
        d_if_stderr,
        covariance: [[0.0, 0.0], [0.0, d_if_stderr * d_if_stderr]],
        residuals,
        chi_squared,
        dof: points.len().saturating_sub(2),
        degenerate: true,
        iterations: 0,
    }
}

/// Log-linear starting point: `ln(1 − 2p) = ln(1−d_if) + l·ln(1−d)` is a
/// straight line in `l` wherever `p < 1/2`.
fn initial_guess(points: &[(f64, f64, f64)]) -> [f64; 2] {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| 1.0 - 2.0 * p.1 > 1e-12)
        .map(|p| (p.0, (1.0 - 2.0 * p.1).ln()))
        .collect();
    if usable.len() < 2 {
        return [0.01, 0.01];
    }
    let n = usable.len() as f64;
    let (sx, sy) = usable
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x, sy + y));
    let (sxx, sxy) = usable.iter().fold((0.0, 0.0), |(sxx, sxy), &(x, y)| {
        (sxx + x * x, sxy + x * y)
    });
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return [0.01, 0.01];
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    [
        (1.0 - slope.exp()).clamp(0.0, 0.5),
        (1.0 - intercept.exp()).clamp(0.0, 0.5),
    ]
}

/// Aggregates a record grid and fits its per-length means.
///
/// Each length enters once, at abscissa `l_k + 1`, weighted by the summary
/// standard error from [`aggregate`].
pub fn fit_records(records: &[ExperimentRecord]) -> Result<(Aggregates, DecayFit)> {
    let aggregates = aggregate(records)?;
    let points: Vec<(f64, f64, f64)> = aggregates
        .per_length
        .iter()
        .map(|s| (s.fit_length() as f64, s.mean, s.stderr))
        .collect();
    let fit = fit_decay(&points)?;
    Ok((aggregates, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Binomial, Distribution};

    const STANDARD_LENGTHS: [usize; 17] =
        [2, 3, 4, 5, 6, 8, 10, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96];

    fn exact_points(d: f64, d_if: f64) -> Vec<(f64, f64, f64)> {
        STANDARD_LENGTHS
            .iter()
            .map(|&l_k| {
                let l = (l_k + 1) as f64;
                (l, decay_model(d, d_if, l), 1e-3)
            })
            .collect()
    }

    #[test]
    fn noiseless_synthetic_data_recovers_parameters_to_1e9() {
        let fit = fit_decay(&exact_points(0.00964, 0.01)).unwrap();
        assert!((fit.d - 0.00964).abs() < 1e-9, "d = {}", fit.d);
        assert!((fit.d_if - 0.01).abs() < 1e-9, "d_if = {}", fit.d_if);
        assert!(!fit.degenerate);
        assert!(fit.chi_squared < 1e-12);
    }

    #[test]
    fn fitted_curve_reproduces_the_input_points() {
        let points = exact_points(0.02, 0.005);
        let fit = fit_decay(&points).unwrap();
        for &(l, p, _) in &points {
            assert!((fit.model(l) - p).abs() < 1e-9);
        }
    }

    #[test]
    fn headline_numbers_are_both_halves_of_d() {
        let fit = fit_decay(&exact_points(0.00964, 0.01)).unwrap();
        assert!((fit.epg() - fit.d / 2.0).abs() < 1e-18);
        assert!((fit.avg_fidelity() - (1.0 - fit.epg())).abs() < 1e-18);
    }

    #[test]
    fn constant_one_half_data_degenerates_cleanly() {
        let points: Vec<_> =
            STANDARD_LENGTHS.iter().map(|&l| ((l + 1) as f64, 0.5, 1e-3)).collect();
        let fit = fit_decay(&points).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.d, 0.0);
        assert_eq!(fit.d_if, 1.0);
        assert!(fit.chi_squared < 1e-20);
    }

    #[test]
    fn all_zero_data_degenerates_to_the_origin() {
        let points: Vec<_> =
            STANDARD_LENGTHS.iter().map(|&l| ((l + 1) as f64, 0.0, 1e-3)).collect();
        let fit = fit_decay(&points).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.d, 0.0);
        assert_eq!(fit.d_if, 0.0);
        assert_eq!(fit.epg(), 0.0);
    }

    #[test]
    fn too_few_lengths_are_rejected() {
        let points = [(1.0, 0.1, 1e-3), (2.0, 0.2, 1e-3), (2.0, 0.21, 1e-3)];
        assert!(matches!(
            fit_decay(&points),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn non_positive_uncertainties_are_rejected() {
        let points = [(1.0, 0.1, 1e-3), (2.0, 0.2, 0.0), (3.0, 0.25, 1e-3)];
        assert!(matches!(fit_decay(&points), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn random_parameter_recovery_is_exact_without_noise() {
        let mut rng = crate::rng::stream(41, "decay-test", &[0]);
        for _ in 0..100 {
            let d = rng.random_range(0.001..0.05);
            let d_if = rng.random_range(0.001..0.05);
            let fit = fit_decay(&exact_points(d, d_if)).unwrap();
            assert!((fit.d - d).abs() < 1e-8, "d {} vs {d}", fit.d);
            assert!((fit.d_if - d_if).abs() < 1e-8);
        }
    }

    #[test]
    fn binomial_noise_recovery_stays_within_three_sigma() {
        // A lighter version of the full recovery sweep: draw counts at the
        // production shot budget and demand 3σ coverage of the true d.
        let mut rng = crate::rng::stream(42, "decay-test", &[1]);
        let shots = 8160u64;
        let mut hits = 0;
        for _ in 0..20 {
            let d = rng.random_range(0.001..0.05);
            let d_if = rng.random_range(0.001..0.05);
            let points: Vec<(f64, f64, f64)> = STANDARD_LENGTHS
                .iter()
                .map(|&l_k| {
                    let l = (l_k + 1) as f64;
                    let p = decay_model(d, d_if, l);
                    let k = Binomial::new(shots, p).unwrap().sample(&mut rng);
                    let p_hat = k as f64 / shots as f64;
                    let sigma = super::super::record::binomial_stderr(p_hat, shots);
                    (l, p_hat, sigma)
                })
                .collect();
            let fit = fit_decay(&points).unwrap();
            if (fit.d - d).abs() <= 3.0 * fit.d_stderr {
                hits += 1;
            }
        }
        assert!(hits >= 19, "only {hits}/20 recoveries within 3σ");
    }

    #[test]
    fn record_grids_fit_end_to_end() {
        // Synthesize an exact record grid from the model itself.
        let d = 0.015;
        let d_if = 0.01;
        let shots = 100_000u64;
        let records: Vec<ExperimentRecord> = (0..4)
            .flat_map(|j| {
                [2usize, 4, 8, 16, 32].into_iter().flat_map(move |l_k| {
                    (0..4).map(move |m| {
                        let p = decay_model(d, d_if, (l_k + 1) as f64);
                        let wrong = (p * shots as f64).round() as u64;
                        ExperimentRecord::new(j, l_k, m, wrong, shots, Vec::new())
                            .unwrap()
                    })
                })
            })
            .collect();
        let (aggregates, fit) = fit_records(&records).unwrap();
        assert_eq!(aggregates.per_length.len(), 5);
        // Counts are rounded to integers, so recovery is only as good as the
        // rounding granularity.
        assert!((fit.d - d).abs() < 1e-4, "d = {}", fit.d);
        assert!((fit.d_if - d_if).abs() < 1e-3);
    }
}
