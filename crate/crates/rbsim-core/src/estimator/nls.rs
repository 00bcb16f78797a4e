//! A small damped Gauss–Newton solver for the fit models in this crate.
//!
//! Every model here is tiny (two to six parameters, tens of points) with
//! analytic derivatives, so a Levenberg–Marquardt-style loop over the normal
//! equations is both simpler and easier to audit than a general optimization
//! dependency.  Parameters live in a box and candidate steps are clamped to
//! it, which is how boundary fits (a decay constant pinned at zero) resolve.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Converged state of a least-squares minimization.
#[derive(Clone, Debug)]
pub(crate) struct Solution {
    /// Parameter values at the minimum.
    pub params: Vec<f64>,
    /// Linearized parameter covariance, `(JᵀJ)⁻¹` at the minimum.
    pub covariance: DMatrix<f64>,
    /// Weighted residuals `(y − f)/σ` at the minimum.
    pub residuals: DVector<f64>,
    /// Sum of squared weighted residuals (χ²).
    pub cost: f64,
    /// Outer iterations consumed.
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 200;
const RELATIVE_TOLERANCE: f64 = 1e-10;

/// Minimizes the sum of squared weighted residuals over a parameter box.
///
/// `eval` maps parameters to the weighted residual vector `(yᵢ − f(xᵢ))/σᵢ`
/// and the weighted model Jacobian `∂f(xᵢ)/∂θⱼ / σᵢ`.  Iteration stops when
/// the accepted step's norm falls below 1e-10 relative to the parameter norm,
/// and fails after 200 iterations or when no damping level yields descent.
pub(crate) fn minimize<F>(
    init: &[f64],
    lower: &[f64],
    upper: &[f64],
    mut eval: F,
) -> Result<Solution>
where
    F: FnMut(&[f64]) -> (DVector<f64>, DMatrix<f64>),
{
    let n_params = init.len();
    assert_eq!(lower.len(), n_params);
    assert_eq!(upper.len(), n_params);
    let clamp = |theta: &mut [f64]| {
        for (v, (&lo, &hi)) in theta.iter_mut().zip(lower.iter().zip(upper.iter())) {
            *v = v.clamp(lo, hi);
        }
    };

    let mut theta = init.to_vec();
    clamp(&mut theta);
    let (mut residuals, mut jacobian) = eval(&theta);
    if residuals.len() < n_params {
        return Err(Error::FitFailed(format!(
            "{} points cannot determine {n_params} parameters",
            residuals.len()
        )));
    }
    let mut cost = residuals.norm_squared();
    let mut lambda = 1e-3;

    for iteration in 1..=MAX_ITERATIONS {
        let gradient = jacobian.transpose() * &residuals;
        let hessian = jacobian.transpose() * &jacobian;

        // Escalate damping until a step strictly reduces the cost.  A step
        // that runs into the box gets one active-set re-solve: the clamped
        // parameters stay on their bounds and the damped system is solved
        // again over the free parameters alone, so boundary-pinned fits
        // still optimize the remaining coordinates exactly.
        let mut accepted: Option<Vec<f64>> = None;
        while lambda <= 1e12 {
            let solve_restricted = |free: &[usize]| -> Option<Vec<f64>> {
                let k = free.len();
                let mut h = DMatrix::zeros(k, k);
                let mut g = DVector::zeros(k);
                for (a, &i) in free.iter().enumerate() {
                    g[a] = gradient[i];
                    for (b, &j) in free.iter().enumerate() {
                        h[(a, b)] = hessian[(i, j)];
                    }
                    h[(a, a)] += lambda * hessian[(i, i)].max(1e-12);
                }
                h.lu().solve(&g).map(|step| {
                    let mut full = vec![0.0; n_params];
                    for (a, &i) in free.iter().enumerate() {
                        full[i] = step[a];
                    }
                    full
                })
            };

            let all: Vec<usize> = (0..n_params).collect();
            if let Some(step) = solve_restricted(&all) {
                let mut candidate = theta.clone();
                let mut free = Vec::with_capacity(n_params);
                for i in 0..n_params {
                    let unclamped = theta[i] + step[i];
                    candidate[i] = unclamped.clamp(lower[i], upper[i]);
                    if candidate[i] == unclamped {
                        free.push(i);
                    }
                }
                if free.len() < n_params && !free.is_empty() {
                    if let Some(step) = solve_restricted(&free) {
                        for &i in &free {
                            candidate[i] =
                                (theta[i] + step[i]).clamp(lower[i], upper[i]);
                        }
                    }
                }
                let (r, _) = eval(&candidate);
                if r.norm_squared() < cost {
                    accepted = Some(candidate);
                    break;
                }
            }
            lambda *= 10.0;
        }

        let Some(next) = accepted else {
            // Nothing descends at any damping level: every unclamped
            // direction ascends, so this is the (possibly boundary-pinned)
            // minimum of the box.
            return Ok(finish(theta, residuals, jacobian, cost, iteration));
        };

        let step_norm = theta
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let theta_norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        theta = next;
        let (r, j) = eval(&theta);
        cost = r.norm_squared();
        residuals = r;
        jacobian = j;
        lambda = (lambda / 10.0).max(1e-12);

        if step_norm <= RELATIVE_TOLERANCE * (theta_norm + RELATIVE_TOLERANCE) {
            return Ok(finish(theta, residuals, jacobian, cost, iteration));
        }
    }

    Err(Error::FitFailed(format!(
        "no convergence after {MAX_ITERATIONS} iterations"
    )))
}

fn finish(
    params: Vec<f64>,
    residuals: DVector<f64>,
    jacobian: DMatrix<f64>,
    cost: f64,
    iterations: usize,
) -> Solution {
    let hessian = jacobian.transpose() * &jacobian;
    let covariance = hessian.clone().try_inverse().unwrap_or_else(|| {
        hessian
            .svd(true, true)
            .pseudo_inverse(1e-12)
            .expect("svd of a square matrix always yields a pseudo-inverse")
    });
    Solution { params, covariance, residuals, cost, iterations }
}
