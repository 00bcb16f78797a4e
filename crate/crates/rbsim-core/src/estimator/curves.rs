//! Curve fits for the calibration experiments: exponential decays and damped
//! cosines over a restricted time window.
//!
//! Both fits share the damped Gauss–Newton core.  The cosine fit initializes
//! its frequency from a discrete spectral peak of the detrended data, which
//! is the only step that can fail before iteration starts: data without a
//! dominant oscillation has no usable starting frequency.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

use super::nls;

/// A fitted `a·e^(−rate·t) + offset` decay.
#[derive(Clone, Debug)]
pub struct ExponentialFit {
    pub amplitude: f64,
    /// Decay rate in inverse time units.
    pub rate: f64,
    pub offset: f64,
    pub amplitude_stderr: f64,
    pub rate_stderr: f64,
    pub offset_stderr: f64,
    /// Time window the fit was restricted to.
    pub window: (f64, f64),
    /// Points inside the window.
    pub points_used: usize,
    /// Sum of squared weighted residuals.
    pub chi_squared: f64,
    /// True when the windowed data resolves no decay — an exactly constant
    /// curve, or a non-converging iteration on data a constant model already
    /// explains — so the rate is not identified and is reported as zero by
    /// convention.
    pub degenerate: bool,
}

impl ExponentialFit {
    /// The fitted curve at time `t` — also its extrapolation outside the
    /// fitted window.
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * (-self.rate * t).exp() + self.offset
    }

    /// Decay time constant `1/rate`.
    pub fn tau(&self) -> f64 {
        1.0 / self.rate
    }
}

fn windowed(points: &[(f64, f64, f64)], window: (f64, f64)) -> Result<Vec<(f64, f64, f64)>> {
    let mut inside: Vec<(f64, f64, f64)> = points
        .iter()
        .copied()
        .filter(|p| p.0 >= window.0 && p.0 <= window.1)
        .collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(t, _, sigma) in &inside {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "point at t = {t} has non-positive uncertainty {sigma}"
            )));
        }
    }
    Ok(inside)
}

/// Fits `a·e^(−rate·t) + offset` to the points inside the window.
pub fn fit_exponential(
    points: &[(f64, f64, f64)],
    window: (f64, f64),
) -> Result<ExponentialFit> {
    fit_exponential_impl(points, window, true)
}

/// Fits `a·e^(−rate·t)` with the offset pinned at zero, for curves known to
/// decay all the way (ratios of contrasts).
pub fn fit_exponential_through_zero(
    points: &[(f64, f64, f64)],
    window: (f64, f64),
) -> Result<ExponentialFit> {
    fit_exponential_impl(points, window, false)
}

fn fit_exponential_impl(
    points: &[(f64, f64, f64)],
    window: (f64, f64),
    free_offset: bool,
) -> Result<ExponentialFit> {
    let inside = windowed(points, window)?;
    let needed = if free_offset { 3 } else { 2 };
    if inside.len() < needed.max(3) {
        return Err(Error::InsufficientData(format!(
            "exponential fit needs ≥ 3 windowed points, got {}",
            inside.len()
        )));
    }
    let span = inside.last().unwrap().0 - inside[0].0;
    if span <= 0.0 {
        return Err(Error::InvalidParameter(
            "exponential fit needs a nonzero time span".into(),
        ));
    }

    // Perfectly flat data (a noiseless constant curve) pins the level but
    // says nothing about the rate; iterating would wander the amplitude/rate
    // trade-off at zero cost.  Report the level with rate 0 and flag it.
    let spread = inside.iter().map(|p| p.1).fold((f64::INFINITY, f64::NEG_INFINITY), |acc, y| {
        (acc.0.min(y), acc.1.max(y))
    });
    if spread.1 - spread.0 < 1e-12 {
        return Ok(level_only_fit(&inside, window, free_offset).0);
    }

    let c0 = if free_offset { inside.last().unwrap().1 } else { 0.0 };
    let a0 = inside[0].1 - c0;
    let r0 = initial_rate(&inside, a0, c0).unwrap_or(1.0 / span);

    let (init, lower, upper): (Vec<f64>, Vec<f64>, Vec<f64>) = if free_offset {
        (
            vec![a0, r0, c0],
            vec![f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY],
            vec![f64::INFINITY; 3],
        )
    } else {
        (vec![a0, r0], vec![f64::NEG_INFINITY, 0.0], vec![f64::INFINITY; 2])
    };

    let solution = match nls::minimize(&init, &lower, &upper, |theta| {
        let (a, r) = (theta[0], theta[1]);
        let c = if free_offset { theta[2] } else { 0.0 };
        let res = DVector::from_iterator(
            inside.len(),
            inside
                .iter()
                .map(|&(t, y, sigma)| (y - (a * (-r * t).exp() + c)) / sigma),
        );
        let jac = DMatrix::from_fn(inside.len(), init.len(), |i, col| {
            let (t, _, sigma) = inside[i];
            let e = (-r * t).exp();
            match col {
                0 => e / sigma,
                1 => -a * t * e / sigma,
                _ => 1.0 / sigma,
            }
        });
        (res, jac)
    }) {
        Ok(solution) => solution,
        // Data that only scatters around a constant leaves the amplitude/rate
        // trade-off without a minimum, so the iteration exhausts itself.
        // That is an unresolvable decay, not a failure: report the level with
        // rate 0 when a constant already explains the data within its error
        // bars.  Anything with real structure keeps the original error.
        Err(err) => {
            let (fit, chi_squared_constant) =
                level_only_fit(&inside, window, free_offset);
            let dof = (inside.len() - 1) as f64;
            return if chi_squared_constant <= dof + 5.0 * (2.0 * dof).sqrt() {
                Ok(fit)
            } else {
                Err(err)
            };
        }
    };

    let stderr = |k: usize| solution.covariance[(k, k)].max(0.0).sqrt();
    Ok(ExponentialFit {
        amplitude: solution.params[0],
        rate: solution.params[1],
        offset: if free_offset { solution.params[2] } else { 0.0 },
        amplitude_stderr: stderr(0),
        rate_stderr: stderr(1),
        offset_stderr: if free_offset { stderr(2) } else { 0.0 },
        window,
        points_used: inside.len(),
        chi_squared: solution.cost,
        degenerate: false,
    })
}

/// The degenerate level-only fit: rate 0, the weighted mean as the constant
/// term (in the offset, or in the amplitude when the offset is pinned), and
/// the constant model's chi-squared both stored and returned.
fn level_only_fit(
    inside: &[(f64, f64, f64)],
    window: (f64, f64),
    free_offset: bool,
) -> (ExponentialFit, f64) {
    let weight: f64 = inside.iter().map(|p| 1.0 / (p.2 * p.2)).sum();
    let level: f64 =
        inside.iter().map(|p| p.1 / (p.2 * p.2)).sum::<f64>() / weight;
    let level_stderr = (1.0 / weight).sqrt();
    let chi_squared: f64 = inside
        .iter()
        .map(|&(_, y, sigma)| ((y - level) / sigma).powi(2))
        .sum();
    let fit = ExponentialFit {
        amplitude: if free_offset { 0.0 } else { level },
        rate: 0.0,
        offset: if free_offset { level } else { 0.0 },
        amplitude_stderr: if free_offset { 0.0 } else { level_stderr },
        rate_stderr: 0.0,
        offset_stderr: if free_offset { level_stderr } else { 0.0 },
        window,
        points_used: inside.len(),
        chi_squared,
        degenerate: true,
    };
    (fit, chi_squared)
}

/// Log-linear slope of `ln((y − c)/a)` over the points where that is
/// defined; `None` when fewer than two qualify.
fn initial_rate(points: &[(f64, f64, f64)], a: f64, c: f64) -> Option<f64> {
    if a == 0.0 {
        return None;
    }
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|&(t, y, _)| {
            let z = (y - c) / a;
            (z > 1e-3).then(|| (t, z.ln()))
        })
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    let slope = (n * sxy - sx * sy) / denom;
    (slope < 0.0).then_some(-slope)
}

/// Envelope family of a damped cosine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayOrder {
    /// `exp(−b₁t)`.
    Exponential,
    /// `exp(−b₁t − b₂t²)` — first- and second-order decay together.
    LinearPlusQuadratic,
}

/// A fitted `offset + amplitude·env(t)·cos(2πft + phase)` curve.
#[derive(Clone, Debug)]
pub struct DampedCosineFit {
    pub offset: f64,
    pub amplitude: f64,
    /// Oscillation frequency in inverse time units (not angular).
    pub frequency: f64,
    pub phase: f64,
    /// Envelope exponents `[b₁, b₂]`; `b₂` is zero for the exponential order.
    pub decay: [f64; 2],
    pub order: DecayOrder,
    pub frequency_stderr: f64,
    /// Standard errors of `[b₁, b₂]`.
    pub decay_stderr: [f64; 2],
    pub window: (f64, f64),
    pub points_used: usize,
    pub chi_squared: f64,
}

impl DampedCosineFit {
    /// The envelope at time `t`.
    pub fn envelope(&self, t: f64) -> f64 {
        (-self.decay[0] * t - self.decay[1] * t * t).exp()
    }

    /// The fitted curve at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.offset
            + self.amplitude
                * self.envelope(t)
                * (std::f64::consts::TAU * self.frequency * t + self.phase).cos()
    }

    /// Error-probability contribution of the envelope loss over one step of
    /// duration `tau_step`: `(1 − env(τ))/2`.
    pub fn per_step_contribution(&self, tau_step: f64) -> f64 {
        (1.0 - self.envelope(tau_step)) / 2.0
    }
}

/// Fits a damped cosine to the points inside the window.
///
/// The frequency starts from the peak of a discrete periodogram of the
/// mean-subtracted data; an error is returned when no dominant peak exists.
pub fn fit_damped_cosine(
    points: &[(f64, f64, f64)],
    window: (f64, f64),
    order: DecayOrder,
) -> Result<DampedCosineFit> {
    let inside = windowed(points, window)?;
    if inside.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "damped-cosine fit needs ≥ 6 windowed points, got {}",
            inside.len()
        )));
    }
    let span = inside.last().unwrap().0 - inside[0].0;
    if span <= 0.0 {
        return Err(Error::InvalidParameter(
            "damped-cosine fit needs a nonzero time span".into(),
        ));
    }

    let mean = inside.iter().map(|p| p.1).sum::<f64>() / inside.len() as f64;
    let (f0, coefficient) = spectral_peak(&inside, mean, span)?;
    let a0 = 2.0 * coefficient.norm() / inside.len() as f64;
    let phi0 = coefficient.arg();
    let n_params = match order {
        DecayOrder::Exponential => 5,
        DecayOrder::LinearPlusQuadratic => 6,
    };
    let mut init = vec![mean, a0, f0, phi0, 0.1 / span];
    let mut lower = vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY, 0.0];
    let mut upper = vec![f64::INFINITY; 5];
    if n_params == 6 {
        init.push(0.0);
        lower.push(0.0);
        upper.push(f64::INFINITY);
    }

    let solution = nls::minimize(&init, &lower, &upper, |theta| {
        let (c, a, f, phi, b1) = (theta[0], theta[1], theta[2], theta[3], theta[4]);
        let b2 = if n_params == 6 { theta[5] } else { 0.0 };
        let res = DVector::from_iterator(
            inside.len(),
            inside.iter().map(|&(t, y, sigma)| {
                let env = (-b1 * t - b2 * t * t).exp();
                let angle = std::f64::consts::TAU * f * t + phi;
                (y - (c + a * env * angle.cos())) / sigma
            }),
        );
        let jac = DMatrix::from_fn(inside.len(), n_params, |i, col| {
            let (t, _, sigma) = inside[i];
            let env = (-b1 * t - b2 * t * t).exp();
            let angle = std::f64::consts::TAU * f * t + phi;
            let (sin, cos) = angle.sin_cos();
            let deriv = match col {
                0 => 1.0,
                1 => env * cos,
                2 => -a * env * sin * std::f64::consts::TAU * t,
                3 => -a * env * sin,
                4 => -t * a * env * cos,
                _ => -t * t * a * env * cos,
            };
            deriv / sigma
        });
        (res, jac)
    })?;

    let stderr = |k: usize| solution.covariance[(k, k)].max(0.0).sqrt();
    Ok(DampedCosineFit {
        offset: solution.params[0],
        amplitude: solution.params[1],
        frequency: solution.params[2],
        phase: solution.params[3],
        decay: [
            solution.params[4],
            if n_params == 6 { solution.params[5] } else { 0.0 },
        ],
        order,
        frequency_stderr: stderr(2),
        decay_stderr: [stderr(4), if n_params == 6 { stderr(5) } else { 0.0 }],
        window,
        points_used: inside.len(),
        chi_squared: solution.cost,
    })
}

/// Peak of the discrete periodogram of the mean-subtracted data.
///
/// Scans an oversampled frequency grid up to the Nyquist limit of the
/// closest point spacing; the peak must not sit at the lowest scanned
/// frequency (that is a trend, not an oscillation) and must rise clearly
/// above the mean spectral power.
fn spectral_peak(
    points: &[(f64, f64, f64)],
    mean: f64,
    span: f64,
) -> Result<(f64, num_complex::Complex64)> {
    let min_gap = points
        .windows(2)
        .map(|w| w[1].0 - w[0].0)
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_gap.is_finite() {
        return Err(Error::InvalidParameter(
            "damped-cosine fit needs at least two distinct times".into(),
        ));
    }
    let df = 1.0 / (8.0 * span);
    let f_max = 0.5 / min_gap;
    // Standard DFT convention Σ(y−ȳ)e^(−2πift): for y ≈ a·cos(2πft + φ) the
    // coefficient at the true frequency is ≈ (n·a/2)·e^(iφ), so its argument
    // initializes the phase directly.
    let coefficient_at = |f: f64| -> num_complex::Complex64 {
        points
            .iter()
            .map(|&(t, y, _)| {
                let angle = std::f64::consts::TAU * f * t;
                num_complex::Complex64::new(
                    (y - mean) * angle.cos(),
                    -(y - mean) * angle.sin(),
                )
            })
            .sum()
    };
    let mut best = (0.0, 0.0);
    let mut total_power = 0.0;
    let mut count = 0usize;
    let mut k = 1usize;
    while (k as f64) * df <= f_max {
        let f = k as f64 * df;
        let power = coefficient_at(f).norm_sqr();
        total_power += power;
        count += 1;
        if power > best.1 {
            best = (f, power);
        }
        k += 1;
    }
    if count < 4 {
        return Err(Error::InsufficientData(
            "frequency grid too small for spectral initialization".into(),
        ));
    }
    let mean_power = total_power / count as f64;
    if best.0 <= df * 1.5 || best.1 <= 4.0 * mean_power {
        return Err(Error::FitFailed(
            "no dominant spectral peak to initialize the oscillation frequency".into(),
        ));
    }
    Ok((best.0, coefficient_at(best.0)))
}
