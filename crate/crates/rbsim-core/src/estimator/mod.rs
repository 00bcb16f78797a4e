//! Turning raw run records into an error-per-gate estimate with uncertainty.
//!
//! The pipeline is: [`aggregate`] means over the `(j, l_k, m)` grid,
//! [`fit_decay`] a weighted two-parameter exponential decay over length,
//! [`bootstrap_epg`] a nonparametric resampling uncertainty for the headline
//! number, and [`scatter_diagnostic`] a per-length check of whether the
//! sequence-to-sequence spread looks depolarizing (binomial-sized) or
//! coherent (order-unity, uniform-like).  [`curves`] holds the window-
//! restricted exponential and damped-cosine fits the calibration
//! experiments report through.

pub mod aggregate;
pub mod bootstrap;
pub mod curves;
pub mod decay;
mod nls;
pub mod record;
pub mod scatter;

pub use aggregate::{aggregate, Aggregates, LengthSummary};
pub use bootstrap::{bootstrap_epg, Bootstrap};
pub use curves::{
    fit_damped_cosine, fit_exponential, fit_exponential_through_zero, DampedCosineFit,
    DecayOrder, ExponentialFit,
};
pub use decay::{decay_model, fit_decay, fit_records, DecayFit};
pub use record::ExperimentRecord;
pub use scatter::{scatter_diagnostic, ScatterClass, ScatterReport};
