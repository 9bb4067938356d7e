//! Tests of equality of `k` distributions, confidence regions for the MOT
//! value under alternatives, and the closed-form bounds and references that
//! accompany them.

mod bootstrap;
mod bounds;
mod decision;
mod permutation;
mod summary;

pub use bootstrap::{
    derivative_bootstrap_null, mn_bootstrap, subsample_sizes, ub0_null, BootstrapConfig,
    Hypothesis, NullSample,
};
pub use bounds::{
    cutoff_bound, dual_range, ground_constant, power_curve, power_lower_bound, reference_mot,
    DualRange, PowerCurvePoint, ReferenceFamily,
};
pub use decision::{
    confidence_region, quantile, test_h0, ConfidenceInterval, CrMode, Decision, Method, TestResult,
};
pub use permutation::{permutation_test, GroupedSample};
pub use summary::{
    histogram, summarize, HistogramBin, QuantilePoint, ReplicateSummary, HISTOGRAM_BINS, QUANTILE_GRID,
};
