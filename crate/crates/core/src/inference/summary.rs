//! Summaries of replicate draws for reporting.

use super::decision::quantile;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Quantile levels reported for every replicate sample.
pub const QUANTILE_GRID: [f64; 13] = [
    0.0, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99, 1.0,
];

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub level: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Count, moments, quantile grid and histogram of replicate values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub count: usize,
    pub failures: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `count - 1`).
    pub sd: f64,
    pub quantiles: Vec<QuantilePoint>,
    pub histogram: Vec<HistogramBin>,
}

/// Equal-width bins over `[min, max]`; the last bin is closed.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if bins == 0 {
        return Err(Error::InvalidInput("at least one histogram bin is required".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == lo {
        return Ok(vec![HistogramBin {
            lower: lo,
            upper: hi,
            count: values.len(),
        }]);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(b, count)| HistogramBin {
            lower: lo + b as f64 * width,
            upper: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            count,
        })
        .collect())
}

pub fn summarize(values: &[f64], failures: usize) -> Result<ReplicateSummary> {
    let count = values.len();
    if count == 0 {
        return Err(Error::EmptySample);
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let sd = if count > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
    } else {
        0.0
    };
    let quantiles = QUANTILE_GRID
        .iter()
        .map(|&level| Ok(QuantilePoint { level, value: quantile(values, level)? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateSummary {
        count,
        failures,
        mean,
        sd,
        quantiles,
        histogram: histogram(values, HISTOGRAM_BINS)?,
    })
}
