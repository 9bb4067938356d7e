use super::bootstrap::{
    derivative_bootstrap_null, mn_bootstrap, ub0_null, BootstrapConfig, Hypothesis, NullSample,
};
use super::permutation::{permutation_test, GroupedSample};
use crate::error::{Error, Result};
use crate::limit::rate;
use crate::mot::MotSolver;
use crate::support::MeasureCollection;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Source of the null cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Derivative,
    Mn,
    Ub0,
    Permutation,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Derivative => "derivative",
            Method::Mn => "mn",
            Method::Ub0 => "ub0",
            Method::Permutation => "permutation",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "derivative" => Ok(Method::Derivative),
            "mn" => Ok(Method::Mn),
            "ub0" => Ok(Method::Ub0),
            "permutation" => Ok(Method::Permutation),
            other => Err(Error::InvalidInput(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Reject,
    Retain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    pub alpha: f64,
    pub mot_value: f64,
    pub rho_n: f64,
    /// `rho_n MOT(mu_hat)`.
    pub statistic: f64,
    pub cutoff: f64,
    pub decision: Decision,
    pub p_value_estimate: f64,
    /// Null draws on the statistic's scale, in replicate order.
    pub replicate_values: Vec<f64>,
    pub failures: usize,
}

/// Empirical quantile of inverted-CDF type: the order statistic at
/// `ceil(q B)` (1-based), clamped to the sample.
pub fn quantile(values: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidInput(format!("quantile level {q} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let b = sorted.len();
    // guard against q * B landing a hair above an integer
    let pos = ((q * b as f64) - 1e-9).ceil().max(1.0) as usize;
    Ok(sorted[pos.min(b) - 1])
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// Asymptotic or permutation test of equality of the `k` distributions.
///
/// For the asymptotic methods the cut-off is the `1 - alpha` quantile of
/// the null draws and the test rejects when the statistic reaches it. A
/// statistic of exactly zero never rejects: it is the value every null
/// sample attains.
pub fn test_h0(data: &MeasureCollection, alpha: f64, method: Method, cfg: &BootstrapConfig) -> Result<TestResult> {
    check_alpha(alpha)?;
    if method == Method::Permutation {
        let sample = GroupedSample::from_collection(data)?;
        return permutation_test(&sample, cfg.permutations, alpha, cfg);
    }
    let rho_n = rate(data.sizes())?.rho_n;
    let solver = MotSolver::new(data.support().clone(), data.k(), cfg.mot.clone())?;
    let mot_value = solver.value(data)?;
    let statistic = rho_n * mot_value;
    let NullSample { values, failures } = match method {
        Method::Derivative => derivative_bootstrap_null(data, cfg)?,
        Method::Ub0 => ub0_null(data, cfg)?,
        Method::Mn => mn_bootstrap(data, cfg, Hypothesis::Null)?,
        Method::Permutation => unreachable!(),
    };
    let cutoff = quantile(&values, 1.0 - alpha)?;
    let exceed = values.iter().filter(|&&v| v >= statistic).count();
    let decision = if statistic > 0.0 && statistic >= cutoff {
        Decision::Reject
    } else {
        Decision::Retain
    };
    Ok(TestResult {
        method,
        alpha,
        mot_value,
        rho_n,
        statistic,
        cutoff,
        decision,
        p_value_estimate: exceed as f64 / values.len() as f64,
        replicate_values: values,
        failures,
    })
}

/// Scaling of the alternative quantiles in the confidence region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrMode {
    /// `[MOT - q_{1-a/2} / rho_n, MOT - q_{a/2} / rho_n]`, clipped at zero.
    Standard,
    /// `[MOT / rho_n - q_{1-a/2}, MOT / rho_n - q_{a/2}]`.
    Literal,
}

impl FromStr for CrMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(CrMode::Standard),
            "literal" => Ok(CrMode::Literal),
            other => Err(Error::InvalidInput(format!("unknown interval mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub mode: CrMode,
    pub mot_value: f64,
    pub rho_n: f64,
    pub q_low: f64,
    pub q_high: f64,
    pub replicate_values: Vec<f64>,
    pub failures: usize,
}

/// Confidence region for the population MOT value from the m-out-of-n
/// bootstrap under the alternative.
pub fn confidence_region(
    data: &MeasureCollection,
    alpha: f64,
    mode: CrMode,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    let rho_n = rate(data.sizes())?.rho_n;
    let mot_value = MotSolver::new(data.support().clone(), data.k(), cfg.mot.clone())?.value(data)?;
    let NullSample { values, failures } = mn_bootstrap(data, cfg, Hypothesis::Alternative)?;
    let q_low = quantile(&values, alpha / 2.0)?;
    let q_high = quantile(&values, 1.0 - alpha / 2.0)?;
    let (lower, upper) = match mode {
        CrMode::Standard => (
            (mot_value - q_high / rho_n).max(0.0),
            (mot_value - q_low / rho_n).max(0.0),
        ),
        CrMode::Literal => (mot_value / rho_n - q_high, mot_value / rho_n - q_low),
    };
    Ok(ConfidenceInterval {
        lower,
        upper,
        level: 1.0 - alpha,
        mode,
        mot_value,
        rho_n,
        q_low,
        q_high,
        replicate_values: values,
        failures,
    })
}
