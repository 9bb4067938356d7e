use crate::error::{Error, Result};
use crate::limit::{null_directions, rate, NullLimitProgram, Ub0Program, build_ub0};
use crate::mot::{MotOptions, MotSolver};
use crate::rng::{replicate_stream, tags, Stream};
use crate::support::{multinomial_counts, Measure, MeasureCollection};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    /// Number of replicates `B`.
    pub replicates: usize,
    /// Number of label permutations `R` for the permutation test.
    pub permutations: usize,
    /// Exponent `p` of the subsample sizes `m_i = n_i^p`.
    pub subsample_exponent: f64,
    pub seed: u64,
    /// Draw the relaxed null on the same streams as the derivative bootstrap.
    pub coupled: bool,
    /// Resample the pooled data instead of the first group in the null
    /// bootstraps.
    pub pool_all: bool,
    pub mot: MotOptions,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            replicates: 500,
            permutations: 999,
            subsample_exponent: 0.5,
            seed: 0,
            coupled: false,
            pool_all: false,
            mot: MotOptions::default(),
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidInput("replicates must be at least 1".into()));
        }
        if !(self.subsample_exponent > 0.0 && self.subsample_exponent < 1.0) {
            return Err(Error::InvalidInput(format!(
                "subsample exponent must lie in (0, 1), got {}",
                self.subsample_exponent
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    Null,
    Alternative,
}

/// Replicate values in replicate order, plus the number of replicates whose
/// solve failed (those are left out of `values`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSample {
    pub values: Vec<f64>,
    pub failures: usize,
}

pub(crate) fn run_replicates<F>(count: usize, f: F) -> Result<NullSample>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let out: Vec<Result<f64>> = (0..count).into_par_iter().map(&f).collect();
    let mut values = Vec::with_capacity(count);
    let mut failures = 0;
    let mut first = None;
    for r in out {
        match r {
            Ok(v) => values.push(v),
            Err(e) => {
                failures += 1;
                first.get_or_insert(e);
            }
        }
    }
    match first {
        Some(e) if values.is_empty() => Err(e),
        _ => Ok(NullSample { values, failures }),
    }
}

/// `m_i = floor(n_i^p)`, at least 1.
pub fn subsample_sizes(sizes: &[u64], p: f64) -> Vec<u64> {
    sizes
        .iter()
        .map(|&n| {
            let x = (n as f64).powf(p);
            let r = x.round();
            let m = if (x - r).abs() < 1e-9 * r.max(1.0) { r } else { x.floor() };
            (m as u64).max(1)
        })
        .collect()
}

/// Base measure and resample size for the null bootstraps.
fn null_base(data: &MeasureCollection, cfg: &BootstrapConfig) -> Result<(Measure, u64)> {
    if cfg.pool_all {
        let pooled = data.pooled()?;
        let n = data.sizes().iter().sum();
        Ok((pooled, n))
    } else {
        Ok((data.measure(0).clone(), data.sizes()[0]))
    }
}

fn resampled_weights(base: &Measure, n: u64, rng: &mut Stream) -> Vec<f64> {
    let counts = multinomial_counts(base.weights(), n, rng);
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

fn all_zero(g: &[Vec<f64>]) -> bool {
    g.iter().all(|gi| gi.iter().all(|&x| x == 0.0))
}

/// Derivative bootstrap for the null limit: resample the first group at its
/// own size, draw Gaussian directions from the resampled covariance, and
/// solve the null limit program with the estimated weights `a_i`.
pub fn derivative_bootstrap_null(data: &MeasureCollection, cfg: &BootstrapConfig) -> Result<NullSample> {
    cfg.validate()?;
    let k = data.k();
    let a = rate(data.sizes())?.a;
    let (base, n) = null_base(data, cfg)?;
    let program = NullLimitProgram::with_options(data.support().clone(), k, &cfg.mot)?;
    run_replicates(cfg.replicates, |r| {
        let mut rng = replicate_stream(cfg.seed, tags::DERIVATIVE, r as u64);
        let w = resampled_weights(&base, n, &mut rng);
        let g = null_directions(&w, k, &mut rng);
        if all_zero(&g) {
            return Ok(0.0);
        }
        program.value(&g, &a)
    })
}

/// Samples of the relaxed null `UB_0` with the derivative-bootstrap draws.
/// With `cfg.coupled` the streams are those of [`derivative_bootstrap_null`],
/// so replicate `r` of both methods sees the same directions.
pub fn ub0_null(data: &MeasureCollection, cfg: &BootstrapConfig) -> Result<NullSample> {
    cfg.validate()?;
    let k = data.k();
    let a = rate(data.sizes())?.a;
    let (base, n) = null_base(data, cfg)?;
    let program: Ub0Program = build_ub0(data.support(), k)?;
    let tag = if cfg.coupled { tags::DERIVATIVE } else { tags::UB0 };
    run_replicates(cfg.replicates, |r| {
        let mut rng = replicate_stream(cfg.seed, tag, r as u64);
        let w = resampled_weights(&base, n, &mut rng);
        let g = null_directions(&w, k, &mut rng);
        if all_zero(&g) {
            return Ok(0.0);
        }
        program.value(&g, &a)
    })
}

/// m-out-of-n bootstrap. Under the null every group is resampled from the
/// first empirical measure and the replicate is `rho_m MOT*`; under the
/// alternative group `i` is resampled from its own empirical measure and the
/// replicate is `rho_m (MOT* - MOT(mu_hat))`.
pub fn mn_bootstrap(data: &MeasureCollection, cfg: &BootstrapConfig, hypothesis: Hypothesis) -> Result<NullSample> {
    cfg.validate()?;
    let m = subsample_sizes(data.sizes(), cfg.subsample_exponent);
    let rho_m = rate(&m)?.rho_n;
    let solver = MotSolver::new(data.support().clone(), data.k(), cfg.mot.clone())?;
    let (center, tag) = match hypothesis {
        Hypothesis::Null => (0.0, tags::MN_NULL),
        Hypothesis::Alternative => (solver.value(data)?, tags::MN_ALT),
    };
    let support = data.support().clone();
    run_replicates(cfg.replicates, |r| {
        let mut rng = replicate_stream(cfg.seed, tag, r as u64);
        let measures = (0..data.k())
            .map(|i| {
                let source = match hypothesis {
                    Hypothesis::Null => data.measure(0),
                    Hypothesis::Alternative => data.measure(i),
                };
                let counts = multinomial_counts(source.weights(), m[i], &mut rng);
                Measure::from_counts(support.clone(), &counts)
            })
            .collect::<Result<Vec<_>>>()?;
        let star = MeasureCollection::new(measures, m.clone())?;
        Ok(rho_m * (solver.value(&star)? - center))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::support::SupportSpace;
    use std::sync::Arc;

    #[test]
    fn subsample_examples() {
        assert_eq!(subsample_sizes(&[400, 900], 0.5), vec![20, 30]);
        assert_eq!(subsample_sizes(&[1, 2], 0.5), vec![1, 1]);
        assert_eq!(subsample_sizes(&[1000], 1.0 / 3.0), vec![10]);
    }

    #[test]
    fn point_masses_give_zero_replicates() {
        let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 2.0]).unwrap());
        let d = Measure::dirac(s, 2).unwrap();
        let data = MeasureCollection::new(vec![d.clone(), d.clone(), d], vec![30, 40, 50]).unwrap();
        let cfg = BootstrapConfig {
            replicates: 20,
            ..BootstrapConfig::default()
        };
        for sample in [
            derivative_bootstrap_null(&data, &cfg).unwrap(),
            ub0_null(&data, &cfg).unwrap(),
            mn_bootstrap(&data, &cfg, Hypothesis::Null).unwrap(),
            mn_bootstrap(&data, &cfg, Hypothesis::Alternative).unwrap(),
        ] {
            assert_eq!(sample.values, vec![0.0; 20]);
            assert_eq!(sample.failures, 0);
        }
    }

    #[test]
    fn invalid_configs() {
        let cfg = BootstrapConfig {
            replicates: 0,
            ..BootstrapConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = BootstrapConfig {
            subsample_exponent: 1.0,
            ..BootstrapConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
