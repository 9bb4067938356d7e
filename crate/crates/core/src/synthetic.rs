//! Synthetic study designs: the twelve-point count grid and the null,
//! clustered and sparse collections built from a few population measures.

use crate::error::{Error, Result};
use crate::inference::{test_h0, BootstrapConfig, Decision, GroupedSample, Method};
use crate::rng::{child_seed, replicate_stream, tags};
use crate::support::{multinomial_counts, Measure, MeasureCollection, SupportSpace};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The grid `{0,1} x {0,1} x {0,1,2}` of cell counts at three sites, in
/// lexicographic order.
pub fn three_d_support() -> Arc<SupportSpace> {
    Arc::new(
        SupportSpace::grid(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0, 2.0]])
            .expect("grid points are distinct"),
    )
}

fn product(support: &Arc<SupportSpace>, axes: [&[f64]; 3]) -> Measure {
    let mut w = Vec::with_capacity(12);
    for &p in axes[0] {
        for &q in axes[1] {
            for &r in axes[2] {
                w.push(p * q * r);
            }
        }
    }
    Measure::with_tolerance(support.clone(), w, 1e-12).expect("product of distributions")
}

/// Two population measures on the twelve-point grid: the second strain
/// shows more induced cells at every site. `W_2^2` between them is 0.8.
pub fn three_d_pair() -> (Measure, Measure) {
    let s = three_d_support();
    let first = product(&s, [&[0.6, 0.4], &[0.5, 0.5], &[0.5, 0.3, 0.2]]);
    let second = product(&s, [&[0.4, 0.6], &[0.5, 0.5], &[0.2, 0.3, 0.5]]);
    (first, second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    /// All `k` measures equal to the first representative.
    Null,
    /// `C` consecutive clusters of `k / C` identical measures.
    Clustered(usize),
    /// The first `k - 1` measures equal, the last one different.
    Sparse,
}

/// Population measures of a design.
pub fn design_measures(design: Design, representatives: &[Measure], k: usize) -> Result<Vec<Measure>> {
    if k < 2 {
        return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
    }
    let need = match design {
        Design::Null => 1,
        Design::Clustered(c) => {
            if c < 2 || k % c != 0 {
                return Err(Error::DivisibilityViolation { k, clusters: c });
            }
            c
        }
        Design::Sparse => 2,
    };
    if representatives.len() < need {
        return Err(Error::InvalidInput(format!(
            "design needs {need} representatives, got {}",
            representatives.len()
        )));
    }
    Ok(match design {
        Design::Null => vec![representatives[0].clone(); k],
        Design::Clustered(c) => (0..k).map(|i| representatives[i / (k / c)].clone()).collect(),
        Design::Sparse => {
            let mut v = vec![representatives[0].clone(); k - 1];
            v.push(representatives[1].clone());
            v
        }
    })
}

/// Empirical measures of independent samples of sizes `sizes`.
pub fn draw_collection<R: Rng + ?Sized>(population: &[Measure], sizes: &[u64], rng: &mut R) -> Result<MeasureCollection> {
    if population.len() != sizes.len() {
        return Err(Error::InvalidInput("one sample size per measure is required".into()));
    }
    let measures = population
        .iter()
        .zip(sizes)
        .map(|(m, &n)| {
            if n == 0 {
                return Err(Error::EmptySample);
            }
            Measure::from_counts(m.support().clone(), &multinomial_counts(m.weights(), n, rng))
        })
        .collect::<Result<Vec<_>>>()?;
    MeasureCollection::from_empirical(measures)
}

/// Raw grouped observations of independent samples of sizes `sizes`.
pub fn draw_grouped<R: Rng + ?Sized>(population: &[Measure], sizes: &[u64], rng: &mut R) -> Result<GroupedSample> {
    GroupedSample::from_collection(&draw_collection(population, sizes, rng)?)
}

/// Outcome of repeated tests on fresh samples from one population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionRate {
    pub trials: usize,
    pub rejections: usize,
    pub rate: f64,
}

/// Runs `trials` independent tests at equal group sizes `n`. Trial `t`
/// draws its data and its resampling seed from streams keyed by
/// `(seed, t)`, so the result does not depend on scheduling.
pub fn rejection_rate(
    population: &[Measure],
    n: u64,
    alpha: f64,
    method: Method,
    cfg: &BootstrapConfig,
    trials: usize,
    seed: u64,
) -> Result<RejectionRate> {
    use rayon::prelude::*;
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let sizes = vec![n; population.len()];
    let outcomes: Vec<Result<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = replicate_stream(seed, tags::SIMULATION, t as u64);
            let data = draw_collection(population, &sizes, &mut rng)?;
            let trial_cfg = BootstrapConfig {
                seed: child_seed(seed, tags::SIMULATION, t as u64),
                ..cfg.clone()
            };
            Ok(test_h0(&data, alpha, method, &trial_cfg)?.decision == Decision::Reject)
        })
        .collect();
    let mut rejections = 0;
    for o in outcomes {
        rejections += usize::from(o?);
    }
    Ok(RejectionRate {
        trials,
        rejections,
        rate: rejections as f64 / trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mot::w2_squared;
    use crate::rng::replicate_stream;

    #[test]
    fn grid_has_twelve_points() {
        let s = three_d_support();
        assert_eq!(s.len(), 12);
        assert_eq!(s.diameter_sq(), 6.0);
        assert_eq!(s.point(5), &[0.0, 1.0, 2.0]);
    }

    #[test]
    fn pair_distance() {
        let (a, b) = three_d_pair();
        assert!((w2_squared(&a, &b).unwrap() - 0.8).abs() < 1e-10);
    }

    #[test]
    fn designs() {
        let (a, b) = three_d_pair();
        let reps = [a.clone(), b.clone()];
        let c = design_measures(Design::Clustered(2), &reps, 4).unwrap();
        assert_eq!(c, vec![a.clone(), a.clone(), b.clone(), b.clone()]);
        let s = design_measures(Design::Sparse, &reps, 3).unwrap();
        assert_eq!(s, vec![a.clone(), a.clone(), b.clone()]);
        assert!(design_measures(Design::Clustered(2), &reps, 3).is_err());
        let mut rng = replicate_stream(4, 4, 4);
        let coll = draw_collection(&c, &[10, 20, 30, 40], &mut rng).unwrap();
        assert_eq!(coll.sizes(), &[10, 20, 30, 40]);
    }
}
