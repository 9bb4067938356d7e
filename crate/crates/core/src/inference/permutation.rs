use super::bootstrap::{run_replicates, BootstrapConfig};
use super::decision::{quantile, Decision, Method, TestResult};
use crate::error::{Error, Result};
use crate::limit::rate;
use crate::mot::MotSolver;
use crate::rng::{replicate_stream, tags};
use crate::support::{Measure, MeasureCollection, SupportSpace};
use rand::seq::SliceRandom;
use std::sync::Arc;

/// Raw observations as support indices, one list per group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    support: Arc<SupportSpace>,
    groups: Vec<Vec<usize>>,
}

impl GroupedSample {
    pub fn new(support: Arc<SupportSpace>, groups: Vec<Vec<usize>>) -> Result<Self> {
        if groups.len() < 2 {
            return Err(Error::InvalidSize(format!("need at least two groups, got {}", groups.len())));
        }
        if groups.iter().any(Vec::is_empty) {
            return Err(Error::EmptySample);
        }
        let n = support.len();
        if let Some(&bad) = groups.iter().flatten().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, size: n });
        }
        Ok(GroupedSample { support, groups })
    }

    /// Expands empirical measures into observations, each support point
    /// repeated by its count `n_i mu_i(x)`.
    pub fn from_collection(data: &MeasureCollection) -> Result<Self> {
        let groups = data
            .measures()
            .iter()
            .zip(data.sizes())
            .map(|(m, &n)| {
                let mut rows = Vec::with_capacity(n as usize);
                for (j, &w) in m.weights().iter().enumerate() {
                    let c = w * n as f64;
                    if (c - c.round()).abs() > 1e-6 {
                        return Err(Error::InvalidInput(
                            "weights are not counts over the stated sample size".into(),
                        ));
                    }
                    rows.extend(std::iter::repeat_n(j, c.round() as usize));
                }
                if rows.len() as u64 != n {
                    return Err(Error::InvalidInput("counts do not add up to the sample size".into()));
                }
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()?;
        GroupedSample::new(data.support().clone(), groups)
    }

    pub fn support(&self) -> &Arc<SupportSpace> {
        &self.support
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.groups.iter().map(|g| g.len() as u64).collect()
    }

    fn collection_of(&self, groups: &[&[usize]]) -> Result<MeasureCollection> {
        let measures = groups
            .iter()
            .map(|g| {
                let mut counts = vec![0u64; self.support.len()];
                for &i in g.iter() {
                    counts[i] += 1;
                }
                Measure::from_counts(self.support.clone(), &counts)
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureCollection::from_empirical(measures)
    }

    pub fn to_collection(&self) -> Result<MeasureCollection> {
        let refs: Vec<&[usize]> = self.groups.iter().map(Vec::as_slice).collect();
        self.collection_of(&refs)
    }
}

/// Permutation test: group labels are shuffled `permutations` times, and
/// `p = (1 + #{MOT(perm) >= MOT(obs)}) / (1 + R)`. The test rejects when
/// `p <= alpha`.
pub fn permutation_test(
    sample: &GroupedSample,
    permutations: usize,
    alpha: f64,
    cfg: &BootstrapConfig,
) -> Result<TestResult> {
    if permutations == 0 {
        return Err(Error::InvalidInput("at least one permutation is required".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let observed = sample.to_collection()?;
    let k = observed.k();
    let rho_n = rate(observed.sizes())?.rho_n;
    let solver = MotSolver::new(sample.support.clone(), k, cfg.mot.clone())?;
    let mot_value = solver.value(&observed)?;
    let pooled: Vec<usize> = sample.groups.iter().flatten().copied().collect();
    let sizes: Vec<usize> = sample.groups.iter().map(Vec::len).collect();
    let draws = run_replicates(permutations, |r| {
        let mut rng = replicate_stream(cfg.seed, tags::PERMUTATION, r as u64);
        let mut labels = pooled.clone();
        labels.shuffle(&mut rng);
        let mut parts: Vec<&[usize]> = Vec::with_capacity(k);
        let mut rest = labels.as_slice();
        for &s in &sizes {
            let (head, tail) = rest.split_at(s);
            parts.push(head);
            rest = tail;
        }
        Ok(solver.value(&sample.collection_of(&parts)?)?)
    })?;
    if draws.failures > 0 {
        return Err(Error::SolverFailure {
            reason: format!("{} permutation solves failed", draws.failures),
            iterations: 0,
            rows: 0,
        });
    }
    // permuted values equal to the observed one up to rounding count as ties
    let tol = 1e-10 * (1.0 + mot_value.abs());
    let exceed = draws.values.iter().filter(|&&v| v >= mot_value - tol).count();
    let p = (1 + exceed) as f64 / (1 + permutations) as f64;
    let scaled: Vec<f64> = draws.values.iter().map(|v| rho_n * v).collect();
    Ok(TestResult {
        method: Method::Permutation,
        alpha,
        mot_value,
        rho_n,
        statistic: rho_n * mot_value,
        cutoff: quantile(&scaled, 1.0 - alpha)?,
        decision: if p <= alpha { Decision::Reject } else { Decision::Retain },
        p_value_estimate: p,
        replicate_values: scaled,
        failures: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expands_counts() {
        let s = Arc::new(SupportSpace::from_scalars(&[5.0, 10.0]).unwrap());
        let a = Measure::from_counts(s.clone(), &[2, 1]).unwrap();
        let b = Measure::from_counts(s.clone(), &[0, 1]).unwrap();
        let c = MeasureCollection::from_empirical(vec![a, b]).unwrap();
        let g = GroupedSample::from_collection(&c).unwrap();
        assert_eq!(g.groups(), &[vec![0, 0, 1], vec![1]]);
        assert_eq!(g.to_collection().unwrap().measures(), c.measures());
    }

    #[test]
    fn zero_permutations_rejected() {
        let s = Arc::new(SupportSpace::from_scalars(&[5.0, 10.0]).unwrap());
        let g = GroupedSample::new(s, vec![vec![0, 1], vec![1]]).unwrap();
        assert!(permutation_test(&g, 0, 0.05, &BootstrapConfig::default()).is_err());
    }

    #[test]
    fn identical_groups_never_reject() {
        let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0, 4.0]).unwrap());
        let g = GroupedSample::new(s, vec![vec![0, 1, 2, 2], vec![2, 1, 0, 2]]).unwrap();
        let r = permutation_test(&g, 19, 0.05, &BootstrapConfig::default()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value_estimate, 1.0);
        assert_eq!(r.decision, Decision::Retain);
    }
}
