//! Finite supports, probability vectors on them, and the two stochastic
//! primitives used everywhere else: multinomial resampling and draws from the
//! Gaussian limit of the multinomial process.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use std::sync::Arc;

/// Tolerance on `sum(weights) == 1`.
pub const WEIGHT_TOL: f64 = 1e-12;

/// Ordered finite ground set `{x_1, ..., x_N}` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSpace {
    points: Vec<Vec<f64>>,
    dim: usize,
}

fn canonical(v: f64) -> f64 {
    // -0.0 and 0.0 are the same support coordinate
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

impl SupportSpace {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSize("support needs at least one point".into()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidSize("support points need at least one coordinate".into()));
        }
        let mut pts = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "support point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput(format!("support point {i} is not finite")));
            }
            pts.push(p.into_iter().map(canonical).collect::<Vec<_>>());
        }
        for i in 0..pts.len() {
            for j in 0..i {
                if pts[i] == pts[j] {
                    return Err(Error::DuplicateSupportPoint(i));
                }
            }
        }
        Ok(SupportSpace { points: pts, dim })
    }

    /// One-dimensional support from scalars.
    pub fn from_scalars(xs: &[f64]) -> Result<Self> {
        SupportSpace::new(xs.iter().map(|&x| vec![x]).collect())
    }

    /// Cartesian grid, first axis varying slowest.
    pub fn grid(axes: &[Vec<f64>]) -> Result<Self> {
        let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in axes {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        SupportSpace::new(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn sq_dist(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Matrix of pairwise squared distances.
    pub fn sq_dist_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (0..n).map(|i| (0..n).map(|j| self.sq_dist(i, j)).collect()).collect()
    }

    pub fn diameter_sq(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                d = d.max(self.sq_dist(i, j));
            }
        }
        d
    }

    /// Position of `row`, by exact coordinate equality.
    pub fn index_of(&self, row: &[f64]) -> Option<usize> {
        if row.len() != self.dim {
            return None;
        }
        self.points
            .iter()
            .position(|p| p.iter().zip(row).all(|(a, b)| *a == canonical(*b)))
    }
}

/// Probability vector over a shared support.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    weights: Vec<f64>,
    support: Arc<SupportSpace>,
    sample_size: Option<u64>,
}

impl Measure {
    pub fn new(support: Arc<SupportSpace>, weights: Vec<f64>) -> Result<Self> {
        Measure::with_tolerance(support, weights, WEIGHT_TOL)
    }

    /// Like `new`, accepting `|sum - 1| <= tol`; the weights are renormalized.
    pub fn with_tolerance(support: Arc<SupportSpace>, weights: Vec<f64>, tol: f64) -> Result<Self> {
        if weights.len() != support.len() {
            return Err(Error::InvalidInput(format!(
                "measure has {} weights but the support has {} points",
                weights.len(),
                support.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput("weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!("weights sum to {total}, not 1")));
        }
        let weights = if total == 1.0 {
            weights
        } else {
            weights.into_iter().map(|w| w / total).collect()
        };
        Ok(Measure {
            weights,
            support,
            sample_size: None,
        })
    }

    /// Point mass at support index `i`.
    pub fn dirac(support: Arc<SupportSpace>, i: usize) -> Result<Self> {
        if i >= support.len() {
            return Err(Error::IndexOutOfRange { index: i, size: support.len() });
        }
        let mut w = vec![0.0; support.len()];
        w[i] = 1.0;
        Measure::new(support, w)
    }

    /// Empirical measure from counts.
    pub fn from_counts(support: Arc<SupportSpace>, counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let w = counts.iter().map(|&c| c as f64 / n as f64).collect();
        let mut m = Measure::with_tolerance(support, w, 1e-9)?;
        m.sample_size = Some(n);
        Ok(m)
    }

    pub fn with_sample_size(mut self, n: u64) -> Self {
        self.sample_size = Some(n);
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn support(&self) -> &Arc<SupportSpace> {
        &self.support
    }

    pub fn sample_size(&self) -> Option<u64> {
        self.sample_size
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Index of the single atom when the measure is a point mass.
    pub fn point_mass_index(&self) -> Option<usize> {
        let mut idx = None;
        for (i, &w) in self.weights.iter().enumerate() {
            if w > 0.0 {
                if idx.is_some() {
                    return None;
                }
                idx = Some(i);
            }
        }
        idx
    }

    pub fn l1_distance(&self, other: &Measure) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// `k >= 2` measures over one support, with their sample sizes.
#[derive(Debug, Clone)]
pub struct MeasureCollection {
    measures: Vec<Measure>,
    sizes: Vec<u64>,
}

impl MeasureCollection {
    pub fn new(measures: Vec<Measure>, sizes: Vec<u64>) -> Result<Self> {
        if measures.len() < 2 {
            return Err(Error::InvalidSize(format!(
                "need at least two measures, got {}",
                measures.len()
            )));
        }
        if sizes.len() != measures.len() {
            return Err(Error::InvalidInput("one sample size per measure is required".into()));
        }
        if let Some(i) = sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidSize(format!("group {i} has sample size 0")));
        }
        let first = measures[0].support.clone();
        for m in &measures[1..] {
            if !Arc::ptr_eq(&first, &m.support) && *first != *m.support {
                return Err(Error::SupportMismatch);
            }
        }
        Ok(MeasureCollection { measures, sizes })
    }

    /// Uses each measure's recorded sample size.
    pub fn from_empirical(measures: Vec<Measure>) -> Result<Self> {
        let sizes = measures
            .iter()
            .map(|m| {
                m.sample_size
                    .ok_or_else(|| Error::InvalidInput("measure has no sample size".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        MeasureCollection::new(measures, sizes)
    }

    /// Collection of population measures where sizes do not matter.
    pub fn without_sizes(measures: Vec<Measure>) -> Result<Self> {
        let k = measures.len();
        MeasureCollection::new(measures, vec![1; k])
    }

    pub fn k(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn measure(&self, i: usize) -> &Measure {
        &self.measures[i]
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn support(&self) -> &Arc<SupportSpace> {
        &self.measures[0].support
    }

    /// Stacked weights `(mu_1, ..., mu_k)`.
    pub fn stacked(&self) -> Vec<f64> {
        self.measures.iter().flat_map(|m| m.weights.iter().copied()).collect()
    }

    /// Same collection with the measures reordered by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        MeasureCollection::new(
            perm.iter().map(|&i| self.measures[i].clone()).collect(),
            perm.iter().map(|&i| self.sizes[i]).collect(),
        )
    }

    /// Size-weighted average of the measures.
    pub fn pooled(&self) -> Result<Measure> {
        let total: f64 = self.sizes.iter().map(|&n| n as f64).sum();
        let n = self.support().len();
        let mut w = vec![0.0; n];
        for (m, &s) in self.measures.iter().zip(&self.sizes) {
            for (acc, x) in w.iter_mut().zip(&m.weights) {
                *acc += x * s as f64 / total;
            }
        }
        Ok(Measure::with_tolerance(self.support().clone(), w, 1e-9)?
            .with_sample_size(self.sizes.iter().sum()))
    }
}

/// One realization of the centered Gaussian with covariance
/// `diag(mu) - mu mu'`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLimitDraw {
    pub g: Vec<f64>,
}

/// Empirical measure of `rows` over `support`.
pub fn empirical_measure(rows: &[Vec<f64>], support: &Arc<SupportSpace>) -> Result<Measure> {
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0u64; support.len()];
    for (r, row) in rows.iter().enumerate() {
        let i = support
            .index_of(row)
            .ok_or(Error::UnknownSupportPoint { row: r })?;
        counts[i] += 1;
    }
    Measure::from_counts(support.clone(), &counts)
}

/// Multinomial counts of `m` draws from `weights`, by sequential binomials.
pub fn multinomial_counts<R: Rng + ?Sized>(weights: &[f64], m: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0u64; weights.len()];
    let mut left = m;
    let mut mass = 1.0f64;
    let last = weights.iter().rposition(|&w| w > 0.0);
    for (j, &w) in weights.iter().enumerate() {
        if left == 0 {
            break;
        }
        if w <= 0.0 {
            continue;
        }
        if Some(j) == last || w >= mass {
            counts[j] = left;
            break;
        }
        let p = (w / mass).clamp(0.0, 1.0);
        let c = Binomial::new(left, p).expect("valid binomial").sample(rng);
        counts[j] = c;
        left -= c;
        mass -= w;
    }
    counts
}

/// Resamples `m` observations from `mu` and returns the empirical measure.
pub fn multinomial_resample<R: Rng + ?Sized>(mu: &Measure, m: u64, rng: &mut R) -> Result<Measure> {
    if m == 0 {
        return Err(Error::InvalidSize("resample size must be positive".into()));
    }
    let counts = multinomial_counts(&mu.weights, m, rng);
    Measure::from_counts(mu.support.clone(), &counts)
}

/// Draws `g ~ N(0, diag(mu) - mu mu')` as `sqrt(mu)*Z - (sqrt(mu)·Z) mu`.
pub fn gaussian_limit_sample<R: Rng + ?Sized>(mu: &Measure, rng: &mut R) -> GaussianLimitDraw {
    gaussian_limit_from_weights(&mu.weights, rng)
}

pub(crate) fn gaussian_limit_from_weights<R: Rng + ?Sized>(w: &[f64], rng: &mut R) -> GaussianLimitDraw {
    let s: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let z: Vec<f64> = (0..w.len()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    let proj: f64 = s.iter().zip(&z).map(|(a, b)| a * b).sum();
    let g = s
        .iter()
        .zip(&z)
        .zip(w)
        .map(|((si, zi), wi)| si * zi - proj * wi)
        .collect();
    GaussianLimitDraw { g }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_stream;

    fn line() -> Arc<SupportSpace> {
        Arc::new(SupportSpace::from_scalars(&[5.0, 10.0]).unwrap())
    }

    #[test]
    fn empirical_frequencies() {
        let s = line();
        let m = empirical_measure(&[vec![5.0], vec![5.0], vec![10.0]], &s).unwrap();
        assert!((m.weights()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.weights()[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.sample_size(), Some(3));
        let p = empirical_measure(&[vec![5.0]], &s).unwrap();
        assert_eq!(p.weights(), &[1.0, 0.0]);
        assert_eq!(p.sample_size(), Some(1));
    }

    #[test]
    fn empirical_errors() {
        let s = line();
        assert_eq!(empirical_measure(&[], &s).unwrap_err(), Error::EmptySample);
        assert_eq!(
            empirical_measure(&[vec![5.0], vec![7.0]], &s).unwrap_err(),
            Error::UnknownSupportPoint { row: 1 }
        );
    }

    #[test]
    fn negative_zero_matches_zero() {
        let s = Arc::new(SupportSpace::from_scalars(&[0.0, 1.0]).unwrap());
        assert_eq!(s.index_of(&[-0.0]), Some(0));
    }

    #[test]
    fn duplicate_points_rejected() {
        assert_eq!(
            SupportSpace::from_scalars(&[1.0, 2.0, 1.0]).unwrap_err(),
            Error::DuplicateSupportPoint(2)
        );
    }

    #[test]
    fn three_d_grid_has_twelve_points() {
        let s = Arc::new(
            SupportSpace::grid(&[vec![0.0, 1.0], vec![0.0, 1.0], vec![0.0, 1.0, 2.0]]).unwrap(),
        );
        assert_eq!(s.len(), 12);
        let rows: Vec<Vec<f64>> = (0..40).map(|i| s.point(i % 12).to_vec()).collect();
        let m = empirical_measure(&rows, &s).unwrap();
        assert_eq!(m.len(), 12);
        assert!((m.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_resample_is_fixed() {
        let mu = Measure::dirac(line(), 0).unwrap();
        let mut rng = replicate_stream(1, 0, 0);
        let r = multinomial_resample(&mu, 17, &mut rng).unwrap();
        assert_eq!(r.weights(), &[1.0, 0.0]);
        assert_eq!(
            multinomial_resample(&mu, 0, &mut rng).unwrap_err().kind(),
            "InvalidSize"
        );
    }

    #[test]
    fn resample_is_deterministic_per_stream() {
        let mu = Measure::new(line(), vec![0.3, 0.7]).unwrap();
        let a = multinomial_resample(&mu, 1000, &mut replicate_stream(9, 1, 2)).unwrap();
        let b = multinomial_resample(&mu, 1000, &mut replicate_stream(9, 1, 2)).unwrap();
        assert_eq!(a.weights(), b.weights());
    }

    #[test]
    fn degenerate_gaussian_is_zero() {
        let mu = Measure::dirac(line(), 0).unwrap();
        let g = gaussian_limit_sample(&mu, &mut replicate_stream(3, 0, 0));
        assert_eq!(g.g, vec![0.0, 0.0]);
    }
}
