use crate::error::{Error, Result};
use crate::support::SupportSpace;

/// `N^k`, or `None` on overflow.
pub fn tuple_count(n: usize, k: usize) -> Option<usize> {
    (n as u128)
        .checked_pow(k as u32)
        .filter(|&c| c <= usize::MAX as u128)
        .map(|c| c as usize)
}

/// Writes the base-`n` digits of `index` into `tuple` (first position most
/// significant), matching the column order `pi_11..1, pi_11..2, ...`.
pub fn decode_tuple(mut index: usize, n: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
}

pub fn encode_tuple(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &t| acc * n + t)
}

/// Variance cost of a tuple, `(1/k) sum_m |x_m - mean|^2`, written through
/// pairwise squared distances as `(1/k^2) sum_{m<l} |x_m - x_l|^2`.
pub fn tuple_cost(sq_dist: &[Vec<f64>], tuple: &[usize]) -> f64 {
    let k = tuple.len();
    let mut s = 0.0;
    for m in 0..k {
        for l in m + 1..k {
            s += sq_dist[tuple[m]][tuple[l]];
        }
    }
    s / (k * k) as f64
}

/// Dense cost vector `c` over all `N^k` tuples.
#[derive(Debug, Clone)]
pub struct CostTensor {
    n: usize,
    k: usize,
    entries: Vec<f64>,
}

impl CostTensor {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, tuple: &[usize]) -> f64 {
        self.entries[encode_tuple(tuple, self.n)]
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

/// Builds the cost tensor; fails when `N^k` exceeds `max_entries`.
pub fn build_cost_tensor(support: &SupportSpace, k: usize, max_entries: usize) -> Result<CostTensor> {
    if k < 2 {
        return Err(Error::InvalidSize(format!("k must be at least 2, got {k}")));
    }
    let n = support.len();
    let total = tuple_count(n, k).filter(|&t| t <= max_entries).ok_or(Error::BudgetExceeded {
        required: (n as u128).saturating_pow(k as u32),
        budget: max_entries as u128,
    })?;
    let d = support.sq_dist_matrix();
    let mut entries = Vec::with_capacity(total);
    let mut tuple = vec![0usize; k];
    for idx in 0..total {
        decode_tuple(idx, n, &mut tuple);
        entries.push(tuple_cost(&d, &tuple));
    }
    Ok(CostTensor { n, k, entries })
}

/// Cost of a tuple with `k - 1` copies of `x_i` and one `x_j`:
/// `((k-1)/k^2) |x_i - x_j|^2`.
pub fn pair_cost(support: &SupportSpace, k: usize, i: usize, j: usize) -> Result<f64> {
    let n = support.len();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, size: n });
        }
    }
    let kf = k as f64;
    Ok((kf - 1.0) / (kf * kf) * support.sq_dist(i, j))
}
