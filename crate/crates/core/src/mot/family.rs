use super::cost::{decode_tuple, tuple_cost, tuple_count, CostTensor};
use crate::lp::ConstraintFamily;
use crate::support::SupportSpace;

/// Indexing of dual variables `u = (u_1, ..., u_k)` with the first entry of
/// `u_2, ..., u_k` pinned to zero. Adding a constant to one block and
/// subtracting it from another changes neither the dual objective nor
/// feasibility, so the pin loses nothing and removes the `k - 1` redundant
/// marginal rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualLayout {
    n: usize,
    k: usize,
}

impl DualLayout {
    pub fn new(n: usize, k: usize) -> Self {
        DualLayout { n, k }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vars(&self) -> usize {
        self.n + (self.k - 1) * (self.n - 1)
    }

    /// Variable index of entry `j` of block `i`, `None` when pinned.
    #[inline]
    pub fn var(&self, i: usize, j: usize) -> Option<usize> {
        if i == 0 {
            Some(j)
        } else if j == 0 {
            None
        } else {
            Some(self.n + (i - 1) * (self.n - 1) + (j - 1))
        }
    }

    /// Block vectors from variable values (pinned entries are zero).
    pub fn expand(&self, vars: &[f64]) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.var(i, j).map_or(0.0, |v| vars[v]))
                    .collect()
            })
            .collect()
    }

    /// Variable values from block vectors (pinned entries are dropped).
    pub fn compress(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.num_vars()];
        for (i, b) in blocks.iter().enumerate() {
            for (j, &v) in b.iter().enumerate() {
                if let Some(x) = self.var(i, j) {
                    out[x] = v;
                }
            }
        }
        out
    }

    /// Sparse row of tuple `t`: `sum_i u_i[t_i]`.
    pub fn tuple_row(&self, tuple: &[usize]) -> Vec<(usize, f64)> {
        tuple
            .iter()
            .enumerate()
            .filter_map(|(i, &j)| self.var(i, j).map(|v| (v, 1.0)))
            .collect()
    }
}

/// The constraints `A'u <= c`, one per tuple, in pinned coordinates.
pub struct TupleFamily<'a> {
    layout: DualLayout,
    sq_dist: Vec<Vec<f64>>,
    costs: Option<&'a CostTensor>,
    count: usize,
}

impl<'a> TupleFamily<'a> {
    pub fn new(support: &SupportSpace, k: usize, costs: Option<&'a CostTensor>) -> Self {
        let n = support.len();
        TupleFamily {
            layout: DualLayout::new(n, k),
            sq_dist: support.sq_dist_matrix(),
            costs,
            count: tuple_count(n, k).expect("tuple count overflows usize"),
        }
    }

    pub fn layout(&self) -> DualLayout {
        self.layout
    }

    fn cost(&self, index: usize, tuple: &[usize]) -> f64 {
        match self.costs {
            Some(c) => c.entries()[index],
            None => tuple_cost(&self.sq_dist, tuple),
        }
    }

    /// Tuples with all indices equal, then those with exactly one position
    /// moved away from a common value. These carry the pair costs.
    pub fn seed_rows(&self) -> Vec<usize> {
        let (n, k) = (self.layout.n, self.layout.k);
        let mut out = Vec::new();
        let mut tuple = vec![0usize; k];
        for m in 0..n {
            tuple.iter_mut().for_each(|t| *t = m);
            out.push(super::cost::encode_tuple(&tuple, n));
        }
        for pos in 0..k {
            for m in 0..n {
                for j in 0..n {
                    if j == m {
                        continue;
                    }
                    tuple.iter_mut().for_each(|t| *t = m);
                    tuple[pos] = j;
                    out.push(super::cost::encode_tuple(&tuple, n));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn dfs(
        &self,
        blocks: &[Vec<f64>],
        suffix_max: &[f64],
        depth: usize,
        tuple: &mut Vec<usize>,
        index: usize,
        partial: f64,
        best: &mut Option<(usize, f64)>,
    ) {
        let (n, k) = (self.layout.n, self.layout.k);
        if depth == k {
            let v = match self.costs {
                // exact tensor value keeps the violation identical to `row`
                Some(c) => blocks
                    .iter()
                    .zip(tuple.iter())
                    .map(|(b, &t)| b[t])
                    .sum::<f64>()
                    - c.entries()[index],
                None => partial,
            };
            if best.is_none_or(|(_, b)| v > b) {
                *best = Some((index, v));
            }
            return;
        }
        let inv_k2 = 1.0 / (k * k) as f64;
        for j in 0..n {
            let mut add = blocks[depth][j];
            for &t in tuple.iter() {
                add -= self.sq_dist[t][j] * inv_k2;
            }
            let next = partial + add;
            if let Some((_, b)) = *best {
                // remaining costs are nonnegative
                if next + suffix_max[depth + 1] <= b - 1e-12 {
                    continue;
                }
            }
            tuple.push(j);
            self.dfs(blocks, suffix_max, depth + 1, tuple, index * n + j, next, best);
            tuple.pop();
        }
    }
}

impl ConstraintFamily for TupleFamily<'_> {
    fn num_vars(&self) -> usize {
        self.layout.num_vars()
    }

    fn len(&self) -> usize {
        self.count
    }

    fn row(&self, index: usize) -> (Vec<(usize, f64)>, f64) {
        let mut tuple = vec![0usize; self.layout.k];
        decode_tuple(index, self.layout.n, &mut tuple);
        (self.layout.tuple_row(&tuple), self.cost(index, &tuple))
    }

    fn most_violated(&self, u: &[f64]) -> Option<(usize, f64)> {
        let blocks = self.layout.expand(u);
        let k = self.layout.k;
        let mut suffix_max = vec![0.0; k + 1];
        for i in (0..k).rev() {
            let m = blocks[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            suffix_max[i] = suffix_max[i + 1] + m;
        }
        let mut best = None;
        let mut tuple = Vec::with_capacity(k);
        self.dfs(&blocks, &suffix_max, 0, &mut tuple, 0, 0.0, &mut best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mot::cost::build_cost_tensor;

    #[test]
    fn layout_round_trip() {
        let l = DualLayout::new(3, 3);
        assert_eq!(l.num_vars(), 7);
        let blocks = vec![vec![1.0, 2.0, 3.0], vec![0.0, 4.0, 5.0], vec![0.0, 6.0, 7.0]];
        assert_eq!(l.expand(&l.compress(&blocks)), blocks);
    }

    #[test]
    fn pruned_search_matches_brute_force() {
        let s = SupportSpace::new(vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, -1.0], vec![0.3, 2.0]])
            .unwrap();
        let c = build_cost_tensor(&s, 3, 1 << 20).unwrap();
        for cached in [false, true] {
            let fam = TupleFamily::new(&s, 3, if cached { Some(&c) } else { None });
            for seed in 0..20 {
                let u: Vec<f64> = (0..fam.num_vars())
                    .map(|i| ((i * 7 + seed * 13) as f64 * 0.731).sin() * 2.0)
                    .collect();
                let fast = fam.most_violated(&u).unwrap();
                let mut brute: Option<(usize, f64)> = None;
                for idx in 0..fam.len() {
                    let (row, rhs) = fam.row(idx);
                    let v = row.iter().map(|&(j, a)| a * u[j]).sum::<f64>() - rhs;
                    if brute.is_none_or(|(_, b)| v > b) {
                        brute = Some((idx, v));
                    }
                }
                let brute = brute.unwrap();
                assert!((fast.1 - brute.1).abs() < 1e-10, "{fast:?} vs {brute:?}");
            }
        }
    }
}
