use super::cost::tuple_count;

/// Implicit `A in {0,1}^{kN x N^k}`: row `(i, j)` selects the tuples whose
/// `i`-th index equals `j`. Rows are ordered block by block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarginalMatrix {
    n: usize,
    k: usize,
}

pub fn build_marginal_matrix(n: usize, k: usize) -> MarginalMatrix {
    MarginalMatrix { n, k }
}

impl MarginalMatrix {
    pub fn rows(&self) -> usize {
        self.k * self.n
    }

    pub fn cols(&self) -> usize {
        tuple_count(self.n, self.k).expect("tuple count overflows usize")
    }

    /// Index `j` of position `i` in column `col`.
    #[inline]
    pub fn digit(&self, col: usize, i: usize) -> usize {
        let shift = self.k - 1 - i;
        (col / self.n.pow(shift as u32)) % self.n
    }

    /// Entry `A[(i, j), col]` in O(1).
    #[inline]
    pub fn contains(&self, i: usize, j: usize, col: usize) -> bool {
        self.digit(col, i) == j
    }

    /// `A pi`: the stacked marginals.
    pub fn apply(&self, pi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        for (col, &p) in pi.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for i in 0..self.k {
                out[i * self.n + self.digit(col, i)] += p;
            }
        }
        out
    }

    /// `A' u`: per tuple, the sum of one entry from each block.
    pub fn transpose_apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.cols())
            .map(|col| (0..self.k).map(|i| u[i * self.n + self.digit(col, i)]).sum())
            .collect()
    }

    /// Materialized 0/1 matrix, for small sizes.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.rows())
            .map(|r| {
                let (i, j) = (r / self.n, r % self.n);
                (0..self.cols()).map(|c| self.contains(i, j, c) as u8).collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_two_point_measures() {
        let a = build_marginal_matrix(2, 3).to_dense();
        let expected: Vec<Vec<u8>> = vec![
            vec![1, 1, 1, 1, 0, 0, 0, 0],
            vec![0, 0, 0, 0, 1, 1, 1, 1],
            vec![1, 1, 0, 0, 1, 1, 0, 0],
            vec![0, 0, 1, 1, 0, 0, 1, 1],
            vec![1, 0, 1, 0, 1, 0, 1, 0],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
        ];
        assert_eq!(a, expected);
    }

    #[test]
    fn column_and_row_counts() {
        for (n, k) in [(2, 3), (3, 2), (3, 3), (2, 4)] {
            let a = build_marginal_matrix(n, k).to_dense();
            for c in 0..a[0].len() {
                assert_eq!(a.iter().map(|r| r[c] as usize).sum::<usize>(), k);
            }
            for r in &a {
                assert_eq!(r.iter().map(|&v| v as usize).sum::<usize>(), n.pow(k as u32 - 1));
            }
        }
    }

    #[test]
    fn apply_and_transpose_are_adjoint() {
        let a = build_marginal_matrix(3, 3);
        let pi: Vec<f64> = (0..27).map(|i| (i as f64 * 0.37).sin().abs()).collect();
        let u: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).cos()).collect();
        let lhs: f64 = a.apply(&pi).iter().zip(&u).map(|(x, y)| x * y).sum();
        let rhs: f64 = a.transpose_apply(&u).iter().zip(&pi).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
