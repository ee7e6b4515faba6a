//! Sparse matrices and exact rank computation by sparse Gaussian elimination.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::cyclotomic::Cyclotomic;

/// Exact field arithmetic needed by elimination.
pub trait FieldElem: Clone + Debug + PartialEq {
    fn is_zero_elem(&self) -> bool;
    fn mul_elem(&self, rhs: &Self) -> Self;
    fn sub_elem(&self, rhs: &Self) -> Self;
    fn inv_elem(&self) -> Self;
}

impl FieldElem for BigRational {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn mul_elem(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub_elem(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn inv_elem(&self) -> Self {
        self.recip()
    }
}

impl FieldElem for Cyclotomic {
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn mul_elem(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub_elem(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn inv_elem(&self) -> Self {
        self.inv()
    }
}

/// Row-major sparse matrix; absent entries are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, T>>,
}

/// Integer matrices: boundary operators and combinatorial Laplacians.
pub type IntMatrix = SparseMatrix<i64>;

impl<T: Clone> SparseMatrix<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            data: vec![BTreeMap::new(); rows],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&T> {
        self.data[r].get(&c)
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, T> {
        &self.data[r]
    }

    /// Overwrites an entry. Callers are responsible for not storing zeros.
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index out of range");
        self.data[r].insert(c, v);
    }

    pub fn remove(&mut self, r: usize, c: usize) {
        self.data[r].remove(&c);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(&c, v)| (r, c, v)))
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = SparseMatrix::new(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.data[c].insert(r, v.clone());
        }
        t
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|row| row.iter().map(|(&c, v)| (c, f(v))).collect())
                .collect(),
        }
    }
}

impl IntMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::new(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn matmul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = SparseMatrix::new(self.rows, rhs.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for (&k, &a) in row {
                for (&c, &b) in &rhs.data[k] {
                    *acc.entry(c).or_insert(0) += a * b;
                }
            }
            acc.retain(|_, v| *v != 0);
            out.data[r] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &IntMatrix) -> IntMatrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols);
        let mut out = self.clone();
        for (r, c, &v) in rhs.entries() {
            let e = out.data[r].entry(c).or_insert(0);
            *e += v;
            if *e == 0 {
                out.data[r].remove(&c);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.transpose() == *self
    }

    pub fn to_rational(&self) -> SparseMatrix<BigRational> {
        self.map(|&v| BigRational::from_integer(BigInt::from(v)))
    }

    /// Exact rank over ℚ.
    pub fn rank(&self) -> usize {
        rank(&self.to_rational())
    }

    /// Applies the matrix to an integer vector.
    pub fn apply(&self, x: &[i128]) -> Vec<i128> {
        self.data
            .iter()
            .map(|row| row.iter().map(|(&c, &v)| v as i128 * x[c]).sum())
            .collect()
    }
}

/// Exact rank by sparse elimination with a Markowitz-style pivot choice:
/// the sparsest column, then the sparsest row within it.
pub fn rank<T: FieldElem>(m: &SparseMatrix<T>) -> usize {
    let mut rows: Vec<Option<BTreeMap<usize, T>>> = m
        .data
        .iter()
        .map(|r| {
            let row: BTreeMap<usize, T> = r
                .iter()
                .filter(|(_, v)| !v.is_zero_elem())
                .map(|(&c, v)| (c, v.clone()))
                .collect();
            if row.is_empty() {
                None
            } else {
                Some(row)
            }
        })
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        if let Some(row) = row {
            for &c in row.keys() {
                col_rows[c].insert(r);
            }
        }
    }
    // Columns bucketed by their current nonzero count.
    let mut by_count: BTreeSet<(usize, usize)> = col_rows
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(c, s)| (s.len(), c))
        .collect();
    let mut rank = 0;
    while let Some(&(_, pc)) = by_count.iter().next() {
        let pr = *col_rows[pc]
            .iter()
            .min_by_key(|&&r| (rows[r].as_ref().map_or(usize::MAX, BTreeMap::len), r))
            .unwrap();
        let prow = rows[pr].take().unwrap();
        rank += 1;
        // Detach the pivot row from the column index.
        for &c in prow.keys() {
            by_count.remove(&(col_rows[c].len(), c));
            col_rows[c].remove(&pr);
            if !col_rows[c].is_empty() {
                by_count.insert((col_rows[c].len(), c));
            }
        }
        let pinv = prow[&pc].inv_elem();
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for r in targets {
            let mut row = rows[r].take().unwrap();
            let factor = row[&pc].mul_elem(&pinv);
            for (&c, pv) in &prow {
                let delta = factor.mul_elem(pv);
                let before = row.contains_key(&c);
                let newv = match row.get(&c) {
                    Some(v) => v.sub_elem(&delta),
                    None => T::sub_elem(&zero_like(&delta), &delta),
                };
                let after = !newv.is_zero_elem() && c != pc;
                if after {
                    row.insert(c, newv);
                } else {
                    row.remove(&c);
                }
                if before != after {
                    by_count.remove(&(col_rows[c].len(), c));
                    if after {
                        col_rows[c].insert(r);
                    } else {
                        col_rows[c].remove(&r);
                    }
                    if !col_rows[c].is_empty() {
                        by_count.insert((col_rows[c].len(), c));
                    }
                }
            }
            if !row.is_empty() {
                rows[r] = Some(row);
            }
        }
        debug_assert!(col_rows[pc].is_empty());
    }
    rank
}

fn zero_like<T: FieldElem>(v: &T) -> T {
    v.sub_elem(v)
}

/// Exact rank of a dense rational matrix given row by row (test helper
/// and small-case utility).
pub fn dense_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] * &inv;
                for k in c..ncols {
                    let d = &f * &m[rank][k];
                    m[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn rank_of_small_matrices() {
        let mut m = IntMatrix::new(3, 3);
        m.set(0, 0, 1);
        m.set(0, 1, 2);
        m.set(1, 0, 2);
        m.set(1, 1, 4);
        m.set(2, 2, 5);
        assert_eq!(m.rank(), 2);
        assert_eq!(IntMatrix::identity(4).rank(), 4);
        assert_eq!(IntMatrix::new(3, 2).rank(), 0);
    }

    #[test]
    fn sparse_rank_matches_dense_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let rows = rng.gen_range(1..8);
            let cols = rng.gen_range(1..8);
            let mut m = IntMatrix::new(rows, cols);
            let mut dense = vec![vec![q(0); cols]; rows];
            for r in 0..rows {
                for c in 0..cols {
                    if rng.gen_bool(0.4) {
                        let v = rng.gen_range(-2..=2);
                        if v != 0 {
                            m.set(r, c, v);
                            dense[r][c] = q(v);
                        }
                    }
                }
            }
            // force some dependent rows
            if rows > 2 {
                let sum: Vec<i64> = (0..cols)
                    .map(|c| m.get(0, c).copied().unwrap_or(0) + m.get(1, c).copied().unwrap_or(0))
                    .collect();
                m.data[2].clear();
                for (c, &v) in sum.iter().enumerate() {
                    dense[2][c] = q(v);
                    if v != 0 {
                        m.set(2, c, v);
                    }
                }
            }
            assert_eq!(m.rank(), dense_rank(&dense));
        }
    }

    #[test]
    fn cyclotomic_rank() {
        // [[1, ζ], [ζ^2, ζ^3]] is singular over ℚ(ζ_3) since ζ^3 = ζ·ζ^2.
        let e = 3;
        let mut m = SparseMatrix::new(2, 2);
        m.set(0, 0, Cyclotomic::one(e));
        m.set(0, 1, Cyclotomic::zeta_pow(e, 1));
        m.set(1, 0, Cyclotomic::zeta_pow(e, 2));
        m.set(1, 1, Cyclotomic::zeta_pow(e, 3));
        assert_eq!(rank(&m), 1);
        m.set(1, 1, Cyclotomic::zeta_pow(e, 1));
        assert_eq!(rank(&m), 2);
    }
}
