//! Sparse exact row reduction.

use std::collections::HashMap;

use crate::scalar::Coefficient;

/// Sparse row: strictly increasing column indices, no zero entries.
pub type SparseRow<C> = Vec<(usize, C)>;

/// Row-echelon basis of a growing span. Each stored row has a distinct
/// pivot (its smallest column) with coefficient one.
#[derive(Clone, Debug)]
pub struct SparseEchelon<C> {
    pivots: HashMap<usize, SparseRow<C>>,
}

impl<C: Coefficient> Default for SparseEchelon<C> {
    fn default() -> Self {
        Self::new()
    }
}

fn axpy<C: Coefficient>(row: &SparseRow<C>, c: &C, other: &SparseRow<C>) -> SparseRow<C> {
    // row - c * other
    let mut out = Vec::with_capacity(row.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < other.len() {
        let ci = row.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = other.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ci < cj {
            out.push(row[i].clone());
            i += 1;
        } else if cj < ci {
            out.push((cj, -(c.clone() * other[j].1.clone())));
            j += 1;
        } else {
            let v = row[i].1.clone() - c.clone() * other[j].1.clone();
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<C: Coefficient> SparseEchelon<C> {
    pub fn new() -> Self {
        SparseEchelon { pivots: HashMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = &usize> {
        self.pivots.keys()
    }

    /// Reduce `row` against the stored basis until its leading column is
    /// not a pivot (or it vanishes).
    pub fn reduce(&self, mut row: SparseRow<C>) -> SparseRow<C> {
        let mut start = 0;
        while start < row.len() {
            let (col, coef) = row[start].clone();
            match self.pivots.get(&col) {
                Some(p) => {
                    let head = row[..start].to_vec();
                    let tail = axpy(&row[start..].to_vec(), &coef, p);
                    row = head;
                    row.extend(tail);
                }
                None => start += 1,
            }
        }
        row
    }

    /// Add a row to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: SparseRow<C>) -> bool {
        let mut row = row;
        row.retain(|(_, c)| !c.is_zero());
        // Only the leading entry needs to be a non-pivot for the echelon invariant.
        loop {
            let Some((col, coef)) = row.first().cloned() else { return false };
            match self.pivots.get(&col) {
                Some(p) => row = axpy(&row, &coef, p),
                None => {
                    let inv = C::one() / coef;
                    for e in row.iter_mut() {
                        e.1 = e.1.clone() * inv.clone();
                    }
                    self.pivots.insert(col, row);
                    return true;
                }
            }
        }
    }

    /// Fully reduced basis rows, ordered by pivot.
    pub fn reduced_rows(&self) -> Vec<SparseRow<C>> {
        let mut cols: Vec<usize> = self.pivots.keys().copied().collect();
        cols.sort_unstable();
        let mut done: HashMap<usize, SparseRow<C>> = HashMap::new();
        for &c in cols.iter().rev() {
            let mut row = self.pivots[&c].clone();
            let mut i = 1;
            while i < row.len() {
                let (col, coef) = row[i].clone();
                match done.get(&col) {
                    Some(p) => {
                        let head = row[..i].to_vec();
                        row = head.into_iter().chain(axpy(&row[i..].to_vec(), &coef, p)).collect();
                    }
                    None => i += 1,
                }
            }
            done.insert(c, row);
        }
        cols.into_iter().map(|c| done.remove(&c).expect("pivot")).collect()
    }

    pub fn contains(&self, row: SparseRow<C>) -> bool {
        self.reduce(row).is_empty()
    }
}

/// Rank of a list of sparse rows.
pub fn rank<C: Coefficient>(rows: impl IntoIterator<Item = SparseRow<C>>) -> usize {
    let mut e = SparseEchelon::new();
    for r in rows {
        e.insert(r);
    }
    e.rank()
}

/// Inverse of a small dense matrix, `None` if singular.
pub fn invert<C: Coefficient>(m: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = m.len();
    let mut a: Vec<Vec<C>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { C::one() } else { C::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = C::one() / a[col][col].clone();
        for x in a[col].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, Rational, CHECK_PRIME};

    fn q(v: i64) -> Rational {
        Rational::from_i64(v)
    }

    #[test]
    fn dependent_rows() {
        let rows = vec![
            vec![(0, q(1)), (1, q(2))],
            vec![(1, q(1)), (2, q(1))],
            vec![(0, q(1)), (1, q(3)), (2, q(1))],
        ];
        assert_eq!(rank(rows), 2);
    }

    #[test]
    fn membership() {
        let mut e = SparseEchelon::new();
        e.insert(vec![(0, q(1)), (3, q(-1))]);
        e.insert(vec![(1, q(2)), (3, q(4))]);
        assert!(e.contains(vec![(0, q(2)), (1, q(1)), (3, q(0) - q(2) + q(2))]));
        assert!(!e.contains(vec![(3, q(1))]));
    }

    #[test]
    fn modular_rank_agrees_on_small_example() {
        type F = Fp<CHECK_PRIME>;
        let rows: Vec<SparseRow<F>> = vec![vec![(0, F::new(1)), (1, F::new(1))], vec![(0, F::new(2)), (1, F::new(2))]];
        assert_eq!(rank(rows), 1);
    }

    #[test]
    fn reduced_rows_clear_above_pivots() {
        let mut e = SparseEchelon::new();
        e.insert(vec![(0, q(1)), (1, q(1)), (2, q(1))]);
        e.insert(vec![(1, q(1)), (2, q(-1))]);
        assert_eq!(e.reduced_rows(), vec![vec![(0, q(1)), (2, q(2))], vec![(1, q(1)), (2, q(-1))]]);
    }

    #[test]
    fn inverse_and_singular() {
        let m = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let inv = invert(&m).unwrap();
        let half = Rational::new(1.into(), 2.into());
        assert_eq!(inv, vec![vec![half.clone(), half.clone()], vec![half.clone(), -half]]);
        assert!(invert(&[vec![q(1), q(2)], vec![q(2), q(4)]]).is_none());
    }
}
