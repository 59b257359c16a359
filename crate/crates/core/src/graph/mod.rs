//! Row-stochastic influence networks.

mod edgelist;
mod generators;
mod metrics;

pub use generators::{erdos_renyi, lattice, watts_strogatz};
pub use metrics::{clustering_coefficient, density};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Weighted digraph with row-stochastic weights.
///
/// `rows[i]` lists the out-edges of node `i` as `(target, weight)` sorted by
/// target. Every stored weight is strictly positive and every row sums to one.
/// Networks are immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceNetwork<W> {
    n: usize,
    rows: Vec<Vec<(usize, W)>>,
}

impl<W: Scalar> InfluenceNetwork<W> {
    /// Validates and builds a network from per-node out-edge lists.
    pub fn from_rows(rows: Vec<Vec<(usize, W)>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidParameter("network must have at least one node".into()));
        }
        let mut sorted = Vec::with_capacity(n);
        for (src, mut row) in rows.into_iter().enumerate() {
            row.sort_by_key(|(dst, _)| *dst);
            let mut sum = W::zero();
            for (k, (dst, w)) in row.iter().enumerate() {
                if *dst >= n {
                    return Err(Error::NodeOutOfRange { id: *dst, n, line: None });
                }
                if k > 0 && row[k - 1].0 == *dst {
                    return Err(Error::DuplicateEdge { src, dst: *dst, line: None });
                }
                if *w <= W::zero() {
                    return Err(Error::NonPositiveWeight {
                        weight: w.to_ratio_string(),
                        line: None,
                    });
                }
                sum = sum + w.clone();
            }
            if !sum.is_unit_sum() {
                return Err(Error::RowSum {
                    row: src,
                    sum: sum.to_ratio_string(),
                    line: None,
                });
            }
            sorted.push(row);
        }
        Ok(Self { n, rows: sorted })
    }

    /// Builds a network from a dense matrix; zero entries are dropped.
    pub fn from_dense(matrix: &[Vec<W>]) -> Result<Self> {
        let n = matrix.len();
        let mut rows = Vec::with_capacity(n);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(j, w)| (j, w.clone()))
                    .collect(),
            );
        }
        Self::from_rows(rows)
    }

    /// Builds a network where every node splits its weight equally over `targets[i]`.
    pub(crate) fn uniform_rows(targets: Vec<Vec<usize>>) -> Self {
        let rows = targets
            .into_iter()
            .map(|ts| {
                let deg = ts.len() as i64;
                ts.into_iter().map(|t| (t, W::from_ratio(1, deg))).collect()
            })
            .collect();
        Self::from_rows(rows).expect("equal-weight rows are row-stochastic")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Out-edges of node `i`, sorted by target.
    pub fn row(&self, i: usize) -> &[(usize, W)] {
        &self.rows[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> W {
        self.rows[i]
            .binary_search_by_key(&j, |(t, _)| *t)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| W::zero())
    }

    /// Total number of stored directed edges, self-loops included.
    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &W)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, w)| (i, *j, w)))
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.rows[i].iter().filter(|(j, _)| *j != i).count()
    }

    /// Converts weights to another scalar type through their `num/den` form.
    pub fn convert<V: Scalar>(&self) -> Result<InfluenceNetwork<V>>
    where
        W: Into<num_rational::Ratio<i64>>,
    {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(j, w)| {
                        let r: num_rational::Ratio<i64> = w.clone().into();
                        (*j, V::from_ratio(*r.numer(), *r.denom()))
                    })
                    .collect()
            })
            .collect();
        InfluenceNetwork::from_rows(rows)
    }
}
