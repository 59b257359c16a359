use std::collections::BTreeSet;

use rand::Rng;

use super::InfluenceNetwork;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Non-toroidal `rows x cols` grid; every node listens equally to its
/// von Neumann neighbours. Node `(r, c)` has id `r * cols + c`.
pub fn lattice<W: Scalar>(rows: usize, cols: usize) -> Result<InfluenceNetwork<W>> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(Error::InvalidParameter(format!(
            "lattice needs rows*cols >= 2, got {rows}x{cols}"
        )));
    }
    let mut targets = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut t = Vec::with_capacity(4);
            if r > 0 {
                t.push((r - 1) * cols + c);
            }
            if c > 0 {
                t.push(r * cols + c - 1);
            }
            if c + 1 < cols {
                t.push(r * cols + c + 1);
            }
            if r + 1 < rows {
                t.push((r + 1) * cols + c);
            }
            targets.push(t);
        }
    }
    Ok(InfluenceNetwork::uniform_rows(targets))
}

/// Directed Erdős–Rényi graph: each ordered pair `(i, j)`, `i != j`, is linked
/// independently with probability `p`. Out-edges share weight equally; a node
/// that draws no out-edge gets a self-loop of weight one.
pub fn erdos_renyi<W: Scalar, R: Rng + ?Sized>(
    n: usize,
    p: f64,
    rng: &mut R,
) -> Result<InfluenceNetwork<W>> {
    if n == 0 {
        return Err(Error::InvalidParameter("erdos_renyi needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("link probability {p} not in [0, 1]")));
    }
    let mut targets = Vec::with_capacity(n);
    for i in 0..n {
        let mut t: Vec<usize> = (0..n).filter(|&j| j != i && rng.gen_bool(p)).collect();
        if t.is_empty() {
            t.push(i);
        }
        targets.push(t);
    }
    Ok(InfluenceNetwork::uniform_rows(targets))
}

/// Watts–Strogatz small world on an undirected ring of even degree `k`.
///
/// For each node `i` and each offset `1..=k/2`, the edge `{i, i+offset}` is
/// rewired with probability `beta` to `{i, u}` for a uniformly drawn `u` that
/// is neither `i` nor already adjacent to `i`. Each undirected edge then
/// becomes two directed edges and rows get equal weights.
pub fn watts_strogatz<W: Scalar, R: Rng + ?Sized>(
    n: usize,
    k: usize,
    beta: f64,
    rng: &mut R,
) -> Result<InfluenceNetwork<W>> {
    if k < 2 || !k.is_multiple_of(2) || n <= k {
        return Err(Error::InvalidParameter(format!(
            "watts_strogatz needs even k >= 2 and n > k, got n={n}, k={k}"
        )));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!("rewiring probability {beta} not in [0, 1]")));
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for off in 1..=k / 2 {
            let j = (i + off) % n;
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    for off in 1..=k / 2 {
        for i in 0..n {
            let j = (i + off) % n;
            if !adj[i].contains(&j) || !rng.gen_bool(beta) {
                continue;
            }
            // Saturated node: no legal new endpoint.
            if adj[i].len() >= n - 1 {
                continue;
            }
            let u = loop {
                let u = rng.gen_range(0..n);
                if u != i && !adj[i].contains(&u) {
                    break u;
                }
            };
            adj[i].remove(&j);
            adj[j].remove(&i);
            adj[i].insert(u);
            adj[u].insert(i);
        }
    }
    let targets = adj.into_iter().map(|s| s.into_iter().collect()).collect();
    Ok(InfluenceNetwork::uniform_rows(targets))
}
