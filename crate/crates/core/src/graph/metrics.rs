use std::collections::BTreeSet;

use super::InfluenceNetwork;
use crate::scalar::Scalar;

fn skeleton<W: Scalar>(net: &InfluenceNetwork<W>) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); net.n()];
    for (i, j, _) in net.edges() {
        if i != j {
            adj[i].insert(j);
            adj[j].insert(i);
        }
    }
    adj
}

/// Average local clustering of the undirected skeleton (an undirected edge
/// exists when either direction does). Self-loops are ignored and nodes of
/// skeleton degree below two contribute zero.
pub fn clustering_coefficient<W: Scalar>(net: &InfluenceNetwork<W>) -> f64 {
    let adj = skeleton(net);
    let total: f64 = adj
        .iter()
        .map(|nbrs| {
            let d = nbrs.len();
            if d < 2 {
                return 0.0;
            }
            let nb: Vec<usize> = nbrs.iter().copied().collect();
            let mut links = 0usize;
            for a in 0..d {
                for b in a + 1..d {
                    if adj[nb[a]].contains(&nb[b]) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .sum();
    total / net.n() as f64
}

/// Fraction of the `n(n-1)` possible non-self-loop directed edges present.
pub fn density<W: Scalar>(net: &InfluenceNetwork<W>) -> f64 {
    let n = net.n();
    if n < 2 {
        return 0.0;
    }
    let off_diag = net.edges().filter(|(i, j, _)| i != j).count();
    off_diag as f64 / (n * (n - 1)) as f64
}
