//! Random instance generators shared by the integration tests.
#![allow(dead_code)]

use pid_core::dynamics::{OpinionDomain, OpinionState};
use pid_core::{Network, NodeSet, Rational};
use rand::seq::SliceRandom;
use rand::Rng;

/// Row-stochastic network whose row `i` splits `d_i` unit shares among
/// random targets, `d_i` uniform in `2..=8`. Produces exact ties at 1/2
/// often enough to exercise the strict/non-strict boundary.
pub fn random_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Network {
    let rows = (0..n).map(|_| random_row(n, None, rng)).collect();
    Network::from_rows(rows).expect("rows sum to one")
}

fn random_row<R: Rng + ?Sized>(n: usize, heavy: Option<usize>, rng: &mut R) -> Vec<(usize, Rational)> {
    let denom: i64 = rng.gen_range(2..=8);
    let mut parts = vec![0i64; n];
    let mut left = denom;
    if let Some(j) = heavy {
        // strictly more than half of the shares go to `j`
        let k = rng.gen_range(denom / 2 + 1..=denom);
        parts[j] += k;
        left -= k;
    }
    for _ in 0..left {
        parts[rng.gen_range(0..n)] += 1;
    }
    parts
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(j, &k)| (j, Rational::new(k, denom)))
        .collect()
}

/// Network whose heavier-than-half edges form one random Hamiltonian cycle.
pub fn heavy_cycle_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Network {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut succ = vec![0; n];
    for k in 0..n {
        succ[perm[k]] = perm[(k + 1) % n];
    }
    let rows = (0..n).map(|i| random_row(n, Some(succ[i]), rng)).collect();
    Network::from_rows(rows).expect("rows sum to one")
}

pub fn random_domain<R: Rng + ?Sized>(max_size: i64, rng: &mut R) -> OpinionDomain {
    let size = rng.gen_range(2..=max_size);
    let lo = rng.gen_range(-3..=3);
    let hi = lo + size - 1;
    OpinionDomain::new(lo, hi, rng.gen_range(lo..=hi)).unwrap()
}

/// Interior-truth domain with at least one opinion on each side.
pub fn interior_domain<R: Rng + ?Sized>(max_size: i64, rng: &mut R) -> OpinionDomain {
    let size = rng.gen_range(3..=max_size.max(3));
    let lo = rng.gen_range(-3..=3);
    let hi = lo + size - 1;
    OpinionDomain::new(lo, hi, rng.gen_range(lo + 1..hi)).unwrap()
}

pub fn random_subset<R: Rng + ?Sized>(n: usize, rng: &mut R) -> NodeSet {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random state that avoids the truth.
pub fn state_off_truth<R: Rng + ?Sized>(n: usize, dom: &OpinionDomain, rng: &mut R) -> OpinionState {
    let choices: Vec<i64> = dom.opinions().filter(|&z| z != dom.theta).collect();
    OpinionState::new((0..n).map(|_| *choices.choose(rng).unwrap()).collect())
}

/// Every state over the domain, in lexicographic order.
pub fn all_states(n: usize, dom: &OpinionDomain) -> Vec<OpinionState> {
    let opinions: Vec<i64> = dom.opinions().collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(OpinionState::new(idx.iter().map(|&k| opinions[k]).collect()));
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < opinions.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Every non-empty subset of `0..n` as a node set.
pub fn all_subsets(n: usize) -> impl Iterator<Item = NodeSet> {
    (1u64..1 << n).map(move |m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
}

/// Cohesive expansion that adds a uniformly random eligible node each time.
pub fn expansion_random_order<R: Rng + ?Sized>(net: &Network, seed: &NodeSet, rng: &mut R) -> NodeSet {
    let n = net.n();
    let mut inside = seed.membership(n);
    let half = Rational::new(1, 2);
    loop {
        let eligible: Vec<usize> = (0..n)
            .filter(|&i| !inside[i] && pid_core::cohesion::weight_into(net, i, &inside) >= half)
            .collect();
        match eligible.choose(rng) {
            Some(&i) => inside[i] = true,
            None => return (0..n).filter(|&i| inside[i]).collect(),
        }
    }
}

/// A non-consensus equilibrium: `block` sits one step below the truth (or
/// above, if the truth is the lowest opinion) and everyone else at the truth.
pub fn pinned_state(n: usize, dom: &OpinionDomain, block: &NodeSet) -> OpinionState {
    let off = if dom.theta > dom.lo { dom.theta - 1 } else { dom.theta + 1 };
    OpinionState::new((0..n).map(|i| if block.contains(i) { off } else { dom.theta }).collect())
}
