//! Cohesive and strictly cohesive node sets.
//!
//! A set `M` is cohesive when every member puts weight at least one half on
//! `M`, and strictly cohesive when every member puts more than one half on it.
//! The empty set counts as strictly cohesive. All comparisons are made in the
//! network's scalar type, so with rational weights they are exact.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::InfluenceNetwork;
use crate::nodeset::NodeSet;
use crate::scalar::Scalar;

/// Default cap on exact subset enumeration.
pub const DEFAULT_NODE_BUDGET: usize = 20;
/// Hard ceiling imposed by the bitmask representation.
pub const MAX_NODE_BUDGET: usize = 63;
pub const DEFAULT_WITNESS_CAP: usize = 64;

/// Weight node `i` places on the members of `inside`.
pub fn weight_into<W: Scalar>(net: &InfluenceNetwork<W>, i: usize, inside: &[bool]) -> W {
    net.row(i)
        .iter()
        .filter(|(j, _)| inside[*j])
        .fold(W::zero(), |acc, (_, w)| acc + w.clone())
}

fn weight_into_mask<W: Scalar>(net: &InfluenceNetwork<W>, i: usize, mask: u64) -> W {
    net.row(i)
        .iter()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .fold(W::zero(), |acc, (_, w)| acc + w.clone())
}

pub fn is_cohesive<W: Scalar>(net: &InfluenceNetwork<W>, set: &NodeSet) -> Result<bool> {
    set.check(net.n())?;
    let inside = set.membership(net.n());
    let half = W::half();
    Ok(set.iter().all(|i| weight_into(net, i, &inside).tol_ge(&half)))
}

pub fn is_strictly_cohesive<W: Scalar>(net: &InfluenceNetwork<W>, set: &NodeSet) -> Result<bool> {
    set.check(net.n())?;
    let inside = set.membership(net.n());
    Ok(strictly_cohesive_members(net, &inside, set.iter()))
}

pub(crate) fn strictly_cohesive_members<W: Scalar>(
    net: &InfluenceNetwork<W>,
    inside: &[bool],
    members: impl IntoIterator<Item = usize>,
) -> bool {
    let half = W::half();
    members.into_iter().all(|i| !weight_into(net, i, inside).tol_le(&half))
}

fn strictly_cohesive_mask<W: Scalar>(net: &InfluenceNetwork<W>, mask: u64) -> bool {
    let half = W::half();
    let mut rest = mask;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if weight_into_mask(net, i, mask).tol_le(&half) {
            return false;
        }
    }
    true
}

/// Node addition order of the cohesive expansion of `seed`: repeatedly add
/// the lowest-id outside node with weight at least one half into the
/// current set. The resulting set does not depend on the tie-break.
pub fn cohesive_expansion_order<W: Scalar>(
    net: &InfluenceNetwork<W>,
    seed: &NodeSet,
) -> Result<Vec<usize>> {
    seed.check(net.n())?;
    let mut inside = seed.membership(net.n());
    let half = W::half();
    let mut order = Vec::new();
    loop {
        let next = (0..net.n()).find(|&i| !inside[i] && weight_into(net, i, &inside).tol_ge(&half));
        match next {
            Some(i) => {
                inside[i] = true;
                order.push(i);
            }
            None => return Ok(order),
        }
    }
}

pub fn cohesive_expansion<W: Scalar>(net: &InfluenceNetwork<W>, seed: &NodeSet) -> Result<NodeSet> {
    let order = cohesive_expansion_order(net, seed)?;
    Ok(NodeSet::new(seed.iter().chain(order)))
}

/// Largest strictly cohesive subset of `set` (possibly empty).
///
/// Strictly cohesive sets are closed under union, so the largest one is
/// unique; it is found by repeatedly discarding members with in-set weight
/// at most one half.
pub fn largest_strictly_cohesive_subset<W: Scalar>(
    net: &InfluenceNetwork<W>,
    set: &NodeSet,
) -> Result<NodeSet> {
    set.check(net.n())?;
    let mut inside = set.membership(net.n());
    Ok(peel(net, &mut inside))
}

fn peel<W: Scalar>(net: &InfluenceNetwork<W>, inside: &mut [bool]) -> NodeSet {
    let half = W::half();
    loop {
        let drop: Vec<usize> = (0..net.n())
            .filter(|&i| inside[i] && weight_into(net, i, inside).tol_le(&half))
            .collect();
        if drop.is_empty() {
            break;
        }
        for i in drop {
            inside[i] = false;
        }
    }
    (0..net.n()).filter(|&i| inside[i]).collect()
}

fn check_budget(n: usize, budget: usize) -> Result<()> {
    if budget > MAX_NODE_BUDGET {
        return Err(Error::InvalidParameter(format!(
            "node budget {budget} exceeds the supported maximum {MAX_NODE_BUDGET}"
        )));
    }
    if n > budget {
        return Err(Error::BudgetExceeded { n, budget });
    }
    Ok(())
}

/// Calls `f` with every `k`-subset of `0..n` as a bitmask, in lexicographic
/// order of the sorted id lists. Stops early when `f` returns `false`.
fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(u64) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mask = idx.iter().fold(0u64, |m, &i| m | 1 << i);
        if !f(mask) {
            return;
        }
        // advance to the next combination
        let mut pos = k;
        while pos > 0 && idx[pos - 1] == n - k + pos - 1 {
            pos -= 1;
        }
        if pos == 0 {
            return;
        }
        let pos = pos - 1;
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

fn minimal_strictly_cohesive_masks<W: Scalar>(net: &InfluenceNetwork<W>) -> Vec<u64> {
    let n = net.n();
    let mut found: Vec<u64> = Vec::new();
    for k in 1..=n {
        let before = found.len();
        for_each_combination(n, k, |mask| {
            if !found[..before].iter().any(|&f| f & !mask == 0) && strictly_cohesive_mask(net, mask) {
                found.push(mask);
            }
            true
        });
    }
    found
}

/// All inclusion-minimal non-empty strictly cohesive sets, by increasing size
/// and then lexicographically.
pub fn enumerate_minimal_strictly_cohesive<W: Scalar>(
    net: &InfluenceNetwork<W>,
    node_budget: usize,
) -> Result<Vec<NodeSet>> {
    check_budget(net.n(), node_budget)?;
    Ok(minimal_strictly_cohesive_masks(net)
        .into_iter()
        .map(NodeSet::from_mask)
        .collect())
}

/// Whether the whole node set is the only non-empty strictly cohesive set.
#[allow(non_snake_case)]
pub fn only_scs_is_V<W: Scalar>(net: &InfluenceNetwork<W>, node_budget: usize) -> Result<bool> {
    let family = enumerate_minimal_strictly_cohesive(net, node_budget)?;
    Ok(family.len() == 1 && family[0].len() == net.n())
}

/// Whether the edges heavier than one half form a single directed cycle
/// through every node. Equivalent to the whole node set being the only
/// non-empty cohesive set.
pub fn heavy_edge_cycle_check<W: Scalar>(net: &InfluenceNetwork<W>) -> bool {
    let n = net.n();
    let half = W::half();
    let mut succ = Vec::with_capacity(n);
    for i in 0..n {
        match net.row(i).iter().find(|(_, w)| !w.tol_le(&half)) {
            Some((j, _)) => succ.push(*j),
            None => return false,
        }
    }
    let mut seen = vec![false; n];
    let mut cur = 0;
    for _ in 0..n {
        if seen[cur] {
            return false;
        }
        seen[cur] = true;
        cur = succ[cur];
    }
    cur == 0
}

/// First minimal strictly cohesive set (in enumeration order) that misses
/// `seeds`, if any.
pub fn uncovered_strictly_cohesive<W: Scalar>(
    net: &InfluenceNetwork<W>,
    seeds: &NodeSet,
    node_budget: usize,
) -> Result<Option<NodeSet>> {
    seeds.check(net.n())?;
    let family = enumerate_minimal_strictly_cohesive(net, node_budget)?;
    Ok(family.into_iter().find(|m| !m.intersects(seeds)))
}

/// Whether seeding `seeds` at the truth hits every strictly cohesive set.
/// Checking the minimal ones suffices since every strictly cohesive set
/// contains one.
pub fn verify_seed_set<W: Scalar>(
    net: &InfluenceNetwork<W>,
    seeds: &NodeSet,
    node_budget: usize,
) -> Result<bool> {
    Ok(uncovered_strictly_cohesive(net, seeds, node_budget)?.is_none())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedSearch {
    pub size: usize,
    pub witnesses: Vec<NodeSet>,
    /// More minimum-size witnesses exist than were returned.
    pub truncated: bool,
}

fn minimum_hitting_sets(n: usize, family: &[u64], cap: usize) -> SeedSearch {
    for k in 1..=n {
        let mut witnesses = Vec::new();
        let mut truncated = false;
        for_each_combination(n, k, |mask| {
            if family.iter().all(|&f| f & mask != 0) {
                if witnesses.len() == cap {
                    truncated = true;
                    return false;
                }
                witnesses.push(NodeSet::from_mask(mask));
            }
            true
        });
        if !witnesses.is_empty() {
            return SeedSearch { size: k, witnesses, truncated };
        }
    }
    unreachable!("the full node set hits every non-empty set")
}

/// Minimum-cardinality seed sets, by exhaustive search over increasing size.
/// At most `cap` witnesses are returned, in lexicographic order.
pub fn minimum_seed_sets<W: Scalar>(
    net: &InfluenceNetwork<W>,
    node_budget: usize,
    cap: usize,
) -> Result<SeedSearch> {
    check_budget(net.n(), node_budget)?;
    let family = minimal_strictly_cohesive_masks(net);
    Ok(minimum_hitting_sets(net.n(), &family, cap.max(1)))
}

/// Shrinks a non-empty strictly cohesive set to an inclusion-minimal one.
fn minimize<W: Scalar, R: Rng + ?Sized>(
    net: &InfluenceNetwork<W>,
    mut set: NodeSet,
    rng: &mut R,
) -> NodeSet {
    'outer: loop {
        let mut order: Vec<usize> = set.iter().collect();
        order.shuffle(rng);
        for v in order {
            let mut inside = set.membership(net.n());
            inside[v] = false;
            let core = peel(net, &mut inside);
            if !core.is_empty() {
                set = core;
                continue 'outer;
            }
        }
        return set;
    }
}

/// Minimal strictly cohesive sets discovered from random starting subsets.
/// Used when exact enumeration is over budget; the result is a subfamily.
pub fn sample_minimal_strictly_cohesive<W: Scalar, R: Rng + ?Sized>(
    net: &InfluenceNetwork<W>,
    samples: usize,
    rng: &mut R,
) -> Vec<NodeSet> {
    let n = net.n();
    let mut found = BTreeSet::new();
    for s in 0..samples.max(1) {
        let start: Vec<bool> = if s == 0 {
            vec![true; n]
        } else {
            let q: f64 = rng.gen_range(0.05..1.0);
            (0..n).map(|_| rng.gen_bool(q)).collect()
        };
        let mut inside = start;
        let core = peel(net, &mut inside);
        if !core.is_empty() {
            found.insert(minimize(net, core, rng));
        }
    }
    let mut out: Vec<NodeSet> = found.into_iter().collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn greedy_hitting_set(n: usize, family: &[NodeSet]) -> NodeSet {
    let mut open: Vec<&NodeSet> = family.iter().collect();
    let mut chosen = Vec::new();
    while !open.is_empty() {
        let best = (0..n)
            .max_by_key(|&v| (open.iter().filter(|s| s.contains(v)).count(), std::cmp::Reverse(v)))
            .expect("non-empty node set");
        chosen.push(best);
        open.retain(|s| !s.contains(best));
    }
    NodeSet::new(chosen)
}

/// Summary of the cohesion structure that governs consensus and seeding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohesionReport {
    pub minimal_strictly_cohesive: Vec<NodeSet>,
    #[serde(rename = "only_scs_is_V")]
    pub only_scs_is_v: bool,
    pub heavy_cycle: bool,
    pub min_seed_size: usize,
    pub min_seed_sets: Vec<NodeSet>,
    pub min_seed_sets_truncated: bool,
    /// False when the node budget forced the sampling fallback.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct AnalyzeOptions {
    pub node_budget: usize,
    pub witness_cap: usize,
    /// Random restarts used by the fallback when `n > node_budget`.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
            witness_cap: DEFAULT_WITNESS_CAP,
            samples: 32,
            seed: 0,
        }
    }
}

pub fn analyze<W: Scalar>(net: &InfluenceNetwork<W>, opts: &AnalyzeOptions) -> Result<CohesionReport> {
    use rand::SeedableRng;

    let n = net.n();
    let heavy_cycle = heavy_edge_cycle_check(net);
    if n <= opts.node_budget && opts.node_budget <= MAX_NODE_BUDGET {
        let masks = minimal_strictly_cohesive_masks(net);
        let seeds = minimum_hitting_sets(n, &masks, opts.witness_cap.max(1));
        let family: Vec<NodeSet> = masks.into_iter().map(NodeSet::from_mask).collect();
        let only = family.len() == 1 && family[0].len() == n;
        return Ok(CohesionReport {
            minimal_strictly_cohesive: family,
            only_scs_is_v: only,
            heavy_cycle,
            min_seed_size: seeds.size,
            min_seed_sets: seeds.witnesses,
            min_seed_sets_truncated: seeds.truncated,
            exact: true,
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let family = sample_minimal_strictly_cohesive(net, opts.samples, &mut rng);
    let only = family.len() == 1 && family[0].len() == n;
    let seeds = greedy_hitting_set(n, &family);
    Ok(CohesionReport {
        minimal_strictly_cohesive: family,
        only_scs_is_v: only,
        heavy_cycle,
        min_seed_size: seeds.len(),
        min_seed_sets: vec![seeds],
        min_seed_sets_truncated: false,
        exact: false,
    })
}
