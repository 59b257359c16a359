//! Explicit legal update sequences.
//!
//! Each constructor returns a finite sequence of events that is legal from
//! the given initial state and ends in a state with a known property
//! (an equilibrium, consensus on the truth, or a non-truth outcome). The
//! transforms rewrite an existing truth-reaching sequence without changing
//! which nodes move or when.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::cohesion::{cohesive_expansion_order, is_strictly_cohesive, largest_strictly_cohesive_subset};
use crate::dynamics::{is_equilibrium, is_legal_update, level_set, pareto_set, Event, Level, OpinionDomain, OpinionState};
use crate::error::{Error, Result};
use crate::graph::InfluenceNetwork;
use crate::nodeset::NodeSet;
use crate::scalar::Scalar;

/// Ordered list of activations. Legality is always relative to a network,
/// a domain, and a starting state.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct UpdateSequence(Vec<Event>);

impl UpdateSequence {
    pub fn new(events: Vec<Event>) -> Self {
        UpdateSequence(events)
    }

    /// Builds from `(node, opinion)` pairs with 0-based node ids.
    pub fn from_pairs(pairs: &[(usize, i64)]) -> Self {
        UpdateSequence(pairs.iter().map(|&(i, z)| Event::new(i, z)).collect())
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, ev: Event) {
        self.0.push(ev);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.0.iter()
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.0.iter().map(|e| e.node).collect()
    }

    pub fn pairs(&self) -> Vec<(usize, i64)> {
        self.0.iter().map(|e| (e.node, e.opinion)).collect()
    }

    fn concat(mut self, other: UpdateSequence) -> Self {
        self.0.extend(other.0);
        self
    }
}

impl FromIterator<Event> for UpdateSequence {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        UpdateSequence(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Legality {
    pub legal: bool,
    /// Index of the first event that is not a Pareto improvement.
    pub first_violation: Option<usize>,
    pub final_state: OpinionState,
}

/// Replays `seq` from `x0`, checking each event against the then-current
/// state. Events naming unknown nodes or out-of-domain opinions count as
/// violations and are not applied; every other event is applied.
pub fn verify_sequence_legal<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    seq: &UpdateSequence,
) -> Legality {
    let mut x = x0.clone();
    let mut first_violation = None;
    for (k, ev) in seq.iter().enumerate() {
        let valid = ev.node < net.n() && dom.contains(ev.opinion);
        if !(valid && is_legal_update(net, dom, &x, ev.node, ev.opinion)) && first_violation.is_none() {
            first_violation = Some(k);
        }
        if valid {
            x.set(ev.node, ev.opinion);
        }
    }
    Legality { legal: first_violation.is_none(), first_violation, final_state: x }
}

/// An update that moves a node from one strict side of the truth to the other.
pub fn is_crossing(dom: &OpinionDomain, from: i64, to: i64) -> bool {
    (from - dom.theta) * (to - dom.theta) < 0
}

/// Number of crossing updates when `seq` is replayed from `x0`.
pub fn count_crossings(dom: &OpinionDomain, x0: &OpinionState, seq: &UpdateSequence) -> usize {
    let mut x = x0.clone();
    let mut count = 0;
    for ev in seq.iter() {
        if is_crossing(dom, x.get(ev.node), ev.opinion) {
            count += 1;
        }
        x.set(ev.node, ev.opinion);
    }
    count
}

/// Replays without checking legality.
pub fn replay(x0: &OpinionState, seq: &UpdateSequence) -> OpinionState {
    let mut x = x0.clone();
    for ev in seq.iter() {
        x.set(ev.node, ev.opinion);
    }
    x
}

/// Drops events that leave the state unchanged.
pub fn without_noops(x0: &OpinionState, seq: &UpdateSequence) -> UpdateSequence {
    let mut x = x0.clone();
    let mut out = Vec::new();
    for ev in seq.iter() {
        if x.get(ev.node) != ev.opinion {
            out.push(*ev);
            x.set(ev.node, ev.opinion);
        }
    }
    UpdateSequence(out)
}

fn validate<W: Scalar>(net: &InfluenceNetwork<W>, dom: &OpinionDomain, x0: &OpinionState) -> Result<()> {
    x0.validate(net.n(), dom)
}

fn below_is_strictly_cohesive<W: Scalar>(net: &InfluenceNetwork<W>, x: &OpinionState, z: i64) -> Option<bool> {
    let below = level_set(x, z, Level::Lt);
    if below.is_empty() {
        None
    } else {
        Some(is_strictly_cohesive(net, &below).expect("level sets are in range"))
    }
}

/// Moves nodes below `target` up to `target`, lowest id first, while the set
/// of nodes below `target` is non-empty and not strictly cohesive. Each
/// moved node has weight at least one half on nodes at or above `target`,
/// so the move does not raise its social cost.
fn pull_up_to<W: Scalar>(net: &InfluenceNetwork<W>, x: &mut OpinionState, target: i64, out: &mut Vec<Event>) {
    let half = W::half();
    while below_is_strictly_cohesive(net, x, target) == Some(false) {
        let i = (0..net.n())
            .find(|&i| {
                x.get(i) < target
                    && net
                        .row(i)
                        .iter()
                        .filter(|(j, _)| x.get(*j) >= target)
                        .fold(W::zero(), |acc, (_, w)| acc + w.clone())
                        .tol_ge(&half)
            })
            .expect("a non-strictly-cohesive set has a member with weight >= 1/2 outside it");
        x.set(i, target);
        out.push(Event::new(i, target));
    }
}

/// Inward sweep on the side below the truth. Afterwards every set
/// `{x < z}` with `z <= theta` is empty or strictly cohesive.
fn settle_below<W: Scalar>(net: &InfluenceNetwork<W>, dom: &OpinionDomain, x: &mut OpinionState, out: &mut Vec<Event>) {
    // Closest threshold below the truth whose strict sublevel set is
    // non-empty and not strictly cohesive.
    let start = (dom.lo..=dom.theta)
        .rev()
        .find(|&z| below_is_strictly_cohesive(net, x, z) == Some(false));
    let Some(mut threshold) = start else {
        return;
    };
    loop {
        pull_up_to(net, x, threshold, out);
        let next = x.as_slice().iter().copied().filter(|&v| v < threshold).max();
        match next {
            Some(v) => threshold = v,
            None => return,
        }
    }
}

fn settle_above<W: Scalar>(net: &InfluenceNetwork<W>, dom: &OpinionDomain, x: &mut OpinionState, out: &mut Vec<Event>) {
    let mirror = dom.reflected();
    let mut y = x.map(|v| dom.reflect(v));
    let mut mirrored = Vec::new();
    settle_below(net, &mirror, &mut y, &mut mirrored);
    for ev in mirrored {
        let z = dom.reflect(ev.opinion);
        x.set(ev.node, z);
        out.push(Event::new(ev.node, z));
    }
}

/// A legal sequence from `x0` to an equilibrium.
///
/// Below the truth: start from the closest threshold whose strict sublevel
/// set is non-empty and not strictly cohesive, pull outer nodes up to it in
/// cohesive-expansion order, then repeat with the next occupied opinion
/// further out. The side above the truth is handled by reflection. No event
/// crosses the truth and every node's distance to it is non-increasing.
pub fn construct_equilibrium_sequence<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
) -> Result<UpdateSequence> {
    validate(net, dom, x0)?;
    if x0.is_consensus() {
        return Ok(UpdateSequence::default());
    }
    let mut x = x0.clone();
    let mut events = Vec::new();
    settle_below(net, dom, &mut x, &mut events);
    settle_above(net, dom, &mut x, &mut events);
    Ok(UpdateSequence(events))
}

fn require_truth_consensus<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    seq: &UpdateSequence,
) -> Result<()> {
    validate(net, dom, x0)?;
    let check = verify_sequence_legal(net, dom, x0, seq);
    if let Some(k) = check.first_violation {
        return Err(Error::Precondition(format!("input sequence is illegal at step {}", k + 1)));
    }
    if check.final_state.consensus() != Some(dom.theta) {
        return Err(Error::Precondition(format!(
            "input sequence does not end in consensus on the truth {}",
            dom.theta
        )));
    }
    Ok(())
}

/// Rewrites a legal truth-consensus sequence so that no event crosses the
/// truth: each event keeps its node, and keeps its opinion when that stays
/// strictly on the node's current side; otherwise the node moves to the
/// truth instead. The result is legal and still ends in truth consensus.
pub fn remove_crossing_updates<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    seq: &UpdateSequence,
) -> Result<UpdateSequence> {
    require_truth_consensus(net, dom, x0, seq)?;
    let theta = dom.theta;
    let mut y = x0.clone();
    let mut out = Vec::with_capacity(seq.len());
    for ev in seq.iter() {
        let cur = y.get(ev.node);
        let z = if (cur - theta) * (ev.opinion - theta) > 0 { ev.opinion } else { theta };
        y.set(ev.node, z);
        out.push(Event::new(ev.node, z));
    }
    Ok(UpdateSequence(out))
}

/// Rewrites a legal, crossing-free truth-consensus sequence so that nodes
/// stop one step short of the truth: every event targeting the truth is
/// redirected to `theta - 1` or `theta + 1` according to the node's side.
/// Replaying the result leaves every node that started below the truth at
/// `theta - 1` and every node that started above at `theta + 1`.
pub fn compress_to_pm1<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    seq: &UpdateSequence,
) -> Result<UpdateSequence> {
    require_truth_consensus(net, dom, x0, seq)?;
    let crossings = count_crossings(dom, x0, seq);
    if crossings > 0 {
        return Err(Error::Precondition(format!(
            "input sequence contains {crossings} crossing update(s)"
        )));
    }
    let theta = dom.theta;
    let mut y = x0.clone();
    let mut out = Vec::with_capacity(seq.len());
    for ev in seq.iter() {
        let cur = y.get(ev.node);
        let z = match (ev.opinion == theta, cur.cmp(&theta)) {
            (true, std::cmp::Ordering::Less) => theta - 1,
            (true, std::cmp::Ordering::Greater) => theta + 1,
            _ => ev.opinion,
        };
        y.set(ev.node, z);
        out.push(Event::new(ev.node, z));
    }
    Ok(UpdateSequence(out))
}

/// A legal sequence to consensus on the truth, available when neither the
/// nodes below the truth nor those above contain a non-empty strictly
/// cohesive set. Nodes below move straight to the truth in the addition
/// order of the cohesive expansion of `{x >= theta}`; then nodes above, in
/// the order of the expansion of `{x <= theta}`.
pub fn construct_truth_consensus_sequence<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
) -> Result<UpdateSequence> {
    validate(net, dom, x0)?;
    let theta = dom.theta;
    for (side, rel) in [("below", Level::Lt), ("above", Level::Gt)] {
        let witness = largest_strictly_cohesive_subset(net, &level_set(x0, theta, rel))?;
        if !witness.is_empty() {
            return Err(Error::CohesiveWitness { side: side.into(), witness });
        }
    }
    let mut x = x0.clone();
    let mut events = Vec::new();
    for (anchor, rel) in [(Level::Ge, Level::Lt), (Level::Le, Level::Gt)] {
        let movers = level_set(&x, theta, rel);
        let order = cohesive_expansion_order(net, &level_set(&x, theta, anchor))?;
        debug_assert_eq!(NodeSet::new(order.iter().copied()), movers);
        for i in order {
            x.set(i, theta);
            events.push(Event::new(i, theta));
        }
    }
    Ok(UpdateSequence(events))
}

/// Endpoint class of a constructed sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Consensus { value: i64 },
    NonConsensusEquilibrium,
    NonEquilibrium,
}

impl Outcome {
    pub fn classify<W: Scalar>(net: &InfluenceNetwork<W>, dom: &OpinionDomain, x: &OpinionState) -> Self {
        match x.consensus() {
            Some(value) => Outcome::Consensus { value },
            None if is_equilibrium(net, dom, x) => Outcome::NonConsensusEquilibrium,
            None => Outcome::NonEquilibrium,
        }
    }
}

/// Which branch produced a non-truth outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// The equilibrium sweep already ends away from truth consensus.
    Direct,
    /// After compressing to `theta +- 1`, a strictly cohesive block at
    /// `theta - 1` can never move; sweep to an equilibrium from there.
    PinnedBlock,
    /// After compressing to `theta +- 1`, the nodes at `theta + 1` absorb
    /// everyone in cohesive-expansion order.
    Expansion,
    /// The truth is an extreme opinion; compressing leaves everyone at the
    /// adjacent opinion.
    ExtremeTruth,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FalseOutcome {
    pub sequence: UpdateSequence,
    pub outcome: Outcome,
    pub pipeline: Pipeline,
}

/// A legal sequence ending in consensus away from the truth or in a
/// non-consensus equilibrium, for any start where nobody holds the truth.
///
/// First sweep to an equilibrium. If that already avoids truth consensus we
/// are done. Otherwise the sweep is a crossing-free truth-consensus sequence;
/// compress it so every node sits next to the truth, then either keep a
/// strictly cohesive block below pinned, or let the nodes above absorb the
/// rest. Events that do not change the state are dropped from the result.
pub fn construct_false_outcome_sequence<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
) -> Result<FalseOutcome> {
    validate(net, dom, x0)?;
    let theta = dom.theta;
    let at_truth = level_set(x0, theta, Level::Eq);
    if !at_truth.is_empty() {
        return Err(Error::Precondition(format!("nodes {at_truth} start at the truth {theta}")));
    }

    let sweep = construct_equilibrium_sequence(net, dom, x0)?;
    let x1 = replay(x0, &sweep);
    let (sequence, pipeline) = if x1.consensus() != Some(theta) {
        (sweep, Pipeline::Direct)
    } else {
        let uncrossed = remove_crossing_updates(net, dom, x0, &sweep)?;
        let compressed = compress_to_pm1(net, dom, x0, &uncrossed)?;
        let x2 = replay(x0, &compressed);
        if !dom.truth_is_interior() {
            (compressed, Pipeline::ExtremeTruth)
        } else {
            let pinned = largest_strictly_cohesive_subset(net, &level_set(&x2, theta - 1, Level::Eq))?;
            if !pinned.is_empty() {
                let rest = construct_equilibrium_sequence(net, dom, &x2)?;
                (compressed.concat(rest), Pipeline::PinnedBlock)
            } else {
                let order = cohesive_expansion_order(net, &level_set(&x2, theta + 1, Level::Eq))?;
                let rest = order.into_iter().map(|i| Event::new(i, theta + 1)).collect();
                (compressed.concat(rest), Pipeline::Expansion)
            }
        }
    };
    let sequence = without_noops(x0, &sequence);
    let end = replay(x0, &sequence);
    Ok(FalseOutcome { outcome: Outcome::classify(net, dom, &end), sequence, pipeline })
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    /// Longest sequence considered.
    pub max_depth: usize,
    /// Only accept sequences containing at least one crossing update.
    pub require_crossing: bool,
    /// Abort once this many (state, flag) pairs have been visited.
    pub max_states: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_depth: 12, require_crossing: false, max_states: 200_000 }
    }
}

/// Breadth-first search over legal non-trivial updates for a shortest
/// sequence from `x0` to consensus on `target`. Intended for tiny instances.
pub fn search_consensus_sequence<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    target: i64,
    opts: &SearchOptions,
) -> Result<Option<UpdateSequence>> {
    validate(net, dom, x0)?;
    dom.check(target)?;
    type Key = (Vec<i64>, bool);
    let start: Key = (x0.as_slice().to_vec(), false);
    let mut parent: HashMap<Key, Option<(Key, Event)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((key, depth)) = queue.pop_front() {
        let x = OpinionState::new(key.0.clone());
        if x.consensus() == Some(target) && (key.1 || !opts.require_crossing) {
            let mut events = Vec::new();
            let mut cur = key;
            while let Some(Some((prev, ev))) = parent.get(&cur) {
                events.push(*ev);
                cur = prev.clone();
            }
            events.reverse();
            return Ok(Some(UpdateSequence(events)));
        }
        if depth == opts.max_depth {
            continue;
        }
        for i in 0..net.n() {
            let set = pareto_set(net, dom, &x, i);
            for z in set.iter().filter(|&z| z != x.get(i)) {
                let mut next = key.0.clone();
                next[i] = z;
                let crossed = key.1 || is_crossing(dom, x.get(i), z);
                let nkey = (next, crossed);
                if parent.contains_key(&nkey) {
                    continue;
                }
                if parent.len() >= opts.max_states {
                    return Ok(None);
                }
                parent.insert(nkey.clone(), Some((key.clone(), Event::new(i, z))));
                queue.push_back((nkey, depth + 1));
            }
        }
    }
    Ok(None)
}
