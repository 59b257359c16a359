//! The opinion process itself: costs, Pareto-improvement sets, the
//! asynchronous stochastic update, and equilibrium tests.
//!
//! The social cost of node `i` choosing `z` is `sum_j w_ij * |z - x_j|`,
//! where `x_j` is the current state for every `j` (a self-loop therefore
//! anchors a node to its own current opinion). The cognitive cost is
//! `|z - theta|`. A move is admissible when it does not raise either cost.

use std::ops::RangeInclusive;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cohesion::is_strictly_cohesive;
use crate::error::{Error, Result};
use crate::graph::InfluenceNetwork;
use crate::nodeset::NodeSet;
use crate::scalar::Scalar;

/// Contiguous integer opinions `[lo, hi]` with a designated truth `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpinionDomain {
    pub lo: i64,
    pub hi: i64,
    pub theta: i64,
}

impl OpinionDomain {
    pub fn new(lo: i64, hi: i64, theta: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty opinion range [{lo}, {hi}]")));
        }
        if theta < lo || theta > hi {
            return Err(Error::OutOfDomain { value: theta, lo, hi });
        }
        Ok(Self { lo, hi, theta })
    }

    pub fn contains(&self, z: i64) -> bool {
        self.lo <= z && z <= self.hi
    }

    pub fn check(&self, z: i64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { value: z, lo: self.lo, hi: self.hi })
        }
    }

    pub fn opinions(&self) -> RangeInclusive<i64> {
        self.lo..=self.hi
    }

    pub fn size(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    /// True when opinions exist on both sides of the truth.
    pub fn truth_is_interior(&self) -> bool {
        self.lo < self.theta && self.theta < self.hi
    }

    /// Reflection `z -> 2*theta - z`, which leaves both costs invariant.
    pub fn reflect(&self, z: i64) -> i64 {
        2 * self.theta - z
    }

    pub fn reflected(&self) -> Self {
        Self {
            lo: self.reflect(self.hi),
            hi: self.reflect(self.lo),
            theta: self.theta,
        }
    }
}

/// Everyone's expressed opinion, indexed by node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpinionState(Vec<i64>);

impl OpinionState {
    pub fn new(values: Vec<i64>) -> Self {
        OpinionState(values)
    }

    pub fn uniform(n: usize, value: i64) -> Self {
        OpinionState(vec![value; n])
    }

    pub fn random<R: Rng + ?Sized>(n: usize, dom: &OpinionDomain, rng: &mut R) -> Self {
        OpinionState((0..n).map(|_| rng.gen_range(dom.opinions())).collect())
    }

    /// Checks the length against `n` and every entry against the domain.
    pub fn validate(&self, n: usize, dom: &OpinionDomain) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::InvalidParameter(format!(
                "state has {} entries, network has {n} nodes",
                self.0.len()
            )));
        }
        self.0.iter().try_for_each(|&z| dom.check(z))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, z: i64) {
        self.0[i] = z;
    }

    /// The common value if every node agrees.
    pub fn consensus(&self) -> Option<i64> {
        let first = *self.0.first()?;
        self.0.iter().all(|&z| z == first).then_some(first)
    }

    pub fn is_consensus(&self) -> bool {
        self.consensus().is_some()
    }

    pub fn map(&self, f: impl Fn(i64) -> i64) -> Self {
        OpinionState(self.0.iter().map(|&z| f(z)).collect())
    }
}

impl From<Vec<i64>> for OpinionState {
    fn from(v: Vec<i64>) -> Self {
        OpinionState(v)
    }
}

/// One activation: `node` adopts `opinion` (possibly its current one).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub node: usize,
    pub opinion: i64,
}

impl Event {
    pub fn new(node: usize, opinion: i64) -> Self {
        Self { node, opinion }
    }
}

/// The Pareto-improvement set of one node, always an integer interval that
/// contains the node's current opinion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ParetoSet {
    pub lo: i64,
    pub hi: i64,
}

impl ParetoSet {
    pub fn contains(&self, z: i64) -> bool {
        self.lo <= z && z <= self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn iter(&self) -> RangeInclusive<i64> {
        self.lo..=self.hi
    }
}

pub fn social_cost<W: Scalar>(net: &InfluenceNetwork<W>, x: &OpinionState, i: usize, z: i64) -> W {
    net.row(i).iter().fold(W::zero(), |acc, (j, w)| {
        let d = (z - x.get(*j)).abs();
        if d == 0 {
            acc
        } else {
            acc + w.clone() * W::from_int(d)
        }
    })
}

pub fn cognitive_cost(dom: &OpinionDomain, z: i64) -> Result<u64> {
    dom.check(z)?;
    Ok((z - dom.theta).unsigned_abs())
}

/// Opinions that raise neither the social nor the cognitive cost of node `i`.
///
/// The cognitive constraint is the window `[theta - d, theta + d]` with
/// `d = |x_i - theta|`; the social cost is convex in `z`, so its sublevel
/// set is an interval around `x_i` and can be found by scanning outward.
pub fn pareto_set<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x: &OpinionState,
    i: usize,
) -> ParetoSet {
    let cur = x.get(i);
    let d = (cur - dom.theta).abs();
    let lo_bound = dom.lo.max(dom.theta - d);
    let hi_bound = dom.hi.min(dom.theta + d);
    let base = social_cost(net, x, i, cur);
    let mut hi = cur;
    while hi < hi_bound && social_cost(net, x, i, hi + 1).tol_le(&base) {
        hi += 1;
    }
    let mut lo = cur;
    while lo > lo_bound && social_cost(net, x, i, lo - 1).tol_le(&base) {
        lo -= 1;
    }
    ParetoSet { lo, hi }
}

pub fn is_legal_update<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x: &OpinionState,
    i: usize,
    z: i64,
) -> bool {
    if i >= net.n() || !dom.contains(z) {
        return false;
    }
    let cur = x.get(i);
    if (z - dom.theta).abs() > (cur - dom.theta).abs() {
        return false;
    }
    social_cost(net, x, i, z).tol_le(&social_cost(net, x, i, cur))
}

/// How an activated node picks from its Pareto-improvement set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    /// Uniform over the whole set, current opinion included.
    #[default]
    Uniform,
    /// Uniform over the set minus the current opinion, when that is non-empty.
    UniformExcludingCurrent,
}

/// One asynchronous activation: a uniformly drawn node moves to an opinion
/// drawn from its Pareto-improvement set. Returns the event, which is
/// recorded even when the opinion does not change.
pub fn step<W: Scalar, R: Rng + ?Sized>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x: &mut OpinionState,
    rng: &mut R,
    choice: Choice,
) -> Event {
    let i = rng.gen_range(0..net.n());
    let set = pareto_set(net, dom, x, i);
    let cur = x.get(i);
    let z = match choice {
        Choice::Uniform => rng.gen_range(set.iter()),
        Choice::UniformExcludingCurrent if set.is_singleton() => cur,
        Choice::UniformExcludingCurrent => {
            let z = rng.gen_range(set.lo..set.hi);
            if z >= cur {
                z + 1
            } else {
                z
            }
        }
    };
    x.set(i, z);
    Event::new(i, z)
}

/// Direct test: every Pareto-improvement set is a singleton.
pub fn is_equilibrium<W: Scalar>(net: &InfluenceNetwork<W>, dom: &OpinionDomain, x: &OpinionState) -> bool {
    (0..net.n()).all(|i| pareto_set(net, dom, x, i).is_singleton())
}

/// Structural test: `x` is a consensus, or every sublevel set `{x <= z}`
/// with `z < theta` and every superlevel set `{x >= z}` with `z > theta` is
/// strictly cohesive. Independent of [`is_equilibrium`]; the two agree.
pub fn is_equilibrium_by_cohesion<W: Scalar>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x: &OpinionState,
) -> bool {
    if x.is_consensus() {
        return true;
    }
    let sc = |set: NodeSet| is_strictly_cohesive(net, &set).expect("level sets are in range");
    (dom.lo..dom.theta).all(|z| sc(level_set(x, z, Level::Le)))
        && (dom.theta + 1..=dom.hi).all(|z| sc(level_set(x, z, Level::Ge)))
}

/// Comparison used by [`level_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

/// Nodes whose opinion stands in relation `rel` to `z`.
pub fn level_set(x: &OpinionState, z: i64, rel: Level) -> NodeSet {
    let keep = |v: i64| match rel {
        Level::Le => v <= z,
        Level::Lt => v < z,
        Level::Ge => v >= z,
        Level::Gt => v > z,
        Level::Eq => v == z,
    };
    x.as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &v)| keep(v))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationOptions {
    pub max_steps: u64,
    /// Equilibrium test period; `None` means once every `n` steps.
    pub check_every: Option<u64>,
    pub choice: Choice,
    pub record_events: bool,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            check_every: None,
            choice: Choice::Uniform,
            record_events: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    pub final_state: OpinionState,
    pub steps: u64,
    pub converged: bool,
    /// Every activation in order (empty unless requested).
    pub events: Vec<Event>,
}

/// Runs the process from `x0` until an equilibrium is detected or
/// `max_steps` activations have happened. The state is tested at step 0,
/// every `check_every` steps, and once more at `max_steps`.
pub fn simulate<W: Scalar, R: Rng + ?Sized>(
    net: &InfluenceNetwork<W>,
    dom: &OpinionDomain,
    x0: &OpinionState,
    rng: &mut R,
    opts: &SimulationOptions,
) -> SimulationOutcome {
    let period = opts.check_every.unwrap_or(net.n() as u64).max(1);
    let mut x = x0.clone();
    let mut events = Vec::new();
    let mut steps = 0u64;
    let mut converged = is_equilibrium(net, dom, &x);
    while !converged && steps < opts.max_steps {
        let ev = step(net, dom, &mut x, rng, opts.choice);
        steps += 1;
        if opts.record_events {
            events.push(ev);
        }
        if steps.is_multiple_of(period) || steps == opts.max_steps {
            converged = is_equilibrium(net, dom, &x);
        }
    }
    SimulationOutcome { final_state: x, steps, converged, events }
}
