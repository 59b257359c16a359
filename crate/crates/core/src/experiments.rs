//! Reproducible Monte Carlo ensembles over random network families.
//!
//! A sweep runs `replicates` independent simulations at every grid value of
//! the family's free parameter (`p` for Erdős–Rényi, `beta` for
//! Watts–Strogatz) and summarizes four end-state statistics with 95%
//! confidence intervals. Replicate `i` draws its seed from
//! `(master_seed, i)` only, so the same index sees the same randomness at
//! every grid value and results do not depend on the degree of parallelism.

use std::path::PathBuf;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, Choice, OpinionDomain, OpinionState, SimulationOptions};
use crate::error::{Error, Result};
use crate::graph::{erdos_renyi, lattice, watts_strogatz};
use crate::{Network, Scalar};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Lattice,
    ErdosRenyi,
    WattsStrogatz,
}

/// Where the truth comes from. Serialized as `"uniform_random"` or
/// `{"fixed": 3}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaPolicy {
    Fixed(i64),
    /// Drawn uniformly from the domain, independently per replicate.
    #[default]
    UniformRandom,
}

/// Where initial opinions come from.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Policy {
    /// Each node independently uniform over the domain.
    #[default]
    UniformRandom,
    /// One state, read from a file of comma- or whitespace-separated
    /// integers, shared by every replicate.
    File(PathBuf),
    /// Replicate `i` uses entry `i mod len`.
    SeededList(Vec<Vec<i64>>),
}

/// How end-state opinion clusters are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterMode {
    /// Number of distinct opinion values.
    #[default]
    DistinctValues,
    /// Connected components of the undirected skeleton after removing
    /// edges between nodes that disagree.
    Components,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub rows: Option<usize>,
    #[serde(default)]
    pub cols: Option<usize>,
    /// Values of the free parameter; empty means "use the fixed value".
    #[serde(default)]
    pub grid: Vec<f64>,
    pub lo: i64,
    pub hi: i64,
    #[serde(default)]
    pub theta_policy: ThetaPolicy,
    #[serde(default)]
    pub x0_policy: X0Policy,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default)]
    pub check_every: Option<u64>,
    #[serde(default)]
    pub choice: Choice,
    #[serde(default)]
    pub cluster_mode: ClusterMode,
    /// Whether replicates that hit `max_steps` enter the statistics.
    #[serde(default = "default_true")]
    pub include_nonconverged: bool,
}

fn default_replicates() -> usize {
    100
}

fn default_max_steps() -> u64 {
    1_000_000
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    /// A configuration with the given family and domain and every other
    /// field at its default.
    pub fn new(family: Family, lo: i64, hi: i64) -> Self {
        Self {
            family,
            n: None,
            p: None,
            k: None,
            beta: None,
            rows: None,
            cols: None,
            grid: Vec::new(),
            lo,
            hi,
            theta_policy: ThetaPolicy::default(),
            x0_policy: X0Policy::default(),
            replicates: default_replicates(),
            master_seed: 0,
            max_steps: default_max_steps(),
            check_every: None,
            choice: Choice::default(),
            cluster_mode: ClusterMode::default(),
            include_nonconverged: true,
        }
    }

    /// Full-size protocol: 1000 replicates on the grid 0.01, 0.02, ..., 1.
    pub fn full_scale(mut self) -> Self {
        self.replicates = 1000;
        if self.family != Family::Lattice {
            self.grid = (1..=100).map(|i| i as f64 / 100.0).collect();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        let dom = OpinionDomain::new(self.lo, self.hi, self.lo)?;
        if let ThetaPolicy::Fixed(theta) = self.theta_policy {
            dom.check(theta)?;
        }
        if self.replicates == 0 {
            return bad("replicates must be >= 1".into());
        }
        if let Some(&g) = self.grid.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return bad(format!("grid value {g} outside [0, 1]"));
        }
        if self.check_every == Some(0) {
            return bad("check_every must be >= 1".into());
        }
        match self.family {
            Family::Lattice => {
                if self.rows.is_none() || self.cols.is_none() {
                    return bad("lattice needs rows and cols".into());
                }
                if !self.grid.is_empty() {
                    return bad("lattice has no sweepable parameter; leave grid empty".into());
                }
            }
            Family::ErdosRenyi => {
                if self.n.is_none() {
                    return bad("erdos_renyi needs n".into());
                }
                if self.grid.is_empty() && self.p.is_none() {
                    return bad("erdos_renyi needs p or a grid".into());
                }
            }
            Family::WattsStrogatz => {
                if self.n.is_none() || self.k.is_none() {
                    return bad("watts_strogatz needs n and k".into());
                }
                if self.grid.is_empty() && self.beta.is_none() {
                    return bad("watts_strogatz needs beta or a grid".into());
                }
            }
        }
        if let X0Policy::SeededList(list) = &self.x0_policy {
            if list.is_empty() {
                return bad("seeded_list is empty".into());
            }
        }
        Ok(())
    }

    /// The swept parameter value currently set (0 for lattices).
    pub fn parameter(&self) -> f64 {
        match self.family {
            Family::Lattice => 0.0,
            Family::ErdosRenyi => self.p.unwrap_or(0.0),
            Family::WattsStrogatz => self.beta.unwrap_or(0.0),
        }
    }

    /// Copy with the swept parameter set to `value`.
    pub fn at(&self, value: f64) -> Self {
        let mut cfg = self.clone();
        match cfg.family {
            Family::Lattice => {}
            Family::ErdosRenyi => cfg.p = Some(value),
            Family::WattsStrogatz => cfg.beta = Some(value),
        }
        cfg
    }

    fn grid_points(&self) -> Vec<f64> {
        if self.grid.is_empty() {
            vec![self.parameter()]
        } else {
            self.grid.clone()
        }
    }

    fn network<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Network> {
        let need = |v: Option<usize>, name: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("missing {name}")))
        };
        let needf = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidParameter(format!("missing {name}")))
        };
        match self.family {
            Family::Lattice => lattice(need(self.rows, "rows")?, need(self.cols, "cols")?),
            Family::ErdosRenyi => erdos_renyi(need(self.n, "n")?, needf(self.p, "p")?, rng),
            Family::WattsStrogatz => watts_strogatz(
                need(self.n, "n")?,
                need(self.k, "k")?,
                needf(self.beta, "beta")?,
                rng,
            ),
        }
    }

    fn initial_state<R: Rng + ?Sized>(
        &self,
        n: usize,
        dom: &OpinionDomain,
        index: usize,
        rng: &mut R,
    ) -> Result<OpinionState> {
        let x = match &self.x0_policy {
            X0Policy::UniformRandom => return Ok(OpinionState::random(n, dom, rng)),
            X0Policy::File(path) => parse_state(&std::fs::read_to_string(path)?)?,
            X0Policy::SeededList(list) => OpinionState::new(list[index % list.len()].clone()),
        };
        x.validate(n, dom)?;
        Ok(x)
    }
}

/// Parses comma- or whitespace-separated integers.
pub fn parse_state(text: &str) -> Result<OpinionState> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::InvalidParameter(format!("bad opinion {t:?}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(OpinionState::new)
}

/// Seed of replicate `index`: the first word of ChaCha stream `index`
/// keyed by `master`.
pub fn replicate_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub param: f64,
    pub replicate: usize,
    pub seed: u64,
    pub theta: i64,
    pub converged: bool,
    pub steps: u64,
    pub mean_abs_dist_to_truth: f64,
    pub consensus: bool,
    pub consensus_on_truth: bool,
    pub opinion_variance: f64,
    pub cluster_count: usize,
}

/// One replicate: network, truth and initial state are drawn (in that
/// order) from the replicate's own generator, then the process runs until
/// equilibrium or `max_steps`. Non-convergence is recorded, not raised.
pub fn run_replicate(cfg: &ExperimentConfig, index: usize) -> Result<RunRecord> {
    cfg.validate()?;
    if index >= cfg.replicates {
        return Err(Error::InvalidParameter(format!(
            "replicate index {index} >= replicates {}",
            cfg.replicates
        )));
    }
    let seed = replicate_seed(cfg.master_seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = cfg.network(&mut rng)?;
    let theta = match cfg.theta_policy {
        ThetaPolicy::Fixed(t) => t,
        ThetaPolicy::UniformRandom => rng.gen_range(cfg.lo..=cfg.hi),
    };
    let dom = OpinionDomain::new(cfg.lo, cfg.hi, theta)?;
    let x0 = cfg.initial_state(net.n(), &dom, index, &mut rng)?;
    let opts = SimulationOptions {
        max_steps: cfg.max_steps,
        check_every: cfg.check_every,
        choice: cfg.choice,
        record_events: false,
    };
    let out = simulate(&net, &dom, &x0, &mut rng, &opts);
    let x = &out.final_state;
    let consensus = x.consensus();
    Ok(RunRecord {
        param: cfg.parameter(),
        replicate: index,
        seed,
        theta,
        converged: out.converged,
        steps: out.steps,
        mean_abs_dist_to_truth: mean_abs_distance(x, theta),
        consensus: consensus.is_some(),
        consensus_on_truth: consensus == Some(theta),
        opinion_variance: variance(x),
        cluster_count: cluster_count(&net, x, cfg.cluster_mode),
    })
}

pub fn mean_abs_distance(x: &OpinionState, theta: i64) -> f64 {
    let total: i64 = x.as_slice().iter().map(|v| (v - theta).abs()).sum();
    total as f64 / x.len() as f64
}

/// Population variance of the opinions.
pub fn variance(x: &OpinionState) -> f64 {
    let n = x.len() as f64;
    let mean = x.as_slice().iter().map(|&v| v as f64).sum::<f64>() / n;
    x.as_slice().iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n
}

pub fn distinct_opinions(x: &OpinionState) -> usize {
    let mut v = x.as_slice().to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

pub fn cluster_count<W: Scalar>(net: &crate::InfluenceNetwork<W>, x: &OpinionState, mode: ClusterMode) -> usize {
    match mode {
        ClusterMode::DistinctValues => distinct_opinions(x),
        ClusterMode::Components => agreement_components(net, x),
    }
}

fn agreement_components<W: Scalar>(net: &crate::InfluenceNetwork<W>, x: &OpinionState) -> usize {
    let n = net.n();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for (i, j, _) in net.edges() {
        if x.get(i) == x.get(j) {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            parent[a] = b;
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    MeanAbsDistToTruth,
    ConsensusOnTruth,
    OpinionVariance,
    ClusterCount,
    Consensus,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::MeanAbsDistToTruth,
        Metric::ConsensusOnTruth,
        Metric::OpinionVariance,
        Metric::ClusterCount,
        Metric::Consensus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::MeanAbsDistToTruth => "mean_abs_dist_to_truth",
            Metric::ConsensusOnTruth => "consensus_on_truth",
            Metric::OpinionVariance => "opinion_variance",
            Metric::ClusterCount => "cluster_count",
            Metric::Consensus => "consensus",
        }
    }

    fn is_bernoulli(self) -> bool {
        matches!(self, Metric::ConsensusOnTruth | Metric::Consensus)
    }

    pub fn value(self, r: &RunRecord) -> f64 {
        match self {
            Metric::MeanAbsDistToTruth => r.mean_abs_dist_to_truth,
            Metric::ConsensusOnTruth => r.consensus_on_truth as u8 as f64,
            Metric::OpinionVariance => r.opinion_variance,
            Metric::ClusterCount => r.cluster_count as f64,
            Metric::Consensus => r.consensus as u8 as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSummary {
    pub metric: Metric,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl MetricSummary {
    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub param: f64,
    pub metrics: Vec<MetricSummary>,
    pub n_reps: usize,
    pub n_nonconverged: usize,
    /// Set when a single replicate entered the statistics, so the intervals
    /// collapse to the mean.
    pub degenerate_ci: bool,
}

impl SweepSummary {
    pub fn metric(&self, m: Metric) -> &MetricSummary {
        self.metrics.iter().find(|s| s.metric == m).expect("all metrics summarized")
    }

    pub fn mean(&self, m: Metric) -> f64 {
        self.metric(m).mean
    }
}

/// Normal-approximation interval `mean +- 1.96 SE` with the sample
/// standard deviation.
pub fn normal_interval(values: &[f64]) -> (f64, f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, mean, mean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let half = Z95 * (var / m).sqrt();
    (mean, mean - half, mean + half)
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64, f64) {
    let m = trials as f64;
    let p = successes as f64 / m;
    if trials < 2 {
        return (p, p, p);
    }
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt();
    (p, (center - half).max(0.0), (center + half).min(1.0))
}

/// Aggregates the replicates of one grid value.
pub fn summarize(param: f64, records: &[RunRecord], include_nonconverged: bool) -> SweepSummary {
    let used: Vec<&RunRecord> = records
        .iter()
        .filter(|r| include_nonconverged || r.converged)
        .collect();
    let metrics = Metric::ALL
        .iter()
        .map(|&metric| {
            let values: Vec<f64> = used.iter().map(|r| metric.value(r)).collect();
            let (mean, ci_lo, ci_hi) = if values.is_empty() {
                (f64::NAN, f64::NAN, f64::NAN)
            } else if metric.is_bernoulli() {
                wilson_interval(values.iter().filter(|&&v| v == 1.0).count(), values.len())
            } else {
                normal_interval(&values)
            };
            MetricSummary { metric, mean, ci_lo, ci_hi }
        })
        .collect();
    SweepSummary {
        param,
        metrics,
        n_reps: records.len(),
        n_nonconverged: records.iter().filter(|r| !r.converged).count(),
        degenerate_ci: used.len() < 2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// One row per grid value, in grid order.
    pub summaries: Vec<SweepSummary>,
    /// Every replicate, grouped by grid value and ordered by index.
    pub records: Vec<RunRecord>,
}

/// Runs every replicate at every grid value on the current rayon pool.
pub fn sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let points = cfg.grid_points();
    let configs: Vec<ExperimentConfig> = points.iter().map(|&v| cfg.at(v)).collect();
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|g| (0..cfg.replicates).map(move |i| (g, i)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(g, i)| run_replicate(&configs[g], i))
        .collect::<Result<Vec<_>>>()?;
    let summaries = records
        .chunks(cfg.replicates)
        .zip(&points)
        .map(|(chunk, &param)| summarize(param, chunk, cfg.include_nonconverged))
        .collect();
    Ok(SweepResult { summaries, records })
}

/// Like [`sweep`], on a dedicated pool of `jobs` threads.
pub fn sweep_with_jobs(cfg: &ExperimentConfig, jobs: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| sweep(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::four_node_example;

    fn state(v: &[i64]) -> OpinionState {
        OpinionState::new(v.to_vec())
    }

    fn er(n: usize, p: f64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(Family::ErdosRenyi, 1, 5);
        cfg.n = Some(n);
        cfg.p = Some(p);
        cfg.replicates = 4;
        cfg.master_seed = 11;
        cfg
    }

    #[test]
    fn cluster_count_examples() {
        let net = four_node_example();
        assert_eq!(distinct_opinions(&OpinionState::uniform(4, 2)), 1);
        assert_eq!(cluster_count(&net, &state(&[-1, -1, 1, 2]), ClusterMode::DistinctValues), 3);
        assert_eq!(distinct_opinions(&state(&[5, 5, 7, 7, 7])), 2);
    }

    #[test]
    fn components_split_equal_values() {
        let net: Network = lattice(1, 5).unwrap();
        let x = state(&[1, 1, 2, 1, 1]);
        assert_eq!(cluster_count(&net, &x, ClusterMode::DistinctValues), 2);
        assert_eq!(cluster_count(&net, &x, ClusterMode::Components), 3);
    }

    #[test]
    fn single_node_is_immediate_consensus() {
        let r = run_replicate(&er(1, 0.5), 0).unwrap();
        assert!(r.converged && r.consensus);
        assert_eq!(r.steps, 0);
        assert_eq!(r.cluster_count, 1);
        assert_eq!(r.opinion_variance, 0.0);
    }

    #[test]
    fn isolated_nodes_keep_their_opinions() {
        // With p = 0 every node listens only to itself, so any move raises
        // its social cost and the initial state is already an equilibrium.
        let mut cfg = er(30, 0.0);
        cfg.theta_policy = ThetaPolicy::Fixed(3);
        let r = run_replicate(&cfg, 2).unwrap();
        assert!(r.converged);
        assert_eq!(r.steps, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
        let _: Network = erdos_renyi(30, 0.0, &mut rng).unwrap();
        let dom = OpinionDomain::new(1, 5, 3).unwrap();
        let x0 = OpinionState::random(30, &dom, &mut rng);
        assert_eq!(r.mean_abs_dist_to_truth, mean_abs_distance(&x0, 3));
    }

    #[test]
    fn replicate_is_deterministic() {
        let cfg = er(12, 0.3);
        assert_eq!(run_replicate(&cfg, 1).unwrap(), run_replicate(&cfg, 1).unwrap());
        assert_ne!(replicate_seed(11, 0), replicate_seed(11, 1));
        assert_ne!(replicate_seed(11, 0), replicate_seed(12, 0));
        assert!(run_replicate(&cfg, 4).is_err());
    }

    #[test]
    fn metric_consistency() {
        let mut cfg = er(15, 0.3);
        cfg.replicates = 30;
        for r in sweep(&cfg).unwrap().records {
            assert!(!r.consensus_on_truth || r.consensus);
            assert_eq!(r.consensus, r.cluster_count == 1);
            assert_eq!(r.opinion_variance == 0.0, r.cluster_count == 1);
        }
    }

    #[test]
    fn sweep_independent_of_jobs() {
        let mut cfg = er(15, 0.2);
        cfg.grid = vec![0.1, 0.4];
        cfg.replicates = 6;
        let a = sweep_with_jobs(&cfg, 1).unwrap();
        let b = sweep_with_jobs(&cfg, 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.summaries.len(), 2);
        assert_eq!(a.summaries[1].param, 0.4);
        assert_eq!(a.summaries[0].n_reps, 6);
    }

    #[test]
    fn single_replicate_interval_collapses() {
        let mut cfg = er(10, 0.3);
        cfg.replicates = 1;
        let s = &sweep(&cfg).unwrap().summaries[0];
        assert!(s.degenerate_ci);
        for m in &s.metrics {
            assert_eq!(m.half_width(), 0.0);
        }
    }

    #[test]
    fn intervals() {
        let (m, lo, hi) = normal_interval(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sd = sqrt(5/3), se = sd / 2
        let half = 1.96 * (5.0f64 / 3.0).sqrt() / 2.0;
        assert!((hi - m - half).abs() < 1e-12 && (m - lo - half).abs() < 1e-12);

        let (p, lo, hi) = wilson_interval(0, 100);
        assert_eq!((p, lo), (0.0, 0.0));
        assert!(hi > 0.0 && hi < 0.05);
        let (p, lo, hi) = wilson_interval(50, 100);
        assert_eq!(p, 0.5);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn config_validation_and_json() {
        let mut cfg = er(10, 0.3);
        cfg.replicates = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = er(10, 0.3);
        cfg.grid = vec![0.5, 1.5];
        assert!(cfg.validate().is_err());
        let mut cfg = er(10, 0.3);
        cfg.theta_policy = ThetaPolicy::Fixed(9);
        assert!(cfg.validate().is_err());

        let json = r#"{"family":"watts_strogatz","n":10,"k":4,"grid":[0.0,1.0],
            "lo":1,"hi":5,"theta_policy":{"fixed":3},"replicates":2}"#;
        let cfg: ExperimentConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.theta_policy, ThetaPolicy::Fixed(3));
        assert_eq!(cfg.max_steps, 1_000_000);
        cfg.validate().unwrap();
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"family":"lattice","lo":0,"hi":1,"bogus":1}"#).is_err());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn seeded_list_and_lattice() {
        let mut cfg = ExperimentConfig::new(Family::Lattice, 1, 3);
        cfg.rows = Some(1);
        cfg.cols = Some(3);
        cfg.replicates = 2;
        cfg.theta_policy = ThetaPolicy::Fixed(2);
        cfg.x0_policy = X0Policy::SeededList(vec![vec![2, 2, 2], vec![1, 3, 1]]);
        let res = sweep(&cfg).unwrap();
        assert!(res.records[0].consensus_on_truth);
        assert_eq!(res.records[0].steps, 0);
        assert_eq!(res.summaries.len(), 1);
        cfg.x0_policy = X0Policy::SeededList(vec![vec![1, 2]]);
        assert!(run_replicate(&cfg, 0).is_err());
    }

    #[test]
    fn parse_state_formats() {
        assert_eq!(parse_state("1, 2\n-3 4").unwrap(), state(&[1, 2, -3, 4]));
        assert!(parse_state("1,x").is_err());
    }
}
