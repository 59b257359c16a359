//! Subcommand implementations. Each returns the JSON payload of its verdict.

use std::path::{Path, PathBuf};

use pid_core::cohesion::{analyze, minimum_seed_sets, uncovered_strictly_cohesive, AnalyzeOptions, MAX_NODE_BUDGET};
use pid_core::dynamics::{is_equilibrium, simulate, Choice, OpinionDomain, OpinionState, SimulationOptions};
use pid_core::experiments::{parse_state, sweep_with_jobs, ExperimentConfig, Metric, RunRecord};
use pid_core::graph::{clustering_coefficient, density, erdos_renyi, lattice, watts_strogatz};
use pid_core::sequences::{
    compress_to_pm1, construct_equilibrium_sequence, construct_false_outcome_sequence,
    construct_truth_consensus_sequence, count_crossings, remove_crossing_updates, search_consensus_sequence,
    verify_sequence_legal, Outcome, SearchOptions, UpdateSequence,
};
use pid_core::{Network, NodeSet};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{csv_bytes, event_rows, read_network, read_sequence, read_state, write_atomic};
use crate::{
    AnalyzeArgs, ChoiceArg, CliError, Command, ConstructArgs, DomainArgs, GenerateArgs, GenerateFamily, Mode,
    SimulateArgs, StateArgs, SweepArgs, VerifySeedsArgs,
};

pub fn run(cmd: Command) -> Result<Value, CliError> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Construct(a) => construct(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::VerifySeeds(a) => verify_seeds(a),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payload serializes")
}

fn domain(d: &DomainArgs) -> Result<OpinionDomain, CliError> {
    OpinionDomain::new(d.lo, d.hi, d.theta).map_err(|e| CliError::usage(e.to_string()))
}

fn given_state(s: &StateArgs) -> Result<Option<OpinionState>, CliError> {
    match (&s.x0, &s.x0_file) {
        (Some(list), _) => parse_state(list).map(Some).map_err(|e| CliError::usage(e.to_string())),
        (None, Some(path)) => read_state(path).map(Some),
        (None, None) => Ok(None),
    }
}

fn generate(a: GenerateArgs) -> Result<Value, CliError> {
    let (net, name, out): (Network, &str, _) = match a.family {
        GenerateFamily::Lattice { rows, cols, out } => (lattice(rows, cols)?, "lattice", out),
        GenerateFamily::Er { n, p, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(out.seed);
            (erdos_renyi(n, p, &mut rng)?, "er", out)
        }
        GenerateFamily::Ws { n, k, beta, out } => {
            let mut rng = ChaCha8Rng::seed_from_u64(out.seed);
            (watts_strogatz(n, k, beta, &mut rng)?, "ws", out)
        }
    };
    let path = out.out.unwrap_or_else(|| PathBuf::from(format!("{name}.edges")));
    write_atomic(&path, net.to_edge_list().as_bytes())?;
    Ok(json!({
        "path": path,
        "family": name,
        "seed": out.seed,
        "n": net.n(),
        "edges": net.edge_count(),
        "density": density(&net),
        "clustering": clustering_coefficient(&net),
    }))
}

fn analyze_cmd(a: AnalyzeArgs) -> Result<Value, CliError> {
    if a.node_budget > MAX_NODE_BUDGET {
        return Err(CliError::usage(format!("--node-budget must be at most {MAX_NODE_BUDGET}")));
    }
    let net = read_network(&a.net)?;
    let opts = AnalyzeOptions { node_budget: a.node_budget, witness_cap: a.witness_cap, samples: a.samples, seed: a.seed };
    let report = analyze(&net, &opts)?;
    let mut payload = to_json(&report);
    payload["n"] = json!(net.n());
    Ok(payload)
}

fn simulate_cmd(a: SimulateArgs) -> Result<Value, CliError> {
    let net = read_network(&a.net)?;
    let dom = domain(&a.domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let x0 = match given_state(&a.state)? {
        Some(x) => x,
        None => OpinionState::random(net.n(), &dom, &mut rng),
    };
    x0.validate(net.n(), &dom)?;
    if a.check_every == Some(0) {
        return Err(CliError::usage("--check-every must be at least 1"));
    }
    let opts = SimulationOptions {
        max_steps: a.max_steps,
        check_every: a.check_every,
        choice: match a.choice {
            ChoiceArg::Uniform => Choice::Uniform,
            ChoiceArg::UniformExcludingCurrent => Choice::UniformExcludingCurrent,
        },
        record_events: a.events.is_some(),
    };
    let out = simulate(&net, &dom, &x0, &mut rng, &opts);
    if let Some(path) = &a.events {
        write_atomic(path, &csv_bytes(&["t", "node", "new_opinion"], event_rows(&out.events))?)?;
    }
    let consensus = out.final_state.consensus();
    Ok(json!({
        "seed": a.seed,
        "initial_state": x0,
        "final_state": out.final_state,
        "converged": out.converged,
        "steps": out.steps,
        "equilibrium": is_equilibrium(&net, &dom, &out.final_state),
        "consensus": consensus,
        "consensus_on_truth": consensus == Some(dom.theta),
        "events": a.events,
    }))
}

#[derive(Serialize)]
struct SequenceRow {
    step: usize,
    node: usize,
    new_opinion: i64,
}

fn sequence_rows(seq: &UpdateSequence) -> Vec<SequenceRow> {
    event_rows(seq.events())
        .map(|(step, node, new_opinion)| SequenceRow { step, node, new_opinion })
        .collect()
}

fn searched_sequence(
    net: &Network,
    dom: &OpinionDomain,
    x0: &OpinionState,
    depth: usize,
    prefer_crossing: bool,
) -> Result<UpdateSequence, CliError> {
    let mut opts = SearchOptions { max_depth: depth, require_crossing: prefer_crossing, ..Default::default() };
    if let Some(s) = search_consensus_sequence(net, dom, x0, dom.theta, &opts)? {
        return Ok(s);
    }
    opts.require_crossing = false;
    search_consensus_sequence(net, dom, x0, dom.theta, &opts)?.ok_or_else(|| {
        CliError::runtime(format!(
            "no legal sequence to consensus on {} found within {depth} updates; pass --sequence",
            dom.theta
        ))
    })
}

fn construct(a: ConstructArgs) -> Result<Value, CliError> {
    let net = read_network(&a.net)?;
    let dom = domain(&a.domain)?;
    let x0 = given_state(&a.state)?.ok_or_else(|| CliError::usage("construct needs --x0 or --x0-file"))?;
    x0.validate(net.n(), &dom)?;
    let input = match (a.mode, &a.sequence) {
        (Mode::Decross | Mode::Compress, Some(path)) => Some(read_sequence(path)?),
        (Mode::Decross, None) => Some(searched_sequence(&net, &dom, &x0, a.search_depth, true)?),
        (Mode::Compress, None) => {
            let found = searched_sequence(&net, &dom, &x0, a.search_depth, false)?;
            Some(remove_crossing_updates(&net, &dom, &x0, &found)?)
        }
        (_, Some(_)) => return Err(CliError::usage("--sequence only applies to decross and compress")),
        (_, None) => None,
    };
    let mut pipeline = None;
    let seq = match a.mode {
        Mode::Equilibrium => construct_equilibrium_sequence(&net, &dom, &x0)?,
        Mode::TruthConsensus => construct_truth_consensus_sequence(&net, &dom, &x0)?,
        Mode::FalseOutcome => {
            let f = construct_false_outcome_sequence(&net, &dom, &x0)?;
            pipeline = Some(f.pipeline);
            f.sequence
        }
        Mode::Decross => remove_crossing_updates(&net, &dom, &x0, input.as_ref().expect("set above"))?,
        Mode::Compress => compress_to_pm1(&net, &dom, &x0, input.as_ref().expect("set above"))?,
    };
    if let Some(path) = &a.out {
        write_atomic(path, &csv_bytes(&["step", "node", "new_opinion"], sequence_rows(&seq))?)?;
    }
    let check = verify_sequence_legal(&net, &dom, &x0, &seq);
    let mut payload = json!({
        "mode": a.mode,
        "legal": check.legal,
        "first_violation": check.first_violation.map(|k| k + 1),
        "length": seq.len(),
        "crossings": count_crossings(&dom, &x0, &seq),
        "sequence": sequence_rows(&seq),
        "endpoint": check.final_state,
        "classification": Outcome::classify(&net, &dom, &check.final_state),
        "out": a.out,
    });
    if let Some(p) = pipeline {
        payload["pipeline"] = to_json(&p);
    }
    if let Some(s) = &input {
        payload["input_sequence"] = to_json(&sequence_rows(s));
    }
    Ok(payload)
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
    let cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

const RAW_HEADER: [&str; 11] = [
    "param",
    "replicate",
    "seed",
    "theta",
    "converged",
    "steps",
    "mean_abs_dist_to_truth",
    "consensus",
    "consensus_on_truth",
    "opinion_variance",
    "cluster_count",
];

fn sweep_cmd(a: SweepArgs) -> Result<Value, CliError> {
    let mut cfg = read_config(&a.config)?;
    let mut warnings = Vec::new();
    if a.full_scale {
        cfg = cfg.full_scale();
        let w = format!(
            "full-scale sweep: {} replicates x {} grid values; expect a long run",
            cfg.replicates,
            cfg.grid.len().max(1)
        );
        eprintln!("warning: {w}");
        warnings.push(w);
    }
    let jobs = match a.jobs {
        Some(0) => return Err(CliError::usage("--jobs must be at least 1")),
        Some(j) => j,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let result = sweep_with_jobs(&cfg, jobs)?;
    let rows = result.summaries.iter().flat_map(|s| {
        Metric::ALL.iter().map(move |&m| {
            let ms = s.metric(m);
            (s.param, m.name(), ms.mean, ms.ci_lo, ms.ci_hi, s.n_reps, s.n_nonconverged)
        })
    });
    let header = ["param", "metric", "mean", "ci_lo", "ci_hi", "n_reps", "n_nonconverged"];
    write_atomic(&a.out, &csv_bytes(&header, rows)?)?;
    if let Some(raw) = &a.raw {
        write_atomic(raw, &csv_bytes(&RAW_HEADER, result.records.iter().map(raw_row))?)?;
    }
    if result.summaries.iter().any(|s| s.degenerate_ci) {
        warnings.push("confidence intervals collapse to the mean: fewer than two replicates".into());
    }
    let nonconverged: usize = result.summaries.iter().map(|s| s.n_nonconverged).sum();
    if nonconverged > 0 {
        warnings.push(format!(
            "{nonconverged} replicate(s) hit max_steps; {}",
            if cfg.include_nonconverged { "included in statistics" } else { "excluded from statistics" }
        ));
    }
    Ok(json!({
        "out": a.out,
        "raw": a.raw,
        "replicates": cfg.replicates,
        "grid": result.summaries.iter().map(|s| s.param).collect::<Vec<_>>(),
        "n_nonconverged": nonconverged,
        "summaries": result.summaries,
        "warnings": warnings,
    }))
}

type RawRow = (f64, usize, u64, i64, bool, u64, f64, bool, bool, f64, usize);

fn raw_row(r: &RunRecord) -> RawRow {
    (
        r.param,
        r.replicate,
        r.seed,
        r.theta,
        r.converged,
        r.steps,
        r.mean_abs_dist_to_truth,
        r.consensus,
        r.consensus_on_truth,
        r.opinion_variance,
        r.cluster_count,
    )
}

fn parse_seeds(text: &str) -> Result<NodeSet, CliError> {
    let ids = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| CliError::usage(format!("bad node id {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    NodeSet::from_one_based(ids).map_err(|e| CliError::usage(e.to_string()))
}

fn verify_seeds(a: VerifySeedsArgs) -> Result<Value, CliError> {
    let net = read_network(&a.net)?;
    let seeds = parse_seeds(&a.seeds)?;
    seeds.check(net.n()).map_err(|e| CliError::usage(e.to_string()))?;
    let uncovered = uncovered_strictly_cohesive(&net, &seeds, a.node_budget)?;
    let best = minimum_seed_sets(&net, a.node_budget, a.witness_cap)?;
    Ok(json!({
        "seeds": seeds,
        "valid": uncovered.is_none(),
        "witness_uncovered_set": uncovered,
        "minimum_seed_size": best.size,
        "example_minimum_seeds": best.witnesses,
        "example_minimum_seeds_truncated": best.truncated,
    }))
}
