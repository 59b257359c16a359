//! Pareto-improvement-driven opinion dynamics on weighted influence networks.
//!
//! Each node holds an integer opinion and privately knows a common truth
//! `theta`. When activated, a node may move to any opinion that raises
//! neither its social cost (weighted distance to the opinions it listens to)
//! nor its cognitive cost (distance to `theta`). This crate simulates the
//! process, decides equilibrium, consensus and seeding questions exactly
//! through cohesive-set structure, builds explicit legal update sequences,
//! and runs reproducible Monte Carlo sweeps over random network families.
//!
//! All algorithms are generic over the weight scalar ([`Scalar`]). The
//! aliases below fix it to exact rationals, which is what the CLI uses.

pub mod cohesion;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod nodeset;
pub mod scalar;
pub mod sequences;

pub use error::{Error, Result};
pub use graph::InfluenceNetwork;
pub use nodeset::NodeSet;
pub use scalar::Scalar;

/// Exact weight type.
pub type Rational = num_rational::Ratio<i64>;
/// Network with exact rational weights.
pub type Network = InfluenceNetwork<Rational>;
/// Network with `f64` weights; exact only for dyadic weights.
pub type FloatNetwork = InfluenceNetwork<f64>;

/// The four-node network used throughout the documentation and tests:
///
/// ```text
/// 1/5 1/5 2/5 1/5
/// 1/5 1/5 2/5 1/5
/// 1/4 1/4 1/4 1/4
/// 1/4 1/4 1/4 1/4
/// ```
pub fn four_node_example() -> Network {
    let r = Rational::new;
    let a = vec![r(1, 5), r(1, 5), r(2, 5), r(1, 5)];
    let b = vec![r(1, 4); 4];
    Network::from_dense(&[a.clone(), a, b.clone(), b]).expect("row-stochastic")
}
