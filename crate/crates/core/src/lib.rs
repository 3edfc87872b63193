//! Strategic network formation with localized payoffs.
//!
//! Nodes in an undirected graph earn a benefit `delta` per link, pay a cost
//! `cost` per link, and additionally collect a bridging bonus: each node is
//! rewarded in proportion to how many pairs of its neighbors are *not*
//! directly connected (so that traffic between them must pass through it).
//! All payoff arithmetic is exact rational; no comparison in the crate goes
//! through floating point.
//!
//! The crate provides, bottom-up:
//!
//! * [`graph`] — compact labeled graphs on up to 64 nodes, constructors for
//!   the standard topologies, structural queries, and an edge-list text
//!   format;
//! * [`payoff`] — the utility model and single-edge deviation gains;
//! * [`stability`] — pairwise stability certification with deviation
//!   witnesses, closed-form stable-region predicates, and best responses;
//! * [`classifier`] — degree-sequence and coloring based classification of
//!   emergent topologies;
//! * [`dynamics`] — seeded best-response simulation runs and batches;
//! * [`oracle`] — exhaustive enumeration of all labeled graphs on up to
//!   seven nodes, the ground truth the analytic layers are checked against;
//! * [`efficiency`] — socially efficient topologies per parameter region;
//! * [`pos`] — price of stability, analytic and exhaustive.

pub mod classifier;
pub mod dynamics;
pub mod efficiency;
pub mod graph;
pub mod oracle;
pub mod payoff;
pub mod pos;
pub mod stability;

pub use num_rational::{BigRational, Rational64};

pub use classifier::{classify, ClassLabel, Classification, ClassifierConfig};
pub use dynamics::{run_batch, run_once, BatchStats, RunResult, SimConfig};
pub use efficiency::{efficient_graph, triangle_lower_bound, EfficiencyVerdict};
pub use graph::{Graph, NodeId, StandardKind};
pub use oracle::{enumerate, verify_predictions, OracleResult, PredictionRecord};
pub use payoff::{
    deviation_gains, node_utility, total_utility, DeviationKind, Params, Payoff,
};
pub use pos::{price_of_stability, PosMethod, PosValue, PosVerdict};
pub use stability::{
    best_response, is_pairwise_stable, predicted_stable_topologies, Action, Deviation,
    RegionPrediction, StabilityReport, Topology,
};
