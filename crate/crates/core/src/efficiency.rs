//! Socially efficient graphs: which network maximizes the sum of node
//! utilities. Outside a single contested parameter band the winner is one
//! of three closed forms (empty graph, balanced complete bipartite graph,
//! complete graph); inside the band the module ranks the two candidate
//! winners and can settle the cell exactly by exhaustive enumeration when
//! the graph is small enough.

use num_rational::Rational64;

use crate::graph::{pair_count, Graph, StandardKind};
use crate::oracle;
use crate::payoff::{total_utility, Params, Payoff};

/// Candidate winners inside the contested band, ranked by utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfficientCandidate {
    Turan,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfficiencyLabel {
    Null,
    Turan,
    Complete,
    /// Contested band: candidates ordered best-first by exact utility.
    Conjectured(Vec<EfficientCandidate>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certainty {
    Proven,
    Conjectured,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyVerdict {
    pub label: EfficiencyLabel,
    /// A concrete maximizer (best-known candidate in the contested band).
    pub graph: Graph,
    pub utility: Payoff,
    pub certainty: Certainty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EfficiencyError {
    OracleLimit { n: usize },
}

impl std::fmt::Display for EfficiencyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EfficiencyError::OracleLimit { n } => write!(
                f,
                "exact resolution needs exhaustive enumeration, which supports at most {} nodes, got {n}",
                oracle::MAX_ORACLE_NODES
            ),
        }
    }
}

impl std::error::Error for EfficiencyError {}

/// Minimum number of triangles any graph with `n` nodes and `e` edges must
/// contain: `max(0, ceil(n(4e - n^2) / 9))`. Zero exactly up to the
/// balanced-bipartite edge count `floor(n^2 / 4)`.
pub fn triangle_lower_bound(n: usize, e: usize) -> usize {
    assert!(e <= pair_count(n), "a graph on {n} nodes holds at most {} edges", pair_count(n));
    let raw = n as i64 * (4 * e as i64 - (n as i64) * (n as i64));
    if raw <= 0 {
        0
    } else {
        ((raw + 8) / 9) as usize
    }
}

/// The proven region-to-winner map, exactly as published. `None` inside
/// the contested band and on the knife edge where the squared benefit
/// equals the cost margin (every triangle-free graph ties at zero there).
pub fn proven_winner(p: &Params) -> Option<EfficiencyLabel> {
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    if net < zero {
        let gap = -net;
        if dsq < gap {
            Some(EfficiencyLabel::Null)
        } else if dsq > gap {
            Some(EfficiencyLabel::Turan)
        } else {
            None
        }
    } else if net == zero {
        Some(EfficiencyLabel::Turan)
    } else if dsq >= Rational64::from_integer(3) * net {
        Some(EfficiencyLabel::Turan)
    } else if net > dsq + dsq {
        Some(EfficiencyLabel::Complete)
    } else {
        None
    }
}

/// The published size-dependent guess for the contested band: the complete
/// graph once the cost margin exceeds `n/(n-2)` times the squared benefit,
/// the balanced bipartite graph below it. Exhaustive checks at small sizes
/// contradict it (see `small_size_counterexample_to_conjectured_winner`),
/// so this is exposed for auditing, not used by `efficient_graph`.
pub fn conjectured_winner(p: &Params, n: usize) -> Option<EfficientCandidate> {
    assert!(n >= 3, "the split threshold needs at least three nodes");
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    let contested = net > zero && dsq < Rational64::from_integer(3) * net && net <= dsq + dsq;
    if !contested {
        return None;
    }
    let threshold = Rational64::new(n as i64, n as i64 - 2) * dsq;
    if net > threshold {
        Some(EfficientCandidate::Complete)
    } else {
        Some(EfficientCandidate::Turan)
    }
}

fn in_contested_band(p: &Params) -> bool {
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    net > zero && dsq < Rational64::from_integer(3) * net && net <= dsq + dsq
}

/// Determines a graph maximizing total utility among all graphs on `n`
/// nodes. Outside the contested band the answer is proven; there the three
/// closed-form candidates are compared by exact utility, which also covers
/// the degenerate sizes below four where the balanced bipartite form loses
/// its closed-form utility (its leaves earn no bridging benefit). Ties go
/// to the candidate with fewer edges. Inside the band the verdict stays
/// `Conjectured`; with `resolve_with_oracle` and `n` at most seven, the
/// cell is settled by exhaustive enumeration and the reported graph and
/// utility are exact, though the certainty field still records that the
/// region as a whole is only conjectured.
pub fn efficient_graph(
    p: &Params,
    n: usize,
    resolve_with_oracle: bool,
) -> Result<EfficiencyVerdict, EfficiencyError> {
    assert!(n >= 2, "efficiency needs at least two nodes");
    if resolve_with_oracle && n > oracle::MAX_ORACLE_NODES {
        return Err(EfficiencyError::OracleLimit { n });
    }

    let null = Graph::empty(n).unwrap();
    let turan = Graph::turan(n).unwrap();
    let complete = Graph::standard(StandardKind::Complete, n).unwrap();
    let u_turan = total_utility(&turan, p);
    let u_complete = total_utility(&complete, p);
    let zero = Rational64::from_integer(0);

    if !in_contested_band(p) {
        // Highest utility wins; ties resolve toward fewer edges, which
        // lands on the empty graph at the knife edge where triangle-free
        // graphs all score zero.
        let mut best = (zero, &null, EfficiencyLabel::Null);
        if u_turan > best.0 {
            best = (u_turan, &turan, EfficiencyLabel::Turan);
        }
        if u_complete > best.0 {
            best = (u_complete, &complete, EfficiencyLabel::Complete);
        }
        return Ok(EfficiencyVerdict {
            label: best.2,
            graph: best.1.clone(),
            utility: best.0,
            certainty: Certainty::Proven,
        });
    }

    let ranked = if u_turan >= u_complete {
        vec![EfficientCandidate::Turan, EfficientCandidate::Complete]
    } else {
        vec![EfficientCandidate::Complete, EfficientCandidate::Turan]
    };

    if resolve_with_oracle {
        let r = oracle::enumerate(n, p).expect("size was checked above");
        let complete_code = complete.edge_code().unwrap();
        let turan_code = turan.edge_code().unwrap();
        let (label, graph) = if r.efficient_graphs.binary_search(&complete_code).is_ok() {
            (EfficiencyLabel::Complete, complete)
        } else if r.efficient_graphs.binary_search(&turan_code).is_ok() {
            (EfficiencyLabel::Turan, turan)
        } else if r.efficient_graphs.binary_search(&0).is_ok() {
            (EfficiencyLabel::Null, null)
        } else {
            let g = Graph::from_edge_code(n, r.efficient_graphs[0]).unwrap();
            (EfficiencyLabel::Conjectured(ranked), g)
        };
        return Ok(EfficiencyVerdict {
            label,
            graph,
            utility: r.max_utility,
            certainty: Certainty::Conjectured,
        });
    }

    let (graph, utility) = match ranked[0] {
        EfficientCandidate::Turan => (turan, u_turan),
        EfficientCandidate::Complete => (complete, u_complete),
    };
    Ok(EfficiencyVerdict {
        label: EfficiencyLabel::Conjectured(ranked),
        graph,
        utility,
        certainty: Certainty::Conjectured,
    })
}
