//! Pairwise stability: no linked node profits from unilaterally severing an
//! edge, and no unlinked pair can add an edge that strictly benefits one
//! endpoint while not hurting the other.
//!
//! Alongside the per-graph certificate this module carries the analytic
//! layer: closed-form stability predicates for the standard topologies, the
//! parameter-region table mapping `(delta, cost)` to the topologies expected
//! to be stable there, and the best-response rule that drives the simulator.

use num_rational::Rational64;
use rand::Rng;

use crate::graph::{Graph, NodeId};
use crate::payoff::{deviation_gains, DeviationKind, Params, Payoff};

/// A concrete profitable deviation: node `i` strictly gains by performing
/// `kind` on the edge `(i, j)`; for additions `j` consents (does not lose).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Deviation {
    pub kind: DeviationKind,
    pub i: NodeId,
    pub j: NodeId,
    pub gain_i: Payoff,
    pub gain_j: Payoff,
}

/// Outcome of a stability check. `witness` is the first profitable
/// deviation under a lexicographic scan of node pairs, or `None` when the
/// graph is pairwise stable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilityReport {
    pub stable: bool,
    pub witness: Option<Deviation>,
}

impl StabilityReport {
    fn stable() -> Self {
        StabilityReport { stable: true, witness: None }
    }

    fn unstable(witness: Deviation) -> Self {
        StabilityReport { stable: false, witness: Some(witness) }
    }
}

/// Certify pairwise stability of `g` under `p`. Pairs are scanned in
/// lexicographic order (`i` ascending, then `j`); the first violated
/// condition is returned as the witness, with the strict gainer listed
/// first.
pub fn is_pairwise_stable(g: &Graph, p: &Params) -> StabilityReport {
    let zero = Rational64::from_integer(0);
    let n = g.node_count();
    for i in 0..n {
        for j in i + 1..n {
            let (gi, gj, kind) = deviation_gains(g, i, j, p);
            match kind {
                DeviationKind::DeleteEdge => {
                    // Severing is unilateral: either endpoint may profit.
                    if gi > zero {
                        return StabilityReport::unstable(Deviation { kind, i, j, gain_i: gi, gain_j: gj });
                    }
                    if gj > zero {
                        return StabilityReport::unstable(Deviation { kind, i: j, j: i, gain_i: gj, gain_j: gi });
                    }
                }
                DeviationKind::AddEdge => {
                    // Additions need consent: a strict gainer plus a partner
                    // who is at least indifferent.
                    if gi > zero && gj >= zero {
                        return StabilityReport::unstable(Deviation { kind, i, j, gain_i: gi, gain_j: gj });
                    }
                    if gj > zero && gi >= zero {
                        return StabilityReport::unstable(Deviation { kind, i: j, j: i, gain_i: gj, gain_j: gi });
                    }
                }
            }
        }
    }
    StabilityReport::stable()
}

/// Topologies appearing in the stable-region table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Topology {
    Complete,
    Null,
    Cycle,
    CompleteBipartite,
    CompleteEquiTriPartite,
    CompleteEquiKPartite,
}

impl std::fmt::Display for Topology {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Topology::Complete => "COMPLETE",
            Topology::Null => "NULL",
            Topology::Cycle => "CYCLE",
            Topology::CompleteBipartite => "COMPLETE-BI-PARTITE",
            Topology::CompleteEquiTriPartite => "COMPLETE-EQUI-TRI-PARTITE",
            Topology::CompleteEquiKPartite => "COMPLETE-EQUI-K-PARTITE",
        };
        f.write_str(s)
    }
}

/// Identifier of a row in the stable-region table. Rows within a sign
/// regime overlap; see [`predicted_stable_topologies`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionId {
    R1a,
    R1b,
    R1c,
    R2,
    R3a,
    R3b,
    R3c,
    R3d,
}

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RegionId::R1a => "1a",
            RegionId::R1b => "1b",
            RegionId::R1c => "1c",
            RegionId::R2 => "2",
            RegionId::R3a => "3a",
            RegionId::R3b => "3b",
            RegionId::R3c => "3c",
            RegionId::R3d => "3d",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPrediction {
    /// The most specific applicable row.
    pub region_id: RegionId,
    /// Union of the topology sets of every applicable row, ascending.
    pub topologies: Vec<Topology>,
}

/// The stable-region table: which standard topologies are predicted stable
/// at `p`. Region boundaries are closed wherever the underlying closed-form
/// condition is an inequality with equality admitted; where rows overlap the
/// union of their topology sets is returned.
///
/// Note: the equi-tri-partite rows (1c, 3d) reproduce the published bound
/// `|delta - cost| < (2/3) delta^2`, which overstates the true stability
/// region of those graphs; see [`balanced_multipartite_stable`] for the
/// exact per-size condition and the oracle tests for the discrepancy record.
pub fn predicted_stable_topologies(p: &Params) -> RegionPrediction {
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    let two_thirds_dsq = Rational64::new(2, 3) * dsq;

    if net > zero {
        let mut topologies = vec![Topology::Complete];
        // The published row reads strictly below delta^2, but the result it
        // cites admits equality (as does the exact predicate), so the edge
        // is kept inside the band, mirroring row 3b on the costly side.
        if net <= dsq {
            topologies.push(Topology::CompleteBipartite);
        }
        if net < two_thirds_dsq {
            topologies.push(Topology::CompleteEquiTriPartite);
        }
        topologies.sort();
        let region_id = if net >= dsq {
            RegionId::R1a
        } else if net < two_thirds_dsq {
            RegionId::R1c
        } else {
            RegionId::R1b
        };
        return RegionPrediction { region_id, topologies };
    }

    if net == zero {
        return RegionPrediction {
            region_id: RegionId::R2,
            topologies: vec![
                Topology::Complete,
                Topology::Null,
                Topology::CompleteBipartite,
                Topology::CompleteEquiKPartite,
            ],
        };
    }

    let gap = -net;
    let mut topologies = vec![Topology::Null];
    if gap <= dsq {
        topologies.push(Topology::CompleteBipartite);
    }
    if dsq <= gap && gap <= dsq + dsq {
        topologies.push(Topology::Cycle);
    }
    if gap < two_thirds_dsq {
        topologies.push(Topology::CompleteEquiTriPartite);
    }
    topologies.sort();
    let region_id = if gap > dsq + dsq {
        RegionId::R3a
    } else if gap < two_thirds_dsq {
        RegionId::R3d
    } else if gap >= dsq {
        RegionId::R3c
    } else {
        RegionId::R3b
    };
    RegionPrediction { region_id, topologies }
}

/// The complete graph is stable exactly when links pay for themselves:
/// `delta >= cost`.
pub fn complete_stable(p: &Params) -> bool {
    p.net() >= Rational64::from_integer(0)
}

/// The empty graph is stable exactly when no link is strictly profitable:
/// `delta <= cost`.
pub fn null_stable(p: &Params) -> bool {
    p.net() <= Rational64::from_integer(0)
}

/// Ring stability: `delta^2 <= cost - delta <= 2 delta^2`. Exact for rings
/// of six or more nodes; for four or five nodes the true stable region is
/// wider, so the condition stays sufficient.
pub fn ring_stable(p: &Params) -> bool {
    let gap = -p.net();
    let dsq = p.delta_sq();
    dsq <= gap && gap <= dsq + dsq
}

/// Stability of the complete multipartite graph with `k >= 2` classes of
/// equal size `a >= 2`: `|delta - cost| <= delta^2 (a - 1) / ((k-1) a - 1)`.
/// Derived condition: the two sides bound the profit of a within-class
/// addition and of severing a cross-class edge, both of which shift the
/// bridging share by the same coefficient. Exact whenever `(k-1) a >= 3`;
/// for the four-node two-by-two split a severed node drops to degree one,
/// its bridging term vanishes outright, and the true region widens to
/// `cost - delta <= 2 delta^2` on the deletion side, so the condition is
/// then merely sufficient. At `k = 2` this is `|delta - cost| <= delta^2`.
pub fn balanced_multipartite_stable(p: &Params, k: usize, a: usize) -> bool {
    assert!(k >= 2 && a >= 2, "defined for k >= 2 classes of size a >= 2");
    let net_abs = if p.net() < Rational64::from_integer(0) { -p.net() } else { p.net() };
    let coeff = Rational64::new(a as i64 - 1, ((k - 1) * a) as i64 - 1);
    net_abs <= coeff * p.delta_sq()
}

/// Complete bipartite stability `|delta - cost| <= delta^2`: sufficient for
/// every split with both sides of size at least two, and exact when both
/// sides have at least three nodes.
pub fn complete_bipartite_stable(p: &Params) -> bool {
    let net_abs = if p.net() < Rational64::from_integer(0) { -p.net() } else { p.net() };
    net_abs <= p.delta_sq()
}

/// A node's chosen move: one edge change per activation, or none.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    AddEdge(NodeId),
    DeleteEdge(NodeId),
    Pass,
}

/// Best response of node `i`: among unilateral deletions and consented
/// additions (partner gain `>= 0`), an action maximizing `i`'s own gain,
/// ties broken uniformly with `rng`. Returns [`Action::Pass`] when the best
/// gain is negative, and also on a zero best gain unless
/// `allow_indifferent_adds` is set and a zero-gain addition is available.
pub fn best_response(
    g: &Graph,
    i: NodeId,
    p: &Params,
    rng: &mut impl Rng,
    allow_indifferent_adds: bool,
) -> Action {
    let zero = Rational64::from_integer(0);
    let mut best: Option<Payoff> = None;
    let mut candidates: Vec<Action> = Vec::new();
    for j in 0..g.node_count() {
        if j == i {
            continue;
        }
        let (gain_i, gain_j, kind) = deviation_gains(g, i, j, p);
        let action = match kind {
            DeviationKind::DeleteEdge => Action::DeleteEdge(j),
            DeviationKind::AddEdge => {
                if gain_j < zero {
                    continue; // partner would refuse
                }
                Action::AddEdge(j)
            }
        };
        match best {
            Some(b) if gain_i < b => {}
            Some(b) if gain_i == b => candidates.push(action),
            _ => {
                best = Some(gain_i);
                candidates = vec![action];
            }
        }
    }
    let Some(best) = best else { return Action::Pass };
    if best > zero {
        return candidates[rng.gen_range(0..candidates.len())];
    }
    if best == zero && allow_indifferent_adds {
        // Zero-gain deletions are never taken: severing requires strict
        // profit. Zero-gain additions are taken only under the flag.
        let adds: Vec<Action> = candidates
            .iter()
            .copied()
            .filter(|a| matches!(a, Action::AddEdge(_)))
            .collect();
        if !adds.is_empty() {
            return adds[rng.gen_range(0..adds.len())];
        }
    }
    Action::Pass
}
