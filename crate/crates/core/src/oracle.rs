//! Exhaustive ground truth for small graphs: enumerate every labeled graph
//! on up to seven nodes, certify stability and total utility for each, and
//! cross-check the analytic layer (stable-region table, efficient-winner
//! characterization, price-of-stability results) cell by cell over a
//! parameter grid. Failures are reported with witnesses, never suppressed:
//! a failure is either a bug or a genuine defect in the published claim.

use num_rational::Rational64;
use rayon::prelude::*;

use crate::efficiency::{proven_winner, EfficiencyLabel};
use crate::graph::{pair_count, Graph};
use crate::payoff::{utility_of, Params, Payoff};
use crate::pos::PosValue;
use crate::stability::{is_pairwise_stable, predicted_stable_topologies, Topology};

/// Hard enumeration limit: eight nodes would mean 2^28 graphs per cell.
pub const MAX_ORACLE_NODES: usize = 7;

const DEFAULT_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    TooManyNodes { n: usize },
}

impl std::fmt::Display for OracleError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OracleError::TooManyNodes { n } => {
                write!(f, "exhaustive enumeration supports at most {MAX_ORACLE_NODES} nodes, got {n}")
            }
        }
    }
}

impl std::error::Error for OracleError {}

/// Everything the enumeration learns about one parameter cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub n: usize,
    pub params: Params,
    /// Edge-set bitmask codes of every pairwise stable graph, ascending.
    pub stable_graphs: Vec<u64>,
    pub max_stable_utility: Payoff,
    /// Codes attaining the maximum total utility, ascending.
    pub efficient_graphs: Vec<u64>,
    pub max_utility: Payoff,
    /// Exact best-stable over efficient ratio; undefined when the maximum
    /// utility is zero.
    pub pos: PosValue,
    /// Number of graphs visited (always 2^C(n,2)).
    pub visited: u64,
}

impl OracleResult {
    /// Plain-text dump: a summary header followed by one line per stable
    /// graph in the form `code=<hex bitmask> u=<rational>`.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "n={} delta={} cost={} visited={} stable={} max_stable_utility={} efficient={} max_utility={} pos={}\n",
            self.n,
            self.params.delta(),
            self.params.cost(),
            self.visited,
            self.stable_graphs.len(),
            self.max_stable_utility,
            self.efficient_graphs.len(),
            self.max_utility,
            self.pos,
        );
        let table = UtilityTable::new(self.n, &self.params);
        for &code in &self.stable_graphs {
            let (deg, sig) = profile(self.n, code);
            let mut u = Rational64::from_integer(0);
            for i in 0..self.n {
                u += table.get(deg[i], sig[i]);
            }
            out.push_str(&format!("code={code:#x} u={u}\n"));
        }
        out
    }
}

/// Utilities indexed by (degree, edges among neighbors); every per-graph
/// evaluation reduces to table lookups.
struct UtilityTable {
    rows: Vec<Vec<Rational64>>,
}

impl UtilityTable {
    fn new(n: usize, p: &Params) -> Self {
        let rows = (0..n)
            .map(|d| (0..=d * d.saturating_sub(1) / 2).map(|s| utility_of(d, s, p)).collect())
            .collect();
        UtilityTable { rows }
    }

    #[inline]
    fn get(&self, d: usize, s: usize) -> Rational64 {
        self.rows[d][s]
    }
}

fn lex_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Adjacency bitmasks, degrees and neighbor-edge counts for one code.
fn profile(n: usize, code: u64) -> ([usize; 8], [usize; 8]) {
    let adj = adjacency(n, code);
    let mut deg = [0usize; 8];
    let mut sig = [0usize; 8];
    for i in 0..n {
        deg[i] = adj[i].count_ones() as usize;
        let mut s = 0usize;
        let mut m = adj[i];
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            s += (adj[i] & adj[j]).count_ones() as usize;
        }
        sig[i] = s / 2;
    }
    (deg, sig)
}

fn adjacency(n: usize, code: u64) -> [u8; 8] {
    let mut adj = [0u8; 8];
    let mut b = 0;
    for i in 0..n {
        for j in i + 1..n {
            if code >> b & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
            b += 1;
        }
    }
    adj
}

struct ChunkAcc {
    stable: Vec<u64>,
    best_stable: Option<Rational64>,
    efficient: Vec<u64>,
    max_utility: Option<Rational64>,
    visited: u64,
}

fn scan_chunk(
    n: usize,
    table: &UtilityTable,
    pairs: &[(usize, usize)],
    start: u64,
    end: u64,
) -> ChunkAcc {
    let mut acc = ChunkAcc {
        stable: Vec::new(),
        best_stable: None,
        efficient: Vec::new(),
        max_utility: None,
        visited: 0,
    };
    for code in start..end {
        acc.visited += 1;
        let adj = adjacency(n, code);
        let mut deg = [0usize; 8];
        let mut sig = [0usize; 8];
        for i in 0..n {
            deg[i] = adj[i].count_ones() as usize;
            let mut s = 0usize;
            let mut m = adj[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                s += (adj[i] & adj[j]).count_ones() as usize;
            }
            sig[i] = s / 2;
        }

        let mut total = Rational64::from_integer(0);
        for i in 0..n {
            total += table.get(deg[i], sig[i]);
        }

        let mut stable = true;
        for &(i, j) in pairs {
            let common = (adj[i] & adj[j]).count_ones() as usize;
            if adj[i] >> j & 1 == 1 {
                // Deletion is unilateral: a strict gain on either side
                // breaks stability. Dropping j removes its `common` links
                // from i's neighborhood edge count.
                if table.get(deg[i] - 1, sig[i] - common) > table.get(deg[i], sig[i])
                    || table.get(deg[j] - 1, sig[j] - common) > table.get(deg[j], sig[j])
                {
                    stable = false;
                    break;
                }
            } else {
                let ui = table.get(deg[i], sig[i]);
                let ui2 = table.get(deg[i] + 1, sig[i] + common);
                let uj = table.get(deg[j], sig[j]);
                let uj2 = table.get(deg[j] + 1, sig[j] + common);
                if (ui2 > ui && uj2 >= uj) || (uj2 > uj && ui2 >= ui) {
                    stable = false;
                    break;
                }
            }
        }

        if stable {
            acc.stable.push(code);
            if acc.best_stable.map_or(true, |b| total > b) {
                acc.best_stable = Some(total);
            }
        }
        match acc.max_utility {
            Some(m) if total < m => {}
            Some(m) if total == m => acc.efficient.push(code),
            _ => {
                acc.max_utility = Some(total);
                acc.efficient = vec![code];
            }
        }
    }
    acc
}

/// Exhaustive enumeration with an explicit chunk width; results are
/// independent of the partitioning (merged in chunk order).
pub fn enumerate_in_chunks(n: usize, p: &Params, chunk: u64) -> Result<OracleResult, OracleError> {
    if n > MAX_ORACLE_NODES {
        return Err(OracleError::TooManyNodes { n });
    }
    assert!(n >= 1, "enumeration needs at least one node");
    assert!(chunk >= 1, "chunk width must be positive");
    let total: u64 = 1 << pair_count(n);
    let table = UtilityTable::new(n, p);
    let pairs = lex_pairs(n);

    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let accs: Vec<ChunkAcc> = starts
        .par_iter()
        .map(|&start| scan_chunk(n, &table, &pairs, start, total.min(start + chunk)))
        .collect();

    let mut stable_graphs = Vec::new();
    let mut efficient_graphs = Vec::new();
    let mut best_stable: Option<Rational64> = None;
    let mut max_utility: Option<Rational64> = None;
    let mut visited = 0;
    for acc in accs {
        visited += acc.visited;
        stable_graphs.extend(acc.stable);
        if let Some(b) = acc.best_stable {
            if best_stable.map_or(true, |cur| b > cur) {
                best_stable = Some(b);
            }
        }
        match (max_utility, acc.max_utility) {
            (Some(cur), Some(m)) if m > cur => {
                max_utility = Some(m);
                efficient_graphs = acc.efficient;
            }
            (Some(cur), Some(m)) if m == cur => efficient_graphs.extend(acc.efficient),
            (None, Some(m)) => {
                max_utility = Some(m);
                efficient_graphs = acc.efficient;
            }
            _ => {}
        }
    }

    // The empty graph scores zero and the complete graph is stable when
    // benefit covers cost, so both extrema exist.
    let max_stable_utility = best_stable.expect("the stable set is never empty");
    let max_utility = max_utility.expect("at least one graph was visited");
    let zero = Rational64::from_integer(0);
    let pos = if max_utility > zero {
        PosValue::Exact(max_stable_utility / max_utility)
    } else {
        PosValue::Undefined
    };
    Ok(OracleResult {
        n,
        params: p.clone(),
        stable_graphs,
        max_stable_utility,
        efficient_graphs,
        max_utility,
        pos,
        visited,
    })
}

/// Exhaustive enumeration of all labeled graphs on `n <= 7` nodes.
pub fn enumerate(n: usize, p: &Params) -> Result<OracleResult, OracleError> {
    enumerate_in_chunks(n, p, DEFAULT_CHUNK)
}

/// One published claim checked against the enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// The region table predicts this topology is pairwise stable here.
    TopologyStable(Topology),
    /// The proven efficiency characterization names this winner here.
    EfficientWinner(EfficiencyLabel),
    /// Best stable utility equals maximum utility here.
    PosEqualsOne,
    /// Best stable over maximum utility is at least 1/2 + 1/(2n) here.
    PosAtLeastBound,
}

impl std::fmt::Display for Claim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Claim::TopologyStable(t) => write!(f, "stable:{t}"),
            Claim::EfficientWinner(w) => {
                let name = match w {
                    EfficiencyLabel::Null => "NULL",
                    EfficiencyLabel::Turan => "TURAN",
                    EfficiencyLabel::Complete => "COMPLETE",
                    EfficiencyLabel::Conjectured(_) => "CONJECTURED",
                };
                write!(f, "efficient:{name}")
            }
            Claim::PosEqualsOne => write!(f, "pos=1"),
            Claim::PosAtLeastBound => write!(f, "pos>=half-plus"),
        }
    }
}

/// Result of checking one claim at one grid cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub delta: Rational64,
    pub cost: Rational64,
    pub claim: Claim,
    pub pass: bool,
    pub witness: Option<String>,
}

/// Concrete graphs instantiating a predicted topology at size `n`. Empty
/// when the topology degenerates at this size (a ring below four nodes is
/// the triangle, a bipartite or multipartite class of size one collapses
/// into a star or smaller-k form), in which case no claim is made.
pub fn topology_instances(t: Topology, n: usize) -> Vec<Graph> {
    use crate::graph::StandardKind;
    match t {
        Topology::Complete if n >= 2 => vec![Graph::standard(StandardKind::Complete, n).unwrap()],
        Topology::Null => vec![Graph::empty(n).unwrap()],
        Topology::Cycle if n >= 4 => vec![Graph::standard(StandardKind::Cycle, n).unwrap()],
        Topology::CompleteBipartite if n >= 4 => vec![Graph::turan(n).unwrap()],
        Topology::CompleteEquiTriPartite if n % 3 == 0 && n / 3 >= 2 => {
            let a = n / 3;
            vec![Graph::complete_multipartite(&[a, a, a]).unwrap()]
        }
        Topology::CompleteEquiKPartite => {
            let mut out = Vec::new();
            for k in 2..=n / 2 {
                if n % k == 0 && n / k >= 2 {
                    out.push(Graph::complete_multipartite(&vec![n / k; k]).unwrap());
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn witness_text(g: &Graph, p: &Params) -> String {
    match is_pairwise_stable(g, p).witness {
        Some(w) => format!(
            "{:?} ({},{}) gains {},{}",
            w.kind, w.i, w.j, w.gain_i, w.gain_j
        ),
        None => "no witness".to_string(),
    }
}

/// The four pairwise-stability-equals-efficiency scenarios.
fn pos_one_region(p: &Params) -> bool {
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    let three = Rational64::from_integer(3);
    (net > zero && net > dsq + dsq)
        || (net > zero && dsq > net && dsq >= three * net)
        || net == zero
        || (net < zero && dsq > -net)
}

/// The bounded-ratio region: benefit exceeds cost and the margin sits
/// between the squared benefit and a third of it.
fn pos_bound_region(p: &Params) -> bool {
    let zero = Rational64::from_integer(0);
    let net = p.net();
    let dsq = p.delta_sq();
    net > zero && net <= dsq && dsq < Rational64::from_integer(3) * net
}

/// Checks every published claim at every grid cell of the `(0, 1]^2`
/// parameter grid with the given step: predicted-stable topologies are in
/// the enumerated stable set, proven efficient winners attain the true
/// maximum utility, and the two price-of-stability results hold. Claims
/// are checked exactly as published; a false claim fails with a witness.
pub fn verify_predictions(n: usize, step: Rational64) -> Result<Vec<PredictionRecord>, OracleError> {
    if n > MAX_ORACLE_NODES {
        return Err(OracleError::TooManyNodes { n });
    }
    let steps = Rational64::from_integer(1) / step;
    assert!(steps.is_integer() && steps > Rational64::from_integer(0), "step must divide 1");
    let steps = steps.to_integer();

    let mut out = Vec::new();
    for di in 1..=steps {
        for ci in 1..=steps {
            let delta = Rational64::from_integer(di) * step;
            let cost = Rational64::from_integer(ci) * step;
            let p = Params::new_inclusive(delta, cost).expect("grid values lie in (0, 1]");
            out.extend(verify_cell(n, &p)?);
        }
    }
    Ok(out)
}

/// Checks every published claim applicable at one parameter cell.
pub fn verify_cell(n: usize, p: &Params) -> Result<Vec<PredictionRecord>, OracleError> {
    let r = enumerate(n, p)?;
    Ok(check_cell(n, p, &r))
}

fn check_cell(n: usize, p: &Params, r: &OracleResult) -> Vec<PredictionRecord> {
    let mut out = Vec::new();
    let mut push = |claim: Claim, pass: bool, witness: Option<String>| {
        out.push(PredictionRecord { delta: p.delta(), cost: p.cost(), claim, pass, witness });
    };

    for t in predicted_stable_topologies(p).topologies {
        let instances = topology_instances(t, n);
        if instances.is_empty() {
            continue;
        }
        let mut pass = true;
        let mut witness = None;
        for g in &instances {
            let code = g.edge_code().expect("oracle sizes have code support");
            if r.stable_graphs.binary_search(&code).is_err() {
                pass = false;
                witness = Some(witness_text(g, p));
                break;
            }
        }
        push(Claim::TopologyStable(t), pass, witness);
    }

    if let Some(winner) = proven_winner(p) {
        let g = match winner {
            EfficiencyLabel::Null => Graph::empty(n).unwrap(),
            EfficiencyLabel::Turan => Graph::turan(n).unwrap(),
            EfficiencyLabel::Complete => {
                Graph::standard(crate::graph::StandardKind::Complete, n).unwrap()
            }
            EfficiencyLabel::Conjectured(_) => unreachable!("proven winners are concrete"),
        };
        let u = crate::payoff::total_utility(&g, p);
        let pass = u == r.max_utility;
        let witness = if pass {
            None
        } else {
            Some(format!(
                "claimed winner scores {u}, but code {:#x} scores {}",
                r.efficient_graphs[0], r.max_utility
            ))
        };
        push(Claim::EfficientWinner(winner), pass, witness);
    }

    if pos_one_region(p) {
        let pass = r.max_stable_utility == r.max_utility;
        let witness = if pass {
            None
        } else {
            Some(format!(
                "best stable {} < maximum {}",
                r.max_stable_utility, r.max_utility
            ))
        };
        push(Claim::PosEqualsOne, pass, witness);
    }

    if pos_bound_region(p) {
        // max_stable / max_utility >= (n + 1) / (2n), cross-multiplied; the
        // maximum utility is positive here (the balanced bipartite graph
        // already scores above zero).
        let lhs = r.max_stable_utility * Rational64::from_integer(2 * n as i64);
        let rhs = r.max_utility * Rational64::from_integer(n as i64 + 1);
        let pass = lhs >= rhs;
        let witness = if pass {
            None
        } else {
            Some(format!(
                "ratio {} falls below {}",
                r.max_stable_utility / r.max_utility,
                Rational64::new(n as i64 + 1, 2 * n as i64)
            ))
        };
        push(Claim::PosAtLeastBound, pass, witness);
    }

    out
}
