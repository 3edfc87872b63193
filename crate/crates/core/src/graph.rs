//! Undirected simple labeled graphs on up to 64 nodes.
//!
//! Adjacency is stored as one 64-bit neighbor mask per node, which keeps the
//! structural queries the payoff model leans on (degree, neighborhood edge
//! counts, triangles) down to a few popcounts. Graphs are ordinary owned
//! values: simulation code clones a working copy and mutates that, so every
//! snapshot handed outward stays immutable.

use std::fmt;

use num_rational::Rational64;
use rand::Rng;
use sha2::{Digest, Sha256};

/// Node identifier: a 0-based index strictly below the owning graph's size.
pub type NodeId = usize;

/// Hard cap imposed by the one-word neighbor masks.
pub const MAX_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// Node count outside the supported range for the requested topology.
    NodeCount { n: usize, min: usize },
    /// More than [`MAX_NODES`] nodes.
    TooManyNodes { n: usize },
    EmptyPartitionList,
    ZeroSizePartition,
    /// Density outside `[0, 1]`.
    DensityRange(Rational64),
    /// Edge-set codes are only defined while the pair count fits in 64 bits.
    CodeUnsupported { n: usize },
    /// Edge-list text that does not follow the documented format.
    Parse { line: usize, msg: String },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NodeCount { n, min } => {
                write!(f, "node count {n} is below the minimum {min} for this topology")
            }
            GraphError::TooManyNodes { n } => {
                write!(f, "node count {n} exceeds the supported maximum {MAX_NODES}")
            }
            GraphError::EmptyPartitionList => write!(f, "partition list is empty"),
            GraphError::ZeroSizePartition => write!(f, "partition sizes must be positive"),
            GraphError::DensityRange(d) => write!(f, "density {d} is outside [0, 1]"),
            GraphError::CodeUnsupported { n } => {
                write!(f, "edge-set codes are not defined for n = {n} (pair count exceeds 64 bits)")
            }
            GraphError::Parse { line, msg } => write!(f, "edge list line {line}: {msg}"),
        }
    }
}

impl std::error::Error for GraphError {}

/// The named topologies with direct constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardKind {
    Complete,
    /// Hub is node 0.
    Star,
    Cycle,
    /// Hub is node 0; nodes `1..n` form the rim cycle.
    Wheel,
}

/// Opaque digest of a labeled edge set, used for cycle detection in
/// simulation runs. Equal digests are produced by equal `(n, edge set)`
/// pairs; distinct edge sets collide with probability around `2^-64` per
/// pair, negligible for any run length at `n <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateKey([u8; 16]);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u64>,
    edges: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges().collect::<Vec<_>>())
    }
}

fn check_size(n: usize, min: usize) -> Result<(), GraphError> {
    if n < min {
        Err(GraphError::NodeCount { n, min })
    } else if n > MAX_NODES {
        Err(GraphError::TooManyNodes { n })
    } else {
        Ok(())
    }
}

/// Number of unordered pairs on `n` nodes.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `(i, j)`, `i < j`, among all pairs on
/// `n` nodes: `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. This is the bit
/// order of edge-set codes and of [`Graph::canonical_state_key`].
pub fn pair_index(n: usize, i: NodeId, j: NodeId) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl Graph {
    /// Edgeless graph on `n >= 1` nodes.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        check_size(n, 1)?;
        Ok(Graph { n, adj: vec![0; n], edges: 0 })
    }

    /// One of the named topologies. Minimum sizes: cycle 3, wheel 4,
    /// complete and star 2.
    pub fn standard(kind: StandardKind, n: usize) -> Result<Self, GraphError> {
        let min = match kind {
            StandardKind::Cycle => 3,
            StandardKind::Wheel => 4,
            StandardKind::Complete | StandardKind::Star => 2,
        };
        check_size(n, min)?;
        let mut g = Graph::empty(n)?;
        match kind {
            StandardKind::Complete => {
                for i in 0..n {
                    for j in i + 1..n {
                        g.add_edge(i, j);
                    }
                }
            }
            StandardKind::Star => {
                for j in 1..n {
                    g.add_edge(0, j);
                }
            }
            StandardKind::Cycle => {
                for i in 0..n {
                    g.add_edge(i, (i + 1) % n);
                }
            }
            StandardKind::Wheel => {
                for j in 1..n {
                    g.add_edge(0, j);
                }
                for i in 1..n {
                    let next = if i == n - 1 { 1 } else { i + 1 };
                    g.add_edge(i, next);
                }
            }
        }
        Ok(g)
    }

    /// Complete multipartite graph with the given partition sizes. Nodes are
    /// assigned to partitions as consecutive index blocks, in the order the
    /// sizes are given; edges join exactly the cross-partition pairs.
    pub fn complete_multipartite(sizes: &[usize]) -> Result<Self, GraphError> {
        if sizes.is_empty() {
            return Err(GraphError::EmptyPartitionList);
        }
        if sizes.contains(&0) {
            return Err(GraphError::ZeroSizePartition);
        }
        let n: usize = sizes.iter().sum();
        check_size(n, 1)?;
        let mut class = vec![0usize; n];
        let mut next = 0;
        for (c, &s) in sizes.iter().enumerate() {
            for _ in 0..s {
                class[next] = c;
                next += 1;
            }
        }
        let mut g = Graph::empty(n)?;
        for i in 0..n {
            for j in i + 1..n {
                if class[i] != class[j] {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    /// The balanced complete bipartite graph on `n >= 2` nodes, i.e. the
    /// triangle-free graph with the maximum number of edges.
    pub fn turan(n: usize) -> Result<Self, GraphError> {
        check_size(n, 2)?;
        Graph::complete_multipartite(&[n.div_ceil(2), n / 2])
    }

    /// Random graph with exactly `round(density * pair_count(n))` edges
    /// (rounding half up), chosen as a uniform subset of that size.
    /// Deterministic given the generator state.
    pub fn random(n: usize, density: Rational64, rng: &mut impl Rng) -> Result<Self, GraphError> {
        check_size(n, 1)?;
        if density < Rational64::from_integer(0) || density > Rational64::from_integer(1) {
            return Err(GraphError::DensityRange(density));
        }
        let total = pair_count(n);
        let m = (density * Rational64::from_integer(total as i64)
            + Rational64::new(1, 2))
        .floor()
        .to_integer() as usize;
        let m = m.min(total);
        let mut g = Graph::empty(n)?;
        let mut chosen = rand::seq::index::sample(rng, total, m).into_vec();
        chosen.sort_unstable();
        let mut pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        let mut cursor = 0usize;
        let mut current = pairs.next();
        for idx in chosen {
            while cursor < idx {
                current = pairs.next();
                cursor += 1;
            }
            let (i, j) = current.expect("sampled index within pair range");
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Decode an edge-set bitmask (bit `pair_index(n, i, j)` set means the
    /// edge `(i, j)` is present). Only defined while `pair_count(n) <= 64`,
    /// i.e. `n <= 11`.
    pub fn from_edge_code(n: usize, code: u64) -> Result<Self, GraphError> {
        check_size(n, 1)?;
        let bits = pair_count(n);
        if bits > 64 {
            return Err(GraphError::CodeUnsupported { n });
        }
        if bits < 64 && code >> bits != 0 {
            return Err(GraphError::CodeUnsupported { n });
        }
        let mut g = Graph::empty(n)?;
        let mut b = 0;
        for i in 0..n {
            for j in i + 1..n {
                if code >> b & 1 == 1 {
                    g.add_edge(i, j);
                }
                b += 1;
            }
        }
        Ok(g)
    }

    /// Inverse of [`Graph::from_edge_code`].
    pub fn edge_code(&self) -> Result<u64, GraphError> {
        if pair_count(self.n) > 64 {
            return Err(GraphError::CodeUnsupported { n: self.n });
        }
        let mut code = 0u64;
        for (i, j) in self.edges() {
            code |= 1 << pair_index(self.n, i, j);
        }
        Ok(code)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        assert!(i < self.n && j < self.n, "node out of range");
        i != j && self.adj[i] >> j & 1 == 1
    }

    /// Insert the edge `(i, j)`. Panics on self-loops, out-of-range nodes,
    /// or an already-present edge; callers own their working copies and are
    /// expected to know the current state.
    pub fn add_edge(&mut self, i: NodeId, j: NodeId) {
        assert!(i < self.n && j < self.n && i != j, "invalid edge ({i}, {j})");
        assert!(self.adj[i] >> j & 1 == 0, "edge ({i}, {j}) already present");
        self.adj[i] |= 1 << j;
        self.adj[j] |= 1 << i;
        self.edges += 1;
    }

    /// Remove the edge `(i, j)`. Panics if absent or invalid.
    pub fn remove_edge(&mut self, i: NodeId, j: NodeId) {
        assert!(i < self.n && j < self.n && i != j, "invalid edge ({i}, {j})");
        assert!(self.adj[i] >> j & 1 == 1, "edge ({i}, {j}) not present");
        self.adj[i] &= !(1 << j);
        self.adj[j] &= !(1 << i);
        self.edges -= 1;
    }

    /// Neighbor set of `i` as a bitmask.
    pub fn neighbors_mask(&self, i: NodeId) -> u64 {
        assert!(i < self.n, "node out of range");
        self.adj[i]
    }

    pub fn neighbors(&self, i: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        let mut mask = self.neighbors_mask(i);
        std::iter::from_fn(move || {
            if mask == 0 {
                None
            } else {
                let j = mask.trailing_zeros() as usize;
                mask &= mask - 1;
                Some(j)
            }
        })
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.neighbors_mask(i).count_ones() as usize
    }

    /// Number of edges among the neighbors of `i` (the links that close
    /// triangles through `i`).
    pub fn sigma(&self, i: NodeId) -> usize {
        let mi = self.neighbors_mask(i);
        let mut twice = 0u32;
        for j in self.neighbors(i) {
            twice += (mi & self.adj[j]).count_ones();
        }
        (twice / 2) as usize
    }

    /// Size of the common neighborhood of `i` and `j`.
    pub fn common_neighbors(&self, i: NodeId, j: NodeId) -> usize {
        (self.neighbors_mask(i) & self.neighbors_mask(j)).count_ones() as usize
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j))
        })
    }

    pub fn triangle_count(&self) -> usize {
        let total: usize = (0..self.n).map(|i| self.sigma(i)).sum();
        debug_assert_eq!(total % 3, 0);
        total / 3
    }

    /// Connected triples: paths of length two, counted once per center node.
    pub fn connected_triple_count(&self) -> usize {
        (0..self.n).map(|i| pair_count(self.degree(i))).sum()
    }

    /// Global clustering coefficient `3 * triangles / connected triples`,
    /// defined as 0 when the graph has no connected triples.
    pub fn clustering_coefficient(&self) -> Rational64 {
        let triples = self.connected_triple_count();
        if triples == 0 {
            return Rational64::from_integer(0);
        }
        Rational64::new(3 * self.triangle_count() as i64, triples as i64)
    }

    /// Degree sequence in descending order.
    pub fn sorted_degree_vector(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|i| self.degree(i)).collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }

    /// Digest of the labeled edge set; see [`StateKey`].
    pub fn canonical_state_key(&self) -> StateKey {
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        let mut byte = 0u8;
        let mut fill = 0u8;
        for i in 0..self.n {
            for j in i + 1..self.n {
                byte |= u8::from(self.has_edge(i, j)) << fill;
                fill += 1;
                if fill == 8 {
                    hasher.update([byte]);
                    byte = 0;
                    fill = 0;
                }
            }
        }
        if fill > 0 {
            hasher.update([byte]);
        }
        let digest = hasher.finalize();
        let mut key = [0u8; 16];
        key.copy_from_slice(&digest[..16]);
        StateKey(key)
    }

    /// Serialize to the edge-list text format: a header line `n <count>`,
    /// then one `i j` line (`i < j`) per edge in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (i, j) in self.edges() {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// Parse the edge-list text format. Self-loops, duplicate edges, and
    /// out-of-range node ids are rejected; edge order is not required.
    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (line_no, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header line".into(),
        })?;
        let mut parts = header.split_whitespace();
        let n = match (parts.next(), parts.next(), parts.next()) {
            (Some("n"), Some(count), None) => {
                count.parse::<usize>().map_err(|_| GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("bad node count {count:?}"),
                })?
            }
            _ => {
                return Err(GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("expected header `n <count>`, got {header:?}"),
                })
            }
        };
        let mut g = Graph::empty(n).map_err(|e| GraphError::Parse {
            line: line_no + 1,
            msg: e.to_string(),
        })?;
        for (line_no, line) in lines {
            let parse = |t: &str| {
                t.parse::<usize>().map_err(|_| GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("bad node id {t:?}"),
                })
            };
            let mut parts = line.split_whitespace();
            let (i, j) = match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) => (parse(a)?, parse(b)?),
                _ => {
                    return Err(GraphError::Parse {
                        line: line_no + 1,
                        msg: format!("expected `i j`, got {line:?}"),
                    })
                }
            };
            if i == j {
                return Err(GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("self-loop at node {i}"),
                });
            }
            if i >= n || j >= n {
                return Err(GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("node id out of range for n = {n}"),
                });
            }
            if g.has_edge(i, j) {
                return Err(GraphError::Parse {
                    line: line_no + 1,
                    msg: format!("duplicate edge ({i}, {j})"),
                });
            }
            g.add_edge(i.min(j), i.max(j));
        }
        Ok(g)
    }
}
