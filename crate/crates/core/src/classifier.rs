//! Classifies a graph into one of fifteen topology labels: exact structural
//! classes (null, star, complete, shared/regular, the complete-multipartite
//! family), degree-profile approximations of four ideals (the near- labels),
//! and a colorability-based fallback.
//!
//! Exact predicates are decided structurally. Near- labels compare the
//! sorted degree sequence against an ideal profile by mean squared
//! deviation, accepting when it falls below a threshold scaling with
//! `(n - 1)^2`. The plain k-partite labels only apply when every near-
//! label is out of reach: a graph close to an ideal profile is reported as
//! near that ideal, not by its incidental chromatic structure.

use std::collections::BTreeSet;
use std::str::FromStr;

use num_rational::Rational64;

use crate::graph::Graph;

/// Topology labels, declared in canonical (reporting) order. The derived
/// `Ord` follows declaration order and is used for frequency-table keys and
/// modal tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassLabel {
    Null,
    Star,
    Shared,
    Complete,
    NearNull,
    NearStar,
    NearShared,
    NearComplete,
    BipartiteComplete,
    Turan,
    EquiKPartiteComplete,
    EquiKPartite,
    KPartiteComplete,
    KPartite,
    Unclassified,
}

pub const ALL_LABELS: [ClassLabel; 15] = [
    ClassLabel::Null,
    ClassLabel::Star,
    ClassLabel::Shared,
    ClassLabel::Complete,
    ClassLabel::NearNull,
    ClassLabel::NearStar,
    ClassLabel::NearShared,
    ClassLabel::NearComplete,
    ClassLabel::BipartiteComplete,
    ClassLabel::Turan,
    ClassLabel::EquiKPartiteComplete,
    ClassLabel::EquiKPartite,
    ClassLabel::KPartiteComplete,
    ClassLabel::KPartite,
    ClassLabel::Unclassified,
];

impl ClassLabel {
    /// Canonical serialized form.
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Null => "NULL",
            ClassLabel::Star => "STAR",
            ClassLabel::Shared => "SHARED",
            ClassLabel::Complete => "COMPLETE",
            ClassLabel::NearNull => "NEAR-NULL",
            ClassLabel::NearStar => "NEAR-STAR",
            ClassLabel::NearShared => "NEAR-SHARED",
            ClassLabel::NearComplete => "NEAR-COMPLETE",
            ClassLabel::BipartiteComplete => "BI-PARTITE-COMPLETE",
            ClassLabel::Turan => "TURAN",
            ClassLabel::EquiKPartiteComplete => "EQUI-K-PARTITE-COMPLETE",
            ClassLabel::EquiKPartite => "EQUI-K-PARTITE",
            ClassLabel::KPartiteComplete => "K-PARTITE-COMPLETE",
            ClassLabel::KPartite => "K-PARTITE",
            ClassLabel::Unclassified => "UNCLASSIFIED",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseClassError {
    pub input: String,
}

impl std::fmt::Display for ParseClassError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "unknown class label: {:?}", self.input)
    }
}

impl std::error::Error for ParseClassError {}

impl FromStr for ClassLabel {
    type Err = ParseClassError;

    /// Parses the canonical form case-insensitively, plus legacy short
    /// aliases and one historical misspelling of the bipartite label.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        let label = match up.as_str() {
            "NULL" => ClassLabel::Null,
            "STAR" => ClassLabel::Star,
            "SHARED" => ClassLabel::Shared,
            "COMPLETE" => ClassLabel::Complete,
            "NEAR-NULL" => ClassLabel::NearNull,
            "NEAR-STAR" => ClassLabel::NearStar,
            "NEAR-SHARED" | "NRSHARED" => ClassLabel::NearShared,
            "NEAR-COMPLETE" => ClassLabel::NearComplete,
            "BI-PARTITE-COMPLETE" | "BI-PARTITITE-COMPLETE" | "BIPARCOMP" => {
                ClassLabel::BipartiteComplete
            }
            "TURAN" | "TUR_GRA" => ClassLabel::Turan,
            "EQUI-K-PARTITE-COMPLETE" => ClassLabel::EquiKPartiteComplete,
            "EQUI-K-PARTITE" => ClassLabel::EquiKPartite,
            "K-PARTITE-COMPLETE" | "KPARCOMP" => ClassLabel::KPartiteComplete,
            "K-PARTITE" => ClassLabel::KPartite,
            "UNCLASSIFIED" => ClassLabel::Unclassified,
            _ => return Err(ParseClassError { input: s.to_string() }),
        };
        Ok(label)
    }
}

/// Tuning knobs for the near- label acceptance threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierConfig {
    /// A near- label matches when the mean squared degree deviation is
    /// strictly below `tau_fraction * (n - 1)^2`.
    pub tau_fraction: Rational64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig { tau_fraction: Rational64::new(1, 10) }
    }
}

impl ClassifierConfig {
    pub fn tau(&self, n: usize) -> Rational64 {
        let span = Rational64::from_integer(n as i64 - 1);
        self.tau_fraction * span * span
    }
}

/// Result of classification: the single reported label plus every label
/// whose predicate held.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub primary: ClassLabel,
    pub all_matches: BTreeSet<ClassLabel>,
}

/// Mean squared componentwise deviation between two degree profiles of
/// equal length.
pub fn msd(observed: &[usize], ideal: &[usize]) -> Rational64 {
    assert_eq!(observed.len(), ideal.len(), "profiles must have equal length");
    assert!(!observed.is_empty(), "profiles must be non-empty");
    let mut total = Rational64::from_integer(0);
    for (&o, &i) in observed.iter().zip(ideal) {
        let diff = Rational64::from_integer(o as i64 - i as i64);
        total += diff * diff;
    }
    total / Rational64::from_integer(observed.len() as i64)
}

/// Degree every node would have if the total were spread evenly: the mean
/// degree rounded half-up.
pub fn ideal_shared_degree(g: &Graph) -> usize {
    let mean = Rational64::new(2 * g.edge_count() as i64, g.node_count() as i64);
    (mean + Rational64::new(1, 2)).floor().to_integer() as usize
}

/// Greedy proper coloring in descending-degree order (ties by node index):
/// each node takes the smallest color absent from its already-colored
/// neighbors. Returns one color per node. Exactly recovers the classes of
/// complete multipartite graphs.
fn greedy_color(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut color = vec![usize::MAX; n];
    for &v in &order {
        let mut used = 0u64;
        for u in g.neighbors(v) {
            if color[u] != usize::MAX {
                used |= 1 << color[u];
            }
        }
        color[v] = used.trailing_ones() as usize;
    }
    color
}

fn class_sizes(color: &[usize]) -> Vec<usize> {
    let k = color.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &c in color {
        sizes[c] += 1;
    }
    sizes
}

/// No cross-class pair may be missing.
fn all_cross_pairs_present(g: &Graph, color: &[usize]) -> bool {
    let n = g.node_count();
    for i in 0..n {
        for j in i + 1..n {
            if color[i] != color[j] && !g.has_edge(i, j) {
                return false;
            }
        }
    }
    true
}

/// Two-coloring by breadth-first search over every component. Returns the
/// side of each node, or `None` when an odd cycle exists.
fn bipartition(g: &Graph) -> Option<Vec<u8>> {
    let n = g.node_count();
    let mut side = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        if side[start] != u8::MAX {
            continue;
        }
        side[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for u in g.neighbors(v) {
                if side[u] == u8::MAX {
                    side[u] = 1 - side[v];
                    queue.push_back(u);
                } else if side[u] == side[v] {
                    return None;
                }
            }
        }
    }
    Some(side)
}

fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for u in g.neighbors(v) {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}

/// Classify `g`. Every label whose predicate holds lands in `all_matches`;
/// `primary` is picked by a fixed precedence: exact structural labels
/// first (null, complete, star, balanced bipartite, bipartite-complete,
/// then the complete multipartite variants, then shared), near- labels next
/// (closest profile wins, ties preferring shared, star, complete, null),
/// colorability fallbacks last.
pub fn classify(g: &Graph, cfg: &ClassifierConfig) -> Classification {
    let n = g.node_count();
    let e = g.edge_count();
    let mut matches: BTreeSet<ClassLabel> = BTreeSet::new();

    // Exact structural predicates.
    let degrees = g.sorted_degree_vector();
    if e == 0 {
        matches.insert(ClassLabel::Null);
    }
    if n >= 2 && e == crate::graph::pair_count(n) {
        matches.insert(ClassLabel::Complete);
    }
    if n >= 3 && degrees[0] == n - 1 && degrees[1..].iter().all(|&d| d == 1) {
        matches.insert(ClassLabel::Star);
    }
    if degrees.iter().all(|&d| d == degrees[0]) {
        matches.insert(ClassLabel::Shared);
    }

    if n >= 2 && e > 0 && is_connected(g) {
        if let Some(side) = bipartition(g) {
            let a = side.iter().filter(|&&s| s == 0).count();
            let b = n - a;
            let complete_bipartite = e == a * b;
            if complete_bipartite {
                matches.insert(ClassLabel::BipartiteComplete);
                if a.abs_diff(b) <= 1 {
                    matches.insert(ClassLabel::Turan);
                }
            }
        }
    }

    let color = greedy_color(g);
    let sizes = class_sizes(&color);
    let k = sizes.len();
    let equi_sized = k >= 2 && sizes.iter().all(|&s| s == sizes[0]);
    if k >= 2 && all_cross_pairs_present(g, &color) {
        matches.insert(ClassLabel::KPartiteComplete);
        if equi_sized {
            matches.insert(ClassLabel::EquiKPartiteComplete);
        }
    }

    // Near- labels: degree profile against each ideal.
    let tau = cfg.tau(n);
    let ideal_star: Vec<usize> =
        std::iter::once(n - 1).chain(std::iter::repeat(1).take(n.saturating_sub(1))).collect();
    let shared_degree = ideal_shared_degree(g);
    let near = [
        (ClassLabel::NearShared, msd(&degrees, &vec![shared_degree; n])),
        (ClassLabel::NearStar, if n >= 2 { msd(&degrees, &ideal_star) } else { tau }),
        (ClassLabel::NearComplete, msd(&degrees, &vec![n - 1; n])),
        (ClassLabel::NearNull, msd(&degrees, &vec![0; n])),
    ];
    let mut near_primary: Option<(Rational64, ClassLabel)> = None;
    for (label, deviation) in near {
        if deviation < tau {
            matches.insert(label);
            // The `near` array is ordered by tie preference, so strict
            // comparison keeps the earlier label on equal deviation.
            if near_primary.map_or(true, |(best, _)| deviation < best) {
                near_primary = Some((deviation, label));
            }
        }
    }

    // Plain colorability labels stand in only when no ideal is close.
    if near_primary.is_none() && k >= 2 {
        matches.insert(ClassLabel::KPartite);
        if equi_sized {
            matches.insert(ClassLabel::EquiKPartite);
        }
    }

    if matches.is_empty() {
        matches.insert(ClassLabel::Unclassified);
    }

    let precedence = [
        ClassLabel::Null,
        ClassLabel::Complete,
        ClassLabel::Star,
        ClassLabel::Turan,
        ClassLabel::BipartiteComplete,
        ClassLabel::EquiKPartiteComplete,
        ClassLabel::KPartiteComplete,
        ClassLabel::Shared,
        ClassLabel::EquiKPartite,
        ClassLabel::KPartite,
    ];
    let primary = precedence
        .iter()
        .copied()
        .find(|l| matches.contains(l))
        .or(near_primary.map(|(_, l)| l))
        .unwrap_or(ClassLabel::Unclassified);

    Classification { primary, all_matches: matches }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::StandardKind;

    fn classify_default(g: &Graph) -> Classification {
        classify(g, &ClassifierConfig::default())
    }

    #[test]
    fn standard_graphs_get_exact_labels() {
        let null = Graph::empty(8).unwrap();
        assert_eq!(classify_default(&null).primary, ClassLabel::Null);

        let complete = Graph::standard(StandardKind::Complete, 8).unwrap();
        assert_eq!(classify_default(&complete).primary, ClassLabel::Complete);

        let star = Graph::standard(StandardKind::Star, 8).unwrap();
        assert_eq!(classify_default(&star).primary, ClassLabel::Star);

        let turan = Graph::turan(10).unwrap();
        let c = classify_default(&turan);
        assert_eq!(c.primary, ClassLabel::Turan);
        assert!(c.all_matches.contains(&ClassLabel::BipartiteComplete));
        assert!(c.all_matches.contains(&ClassLabel::EquiKPartiteComplete));
        assert!(c.all_matches.contains(&ClassLabel::Shared));
    }

    #[test]
    fn even_cycle_is_a_shared_network() {
        let cycle = Graph::standard(StandardKind::Cycle, 6).unwrap();
        let c = classify_default(&cycle);
        assert_eq!(c.primary, ClassLabel::Shared);
        // Regular and profile-perfect, but not complete bipartite.
        assert!(c.all_matches.contains(&ClassLabel::NearShared));
        assert!(!c.all_matches.contains(&ClassLabel::BipartiteComplete));
        // Two-colorable, but the near match suppresses the fallback label.
        assert!(!c.all_matches.contains(&ClassLabel::EquiKPartite));

        let odd = Graph::standard(StandardKind::Cycle, 5).unwrap();
        assert_eq!(classify_default(&odd).primary, ClassLabel::Shared);
    }

    #[test]
    fn unbalanced_bipartite_complete() {
        let g = Graph::complete_multipartite(&[6, 4]).unwrap();
        let c = classify_default(&g);
        assert_eq!(c.primary, ClassLabel::BipartiteComplete);
        assert!(!c.all_matches.contains(&ClassLabel::Turan));
        assert!(c.all_matches.contains(&ClassLabel::KPartiteComplete));
    }

    #[test]
    fn balanced_tripartite_complete() {
        let g = Graph::complete_multipartite(&[2, 2, 2]).unwrap();
        let c = classify_default(&g);
        assert_eq!(c.primary, ClassLabel::EquiKPartiteComplete);
        assert!(c.all_matches.contains(&ClassLabel::Shared));
        assert!(!c.all_matches.contains(&ClassLabel::BipartiteComplete));
    }

    #[test]
    fn uneven_tripartite_complete_recovered_by_coloring() {
        // Classes {0,6,7,8}, {1,2,5}, {3,4,9} rebuilt from scrambled node
        // order: coloring must rediscover them from adjacency alone.
        let mut g = Graph::empty(10).unwrap();
        let classes: [&[usize]; 3] = [&[0, 6, 7, 8], &[1, 2, 5], &[3, 4, 9]];
        for (ci, class_i) in classes.iter().enumerate() {
            for class_j in classes.iter().skip(ci + 1) {
                for &u in class_i.iter() {
                    for &v in class_j.iter() {
                        g.add_edge(u, v);
                    }
                }
            }
        }
        let c = classify_default(&g);
        assert_eq!(c.primary, ClassLabel::KPartiteComplete);
        assert!(!c.all_matches.contains(&ClassLabel::EquiKPartiteComplete));
    }

    #[test]
    fn near_shared_beats_the_partite_fallback() {
        // Degrees (4,3,3,2,2): within threshold of the shared profile, so
        // the triangle-bearing chromatic structure must not surface.
        let mut g = Graph::empty(5).unwrap();
        for (i, j) in [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (2, 4)] {
            g.add_edge(i, j);
        }
        assert_eq!(g.sorted_degree_vector(), vec![4, 3, 3, 2, 2]);

        let tau = ClassifierConfig::default().tau(5);
        assert_eq!(tau, Rational64::new(8, 5));
        let degrees = g.sorted_degree_vector();
        assert_eq!(msd(&degrees, &[3, 3, 3, 3, 3]), Rational64::new(3, 5));
        assert_eq!(msd(&degrees, &[4, 1, 1, 1, 1]), Rational64::new(2, 1));
        assert_eq!(msd(&degrees, &[4, 4, 4, 4, 4]), Rational64::new(2, 1));
        assert_eq!(msd(&degrees, &[0, 0, 0, 0, 0]), Rational64::new(42, 5));

        let c = classify_default(&g);
        assert_eq!(c.primary, ClassLabel::NearShared);
        assert!(!c.all_matches.contains(&ClassLabel::KPartite));
    }

    #[test]
    fn near_star_on_a_dented_star() {
        // Star on 8 nodes plus one rim edge: hub profile survives.
        let mut g = Graph::standard(StandardKind::Star, 8).unwrap();
        g.add_edge(1, 2);
        let c = classify_default(&g);
        assert_eq!(c.primary, ClassLabel::NearStar);
    }

    #[test]
    fn shared_degree_rounds_half_up() {
        // 5 edges over 4 nodes: mean 2.5 rounds to 3.
        let mut g = Graph::standard(StandardKind::Cycle, 4).unwrap();
        g.add_edge(0, 2);
        assert_eq!(ideal_shared_degree(&g), 3);

        // 4 edges over 4 nodes: mean 2.
        let g = Graph::standard(StandardKind::Cycle, 4).unwrap();
        assert_eq!(ideal_shared_degree(&g), 2);
    }

    #[test]
    fn fallback_label_when_no_ideal_is_near() {
        // Tight threshold forces the chromatic fallback on the even cycle.
        let cycle = Graph::standard(StandardKind::Cycle, 6).unwrap();
        let cfg = ClassifierConfig { tau_fraction: Rational64::new(0, 1) };
        let c = classify(&cycle, &cfg);
        assert_eq!(c.primary, ClassLabel::Shared);
        assert!(c.all_matches.contains(&ClassLabel::EquiKPartite));

        // Triangle with a pendant: three unequal color classes, no exact
        // or near label in reach.
        let mut g = Graph::empty(4).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2), (2, 3)] {
            g.add_edge(i, j);
        }
        let c = classify(&g, &cfg);
        assert_eq!(c.primary, ClassLabel::KPartite);
        assert!(!c.all_matches.contains(&ClassLabel::EquiKPartite));
    }

    #[test]
    fn serialization_round_trips() {
        for label in ALL_LABELS {
            let text = label.to_string();
            assert_eq!(text.parse::<ClassLabel>().unwrap(), label);
            assert_eq!(text.to_lowercase().parse::<ClassLabel>().unwrap(), label);
        }
        assert!("SHARD".parse::<ClassLabel>().is_err());
    }

    #[test]
    fn legacy_aliases_parse() {
        assert_eq!("TUR_GRA".parse::<ClassLabel>().unwrap(), ClassLabel::Turan);
        assert_eq!("biparcomp".parse::<ClassLabel>().unwrap(), ClassLabel::BipartiteComplete);
        assert_eq!("NRSHARED".parse::<ClassLabel>().unwrap(), ClassLabel::NearShared);
        assert_eq!("KParComp".parse::<ClassLabel>().unwrap(), ClassLabel::KPartiteComplete);
        assert_eq!(
            "BI-PARTITITE-COMPLETE".parse::<ClassLabel>().unwrap(),
            ClassLabel::BipartiteComplete
        );
    }

    #[test]
    fn label_order_matches_declaration() {
        for pair in ALL_LABELS.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }
}
