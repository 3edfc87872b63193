//! Agent-based network formation: starting from a random graph, nodes act
//! in randomly scheduled rounds, each applying its best response (add a
//! consented link, sever a link, or pass). A run terminates once a fixed
//! number of consecutive rounds pass without any edge change, or forcibly
//! at an iteration cap.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{classify, ClassLabel, ClassifierConfig, ALL_LABELS};
use crate::graph::{Graph, NodeId, MAX_NODES};
use crate::payoff::{total_utility, Params};
use crate::stability::{best_response, is_pairwise_stable, Action};

/// Simulation settings for one parameter cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimConfig {
    pub n: usize,
    /// Initial edge density in [0, 1].
    pub density: Rational64,
    pub params: Params,
    /// Forced-stop bound on iterations.
    pub max_iterations: usize,
    /// Consecutive idle iterations required to declare convergence.
    pub idle_terminate: usize,
    pub repetitions: usize,
    pub master_seed: u64,
    /// Execute zero-gain additions instead of passing. Off by default so
    /// that convergence coincides exactly with pairwise stability.
    pub allow_indifferent_adds: bool,
    /// Track revisited states to flag non-converging oscillation.
    pub detect_cycles: bool,
}

impl SimConfig {
    /// Standard settings: 1000-iteration cap, 30 idle iterations to
    /// terminate, 100 repetitions.
    ///
    /// Panics when `n` is out of range or `density` is not in [0, 1].
    pub fn new(n: usize, density: Rational64, params: Params, master_seed: u64) -> Self {
        assert!(n >= 1 && n <= MAX_NODES, "node count out of range");
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        assert!(density >= zero && density <= one, "density must lie in [0, 1]");
        SimConfig {
            n,
            density,
            params,
            max_iterations: 1000,
            idle_terminate: 30,
            repetitions: 100,
            master_seed,
            allow_indifferent_adds: false,
            detect_cycles: true,
        }
    }
}

/// One sampled point of a run's trajectory, recorded at iteration
/// boundaries (entry 0 is the initial graph).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub clustering: Rational64,
    pub utility: Rational64,
}

/// Complete record of a single run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub final_graph: Graph,
    /// Terminated via the idle streak (as opposed to the iteration cap).
    pub converged: bool,
    /// A previously seen graph state recurred after intervening changes.
    pub dynamic_equilibrium: bool,
    pub iterations_used: usize,
    /// Edge changes performed over the whole run.
    pub acts: usize,
    pub trajectory: Vec<TrajectoryPoint>,
    pub label: ClassLabel,
}

/// Aggregates over the repetitions of a batch. Means are exact; they use
/// arbitrary-precision rationals because the common denominator across a
/// hundred clustering coefficients routinely exceeds 64 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchStats {
    pub class_frequencies: BTreeMap<ClassLabel, usize>,
    /// Most frequent final label; ties go to the earliest label in
    /// declaration order.
    pub modal_class: ClassLabel,
    pub mean_utility: BigRational,
    pub mean_iterations: BigRational,
    pub mean_acts: BigRational,
    pub mean_final_clustering: BigRational,
}

/// Derives the seed for one run from the master seed, the parameter-cell
/// index, and the repetition index. The mix feeds the offsets through the
/// splitmix64 finalizer (constants 0x9E3779B97F4A7C15, 0xBF58476D1CE4E5B9,
/// 0x94D049BB133111EB), so runs are decorrelated and the mapping is
/// platform-independent.
pub fn derive_seed(master_seed: u64, cell_index: u64, rep_index: u64) -> u64 {
    const GOLDEN: u64 = 0x9E3779B97F4A7C15;
    const MIX1: u64 = 0xBF58476D1CE4E5B9;
    const MIX2: u64 = 0x94D049BB133111EB;
    let mut z = master_seed
        .wrapping_add(GOLDEN.wrapping_mul(cell_index.wrapping_add(1)))
        .wrapping_add(MIX1.wrapping_mul(rep_index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(MIX1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX2);
    z ^ (z >> 31)
}

/// Runs one simulation, reporting each executed act to `on_act` as
/// (graph before, actor, action, graph after).
pub fn run_once_observed<F>(cfg: &SimConfig, run_seed: u64, mut on_act: F) -> RunResult
where
    F: FnMut(&Graph, NodeId, Action, &Graph),
{
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    let mut g = Graph::random(cfg.n, cfg.density, &mut rng)
        .expect("SimConfig construction validates n and density");

    let mut trajectory = vec![TrajectoryPoint {
        iteration: 0,
        clustering: g.clustering_coefficient(),
        utility: total_utility(&g, &cfg.params),
    }];
    let mut seen: HashSet<_> = HashSet::new();
    if cfg.detect_cycles {
        seen.insert(g.canonical_state_key());
    }

    let mut order: Vec<NodeId> = (0..cfg.n).collect();
    let mut converged = false;
    let mut dynamic_equilibrium = false;
    let mut idle_streak = 0usize;
    let mut acts = 0usize;
    let mut iterations_used = 0usize;

    for iteration in 1..=cfg.max_iterations {
        order.shuffle(&mut rng);
        let mut acted = false;
        for &i in &order {
            let action = best_response(&g, i, &cfg.params, &mut rng, cfg.allow_indifferent_adds);
            if action == Action::Pass {
                continue;
            }
            let before = g.clone();
            match action {
                Action::AddEdge(j) => g.add_edge(i, j),
                Action::DeleteEdge(j) => g.remove_edge(i, j),
                Action::Pass => unreachable!(),
            }
            on_act(&before, i, action, &g);
            acts += 1;
            acted = true;
        }
        iterations_used = iteration;
        trajectory.push(TrajectoryPoint {
            iteration,
            clustering: g.clustering_coefficient(),
            utility: total_utility(&g, &cfg.params),
        });

        if acted {
            idle_streak = 0;
            if cfg.detect_cycles && !seen.insert(g.canonical_state_key()) {
                dynamic_equilibrium = true;
            }
        } else {
            idle_streak += 1;
            if idle_streak >= cfg.idle_terminate {
                converged = true;
                break;
            }
        }
    }

    if converged && !cfg.allow_indifferent_adds {
        debug_assert!(
            is_pairwise_stable(&g, &cfg.params).stable,
            "idle termination must certify pairwise stability"
        );
    }

    let label = classify(&g, &ClassifierConfig::default()).primary;
    RunResult {
        final_graph: g,
        converged,
        dynamic_equilibrium,
        iterations_used,
        acts,
        trajectory,
        label,
    }
}

/// Runs one simulation from the given seed.
pub fn run_once(cfg: &SimConfig, run_seed: u64) -> RunResult {
    run_once_observed(cfg, run_seed, |_, _, _, _| {})
}

/// Executes every repetition of the cell at `cell_index`, in parallel,
/// returning results in repetition order. Seeds come from [`derive_seed`],
/// so splitting a sweep across workers cannot change any run.
pub fn run_batch_runs(cfg: &SimConfig, cell_index: u64) -> Vec<RunResult> {
    (0..cfg.repetitions as u64)
        .into_par_iter()
        .map(|rep| run_once(cfg, derive_seed(cfg.master_seed, cell_index, rep)))
        .collect()
}

/// Aggregates finished runs into batch statistics.
pub fn aggregate_runs(runs: &[RunResult], params: &Params) -> BatchStats {
    assert!(!runs.is_empty(), "cannot aggregate zero runs");
    let mut class_frequencies: BTreeMap<ClassLabel, usize> = BTreeMap::new();
    let mut utility_sum = BigRational::from_integer(BigInt::from(0));
    let mut clustering_sum = utility_sum.clone();
    let mut iteration_sum = 0u64;
    let mut act_sum = 0u64;
    for run in runs {
        *class_frequencies.entry(run.label).or_insert(0) += 1;
        utility_sum += big(total_utility(&run.final_graph, params));
        clustering_sum += big(run.final_graph.clustering_coefficient());
        iteration_sum += run.iterations_used as u64;
        act_sum += run.acts as u64;
    }
    let top = class_frequencies.values().copied().max().unwrap();
    let modal_class = ALL_LABELS
        .iter()
        .copied()
        .find(|l| class_frequencies.get(l) == Some(&top))
        .unwrap();
    let count = BigRational::from_integer(BigInt::from(runs.len() as u64));
    BatchStats {
        class_frequencies,
        modal_class,
        mean_utility: utility_sum / &count,
        mean_iterations: BigRational::from_integer(BigInt::from(iteration_sum)) / &count,
        mean_acts: BigRational::from_integer(BigInt::from(act_sum)) / &count,
        mean_final_clustering: clustering_sum / &count,
    }
}

/// Runs and aggregates one standalone batch (grid cell zero).
pub fn run_batch(cfg: &SimConfig) -> BatchStats {
    aggregate_runs(&run_batch_runs(cfg, 0), &cfg.params)
}

fn big(r: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::Payoff;

    fn rat(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn cfg(n: usize, density: Rational64, delta: Rational64, cost: Rational64) -> SimConfig {
        let params = Params::new_inclusive(delta, cost).unwrap();
        SimConfig::new(n, density, params, 0xA11CE)
    }

    #[test]
    fn seed_derivation_is_stable_and_collision_free() {
        assert_eq!(derive_seed(7, 3, 11), derive_seed(7, 3, 11));
        assert_ne!(derive_seed(7, 3, 11), derive_seed(8, 3, 11));
        assert_ne!(derive_seed(7, 3, 11), derive_seed(7, 4, 11));
        assert_ne!(derive_seed(7, 3, 11), derive_seed(7, 3, 12));

        let mut seen = HashSet::new();
        for cell in 0..64u64 {
            for rep in 0..64u64 {
                assert!(seen.insert(derive_seed(42, cell, rep)));
            }
        }
    }

    #[test]
    fn stable_start_never_moves() {
        // Links cost more than they pay: the empty start is already stable.
        let cfg = cfg(10, rat(0, 1), rat(1, 10), rat(1, 2));
        let run = run_once(&cfg, 1);
        assert!(run.converged);
        assert!(!run.dynamic_equilibrium);
        assert_eq!(run.acts, 0);
        assert_eq!(run.iterations_used, cfg.idle_terminate);
        assert_eq!(run.label, ClassLabel::Null);
        assert_eq!(run.trajectory.len(), cfg.idle_terminate + 1);
    }

    #[test]
    fn cheap_links_build_the_complete_graph() {
        let cfg = cfg(10, rat(0, 1), rat(1, 2), rat(1, 10));
        for seed in 0..5 {
            let run = run_once(&cfg, seed);
            assert!(run.converged);
            assert_eq!(run.label, ClassLabel::Complete);
            assert_eq!(run.final_graph.edge_count(), 45);
            // Building the complete graph from nothing takes exactly one
            // act per edge: deletions are never profitable here.
            assert_eq!(run.acts, 45);
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let cfg = cfg(12, rat(3, 10), rat(11, 20), rat(9, 20));
        let a = run_once(&cfg, 99);
        let b = run_once(&cfg, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn forced_stop_reports_non_convergence() {
        let mut c = cfg(10, rat(0, 1), rat(1, 2), rat(1, 10));
        c.max_iterations = 2;
        let run = run_once(&c, 3);
        assert!(!run.converged);
        assert_eq!(run.iterations_used, 2);
        // The final graph is still classified.
        assert_ne!(run.label, ClassLabel::Complete);
    }

    #[test]
    fn acts_match_trajectory_edge_differences() {
        let cfg = cfg(9, rat(1, 4), rat(3, 5), rat(1, 4));
        let mut diff_total = 0usize;
        let run = run_once_observed(&cfg, 17, |before, _, _, after| {
            let mut diff = 0;
            for i in 0..before.node_count() {
                for j in i + 1..before.node_count() {
                    if before.has_edge(i, j) != after.has_edge(i, j) {
                        diff += 1;
                    }
                }
            }
            diff_total += diff;
        });
        assert_eq!(diff_total, run.acts);
        assert!(run.acts > 0);
    }

    #[test]
    fn every_act_is_strictly_selfish_and_consented() {
        let zero = Payoff::from_integer(0);
        for (dn, cn) in [(1i64, 11i64), (11, 1), (10, 10), (13, 7)] {
            let cfg = cfg(8, rat(1, 2), rat(dn, 20), rat(cn, 20));
            run_once_observed(&cfg, 23, |before, actor, action, after| {
                let gain = crate::payoff::node_utility(after, actor, &cfg.params)
                    - crate::payoff::node_utility(before, actor, &cfg.params);
                match action {
                    Action::AddEdge(j) => {
                        assert!(gain >= zero);
                        let partner_gain = crate::payoff::node_utility(after, j, &cfg.params)
                            - crate::payoff::node_utility(before, j, &cfg.params);
                        assert!(partner_gain >= zero);
                        // Zero-gain adds require the indifference flag.
                        if !cfg.allow_indifferent_adds {
                            assert!(gain > zero);
                        }
                    }
                    Action::DeleteEdge(_) => assert!(gain > zero),
                    Action::Pass => unreachable!(),
                }
            });
        }
    }

    #[test]
    fn batch_of_one_echoes_the_run() {
        let mut c = cfg(10, rat(0, 1), rat(1, 2), rat(1, 10));
        c.repetitions = 1;
        let stats = run_batch(&c);
        let run = run_once(&c, derive_seed(c.master_seed, 0, 0));
        assert_eq!(stats.class_frequencies.len(), 1);
        assert_eq!(stats.class_frequencies[&run.label], 1);
        assert_eq!(stats.modal_class, run.label);
        assert_eq!(stats.mean_acts, BigRational::from_integer(BigInt::from(run.acts as u64)));
        assert_eq!(
            stats.mean_utility,
            big(total_utility(&run.final_graph, &c.params))
        );
    }

    #[test]
    fn batch_frequencies_sum_to_repetitions() {
        let mut c = cfg(8, rat(1, 5), rat(2, 5), rat(3, 5));
        c.repetitions = 24;
        let runs = run_batch_runs(&c, 0);
        assert_eq!(runs.len(), 24);
        let stats = aggregate_runs(&runs, &c.params);
        assert_eq!(stats.class_frequencies.values().sum::<usize>(), 24);
        let top = stats.class_frequencies.values().copied().max().unwrap();
        assert_eq!(stats.class_frequencies[&stats.modal_class], top);
        // Parallel and repeated aggregation are deterministic.
        let again = aggregate_runs(&run_batch_runs(&c, 0), &c.params);
        assert_eq!(stats, again);
    }

    #[test]
    fn indifference_flag_changes_equal_benefit_dynamics() {
        // At delta == cost from an empty start nothing is ever strictly
        // profitable: the default semantics freeze immediately.
        let mut c = cfg(6, rat(0, 1), rat(1, 2), rat(1, 2));
        let frozen = run_once(&c, 5);
        assert_eq!(frozen.acts, 0);
        assert_eq!(frozen.label, ClassLabel::Null);

        // Indifferent adds explore: edges appear.
        c.allow_indifferent_adds = true;
        let moving = run_once(&c, 5);
        assert!(moving.acts > 0);
    }
}
