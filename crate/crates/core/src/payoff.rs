//! The localized payoff model.
//!
//! A node `i` with degree `d` earns `d * (delta - cost)` from its links plus
//! a bridging bonus `d * (1 - sigma_i / C(d, 2)) * delta^2`, where `sigma_i`
//! counts the edges among `i`'s neighbors. The bonus is largest when no two
//! neighbors are linked (every neighbor pair is bridged by `i`) and vanishes
//! on a fully connected neighborhood. Nodes of degree 0 or 1 have no
//! neighbor pairs to bridge, so their bonus is 0 by definition.
//!
//! Everything is exact `Rational64` arithmetic; utilities on the supported
//! graph sizes stay far inside the representable range.

use std::fmt;

use num_rational::Rational64;

use crate::graph::{pair_count, Graph, NodeId};

/// Exact rational utility value.
pub type Payoff = Rational64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamsError {
    /// `delta` outside the admitted interval.
    DeltaRange(Rational64),
    /// `cost` outside the admitted interval.
    CostRange(Rational64),
}

impl fmt::Display for ParamsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamsError::DeltaRange(v) => write!(f, "delta {v} outside (0, 1]"),
            ParamsError::CostRange(v) => write!(f, "cost {v} outside (0, 1]"),
        }
    }
}

impl std::error::Error for ParamsError {}

/// Model parameters: per-link benefit `delta` and per-link cost `cost`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    delta: Rational64,
    cost: Rational64,
}

impl Params {
    /// Both parameters strictly inside `(0, 1)`.
    pub fn new(delta: Rational64, cost: Rational64) -> Result<Self, ParamsError> {
        let one = Rational64::from_integer(1);
        if delta >= one {
            return Err(ParamsError::DeltaRange(delta));
        }
        if cost >= one {
            return Err(ParamsError::CostRange(cost));
        }
        Params::new_inclusive(delta, cost)
    }

    /// Relaxed constructor admitting `(0, 1]`, so that sweep grids may end
    /// exactly at 1.
    pub fn new_inclusive(delta: Rational64, cost: Rational64) -> Result<Self, ParamsError> {
        let zero = Rational64::from_integer(0);
        let one = Rational64::from_integer(1);
        if delta <= zero || delta > one {
            return Err(ParamsError::DeltaRange(delta));
        }
        if cost <= zero || cost > one {
            return Err(ParamsError::CostRange(cost));
        }
        Ok(Params { delta, cost })
    }

    pub fn delta(&self) -> Rational64 {
        self.delta
    }

    pub fn cost(&self) -> Rational64 {
        self.cost
    }

    /// `delta - cost`: the net value of one link before bridging.
    pub fn net(&self) -> Rational64 {
        self.delta - self.cost
    }

    /// `delta^2`: the value of one bridged neighbor pair.
    pub fn delta_sq(&self) -> Rational64 {
        self.delta * self.delta
    }
}

/// The multiples of `step` inside `(0, 1]`, ascending. `step` must divide 1
/// evenly. This is the default sweep axis with `step = 1/20`.
pub fn grid_values(step: Rational64) -> Vec<Rational64> {
    let cells = (Rational64::from_integer(1) / step).to_integer();
    assert!(
        step * Rational64::from_integer(cells) == Rational64::from_integer(1) && cells >= 1,
        "step must divide 1 evenly"
    );
    (1..=cells).map(|k| step * Rational64::from_integer(k)).collect()
}

/// The full default parameter grid: both axes over [`grid_values`] with
/// `step = 1/20`, row-major in `delta` then `cost`.
pub fn default_param_grid() -> Vec<Params> {
    let step = Rational64::new(1, 20);
    let axis = grid_values(step);
    let mut out = Vec::with_capacity(axis.len() * axis.len());
    for &delta in &axis {
        for &cost in &axis {
            out.push(Params::new_inclusive(delta, cost).expect("grid values lie in (0, 1]"));
        }
    }
    out
}

/// Parse a decimal (`0.35`) or fraction (`7/20`) literal into an exact
/// rational.
pub fn parse_rational(text: &str) -> Result<Rational64, String> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let n: i64 = num.trim().parse().map_err(|_| format!("bad numerator in {text:?}"))?;
        let d: i64 = den.trim().parse().map_err(|_| format!("bad denominator in {text:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {text:?}"));
        }
        return Ok(Rational64::new(n, d));
    }
    let (sign, digits) = match text.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, text),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("empty number {text:?}"));
    }
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| format!("bad number {text:?}"))?
    };
    let mut value = Rational64::from_integer(int);
    if !frac_part.is_empty() {
        let frac: i64 = frac_part.parse().map_err(|_| format!("bad number {text:?}"))?;
        let scale = 10i64.checked_pow(frac_part.len() as u32).ok_or_else(|| {
            format!("too many decimal places in {text:?}")
        })?;
        value += Rational64::new(frac, scale);
    }
    Ok(value * Rational64::from_integer(sign))
}

/// Utility of `(d, sigma)` under `p`: the per-node payoff as a function of
/// degree and neighborhood edge count alone.
pub fn utility_of(d: usize, sigma: usize, p: &Params) -> Payoff {
    let d_r = Rational64::from_integer(d as i64);
    let mut u = d_r * p.net();
    let pairs = pair_count(d);
    if pairs > 0 {
        let bridged = Rational64::from_integer(1)
            - Rational64::new(sigma as i64, pairs as i64);
        u += d_r * bridged * p.delta_sq();
    }
    u
}

/// Exact utility of node `i` in `g`.
pub fn node_utility(g: &Graph, i: NodeId, p: &Params) -> Payoff {
    utility_of(g.degree(i), g.sigma(i), p)
}

/// Sum of all node utilities.
pub fn total_utility(g: &Graph, p: &Params) -> Payoff {
    (0..g.node_count()).map(|i| node_utility(g, i, p)).sum()
}

/// Which single-edge change a deviation performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DeviationKind {
    AddEdge,
    DeleteEdge,
}

/// Utility changes `(gain_i, gain_j, kind)` if the edge `(i, j)` were
/// toggled: added when absent, deleted when present. Gains are exact and
/// computed from the closed-form neighborhood deltas (`sigma` shifts by the
/// common neighborhood size); panics if `i == j`.
pub fn deviation_gains(g: &Graph, i: NodeId, j: NodeId, p: &Params) -> (Payoff, Payoff, DeviationKind) {
    assert_ne!(i, j, "deviation endpoints must differ");
    let common = g.common_neighbors(i, j);
    let gain = |node: NodeId| {
        let d = g.degree(node);
        let s = g.sigma(node);
        let (d2, s2) = if g.has_edge(i, j) {
            (d - 1, s - common)
        } else {
            (d + 1, s + common)
        };
        utility_of(d2, s2, p) - utility_of(d, s, p)
    };
    let kind = if g.has_edge(i, j) {
        DeviationKind::DeleteEdge
    } else {
        DeviationKind::AddEdge
    };
    (gain(i), gain(j), kind)
}
