//! Price of stability: the best total utility achievable by a pairwise
//! stable graph relative to the unconstrained maximum. Four parameter
//! regions admit an exact answer of one, the band where link benefit
//! exceeds cost by up to the squared benefit carries a proven lower bound
//! of 1/2 + 1/(2n), the adjacent band up to twice the squared benefit
//! carries the certified-construction bound net/(net + benefit^2), and
//! where even the best graph scores zero the ratio is undefined.

use num_rational::Rational64;

use crate::graph::{Graph, StandardKind};
use crate::oracle;
use crate::payoff::{total_utility, Params, Payoff};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosValue {
    Exact(Rational64),
    LowerBound(Rational64),
    Undefined,
}

impl std::fmt::Display for PosValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PosValue::Exact(r) => write!(f, "EXACT {r}"),
            PosValue::LowerBound(r) => write!(f, "LB {r}"),
            PosValue::Undefined => write!(f, "UNDEF"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PosMethod {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosVerdict {
    pub value: PosValue,
    /// How the verdict was obtained. Closed-form requests on fewer than
    /// four nodes are settled by enumeration instead, because the closed
    /// forms assume the balanced bipartite construction has two nodes per
    /// side; the field then reports `Oracle`.
    pub method: PosMethod,
    /// Total utility of the best certified stable graph (exhaustive
    /// maximum under `Oracle`, best closed-form construction otherwise).
    pub best_stable_utility: Payoff,
    /// The efficient total utility when the value is exact; a proven upper
    /// bound on it, `n(n-1)(net + benefit^2)`, when only a lower bound on
    /// the ratio is known.
    pub efficient_utility: Payoff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PosError {
    OracleLimit { n: usize },
}

impl std::fmt::Display for PosError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PosError::OracleLimit { n } => write!(
                f,
                "exhaustive price of stability supports at most {} nodes, got {n}",
                oracle::MAX_ORACLE_NODES
            ),
        }
    }
}

impl std::error::Error for PosError {}

fn oracle_verdict(p: &Params, n: usize) -> PosVerdict {
    let r = oracle::enumerate(n, p).expect("caller checked the size limit");
    PosVerdict {
        value: r.pos,
        method: PosMethod::Oracle,
        best_stable_utility: r.max_stable_utility,
        efficient_utility: r.max_utility,
    }
}

/// Best stable total utility over efficient total utility for graphs on
/// `n` nodes (`n >= 2`). `Oracle` enumerates every graph (`n <= 7`);
/// `ClosedForm` applies the proven region results and bounds.
pub fn price_of_stability(p: &Params, n: usize, method: PosMethod) -> Result<PosVerdict, PosError> {
    assert!(n >= 2, "price of stability needs at least two nodes");
    match method {
        PosMethod::Oracle => {
            if n > oracle::MAX_ORACLE_NODES {
                return Err(PosError::OracleLimit { n });
            }
            Ok(oracle_verdict(p, n))
        }
        PosMethod::ClosedForm => {
            if n <= 3 {
                return Ok(oracle_verdict(p, n));
            }
            Ok(closed_form(p, n))
        }
    }
}

fn closed_form(p: &Params, n: usize) -> PosVerdict {
    let zero = Rational64::from_integer(0);
    let one = Rational64::from_integer(1);
    let net = p.net();
    let dsq = p.delta_sq();
    let u_turan = total_utility(&Graph::turan(n).unwrap(), p);
    let u_complete =
        total_utility(&Graph::standard(StandardKind::Complete, n).unwrap(), p);
    // Sum of degrees times per-link value caps any graph's total.
    let cap = Rational64::from_integer((n * (n - 1)) as i64) * (net + dsq);

    let exact_one = |best: Payoff| PosVerdict {
        value: PosValue::Exact(one),
        method: PosMethod::ClosedForm,
        best_stable_utility: best,
        efficient_utility: best,
    };

    if net == zero {
        // The balanced bipartite graph is stable and efficient.
        exact_one(u_turan)
    } else if net > zero {
        if net > dsq + dsq {
            // Profit covers cost so richly that the complete graph is both
            // stable and efficient.
            exact_one(u_complete)
        } else if dsq >= Rational64::from_integer(3) * net {
            // The balanced bipartite graph is stable and efficient.
            exact_one(u_turan)
        } else if net <= dsq {
            // Contested band, low side: the stable balanced bipartite
            // graph guarantees at least (n + 1) / (2n) of the cap.
            let value = Rational64::new(n as i64 + 1, 2 * n as i64);
            debug_assert!(u_turan >= value * cap);
            PosVerdict {
                value: PosValue::LowerBound(value),
                method: PosMethod::ClosedForm,
                best_stable_utility: u_turan,
                efficient_utility: cap,
            }
        } else {
            // Contested band, high side: the complete graph is the stable
            // construction here and achieves net/(net + dsq) of the cap.
            let value = net / (net + dsq);
            debug_assert!(u_complete == value * cap);
            PosVerdict {
                value: PosValue::LowerBound(value),
                method: PosMethod::ClosedForm,
                best_stable_utility: u_complete,
                efficient_utility: cap,
            }
        }
    } else {
        let gap = -net;
        if dsq > gap {
            // The balanced bipartite graph is stable and efficient.
            exact_one(u_turan)
        } else {
            // Even the best graph scores zero; the ratio has no meaning.
            PosVerdict {
                value: PosValue::Undefined,
                method: PosMethod::ClosedForm,
                best_stable_utility: zero,
                efficient_utility: zero,
            }
        }
    }
}

/// Verdicts over the interior grid `delta, cost in {step, 2*step, ...} `
/// strictly below one, row-major with delta outermost.
pub fn pos_grid(
    n: usize,
    step: Rational64,
    method: PosMethod,
) -> Result<Vec<(Rational64, Rational64, PosVerdict)>, PosError> {
    let steps = Rational64::from_integer(1) / step;
    assert!(steps.is_integer() && steps > Rational64::from_integer(0), "step must divide 1");
    let steps = steps.to_integer();
    let mut out = Vec::new();
    for di in 1..steps {
        for ci in 1..steps {
            let delta = Rational64::from_integer(di) * step;
            let cost = Rational64::from_integer(ci) * step;
            let p = Params::new(delta, cost).expect("interior grid values lie in (0, 1)");
            out.push((delta, cost, price_of_stability(&p, n, method)?));
        }
    }
    Ok(out)
}
