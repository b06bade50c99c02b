//! Condition checkers: (L) and its nodewise form, the sampled (K) test,
//! the (nK) sufficient condition and arbitrage relative to null sets.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::market::{ClassId, Instance, NodeId};
use crate::nodes::{classify, is_truncation_induced};
use crate::portfolio::SimplePortfolio;
use crate::rational::{int, one, ratio, zero, Rational};

use super::{solve_checked, Hedger, PriceValue};
use crate::lp::{LpOutcome, Relation};

#[derive(Debug, Clone, PartialEq)]
pub struct LReport {
    pub holds: bool,
    /// Martingale weights vanishing on the null set, when (L) holds.
    pub measure: Option<Vec<Rational>>,
    /// Strict arbitrage (or arbitrage off the null set) when it fails.
    pub witness: Option<SimplePortfolio>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodewiseReport {
    pub holds: bool,
    /// First node (in tree order) whose shifted space violates (L).
    pub failing_node: Option<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KCounterexample {
    pub payoff: Vec<Rational>,
    pub i_bar: Rational,
    pub sigma_bar: PriceValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KReport {
    pub pass: bool,
    pub checked: usize,
    pub counterexample: Option<KCounterexample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NkReport {
    pub holds: bool,
    pub complete: bool,
    /// Type-II nodes not explained by the truncation.
    pub type_ii_nodes: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullArbitrageReport {
    /// Class on which the witness pays at least 1, and the witness.
    pub witness: Option<(ClassId, SimplePortfolio)>,
    /// Every class is null, so `‖1‖ = 0`.
    pub degenerate: bool,
}

impl Hedger<'_> {
    /// (L): a martingale measure vanishing on the null set exists.
    pub fn check_l(&self) -> bool {
        self.l_report().holds
    }

    pub fn l_report(&self) -> LReport {
        let result = self.dual_price(&vec![zero(); self.instance().num_classes()], true);
        match result.value {
            PriceValue::Finite(_) => LReport {
                holds: true,
                measure: result.measure,
                witness: None,
            },
            _ => LReport {
                holds: false,
                measure: None,
                witness: self
                    .sigma_bar(&vec![zero(); self.instance().num_classes()])
                    .arbitrage,
            },
        }
    }

    /// Compares `Ī` and `σ̄` on every nonnegative payoff of the sample.
    pub fn check_k(&self, sample: &[Vec<Rational>]) -> KReport {
        let positive: Vec<&Vec<Rational>> = sample
            .iter()
            .filter(|f| f.iter().all(|v| !v.is_negative()))
            .collect();
        let mismatches: Vec<Option<KCounterexample>> = positive
            .par_iter()
            .map(|f| {
                let upper = self.i_bar(f).expect("nonnegative").value;
                let sigma = self.sigma_bar(f).value;
                (upper != sigma).then(|| KCounterexample {
                    payoff: (*f).clone(),
                    i_bar: upper.finite().expect("Ī is finite").clone(),
                    sigma_bar: sigma,
                })
            })
            .collect();
        let counterexample = mismatches.into_iter().flatten().next();
        KReport {
            pass: counterexample.is_none(),
            checked: positive.len(),
            counterexample,
        }
    }

    /// Searches, class by class off the null set, for a zero-cost portfolio
    /// nonnegative off the null set and paying at least 1 on that class.
    pub fn detect_null_arbitrage(&self) -> NullArbitrageReport {
        let null = self.null_set();
        let off: Vec<ClassId> = (0..self.instance().num_classes())
            .filter(|&c| !null.contains(c))
            .collect();
        let witnesses: Vec<Option<(ClassId, SimplePortfolio)>> = off
            .par_iter()
            .map(|&s| {
                let mut lp = self.program(crate::lp::VarKind::Free, zero());
                self.fix_endowment(&mut lp, zero());
                for &c in &off {
                    let floor = if c == s { one() } else { zero() };
                    lp.constrain(self.rows[c].clone(), Relation::Ge, floor);
                }
                match solve_checked(&lp) {
                    LpOutcome::Infeasible { .. } => None,
                    outcome => Some((s, self.portfolio(outcome.point().expect("feasible")))),
                }
            })
            .collect();
        NullArbitrageReport {
            witness: witnesses.into_iter().flatten().next(),
            degenerate: null.is_everything(),
        }
    }
}

/// (nL): (L) on the shifted space of every node.
pub fn check_l_nodewise(instance: &Instance) -> NodewiseReport {
    let verdicts: Vec<bool> = instance
        .nodes()
        .par_iter()
        .map(|n| {
            let shifted = instance
                .shifted_space(n.members[0], n.depth)
                .expect("node representative is a valid class");
            Hedger::new(&shifted).check_l()
        })
        .collect();
    let failing_node = verdicts.iter().position(|ok| !ok);
    NodewiseReport {
        holds: failing_node.is_none(),
        failing_node,
    }
}

/// Completeness plus absence of type-II nodes other than those created by
/// the truncation; sufficient for (nL) and (nK).
pub fn check_nk_sufficient(instance: &Instance) -> NkReport {
    let type_ii_nodes: Vec<NodeId> = instance
        .nodes()
        .iter()
        .filter(|n| classify(instance, n.id).is_type_ii() && !is_truncation_induced(instance, n.id))
        .map(|n| n.id)
        .collect();
    let complete = instance.completeness().is_complete();
    NkReport {
        holds: complete && type_ii_nodes.is_empty(),
        complete,
        type_ii_nodes,
    }
}

/// Structured nonnegative payoffs: class indicators, the straddle
/// `|S_{j+1} - v|` at every node of value `v` and depth `j < M`, and
/// `random` seeded payoffs with small rational entries.
pub fn default_k_sample(instance: &Instance, seed: u64, random: usize) -> Vec<Vec<Rational>> {
    let k = instance.num_classes();
    let mut sample = Vec::new();
    for c in 0..k {
        sample.push(
            (0..k)
                .map(|d| if d == c { one() } else { zero() })
                .collect(),
        );
    }
    let cap = instance.regime().maturity_cap;
    for node in instance.nodes().iter().filter(|n| n.depth < cap) {
        let straddle: Vec<Rational> = (0..k)
            .map(|c| (instance.class(c).value_at(node.depth + 1) - &node.value).abs())
            .collect();
        if straddle.iter().any(|v| !v.is_zero()) && !sample.contains(&straddle) {
            sample.push(straddle);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        sample.push(
            (0..k)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        zero()
                    } else {
                        ratio(rng.gen_range(1..=6), rng.gen_range(1..=3))
                    }
                })
                .collect(),
        );
    }
    sample.push(vec![int(1); k]);
    sample
}
