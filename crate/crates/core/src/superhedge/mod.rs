//! Replication, superhedging operators, null sets and arbitrage detection.
//!
//! Every operator is one exact LP over the variables `(V, h_1, ..., h_k)`
//! where `h_i` is the holding at the `i`-th trading node (a non-flat node
//! strictly before the trading horizon). Terminal wealth on a class is the
//! affine row `V + Σ h_i ΔS`, built once per [`Hedger`].

mod conditions;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::lp::{solve_lp, verify_certificate, LinearProgram, LpOutcome, Relation, Sense, VarKind};
use crate::market::{ClassId, Instance, NodeId};
use crate::nodes::{classify, type_ii_nodes_before, NodeClass};
use crate::portfolio::{GeneralizedPortfolio, SimplePortfolio};
use crate::rational::{one, zero, Rational};

pub use conditions::{
    default_k_sample, KCounterexample, KReport, LReport, NkReport, NodewiseReport,
    NullArbitrageReport,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PricingError {
    #[error("payoff is negative on class `{label}`")]
    NegativePayoff { label: String },
    #[error("type-II node {node} at depth {depth} precedes the aggregation depth")]
    TypeIINode { node: NodeId, depth: usize },
}

/// A price on the extended line. Variants are declared in increasing order
/// so the derived ordering is the natural one.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PriceValue {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl PriceValue {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            PriceValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, PriceValue::Finite(_))
    }

    pub fn neg(&self) -> PriceValue {
        match self {
            PriceValue::NegInfinity => PriceValue::PosInfinity,
            PriceValue::Finite(v) => PriceValue::Finite(-v),
            PriceValue::PosInfinity => PriceValue::NegInfinity,
        }
    }
}

impl fmt::Display for PriceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriceValue::NegInfinity => f.write_str("-inf"),
            PriceValue::Finite(v) => write!(f, "{v}"),
            PriceValue::PosInfinity => f.write_str("+inf"),
        }
    }
}

impl Serialize for PriceValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Value of a pricing LP with its certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub value: PriceValue,
    /// Optimal hedge (primal).
    pub portfolio: Option<SimplePortfolio>,
    /// Supporting weights per class (dual). For σ̄ and the dual price this
    /// is a martingale measure vanishing on the null set.
    pub measure: Option<Vec<Rational>>,
    /// Arbitrage witness when the value is `-inf`.
    pub arbitrage: Option<SimplePortfolio>,
}

impl PriceResult {
    fn finite(value: Rational) -> Self {
        Self {
            value: PriceValue::Finite(value),
            portfolio: None,
            measure: None,
            arbitrage: None,
        }
    }
}

/// `σ̲ = σ̄` finite, or the two bounds that disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Integral {
    Value(Rational),
    NotIntegrable {
        lower: PriceValue,
        upper: PriceValue,
    },
}

/// Why a class is or is not null.
#[derive(Debug, Clone, PartialEq)]
pub enum NullCertificate {
    /// Zero-cost portfolio, nonnegative everywhere, paying at least 1 here.
    Covered(SimplePortfolio),
    /// Farkas vector proving no such portfolio exists.
    Excluded { farkas: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullSet {
    pub certificates: Vec<NullCertificate>,
}

impl NullSet {
    pub fn contains(&self, class: ClassId) -> bool {
        matches!(self.certificates[class], NullCertificate::Covered(_))
    }

    pub fn members(&self) -> Vec<ClassId> {
        (0..self.certificates.len())
            .filter(|&c| self.contains(c))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every class is null: the market is degenerate (`‖1‖ = 0`).
    pub fn is_everything(&self) -> bool {
        (0..self.certificates.len()).all(|c| self.contains(c))
    }
}

/// Solves and checks the returned certificate; a failed check is an
/// internal invariant violation.
pub(crate) fn solve_checked(lp: &LinearProgram) -> LpOutcome {
    let outcome = solve_lp(lp);
    assert!(
        verify_certificate(lp, &outcome),
        "LP certificate failed verification"
    );
    outcome
}

/// Pricing context over one instance. The null set is computed on first use
/// and cached.
pub struct Hedger<'a> {
    instance: &'a Instance,
    trading: Vec<NodeId>,
    rows: Vec<Vec<Rational>>,
    null: OnceLock<NullSet>,
}

impl<'a> Hedger<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let horizon = instance.trading_horizon();
        let trading: Vec<NodeId> = instance
            .nodes()
            .iter()
            .filter(|n| n.depth < horizon && classify(instance, n.id) != NodeClass::Flat)
            .map(|n| n.id)
            .collect();
        let column: HashMap<NodeId, usize> = trading
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, 1 + i))
            .collect();
        let rows = (0..instance.num_classes())
            .map(|c| {
                let mut row = vec![zero(); 1 + trading.len()];
                row[0] = one();
                let path = instance.class(c);
                for i in 0..horizon {
                    if let Some(&col) = column.get(&instance.node_at(c, i)) {
                        row[col] = path.increment(i);
                    }
                }
                row
            })
            .collect();
        Self {
            instance,
            trading,
            rows,
            null: OnceLock::new(),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// Nodes carrying a holding variable, in column order.
    pub fn trading_nodes(&self) -> &[NodeId] {
        &self.trading
    }

    fn width(&self) -> usize {
        1 + self.trading.len()
    }

    fn classes(&self) -> std::ops::Range<ClassId> {
        0..self.instance.num_classes()
    }

    fn check_len(&self, payoff: &[Rational]) {
        assert_eq!(
            payoff.len(),
            self.instance.num_classes(),
            "payoff must have one value per class"
        );
    }

    /// Program over `(V, h)`; `v_cost` is the objective weight of `V`.
    fn program(&self, v_kind: VarKind, v_cost: Rational) -> LinearProgram {
        let mut objective = vec![zero(); self.width()];
        objective[0] = v_cost;
        let mut vars = vec![VarKind::Free; self.width()];
        vars[0] = v_kind;
        LinearProgram::new(Sense::Minimize, objective, vars)
    }

    fn fix_endowment(&self, lp: &mut LinearProgram, v: Rational) {
        let mut coeffs = vec![zero(); self.width()];
        coeffs[0] = one();
        lp.constrain(coeffs, Relation::Eq, v);
    }

    fn portfolio(&self, x: &[Rational]) -> SimplePortfolio {
        self.trading.iter().enumerate().fold(
            SimplePortfolio::zero(self.instance.regime().maturity_cap).with_endowment(x[0].clone()),
            |p, (i, &node)| p.hold(node, x[1 + i].clone()),
        )
    }

    fn feasible_portfolio(&self, lp: &LinearProgram) -> Option<SimplePortfolio> {
        solve_checked(lp).point().map(|x| self.portfolio(x))
    }

    /// Terminal wealth row of `class` over `(V, h)`.
    pub fn wealth_row(&self, class: ClassId) -> &[Rational] {
        &self.rows[class]
    }

    /// Exact replication: terminal wealth equals the payoff on every class.
    /// `None` means the payoff is not in the span of simple portfolios.
    pub fn replicate(&self, payoff: &[Rational]) -> Option<SimplePortfolio> {
        self.check_len(payoff);
        let mut lp = self.program(VarKind::Free, zero());
        for c in self.classes() {
            lp.constrain(self.rows[c].clone(), Relation::Eq, payoff[c].clone());
        }
        self.feasible_portfolio(&lp)
    }

    /// Portfolio with `V = -1` replicating zero, if any.
    pub fn lop_violation(&self) -> Option<SimplePortfolio> {
        let mut lp = self.program(VarKind::Free, zero());
        self.fix_endowment(&mut lp, -one());
        for c in self.classes() {
            lp.constrain(self.rows[c].clone(), Relation::Eq, zero());
        }
        self.feasible_portfolio(&lp)
    }

    /// Portfolio with `V = -1` superhedging zero, if any.
    pub fn mon_violation(&self) -> Option<SimplePortfolio> {
        let mut lp = self.program(VarKind::Free, zero());
        self.fix_endowment(&mut lp, -one());
        for c in self.classes() {
            lp.constrain(self.rows[c].clone(), Relation::Ge, zero());
        }
        self.feasible_portfolio(&lp)
    }

    pub fn check_lop(&self) -> bool {
        self.lop_violation().is_none()
    }

    pub fn check_mon(&self) -> bool {
        self.mon_violation().is_none()
    }

    /// Per-class test: is there a zero-cost portfolio, nonnegative on every
    /// class, paying at least 1 on `class`?
    fn null_certificate(&self, class: ClassId) -> NullCertificate {
        let mut lp = self.program(VarKind::Free, zero());
        self.fix_endowment(&mut lp, zero());
        for c in self.classes() {
            let floor = if c == class { one() } else { zero() };
            lp.constrain(self.rows[c].clone(), Relation::Ge, floor);
        }
        match solve_checked(&lp) {
            LpOutcome::Infeasible { farkas } => NullCertificate::Excluded { farkas },
            outcome => NullCertificate::Covered(self.portfolio(outcome.point().expect("feasible"))),
        }
    }

    pub fn null_set(&self) -> &NullSet {
        self.null.get_or_init(|| NullSet {
            certificates: self
                .classes()
                .into_par_iter()
                .map(|c| self.null_certificate(c))
                .collect(),
        })
    }

    fn off_null(&self) -> Vec<ClassId> {
        let null = self.null_set();
        self.classes().filter(|&c| !null.contains(c)).collect()
    }

    fn superhedge_over(&self, payoff: &[Rational], support: &[ClassId]) -> PriceResult {
        self.check_len(payoff);
        let mut lp = self.program(VarKind::Free, one());
        for &c in support {
            lp.constrain(self.rows[c].clone(), Relation::Ge, payoff[c].clone());
        }
        match solve_checked(&lp) {
            LpOutcome::Optimal {
                value,
                primal,
                dual,
            } => {
                let mut measure = vec![zero(); self.instance.num_classes()];
                for (i, &c) in support.iter().enumerate() {
                    measure[c] = dual[i].clone();
                }
                PriceResult {
                    value: PriceValue::Finite(value),
                    portfolio: Some(self.portfolio(&primal)),
                    measure: Some(measure),
                    arbitrage: None,
                }
            }
            LpOutcome::Unbounded { ray, .. } => {
                // The ray lowers V while keeping every constrained row
                // nonnegative; rescaled it pays at least 1 on `support`.
                let scale = one() / -&ray[0];
                let mut free = self.portfolio(&ray).scaled(&scale);
                free.endowment = zero();
                PriceResult {
                    value: PriceValue::NegInfinity,
                    portfolio: None,
                    measure: None,
                    arbitrage: Some(self.detect_strict_mia().unwrap_or(free)),
                }
            }
            LpOutcome::Infeasible { .. } => unreachable!("V = max payoff is always feasible"),
        }
    }

    /// `σ̄(f)`: cheapest portfolio whose terminal wealth dominates `f` off
    /// the null set.
    pub fn sigma_bar(&self, payoff: &[Rational]) -> PriceResult {
        self.superhedge_over(payoff, &self.off_null())
    }

    /// `σ̲(f) = -σ̄(-f)`. The portfolio returned is a subhedge.
    pub fn sigma_under(&self, payoff: &[Rational]) -> PriceResult {
        let neg: Vec<Rational> = payoff.iter().map(|v| -v).collect();
        let upper = self.sigma_bar(&neg);
        PriceResult {
            value: upper.value.neg(),
            portfolio: upper.portfolio.map(|p| p.negated()),
            ..upper
        }
    }

    /// Superhedging price on every class, without null-set relief.
    pub fn superhedge_price(&self, payoff: &[Rational]) -> PriceResult {
        let all: Vec<ClassId> = self.classes().collect();
        self.superhedge_over(payoff, &all)
    }

    fn require_nonnegative(&self, payoff: &[Rational]) -> Result<(), PricingError> {
        self.check_len(payoff);
        match payoff.iter().position(|v| v.is_negative()) {
            Some(c) => Err(PricingError::NegativePayoff {
                label: self.instance.label(c).to_string(),
            }),
            None => Ok(()),
        }
    }

    /// `Ī(f)` for `f >= 0`: cheapest positive portfolio dominating `f` off
    /// the null set.
    pub fn i_bar(&self, payoff: &[Rational]) -> Result<PriceResult, PricingError> {
        self.require_nonnegative(payoff)?;
        let null = self.null_set();
        let mut lp = self.program(VarKind::NonNegative, one());
        for c in self.classes() {
            let floor = if null.contains(c) {
                zero()
            } else {
                payoff[c].clone()
            };
            lp.constrain(self.rows[c].clone(), Relation::Ge, floor);
        }
        match solve_checked(&lp) {
            LpOutcome::Optimal { value, primal, .. } => Ok(PriceResult {
                portfolio: Some(self.portfolio(&primal)),
                ..PriceResult::finite(value)
            }),
            _ => unreachable!("Ī is bounded below by 0 and V = max payoff is feasible"),
        }
    }

    /// `Ī` computed with `k` positive portfolios summed, each carrying its
    /// own endowment. Agrees with [`Hedger::i_bar`] when positive portfolios
    /// are closed under addition.
    pub fn i_bar_components(
        &self,
        payoff: &[Rational],
        k: usize,
    ) -> Result<Rational, PricingError> {
        self.require_nonnegative(payoff)?;
        assert!(k >= 1, "at least one component");
        let w = self.width();
        let mut objective = vec![zero(); w * k];
        let mut vars = vec![VarKind::Free; w * k];
        for m in 0..k {
            objective[m * w] = one();
            vars[m * w] = VarKind::NonNegative;
        }
        let mut lp = LinearProgram::new(Sense::Minimize, objective, vars);
        let null = self.null_set();
        for c in self.classes() {
            for m in 0..k {
                let mut coeffs = vec![zero(); w * k];
                coeffs[m * w..(m + 1) * w].clone_from_slice(&self.rows[c]);
                lp.constrain(coeffs, Relation::Ge, zero());
            }
            if !null.contains(c) {
                let coeffs = (0..k).flat_map(|_| self.rows[c].iter().cloned()).collect();
                lp.constrain(coeffs, Relation::Ge, payoff[c].clone());
            }
        }
        match solve_checked(&lp) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            _ => unreachable!("component program is bounded and feasible"),
        }
    }

    /// `‖f‖ = Ī(|f|)`.
    pub fn norm(&self, payoff: &[Rational]) -> Rational {
        let abs: Vec<Rational> = payoff.iter().map(|v| v.abs()).collect();
        match self
            .i_bar(&abs)
            .expect("absolute value is nonnegative")
            .value
        {
            PriceValue::Finite(v) => v,
            _ => unreachable!("Ī is finite"),
        }
    }

    pub fn integral_k(&self, payoff: &[Rational]) -> Integral {
        let upper = self.sigma_bar(payoff).value;
        let lower = self.sigma_under(payoff).value;
        match (&lower, &upper) {
            (PriceValue::Finite(l), PriceValue::Finite(u)) if l == u => Integral::Value(u.clone()),
            _ => Integral::NotIntegrable { lower, upper },
        }
    }

    /// `max E_Q[f]` over probability weights that make the price a
    /// martingale at every trading node, optionally vanishing on the null
    /// set. `-inf` when no such weights exist.
    pub fn dual_price(&self, payoff: &[Rational], restrict_off_null: bool) -> PriceResult {
        self.check_len(payoff);
        let support: Vec<ClassId> = if restrict_off_null {
            self.off_null()
        } else {
            self.classes().collect()
        };
        let objective = support.iter().map(|&c| payoff[c].clone()).collect();
        let mut lp = LinearProgram::new(
            Sense::Maximize,
            objective,
            vec![VarKind::NonNegative; support.len()],
        );
        lp.constrain(vec![one(); support.len()], Relation::Eq, one());
        for col in 1..self.width() {
            let coeffs = support.iter().map(|&c| self.rows[c][col].clone()).collect();
            lp.constrain(coeffs, Relation::Eq, zero());
        }
        match solve_checked(&lp) {
            LpOutcome::Optimal { value, primal, .. } => {
                let mut measure = vec![zero(); self.instance.num_classes()];
                for (i, &c) in support.iter().enumerate() {
                    measure[c] = primal[i].clone();
                }
                PriceResult {
                    measure: Some(measure),
                    ..PriceResult::finite(value)
                }
            }
            LpOutcome::Infeasible { .. } => PriceResult {
                value: PriceValue::NegInfinity,
                portfolio: None,
                measure: None,
                arbitrage: self.detect_strict_mia(),
            },
            LpOutcome::Unbounded { .. } => unreachable!("weights lie in the simplex"),
        }
    }

    /// Zero-cost portfolio paying at least 1 on every class.
    pub fn detect_strict_mia(&self) -> Option<SimplePortfolio> {
        let mut lp = self.program(VarKind::Free, zero());
        self.fix_endowment(&mut lp, zero());
        for c in self.classes() {
            lp.constrain(self.rows[c].clone(), Relation::Ge, one());
        }
        self.feasible_portfolio(&lp)
    }
}

/// Per-node sum of the component holdings at depths `< n`.
pub fn aggregate(
    instance: &Instance,
    portfolio: &GeneralizedPortfolio,
    n: usize,
) -> Result<BTreeMap<NodeId, Rational>, PricingError> {
    if let Some(&node) = type_ii_nodes_before(instance, n).first() {
        return Err(PricingError::TypeIINode {
            node,
            depth: instance.node(node).depth,
        });
    }
    let mut total: BTreeMap<NodeId, Rational> = BTreeMap::new();
    for component in &portfolio.components {
        for (&node, h) in &component.holdings {
            if instance.node(node).depth < n {
                *total.entry(node).or_insert_with(Rational::zero) += h;
            }
        }
    }
    total.retain(|_, h| !h.is_zero());
    Ok(total)
}

pub fn replicate(instance: &Instance, payoff: &[Rational]) -> Option<SimplePortfolio> {
    Hedger::new(instance).replicate(payoff)
}

pub fn check_lop(instance: &Instance) -> bool {
    Hedger::new(instance).check_lop()
}

pub fn check_mon(instance: &Instance) -> bool {
    Hedger::new(instance).check_mon()
}

pub fn null_set(instance: &Instance) -> NullSet {
    Hedger::new(instance).null_set().clone()
}

pub fn sigma_bar(instance: &Instance, payoff: &[Rational]) -> PriceResult {
    Hedger::new(instance).sigma_bar(payoff)
}

pub fn sigma_under(instance: &Instance, payoff: &[Rational]) -> PriceResult {
    Hedger::new(instance).sigma_under(payoff)
}

pub fn i_bar(instance: &Instance, payoff: &[Rational]) -> Result<PriceResult, PricingError> {
    Hedger::new(instance).i_bar(payoff)
}

pub fn norm(instance: &Instance, payoff: &[Rational]) -> Rational {
    Hedger::new(instance).norm(payoff)
}

pub fn integral_k(instance: &Instance, payoff: &[Rational]) -> Integral {
    Hedger::new(instance).integral_k(payoff)
}

pub fn check_l(instance: &Instance) -> bool {
    Hedger::new(instance).check_l()
}

pub fn detect_strict_mia(instance: &Instance) -> Option<SimplePortfolio> {
    Hedger::new(instance).detect_strict_mia()
}

pub fn detect_null_arbitrage(instance: &Instance) -> NullArbitrageReport {
    Hedger::new(instance).detect_null_arbitrage()
}

pub use conditions::{check_l_nodewise, check_nk_sufficient};

#[cfg(test)]
mod tests;
