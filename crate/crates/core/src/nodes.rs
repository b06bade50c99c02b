//! Node classification, the stopping time `τ`, the exceptional sets `N_n`,
//! trajectory-set reduction and free positive portfolios.

use std::fmt;

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::market::{ClassId, Instance, NodeId};
use crate::portfolio::SimplePortfolio;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NodeError {
    #[error("node has no continuation (truncated tree)")]
    Childless,
}

/// One-step shape of a node. `direction` is `+1` when every move is weakly
/// up and `-1` when every move is weakly down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum NodeClass {
    Flat,
    ArbitrageTypeI { direction: i8 },
    ArbitrageTypeII { direction: i8 },
    UpDown,
}

impl NodeClass {
    pub fn is_type_i(self) -> bool {
        matches!(self, NodeClass::ArbitrageTypeI { .. })
    }

    pub fn is_type_ii(self) -> bool {
        matches!(self, NodeClass::ArbitrageTypeII { .. })
    }

    pub fn direction(self) -> i8 {
        match self {
            NodeClass::ArbitrageTypeI { direction } | NodeClass::ArbitrageTypeII { direction } => {
                direction
            }
            _ => 0,
        }
    }
}

impl fmt::Display for NodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeClass::Flat => f.write_str("flat"),
            NodeClass::ArbitrageTypeI { direction } => write!(f, "type-I({direction:+})"),
            NodeClass::ArbitrageTypeII { direction } => write!(f, "type-II({direction:+})"),
            NodeClass::UpDown => f.write_str("up-down"),
        }
    }
}

/// Classifies a node from its value and the values of its continuations.
pub fn classify_node(value: &Rational, child_values: &[Rational]) -> Result<NodeClass, NodeError> {
    if child_values.is_empty() {
        return Err(NodeError::Childless);
    }
    let up = child_values.iter().any(|c| c > value);
    let down = child_values.iter().any(|c| c < value);
    let stay = child_values.iter().any(|c| c == value);
    Ok(match (up, down, stay) {
        (false, false, _) => NodeClass::Flat,
        (true, true, _) => NodeClass::UpDown,
        (up, _, true) => NodeClass::ArbitrageTypeI {
            direction: if up { 1 } else { -1 },
        },
        (up, _, false) => NodeClass::ArbitrageTypeII {
            direction: if up { 1 } else { -1 },
        },
    })
}

/// Classification of a tree node; leaves continue flat.
pub fn classify(instance: &Instance, node: NodeId) -> NodeClass {
    classify_node(&instance.node(node).value, &instance.child_values(node))
        .expect("child_values is never empty")
}

/// A type-II node whose missing flat continuation would be supplied by the
/// first jump-family member cut off by the truncation.
pub fn is_truncation_induced(instance: &Instance, node: NodeId) -> bool {
    let n = instance.node(node);
    if !classify(instance, node).is_type_ii() {
        return false;
    }
    let rep = instance.class(n.members[0]);
    instance
        .truncation_tails()
        .iter()
        .any(|tail| tail.shares_prefix(rep, n.depth) && tail.value_at(n.depth + 1) == &n.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeReport {
    pub node: NodeId,
    pub depth: usize,
    #[serde(serialize_with = "crate::rational::serde_vec::serialize")]
    pub path: Vec<Rational>,
    #[serde(serialize_with = "crate::rational::serde_vec::serialize")]
    pub child_values: Vec<Rational>,
    pub class: NodeClass,
    pub truncation_induced: bool,
    pub members: Vec<String>,
}

pub fn classify_all(instance: &Instance) -> Vec<NodeReport> {
    instance
        .nodes()
        .iter()
        .map(|n| NodeReport {
            node: n.id,
            depth: n.depth,
            path: instance.node_path(n.id),
            child_values: instance.child_values(n.id),
            class: classify(instance, n.id),
            truncation_induced: is_truncation_induced(instance, n.id),
            members: n
                .members
                .iter()
                .map(|&c| instance.label(c).to_string())
                .collect(),
        })
        .collect()
}

/// Type-II nodes at depth `< depth`.
pub fn type_ii_nodes_before(instance: &Instance, depth: usize) -> Vec<NodeId> {
    instance
        .nodes()
        .iter()
        .filter(|n| n.depth < depth && classify(instance, n.id).is_type_ii())
        .map(|n| n.id)
        .collect()
}

#[derive(Debug, Clone)]
pub struct ReductionReport {
    pub n: usize,
    /// `τ(S) ∈ 1..=n+1` per class.
    pub tau: Vec<usize>,
    /// `N_n = {S : τ(S) <= n}`, in class order.
    pub removed: Vec<ClassId>,
    /// Original ids of the surviving classes, in the order used by `reduced`.
    pub survivors: Vec<ClassId>,
    pub reduced: Instance,
}

/// First time `j ∈ 1..=n` at which the class leaves a type-I node by a
/// strict move, else `n + 1`.
pub fn stopping_time(instance: &Instance, class: ClassId, n: usize) -> usize {
    let path = instance.class(class);
    (1..=n)
        .find(|&j| {
            let node = instance.node_at(class, j - 1);
            classify(instance, node).is_type_i() && path.value_at(j) != path.value_at(j - 1)
        })
        .unwrap_or(n + 1)
}

pub fn compute_reduction(instance: &Instance, n: usize) -> ReductionReport {
    let tau: Vec<usize> = (0..instance.num_classes())
        .map(|c| stopping_time(instance, c, n))
        .collect();
    let (removed, survivors): (Vec<ClassId>, Vec<ClassId>) =
        (0..instance.num_classes()).partition(|&c| tau[c] <= n);
    let reduced = Instance::from_classes(
        instance.s0().clone(),
        survivors
            .iter()
            .map(|&c| {
                (
                    Some(instance.label(c).to_string()),
                    instance.class(c).clone(),
                )
            })
            .collect(),
        instance.regime(),
        instance.truncation_tails().to_vec(),
        instance.completeness().clone(),
    )
    .expect("the flat continuation of every type-I node survives");
    ReductionReport {
        n,
        tau,
        removed,
        survivors,
        reduced,
    }
}

/// Checks how nodes re-classify after removing `N_n`: on every surviving
/// class and every depth `i <= n-1`, up-down stays up-down and flat or
/// type-I becomes flat. A surviving type-II node is reported as a violation.
pub fn verify_reduction_classes(instance: &Instance, n: usize) -> bool {
    let report = compute_reduction(instance, n);
    let reduced = &report.reduced;
    report.survivors.iter().enumerate().all(|(rc, &c)| {
        (0..n).all(|i| {
            let before = classify(instance, instance.node_at(c, i));
            let after = classify(reduced, reduced.node_at(rc, i));
            match before {
                NodeClass::UpDown => after == NodeClass::UpDown,
                NodeClass::Flat | NodeClass::ArbitrageTypeI { .. } => after == NodeClass::Flat,
                NodeClass::ArbitrageTypeII { .. } => false,
            }
        })
    })
}

/// Which nodes the free positive portfolio trades at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TruncationPolicy {
    /// Only type-I nodes of the finite instance.
    Strict,
    /// Also truncation-induced type-II nodes, which are type I in the
    /// untruncated family.
    #[default]
    Untruncated,
}

/// Zero-cost portfolio holding `ε` at every type-I node before the maturity
/// cap (see [`TruncationPolicy`]).
pub fn free_positive_portfolio(instance: &Instance) -> SimplePortfolio {
    free_positive_portfolio_with(instance, TruncationPolicy::default())
}

pub fn free_positive_portfolio_with(
    instance: &Instance,
    policy: TruncationPolicy,
) -> SimplePortfolio {
    let horizon = instance.trading_horizon();
    let mut portfolio = SimplePortfolio::zero(instance.regime().maturity_cap);
    for node in instance.nodes().iter().filter(|n| n.depth < horizon) {
        let class = classify(instance, node.id);
        let trade = class.is_type_i()
            || (policy == TruncationPolicy::Untruncated
                && is_truncation_induced(instance, node.id));
        if trade {
            portfolio = portfolio.hold(node.id, int(class.direction() as i64));
        }
    }
    portfolio
}

/// `Π_j(S) >= 0` for every class and every `j <= maturity`.
pub fn check_value_nonnegative(instance: &Instance, portfolio: &SimplePortfolio) -> bool {
    (0..instance.num_classes())
        .all(|c| (0..=portfolio.maturity).all(|j| !portfolio.wealth(instance, c, j).is_negative()))
}

/// Classes on which `portfolio` ends strictly positive.
pub fn strictly_positive_classes(instance: &Instance, portfolio: &SimplePortfolio) -> Vec<ClassId> {
    (0..instance.num_classes())
        .filter(|&c| portfolio.terminal_wealth(instance, c).is_positive())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Completeness, Regime, Trajectory};
    use crate::rational::ratio;
    use crate::workbench::Scenario;

    fn vals(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn classification_table() {
        let one = int(1);
        assert_eq!(
            classify_node(&one, &vals(&[2, 0, 1])).unwrap(),
            NodeClass::UpDown
        );
        assert_eq!(classify_node(&one, &vals(&[1])).unwrap(), NodeClass::Flat);
        assert_eq!(
            classify_node(&int(2), &vals(&[2, 4])).unwrap(),
            NodeClass::ArbitrageTypeI { direction: 1 }
        );
        assert_eq!(
            classify_node(&int(2), &vals(&[4])).unwrap(),
            NodeClass::ArbitrageTypeII { direction: 1 }
        );
        assert_eq!(
            classify_node(&one, &[int(0), ratio(1, 2)]).unwrap(),
            NodeClass::ArbitrageTypeII { direction: -1 }
        );
        assert_eq!(
            classify_node(&one, &vals(&[0, 1])).unwrap(),
            NodeClass::ArbitrageTypeI { direction: -1 }
        );
        assert_eq!(classify_node(&one, &[]), Err(NodeError::Childless));
    }

    #[test]
    fn duplicate_child_values_do_not_matter() {
        let one = int(1);
        for children in [
            vals(&[2, 0]),
            vals(&[2, 2]),
            vals(&[1, 2]),
            vals(&[0]),
            vals(&[1]),
        ] {
            let mut dup = children.clone();
            dup.push(children[0].clone());
            assert_eq!(
                classify_node(&one, &children).unwrap(),
                classify_node(&one, &dup).unwrap()
            );
        }
    }

    fn labels(inst: &Instance, classes: &[ClassId]) -> Vec<String> {
        classes.iter().map(|&c| inst.label(c).to_string()).collect()
    }

    #[test]
    fn tree_nodes_classify_as_expected() {
        let c = Scenario::C.build(Some(4), Some(3)).unwrap();
        assert_eq!(classify(&c, c.root()), NodeClass::UpDown);
        let b = Scenario::B.build(Some(6), Some(8)).unwrap();
        let u1 = b.class_by_label("U1").unwrap();
        assert_eq!(
            classify(&b, b.node_at(u1, 1)),
            NodeClass::ArbitrageTypeI { direction: 1 }
        );
        let u6 = b.class_by_label("U6").unwrap();
        let deepest = b.node_at(u6, 6);
        assert_eq!(
            classify(&b, deepest),
            NodeClass::ArbitrageTypeII { direction: 1 }
        );
        assert!(is_truncation_induced(&b, deepest));
        assert!(!is_truncation_induced(&b, b.node_at(u1, 1)));
    }

    #[test]
    fn reduction_removes_classes_jumping_by_n() {
        let b = Scenario::B.build(Some(6), Some(8)).unwrap();
        let report = compute_reduction(&b, 6);
        // U6 jumps at time 7, after the reduction depth
        assert_eq!(labels(&b, &report.removed), ["U1", "U2", "U3", "U4", "U5"]);
        assert_eq!(report.tau[b.class_by_label("U6").unwrap()], 7);
        assert_eq!(report.tau[b.class_by_label("U2").unwrap()], 3);
        assert_eq!(report.reduced.num_classes(), b.num_classes() - 5);
        assert!(verify_reduction_classes(&b, 6));

        let a = Scenario::A.build(None, None).unwrap();
        let report = compute_reduction(&a, 1);
        assert!(report.removed.is_empty());
        assert!(verify_reduction_classes(&a, 1));
    }

    #[test]
    fn constant_instance_never_stops() {
        let inst = Instance::from_classes(
            int(1),
            vec![(None, Trajectory::constant(int(1)))],
            Regime::new(1, 1).unwrap(),
            vec![],
            Completeness::Complete,
        )
        .unwrap();
        let report = compute_reduction(&inst, 3);
        assert!(report.removed.is_empty());
        assert_eq!(report.tau, vec![4]);
    }

    #[test]
    fn surviving_type_ii_is_reported() {
        let c = Scenario::C.build(Some(4), Some(5)).unwrap();
        assert!(!verify_reduction_classes(&c, 5));
    }

    #[test]
    fn free_positive_portfolio_captures_jumps_before_the_cap() {
        let b = Scenario::B.build(Some(6), Some(3)).unwrap();
        let p = free_positive_portfolio(&b);
        assert_eq!(labels(&b, &strictly_positive_classes(&b, &p)), ["U1", "U2"]);
        assert!(p
            .terminal_vector(&b)
            .iter()
            .all(|w| *w == int(0) || *w == int(2)));
        assert!(check_value_nonnegative(&b, &p));

        let a = Scenario::A.build(None, None).unwrap();
        assert!(free_positive_portfolio(&a).holdings.is_empty());

        let c = Scenario::C.build(Some(4), Some(5)).unwrap();
        let p = free_positive_portfolio(&c);
        assert_eq!(
            labels(&c, &strictly_positive_classes(&c, &p)),
            ["U1", "U2", "U3", "U4"]
        );
        let strict = free_positive_portfolio_with(&c, TruncationPolicy::Strict);
        assert_eq!(
            labels(&c, &strictly_positive_classes(&c, &strict)),
            ["U1", "U2", "U3"]
        );
    }

    #[test]
    fn value_process_sign() {
        let a = Scenario::A.build(None, None).unwrap();
        let long = SimplePortfolio::zero(1).hold(a.root(), int(1));
        assert!(!check_value_nonnegative(&a, &long));
        assert!(check_value_nonnegative(&a, &SimplePortfolio::zero(1)));
    }

    #[test]
    fn plateau_holding_earns_the_jump() {
        let b = Scenario::B.build(Some(6), Some(7)).unwrap();
        let plateau = b
            .nodes()
            .iter()
            .filter(|n| n.depth >= 1 && n.value == int(2))
            .fold(SimplePortfolio::zero(7), |p, n| p.hold(n.id, int(1)));
        let u3 = b.class_by_label("U3").unwrap();
        assert_eq!(plateau.terminal_wealth(&b, u3), int(2));
        assert_eq!(plateau.wealth(&b, u3, 0), int(0));
    }
}
