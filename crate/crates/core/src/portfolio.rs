//! Simple and generalized portfolios and their wealth processes.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::market::{ClassId, Instance, NodeId};
use crate::rational::Rational;

/// Buy-and-hold strategy with endowment `V`, maturity `n` and one holding
/// per tree node of depth `< n`. Indexing holdings by node makes the
/// strategy nonanticipating by construction; absent nodes hold nothing.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplePortfolio {
    #[serde(with = "crate::rational::serde_str")]
    pub endowment: Rational,
    pub maturity: usize,
    #[serde(serialize_with = "serialize_holdings")]
    pub holdings: BTreeMap<NodeId, Rational>,
}

fn serialize_holdings<S: serde::Serializer>(
    holdings: &BTreeMap<NodeId, Rational>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut map = serializer.serialize_map(Some(holdings.len()))?;
    for (node, h) in holdings {
        map.serialize_entry(&node.to_string(), &h.to_string())?;
    }
    map.end()
}

impl SimplePortfolio {
    pub fn zero(maturity: usize) -> Self {
        Self {
            endowment: Rational::zero(),
            maturity,
            holdings: BTreeMap::new(),
        }
    }

    pub fn with_endowment(mut self, v: Rational) -> Self {
        self.endowment = v;
        self
    }

    pub fn hold(mut self, node: NodeId, amount: Rational) -> Self {
        if amount.is_zero() {
            self.holdings.remove(&node);
        } else {
            self.holdings.insert(node, amount);
        }
        self
    }

    pub fn holding(&self, node: NodeId) -> Rational {
        self.holdings
            .get(&node)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        Self {
            endowment: &self.endowment * factor,
            maturity: self.maturity,
            holdings: self
                .holdings
                .iter()
                .filter(|_| !factor.is_zero())
                .map(|(n, h)| (*n, h * factor))
                .collect(),
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(&-crate::rational::one())
    }

    /// `Π_j(S) = V + Σ_{i < min(j, n)} H_i(S) (S_{i+1} - S_i)`.
    pub fn wealth(&self, instance: &Instance, class: ClassId, j: usize) -> Rational {
        let path = instance.class(class);
        let upto = j.min(self.maturity).min(instance.depth());
        let mut w = self.endowment.clone();
        for i in 0..upto {
            let node = instance.node_at(class, i);
            if let Some(h) = self.holdings.get(&node) {
                let inc = path.increment(i);
                if !inc.is_zero() {
                    w += h * inc;
                }
            }
        }
        w
    }

    /// `Π_∞`, reached at the maturity.
    pub fn terminal_wealth(&self, instance: &Instance, class: ClassId) -> Rational {
        self.wealth(instance, class, self.maturity)
    }

    pub fn terminal_vector(&self, instance: &Instance) -> Vec<Rational> {
        (0..instance.num_classes())
            .map(|c| self.terminal_wealth(instance, c))
            .collect()
    }

    /// `V >= 0` and nonnegative terminal wealth on every class.
    pub fn is_positive(&self, instance: &Instance) -> bool {
        !self.endowment.is_negative()
            && (0..instance.num_classes()).all(|c| !self.terminal_wealth(instance, c).is_negative())
    }

    /// Holdings only on nodes that exist and lie strictly before maturity,
    /// maturity within the regime cap.
    pub fn is_admissible(&self, instance: &Instance) -> bool {
        self.maturity <= instance.regime().maturity_cap
            && self
                .holdings
                .keys()
                .all(|&n| n < instance.nodes().len() && instance.node(n).depth < self.maturity)
    }
}

/// Component 0 is unconstrained; every later component must be positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneralizedPortfolio {
    pub components: Vec<SimplePortfolio>,
}

impl GeneralizedPortfolio {
    pub fn new(components: Vec<SimplePortfolio>) -> Self {
        Self { components }
    }

    pub fn is_valid(&self, instance: &Instance) -> bool {
        self.components
            .iter()
            .skip(1)
            .all(|p| p.is_positive(instance))
    }

    /// Endowment of the positive part, `Σ_{m >= 1} V_m`.
    pub fn endowment(&self) -> Rational {
        self.components
            .iter()
            .skip(1)
            .fold(Rational::zero(), |acc, p| acc + &p.endowment)
    }

    pub fn terminal_wealth(&self, instance: &Instance, class: ClassId) -> Rational {
        self.components.iter().fold(Rational::zero(), |acc, p| {
            acc + p.terminal_wealth(instance, class)
        })
    }
}
