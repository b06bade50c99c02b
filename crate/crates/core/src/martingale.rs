//! Finitely supported martingale measures on the class tree.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::market::{ClassId, Instance, NodeId};
use crate::nodes::{classify, NodeClass};
use crate::rational::{dot, parse_rational, ParseRationalError, Rational};
use crate::superhedge::{Hedger, PriceResult, PriceValue};

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("type-II node {node} at depth {depth} carries positive mass")]
    TypeIINodeFound { node: NodeId, depth: usize },
    #[error("no verified martingale measure available")]
    NoVerifiedMeasure,
    #[error("measure file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("measure file must be a JSON object mapping class labels to weights")]
    NotAnObject,
    #[error("measure names unknown class `{0}`")]
    UnknownLabel(String),
    #[error("bad weight for class `{label}`: {source}")]
    BadWeight {
        label: String,
        #[source]
        source: ParseRationalError,
    },
}

/// Probability weights indexed by class id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MartingaleMeasure {
    weights: Vec<Rational>,
}

impl MartingaleMeasure {
    pub fn new(weights: Vec<Rational>) -> Self {
        Self { weights }
    }

    pub fn point_mass(num_classes: usize, class: ClassId) -> Self {
        let mut weights = vec![Rational::zero(); num_classes];
        weights[class] = Rational::one();
        Self { weights }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, class: ClassId) -> &Rational {
        &self.weights[class]
    }

    pub fn support(&self) -> Vec<ClassId> {
        (0..self.weights.len())
            .filter(|&c| !self.weights[c].is_zero())
            .collect()
    }

    /// `{"label": "p/q", ...}` in class order, zero weights omitted.
    pub fn to_json(&self, instance: &Instance) -> String {
        let map: serde_json::Map<String, serde_json::Value> = self
            .support()
            .into_iter()
            .map(|c| {
                (
                    instance.label(c).to_string(),
                    serde_json::Value::String(self.weights[c].to_string()),
                )
            })
            .collect();
        serde_json::to_string_pretty(&map).expect("measure serializes")
    }

    /// Parses the format written by [`MartingaleMeasure::to_json`]. Classes
    /// not mentioned get weight zero.
    pub fn from_json(instance: &Instance, text: &str) -> Result<Self, MeasureError> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let map = value.as_object().ok_or(MeasureError::NotAnObject)?;
        let mut weights = vec![Rational::zero(); instance.num_classes()];
        for (label, w) in map {
            let class = instance
                .class_by_label(label)
                .ok_or_else(|| MeasureError::UnknownLabel(label.clone()))?;
            let text = match w {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            weights[class] = parse_rational(&text).map_err(|source| MeasureError::BadWeight {
                label: label.clone(),
                source,
            })?;
        }
        Ok(Self { weights })
    }
}

/// Walks the tree from the root. Flat and type-I nodes pass all their mass
/// to the constant continuation; an up-down node splits it between the
/// closest child above and the closest child below so that the one-step
/// move is fair.
pub fn construct_measure(instance: &Instance) -> Result<MartingaleMeasure, MeasureError> {
    let mut mass = vec![Rational::zero(); instance.nodes().len()];
    mass[instance.root()] = Rational::one();
    let mut weights = vec![Rational::zero(); instance.num_classes()];
    // Children always have larger ids than their parent.
    for node in instance.nodes() {
        let m = mass[node.id].clone();
        if m.is_zero() {
            continue;
        }
        if node.children.is_empty() {
            weights[node.members[0]] += m;
            continue;
        }
        let value = &node.value;
        let child = |pick: &dyn Fn(&Rational) -> bool,
                     better: &dyn Fn(&Rational, &Rational) -> bool| {
            node.children
                .iter()
                .copied()
                .filter(|&c| pick(&instance.node(c).value))
                .reduce(|a, b| {
                    if better(&instance.node(b).value, &instance.node(a).value) {
                        b
                    } else {
                        a
                    }
                })
        };
        match classify(instance, node.id) {
            NodeClass::Flat | NodeClass::ArbitrageTypeI { .. } => {
                let stay = child(&|v| v == value, &|_, _| false).expect("constant continuation");
                mass[stay] += m;
            }
            NodeClass::UpDown => {
                let up = child(&|v| v > value, &|a, b| a < b).expect("up move");
                let down = child(&|v| v < value, &|a, b| a > b).expect("down move");
                let (vu, vd) = (&instance.node(up).value, &instance.node(down).value);
                let p_up = (value - vd) / (vu - vd);
                let p_down = Rational::one() - &p_up;
                mass[up] += &m * p_up;
                mass[down] += m * p_down;
            }
            NodeClass::ArbitrageTypeII { .. } => {
                return Err(MeasureError::TypeIINodeFound {
                    node: node.id,
                    depth: node.depth,
                })
            }
        }
    }
    Ok(MartingaleMeasure { weights })
}

/// Simplex constraints plus one-step fairness at every node with mass.
pub fn verify_martingale(instance: &Instance, measure: &MartingaleMeasure) -> bool {
    let w = measure.weights();
    if w.len() != instance.num_classes()
        || w.iter().any(|x| x.is_negative())
        || w.iter().sum::<Rational>() != Rational::one()
    {
        return false;
    }
    instance
        .nodes()
        .iter()
        .filter(|n| !n.children.is_empty())
        .all(|n| {
            let drift: Rational = n
                .members
                .iter()
                .filter(|&&c| !w[c].is_zero())
                .map(|&c| &w[c] * instance.class(c).increment(n.depth))
                .sum();
            drift.is_zero()
        })
}

pub fn expectation(measure: &MartingaleMeasure, payoff: &[Rational]) -> Rational {
    dot(measure.weights(), payoff)
}

/// LP dual of the superhedging program: the largest expectation over
/// martingale weights, optionally vanishing on the null set.
pub fn dual_price(
    instance: &Instance,
    payoff: &[Rational],
    restrict_off_null: bool,
) -> PriceResult {
    Hedger::new(instance).dual_price(payoff, restrict_off_null)
}

/// The link of `E_Q|f| <= σ̄(|f|) <= ‖f‖`, `E_Q f <= σ̄(f)` that failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundLink {
    AbsExpectationAboveSigma,
    SigmaAboveNorm,
    ExpectationAboveSigma,
}

impl fmt::Display for BoundLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundLink::AbsExpectationAboveSigma => "E_Q|f| > sigma_bar(|f|)",
            BoundLink::SigmaAboveNorm => "sigma_bar(|f|) > norm(f)",
            BoundLink::ExpectationAboveSigma => "E_Q f > sigma_bar(f)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub measure: usize,
    pub expectation_abs: Rational,
    pub expectation: Rational,
    pub violated: Option<BoundLink>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub sigma_abs: PriceValue,
    pub norm: Rational,
    pub sigma: PriceValue,
    /// One row per verified measure, indexed into the input list.
    pub rows: Vec<BoundsRow>,
    /// Input measures that failed verification and were skipped.
    pub skipped: Vec<usize>,
}

impl DualityReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.violated.is_none())
    }
}

/// Checks `E_Q|f| <= σ̄(|f|) <= ‖f‖` and `E_Q f <= σ̄(f)` for every verified
/// measure in `measures`.
pub fn check_duality_bounds(
    instance: &Instance,
    payoff: &[Rational],
    measures: &[MartingaleMeasure],
) -> Result<DualityReport, MeasureError> {
    let (verified, skipped): (Vec<usize>, Vec<usize>) =
        (0..measures.len()).partition(|&i| verify_martingale(instance, &measures[i]));
    if verified.is_empty() {
        return Err(MeasureError::NoVerifiedMeasure);
    }
    let hedger = Hedger::new(instance);
    let abs: Vec<Rational> = payoff.iter().map(|v| v.abs()).collect();
    let sigma_abs = hedger.sigma_bar(&abs).value;
    let norm = hedger.norm(payoff);
    let sigma = hedger.sigma_bar(payoff).value;
    let sigma_le_norm = sigma_abs <= PriceValue::Finite(norm.clone());
    let rows = verified
        .into_iter()
        .map(|i| {
            let expectation_abs = expectation(&measures[i], &abs);
            let expectation = expectation(&measures[i], payoff);
            let violated = if PriceValue::Finite(expectation_abs.clone()) > sigma_abs {
                Some(BoundLink::AbsExpectationAboveSigma)
            } else if !sigma_le_norm {
                Some(BoundLink::SigmaAboveNorm)
            } else if PriceValue::Finite(expectation.clone()) > sigma {
                Some(BoundLink::ExpectationAboveSigma)
            } else {
                None
            };
            BoundsRow {
                measure: i,
                expectation_abs,
                expectation,
                violated,
            }
        })
        .collect();
    Ok(DualityReport {
        sigma_abs,
        norm,
        sigma,
        rows,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::workbench::Scenario;

    #[test]
    fn tri_branch_measure_is_symmetric() {
        let inst = Scenario::A.build(None, None).unwrap();
        let q = construct_measure(&inst).unwrap();
        assert_eq!(q.weights(), &[ratio(1, 2), int(0), ratio(1, 2)]);
        assert!(verify_martingale(&inst, &q));
        let up = MartingaleMeasure::point_mass(3, 2);
        assert!(!verify_martingale(&inst, &up));
    }

    #[test]
    fn binary_tree_is_uniform() {
        let inst = Scenario::D.build(None, None).unwrap();
        let q = construct_measure(&inst).unwrap();
        assert!(q.weights().iter().all(|w| *w == ratio(1, 8)));
        assert!(verify_martingale(&inst, &q));
    }

    #[test]
    fn emulation_set_has_type_ii_plateau() {
        let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
        match construct_measure(&inst) {
            Err(MeasureError::TypeIINodeFound { depth, .. }) => assert_eq!(depth, 4),
            other => panic!("expected type-II failure, got {other:?}"),
        }
        let z = inst.class_by_label("Z").unwrap();
        assert!(verify_martingale(
            &inst,
            &MartingaleMeasure::point_mass(6, z)
        ));
    }

    #[test]
    fn json_round_trip() {
        let inst = Scenario::A.build(None, None).unwrap();
        let q = construct_measure(&inst).unwrap();
        let text = q.to_json(&inst);
        assert_eq!(MartingaleMeasure::from_json(&inst, &text).unwrap(), q);
        assert!(matches!(
            MartingaleMeasure::from_json(&inst, r#"{"X": "1"}"#),
            Err(MeasureError::UnknownLabel(_))
        ));
    }
}
