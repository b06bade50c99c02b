use std::collections::BTreeSet;

use serde::Serialize;

use crate::rational::Rational;

use super::family::{check_complete, Completeness, TrajectoryFamily};
use super::{ModelError, Trajectory};

pub type ClassId = usize;
pub type NodeId = usize;

/// Finite surrogate for unbounded portfolio maturities and family
/// parameters: `truncation` is the family cutoff `N`, `maturity_cap` the
/// largest portfolio maturity `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Regime {
    #[serde(rename = "N")]
    pub truncation: usize,
    #[serde(rename = "M")]
    pub maturity_cap: usize,
}

impl Regime {
    pub fn new(truncation: usize, maturity_cap: usize) -> Result<Self, ModelError> {
        if maturity_cap == 0 {
            return Err(ModelError::InvalidRegime(
                "maturity cap M must be >= 1".into(),
            ));
        }
        if truncation == 0 {
            return Err(ModelError::InvalidRegime(
                "family truncation N must be >= 1".into(),
            ));
        }
        Ok(Self {
            truncation,
            maturity_cap,
        })
    }
}

/// A prefix-tree node: all classes sharing the price path up to `depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub depth: usize,
    pub value: Rational,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    pub members: Vec<ClassId>,
}

/// A finite trajectory set compiled to its prefix tree.
///
/// The tree reaches depth `max stabilization time`; below that every class
/// is constant, so deeper nodes would all be flat singletons.
#[derive(Debug, Clone)]
pub struct Instance {
    s0: Rational,
    classes: Vec<Trajectory>,
    labels: Vec<String>,
    regime: Regime,
    depth: usize,
    nodes: Vec<Node>,
    /// `node_at[class][j]` for `j = 0..=depth`.
    node_at: Vec<Vec<NodeId>>,
    truncation_tails: Vec<Trajectory>,
    completeness: Completeness,
}

impl Instance {
    /// Builds an instance from already-expanded classes. Duplicates (as
    /// infinite paths) are merged, keeping the first label.
    pub fn from_classes(
        s0: Rational,
        classes: Vec<(Option<String>, Trajectory)>,
        regime: Regime,
        truncation_tails: Vec<Trajectory>,
        completeness: Completeness,
    ) -> Result<Self, ModelError> {
        Regime::new(regime.truncation, regime.maturity_cap)?;
        if classes.is_empty() {
            return Err(ModelError::EmptyExpansion);
        }
        let mut seen = BTreeSet::new();
        let mut kept = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for (label, t) in classes {
            if t.initial() != &s0 {
                return Err(ModelError::MismatchedInitial {
                    trajectory: t.to_string(),
                    expected: s0.to_string(),
                    found: t.initial().to_string(),
                });
            }
            if seen.insert(t.clone()) {
                let label = label.unwrap_or_else(|| format!("c{}", kept.len()));
                if labels.contains(&label) {
                    return Err(ModelError::DuplicateLabel(label));
                }
                labels.push(label);
                kept.push(t);
            }
        }
        let depth = kept
            .iter()
            .map(Trajectory::stabilization_time)
            .max()
            .unwrap_or(0);

        let mut nodes = vec![Node {
            id: 0,
            depth: 0,
            value: s0.clone(),
            parent: None,
            children: Vec::new(),
            members: (0..kept.len()).collect(),
        }];
        let mut node_at = vec![vec![0; depth + 1]; kept.len()];
        let mut frontier = vec![0];
        for j in 0..depth {
            let mut next = Vec::new();
            for parent in frontier {
                let members = nodes[parent].members.clone();
                let mut groups: Vec<(Rational, Vec<ClassId>)> = Vec::new();
                for c in members {
                    let v = kept[c].value_at(j + 1);
                    match groups.iter_mut().find(|(gv, _)| gv == v) {
                        Some((_, g)) => g.push(c),
                        None => groups.push((v.clone(), vec![c])),
                    }
                }
                for (value, members) in groups {
                    let id = nodes.len();
                    for &c in &members {
                        node_at[c][j + 1] = id;
                    }
                    nodes.push(Node {
                        id,
                        depth: j + 1,
                        value,
                        parent: Some(parent),
                        children: Vec::new(),
                        members,
                    });
                    nodes[parent].children.push(id);
                    next.push(id);
                }
            }
            frontier = next;
        }

        let truncation_tails = truncation_tails
            .into_iter()
            .filter(|t| t.initial() == &s0)
            .collect();
        Ok(Self {
            s0,
            classes: kept,
            labels,
            regime,
            depth,
            nodes,
            node_at,
            truncation_tails,
            completeness,
        })
    }

    pub fn s0(&self) -> &Rational {
        &self.s0
    }

    pub fn classes(&self) -> &[Trajectory] {
        &self.classes
    }

    pub fn class(&self, id: ClassId) -> &Trajectory {
        &self.classes[id]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: ClassId) -> &str {
        &self.labels[id]
    }

    pub fn class_by_label(&self, label: &str) -> Option<ClassId> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// Depth of the prefix tree, equal to the largest stabilization time.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `M >= depth`: the finite set's operators are computed verbatim.
    pub fn is_exact(&self) -> bool {
        self.regime.maturity_cap >= self.depth
    }

    /// Last time at which a portfolio can still hold a position that moves.
    pub fn trading_horizon(&self) -> usize {
        self.regime.maturity_cap.min(self.depth)
    }

    /// Largest coordinate index a payoff may reference.
    pub fn horizon(&self) -> usize {
        self.regime.maturity_cap.max(self.depth)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    /// The node of `class` at time `j`; beyond the tree depth this is the
    /// class's leaf.
    pub fn node_at(&self, class: ClassId, j: usize) -> NodeId {
        self.node_at[class][j.min(self.depth)]
    }

    pub fn node_path(&self, id: NodeId) -> Vec<Rational> {
        let node = &self.nodes[id];
        self.classes[node.members[0]].path(node.depth)
    }

    /// Values reachable one step after `id`. Leaves continue with their own
    /// (constant) value.
    pub fn child_values(&self, id: NodeId) -> Vec<Rational> {
        let node = &self.nodes[id];
        if node.children.is_empty() {
            vec![node.value.clone()]
        } else {
            node.children
                .iter()
                .map(|&c| self.nodes[c].value.clone())
                .collect()
        }
    }

    pub fn truncation_tails(&self) -> &[Trajectory] {
        &self.truncation_tails
    }

    pub fn completeness(&self) -> &Completeness {
        &self.completeness
    }

    pub fn max_stabilization_time(&self) -> usize {
        self.depth
    }

    fn check_class(&self, class: ClassId) -> Result<(), ModelError> {
        if class >= self.classes.len() {
            Err(ModelError::UnknownClass(class))
        } else {
            Ok(())
        }
    }

    fn restricted_completeness(&self, rep: &Trajectory, j: usize) -> Completeness {
        match self.completeness.witness() {
            Some(w) if w.shares_prefix(rep, j) => Completeness::incomplete(w.clone()),
            _ => Completeness::Complete,
        }
    }

    /// All classes sharing the path of `class` up to time `j`, unshifted.
    pub fn conditional_space(&self, class: ClassId, j: usize) -> Result<Instance, ModelError> {
        self.check_class(class)?;
        let rep = &self.classes[class];
        let members = self
            .classes
            .iter()
            .zip(&self.labels)
            .filter(|(t, _)| t.shares_prefix(rep, j))
            .map(|(t, l)| (Some(l.clone()), t.clone()))
            .collect();
        let tails = self
            .truncation_tails
            .iter()
            .filter(|t| t.shares_prefix(rep, j))
            .cloned()
            .collect();
        Instance::from_classes(
            self.s0.clone(),
            members,
            self.regime,
            tails,
            self.restricted_completeness(rep, j),
        )
    }

    /// The conditional space restarted at time `j`: old time `j` becomes
    /// time 0 and the new initial price is `S_j`. The maturity cap is kept.
    pub fn shifted_space(&self, class: ClassId, j: usize) -> Result<Instance, ModelError> {
        self.check_class(class)?;
        let rep = &self.classes[class];
        let members = self
            .classes
            .iter()
            .zip(&self.labels)
            .filter(|(t, _)| t.shares_prefix(rep, j))
            .map(|(t, l)| (Some(l.clone()), t.shifted(j)))
            .collect();
        let tails = self
            .truncation_tails
            .iter()
            .filter(|t| t.shares_prefix(rep, j))
            .map(|t| t.shifted(j))
            .collect();
        let completeness = match self.restricted_completeness(rep, j) {
            Completeness::Complete => Completeness::Complete,
            Completeness::Incomplete { witness, .. } => {
                Completeness::incomplete(witness.expect("witness").shifted(j))
            }
        };
        Instance::from_classes(
            rep.value_at(j).clone(),
            members,
            self.regime,
            tails,
            completeness,
        )
    }
}

/// Expands every family under `regime.truncation` and compiles the tree.
pub fn build_instance(
    s0: Rational,
    families: &[TrajectoryFamily],
    regime: Regime,
) -> Result<Instance, ModelError> {
    if families.is_empty() {
        return Err(ModelError::EmptyExpansion);
    }
    let mut classes = Vec::new();
    let mut tails = Vec::new();
    for family in families {
        classes.extend(family.expand_labeled(regime.truncation)?);
        if let Some(tail) = family.truncation_tail(regime.truncation)? {
            tails.push(tail);
        }
    }
    if let Some((_, t)) = classes.iter().find(|(_, t)| t.initial() != &s0) {
        return Err(ModelError::MismatchedInitial {
            trajectory: t.to_string(),
            expected: s0.to_string(),
            found: t.initial().to_string(),
        });
    }
    let completeness = check_complete(families)?;
    Instance::from_classes(s0, classes, regime, tails, completeness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::family::DelayedJump;
    use crate::rational::int;

    fn path(v: &[i64]) -> Trajectory {
        Trajectory::from_path(v.iter().map(|&x| int(x)).collect()).unwrap()
    }

    fn scn_a() -> Instance {
        let fam = TrajectoryFamily::explicit([
            ("T-".to_string(), path(&[1, 0])),
            ("T0".to_string(), path(&[1, 1])),
            ("T+".to_string(), path(&[1, 2])),
        ]);
        build_instance(int(1), &[fam], Regime::new(1, 1).unwrap()).unwrap()
    }

    fn scn_c(n: usize, m: usize) -> Instance {
        let up = TrajectoryFamily::DelayedJump(DelayedJump {
            label: Some("U".into()),
            prefix: vec![int(1), int(2)],
            plateau: int(2),
            jump_to: int(4),
        });
        let rest = TrajectoryFamily::explicit([
            ("D".to_string(), path(&[1, 0])),
            ("Z".to_string(), path(&[1])),
        ]);
        build_instance(int(1), &[up, rest], Regime::new(n, m).unwrap()).unwrap()
    }

    #[test]
    fn tri_branch_root() {
        let inst = scn_a();
        assert_eq!(inst.child_values(inst.root()), vec![int(0), int(1), int(2)]);
        assert_eq!(inst.depth(), 1);
        assert!(inst.is_exact());
    }

    #[test]
    fn jump_family_tree() {
        let inst = scn_c(4, 3);
        assert_eq!(inst.num_classes(), 6);
        assert_eq!(inst.child_values(inst.root()), vec![int(2), int(0), int(1)]);
        assert_eq!(inst.depth(), 5);
        assert!(!inst.is_exact());
        assert!(!inst.completeness().is_complete());
        assert_eq!(inst.truncation_tails(), &[path(&[1, 2, 2, 2, 2, 2, 4])]);
    }

    #[test]
    fn duplicates_merge() {
        let fam = TrajectoryFamily::explicit([
            ("a".to_string(), path(&[1, 2])),
            ("b".to_string(), path(&[1, 2, 2])),
        ]);
        let inst = build_instance(int(1), &[fam], Regime::new(1, 1).unwrap()).unwrap();
        assert_eq!(inst.num_classes(), 1);
        assert_eq!(inst.labels(), &["a".to_string()]);
    }

    #[test]
    fn mismatched_initial_value() {
        let fam = TrajectoryFamily::explicit([("a".to_string(), path(&[2, 1]))]);
        assert!(matches!(
            build_instance(int(1), &[fam], Regime::new(1, 1).unwrap()),
            Err(ModelError::MismatchedInitial { .. })
        ));
        assert!(matches!(
            build_instance(int(1), &[], Regime::new(1, 1).unwrap()),
            Err(ModelError::EmptyExpansion)
        ));
    }

    #[test]
    fn children_partition_members() {
        let inst = scn_c(4, 3);
        for node in inst.nodes() {
            if node.children.is_empty() {
                assert_eq!(node.depth, inst.depth());
                assert_eq!(node.members.len(), 1);
                continue;
            }
            let mut union: Vec<ClassId> = node
                .children
                .iter()
                .flat_map(|&c| inst.node(c).members.clone())
                .collect();
            union.sort();
            assert_eq!(union, node.members);
        }
    }

    #[test]
    fn conditional_spaces() {
        let inst = scn_c(4, 3);
        let u2 = inst.class_by_label("U2").unwrap();
        let up = inst.conditional_space(u2, 1).unwrap();
        assert_eq!(up.labels(), &["U1", "U2", "U3", "U4"]);
        assert_eq!(
            inst.conditional_space(u2, 0).unwrap().classes(),
            inst.classes()
        );

        let a = scn_a();
        let tp = a.class_by_label("T+").unwrap();
        assert_eq!(a.conditional_space(tp, 1).unwrap().labels(), &["T+"]);
        assert!(matches!(
            a.conditional_space(7, 0),
            Err(ModelError::UnknownClass(7))
        ));
    }

    #[test]
    fn shifted_spaces() {
        let inst = scn_c(4, 3);
        let u2 = inst.class_by_label("U2").unwrap();
        let shifted = inst.shifted_space(u2, 1).unwrap();
        assert_eq!(shifted.s0(), &int(2));
        assert_eq!(shifted.class(0), &path(&[2, 4]));
        assert_eq!(shifted.regime(), inst.regime());
        assert_eq!(inst.shifted_space(u2, 0).unwrap().classes(), inst.classes());

        let z = inst.class_by_label("Z").unwrap();
        let flat = inst.shifted_space(z, 3).unwrap();
        assert_eq!(flat.classes(), &[Trajectory::constant(int(1))]);
    }
}
