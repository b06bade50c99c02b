//! Built-in scenarios.

use std::fmt;
use std::str::FromStr;

use crate::market::{
    build_instance, DelayedJump, Instance, ModelError, Regime, Trajectory, TrajectoryFamily,
};
use crate::rational::{int, one, ratio, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// One period from 1 to {0, 1, 2}.
    A,
    /// Up family (1, 2, ..., 2, 4) and down family `D_n = (1, 1 - 1/n)`.
    B,
    /// Up family, a drop to 0 and the constant trajectory 1.
    C,
    /// Additive binary tree of depth 3 from 3.
    D,
    /// Trinomial tree `{v - 1, v, v + 1}` of depth 2 from 2.
    E,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::A,
        Scenario::B,
        Scenario::C,
        Scenario::D,
        Scenario::E,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::A => "SCN-A",
            Scenario::B => "SCN-B",
            Scenario::C => "SCN-C",
            Scenario::D => "SCN-D",
            Scenario::E => "SCN-E",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::A => "one-period tri-branch {0,1,2} from s0 = 1",
            Scenario::B => "up family plateau 2 jumping to 4, down family 1 - 1/n",
            Scenario::C => "up family, drop to 0, constant 1",
            Scenario::D => "additive binary tree, depth 3, s0 = 3",
            Scenario::E => "trinomial tree {v-1, v, v+1}, depth 2, s0 = 2",
        }
    }

    /// Truncation used when none is given.
    pub fn default_truncation(self) -> usize {
        match self {
            Scenario::B => 6,
            Scenario::C => 4,
            _ => 1,
        }
    }

    pub fn s0(self) -> Rational {
        match self {
            Scenario::D => int(3),
            Scenario::E => int(2),
            _ => one(),
        }
    }

    /// Families for truncation `n` (only the explicit down family of SCN-B
    /// depends on it).
    pub fn families(self, n: usize) -> Vec<TrajectoryFamily> {
        let path = |v: &[Rational]| Trajectory::from_path(v.to_vec()).expect("valid path");
        let up = || {
            TrajectoryFamily::DelayedJump(DelayedJump {
                label: Some("U".into()),
                prefix: vec![int(1), int(2)],
                plateau: int(2),
                jump_to: int(4),
            })
        };
        match self {
            Scenario::A => vec![TrajectoryFamily::explicit([
                ("T-".to_string(), path(&[int(1), int(0)])),
                ("T0".to_string(), path(&[int(1)])),
                ("T+".to_string(), path(&[int(1), int(2)])),
            ])],
            Scenario::B => vec![
                up(),
                TrajectoryFamily::explicit(
                    (1..=n as i64).map(|k| (format!("D{k}"), path(&[int(1), one() - ratio(1, k)]))),
                ),
            ],
            Scenario::C => vec![
                up(),
                TrajectoryFamily::explicit([
                    ("D".to_string(), path(&[int(1), int(0)])),
                    ("Z".to_string(), path(&[int(1)])),
                ]),
            ],
            Scenario::D => vec![TrajectoryFamily::explicit(tree_paths(
                int(3),
                3,
                &[('d', -1), ('u', 1)],
            ))],
            Scenario::E => vec![TrajectoryFamily::explicit(tree_paths(
                int(2),
                2,
                &[('d', -1), ('m', 0), ('u', 1)],
            ))],
        }
    }

    /// Builds the instance for truncation `n` and maturity cap `m`. A missing
    /// `n` uses [`Scenario::default_truncation`]; a missing `m` selects the
    /// exact regime (`M` equal to the tree depth).
    pub fn build(self, n: Option<usize>, m: Option<usize>) -> Result<Instance, ModelError> {
        let n = n.unwrap_or_else(|| self.default_truncation());
        let families = self.families(n);
        let m = match m {
            Some(m) => m,
            None => {
                let probe = build_instance(self.s0(), &families, Regime::new(n, 1)?)?;
                probe.depth().max(1)
            }
        };
        build_instance(self.s0(), &families, Regime::new(n, m)?)
    }
}

/// Every path of an additive lattice with the given moves, labelled by the
/// move letters.
fn tree_paths(s0: Rational, depth: usize, moves: &[(char, i64)]) -> Vec<(String, Trajectory)> {
    let mut paths = vec![(String::new(), vec![s0])];
    for _ in 0..depth {
        paths = paths
            .into_iter()
            .flat_map(|(label, values)| {
                moves.iter().map(move |&(c, step)| {
                    let mut values = values.clone();
                    let last = values.last().expect("nonempty").clone();
                    values.push(last + int(step));
                    (format!("{label}{c}"), values)
                })
            })
            .collect();
    }
    paths
        .into_iter()
        .map(|(label, values)| (label, Trajectory::from_path(values).expect("valid path")))
        .collect()
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown scenario `{0}` (expected SCN-A .. SCN-E)")]
pub struct UnknownScenario(pub String);

impl FromStr for Scenario {
    type Err = UnknownScenario;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_prefix("SCN-").unwrap_or(&key);
        match key {
            "A" => Ok(Scenario::A),
            "B" => Ok(Scenario::B),
            "C" => Ok(Scenario::C),
            "D" => Ok(Scenario::D),
            "E" => Ok(Scenario::E),
            _ => Err(UnknownScenario(s.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let a = Scenario::A.build(None, None).unwrap();
        assert_eq!((a.num_classes(), a.depth()), (3, 1));
        let b = Scenario::B.build(Some(6), Some(3)).unwrap();
        assert_eq!(b.num_classes(), 12);
        assert!(!b.completeness().is_complete());
        let c = Scenario::C.build(Some(4), None).unwrap();
        assert_eq!((c.num_classes(), c.regime().maturity_cap), (6, 5));
        assert!(c.is_exact());
        let d = Scenario::D.build(None, None).unwrap();
        assert_eq!((d.num_classes(), d.depth()), (8, 3));
        let e = Scenario::E.build(None, None).unwrap();
        assert_eq!((e.num_classes(), e.depth()), (9, 2));
    }

    #[test]
    fn parses_ids() {
        assert_eq!("scn-c".parse::<Scenario>().unwrap(), Scenario::C);
        assert_eq!("B".parse::<Scenario>().unwrap(), Scenario::B);
        assert!("SCN-Q".parse::<Scenario>().is_err());
    }
}
