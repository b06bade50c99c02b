use serde::Serialize;

use crate::rational::Rational;

use super::{ModelError, Trajectory};

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub label: Option<String>,
    pub trajectory: Trajectory,
}

/// Parametrized jump family: member `n` follows `prefix`, then holds
/// `plateau` through time `n` and jumps to `jump_to` at time `n + 1`,
/// staying there forever. Members run over `n = 1, 2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedJump {
    pub label: Option<String>,
    pub prefix: Vec<Rational>,
    pub plateau: Rational,
    pub jump_to: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryFamily {
    Explicit(Vec<Member>),
    DelayedJump(DelayedJump),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Completeness {
    Complete,
    Incomplete {
        #[serde(skip)]
        witness: Option<Trajectory>,
        witness_path: String,
    },
}

impl Completeness {
    pub fn incomplete(witness: Trajectory) -> Self {
        Completeness::Incomplete {
            witness_path: witness.to_string(),
            witness: Some(witness),
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Completeness::Complete)
    }

    pub fn witness(&self) -> Option<&Trajectory> {
        match self {
            Completeness::Complete => None,
            Completeness::Incomplete { witness, .. } => witness.as_ref(),
        }
    }
}

impl DelayedJump {
    fn validate(&self) -> Result<(), ModelError> {
        if self.prefix.is_empty() {
            return Err(ModelError::InvalidFamily("empty prefix".into()));
        }
        if self.prefix.len() > 2 {
            return Err(ModelError::InvalidFamily(format!(
                "prefix of length {} would overlap the jump of member n=1",
                self.prefix.len()
            )));
        }
        if self.plateau == self.jump_to {
            return Err(ModelError::InvalidFamily(
                "jump target equals the plateau".into(),
            ));
        }
        Ok(())
    }

    pub fn member(&self, n: usize) -> Result<Trajectory, ModelError> {
        self.validate()?;
        if n == 0 {
            return Err(ModelError::InvalidFamily("members start at n = 1".into()));
        }
        let mut values = self.prefix.clone();
        while values.len() <= n {
            values.push(self.plateau.clone());
        }
        values.push(self.jump_to.clone());
        Trajectory::from_path(values)
    }

    /// The never-jumping path: prefix, then the plateau forever.
    pub fn limit(&self) -> Result<Trajectory, ModelError> {
        self.validate()?;
        let mut values = self.prefix.clone();
        values.push(self.plateau.clone());
        Trajectory::from_path(values)
    }

    pub fn initial(&self) -> &Rational {
        &self.prefix[0]
    }
}

impl TrajectoryFamily {
    pub fn explicit<I: IntoIterator<Item = (String, Trajectory)>>(members: I) -> Self {
        TrajectoryFamily::Explicit(
            members
                .into_iter()
                .map(|(label, trajectory)| Member {
                    label: Some(label),
                    trajectory,
                })
                .collect(),
        )
    }

    /// Members `n = 1..=truncation` with labels (`None` when unlabeled).
    pub fn expand_labeled(
        &self,
        truncation: usize,
    ) -> Result<Vec<(Option<String>, Trajectory)>, ModelError> {
        if truncation == 0 {
            return Err(ModelError::InvalidRegime(
                "family truncation N must be >= 1".into(),
            ));
        }
        match self {
            TrajectoryFamily::Explicit(members) => Ok(members
                .iter()
                .map(|m| (m.label.clone(), m.trajectory.clone()))
                .collect()),
            TrajectoryFamily::DelayedJump(dj) => (1..=truncation)
                .map(|n| {
                    let label = dj.label.as_ref().map(|l| format!("{l}{n}"));
                    dj.member(n).map(|t| (label, t))
                })
                .collect(),
        }
    }

    /// The first member beyond the truncation, used to recognise
    /// truncation-induced type-II nodes.
    pub fn truncation_tail(&self, truncation: usize) -> Result<Option<Trajectory>, ModelError> {
        match self {
            TrajectoryFamily::Explicit(_) => Ok(None),
            TrajectoryFamily::DelayedJump(dj) => dj.member(truncation + 1).map(Some),
        }
    }

    fn contains(&self, t: &Trajectory) -> bool {
        match self {
            TrajectoryFamily::Explicit(members) => members.iter().any(|m| &m.trajectory == t),
            // member n stabilizes at n + 1
            TrajectoryFamily::DelayedJump(dj) => {
                let s = t.stabilization_time();
                s >= 2 && dj.member(s - 1).is_ok_and(|m| &m == t)
            }
        }
    }
}

/// Expands a family into its first `truncation` members.
pub fn expand_family(
    family: &TrajectoryFamily,
    truncation: usize,
) -> Result<Vec<Trajectory>, ModelError> {
    Ok(family
        .expand_labeled(truncation)?
        .into_iter()
        .map(|(_, t)| t)
        .collect())
}

/// Closure under limits of prefix-consistent sequences.
///
/// Finite explicit sets are always complete. A jump family is complete only
/// if its never-jumping limit path is a member of one of the families.
pub fn check_complete(families: &[TrajectoryFamily]) -> Result<Completeness, ModelError> {
    for family in families {
        if let TrajectoryFamily::DelayedJump(dj) = family {
            let limit = dj.limit()?;
            if !families.iter().any(|f| f.contains(&limit)) {
                return Ok(Completeness::incomplete(limit));
            }
        }
    }
    Ok(Completeness::Complete)
}
