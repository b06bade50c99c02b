use std::fmt;

use crate::rational::Rational;

use super::ModelError;

/// An eventually-constant price path.
///
/// Stored as breakpoints `(time, value)`: the price at `t` is the value of the
/// last breakpoint with `time <= t`. The canonical form starts at time 0,
/// has strictly increasing times and no two consecutive equal values, so
/// two trajectories are equal as infinite sequences iff they are `==`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trajectory {
    breakpoints: Vec<(usize, Rational)>,
}

impl Trajectory {
    pub fn from_breakpoints(points: Vec<(usize, Rational)>) -> Result<Self, ModelError> {
        let Some((t0, _)) = points.first() else {
            return Err(ModelError::InvalidTrajectory("no breakpoints".into()));
        };
        if *t0 != 0 {
            return Err(ModelError::InvalidTrajectory(format!(
                "first breakpoint at time {t0}, expected 0"
            )));
        }
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(ModelError::InvalidTrajectory(
                "breakpoint times must be strictly increasing".into(),
            ));
        }
        let mut breakpoints: Vec<(usize, Rational)> = Vec::with_capacity(points.len());
        for (t, v) in points {
            if breakpoints.last().is_none_or(|(_, last)| *last != v) {
                breakpoints.push((t, v));
            }
        }
        Ok(Self { breakpoints })
    }

    /// Dense values at times `0, 1, ..., len-1`; the last value persists.
    pub fn from_path(values: Vec<Rational>) -> Result<Self, ModelError> {
        Self::from_breakpoints(values.into_iter().enumerate().collect())
    }

    pub fn constant(value: Rational) -> Self {
        Self {
            breakpoints: vec![(0, value)],
        }
    }

    pub fn breakpoints(&self) -> &[(usize, Rational)] {
        &self.breakpoints
    }

    pub fn initial(&self) -> &Rational {
        &self.breakpoints[0].1
    }

    pub fn value_at(&self, t: usize) -> &Rational {
        let idx = self.breakpoints.partition_point(|(bt, _)| *bt <= t);
        &self.breakpoints[idx - 1].1
    }

    /// Time of the last breakpoint; the path is constant from here on.
    pub fn stabilization_time(&self) -> usize {
        self.breakpoints.last().map(|(t, _)| *t).unwrap_or(0)
    }

    /// Values at times `0..=upto`.
    pub fn path(&self, upto: usize) -> Vec<Rational> {
        (0..=upto).map(|t| self.value_at(t).clone()).collect()
    }

    pub fn increment(&self, t: usize) -> Rational {
        self.value_at(t + 1) - self.value_at(t)
    }

    /// The path restarted at time `j`: `(S_j, S_{j+1}, ...)`.
    pub fn shifted(&self, j: usize) -> Self {
        let mut points = vec![(0, self.value_at(j).clone())];
        points.extend(
            self.breakpoints
                .iter()
                .filter(|(t, _)| *t > j)
                .map(|(t, v)| (t - j, v.clone())),
        );
        Self::from_breakpoints(points).expect("shift preserves canonical form")
    }

    pub fn shares_prefix(&self, other: &Trajectory, upto: usize) -> bool {
        (0..=upto).all(|t| self.value_at(t) == other.value_at(t))
    }
}

impl fmt::Display for Trajectory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let horizon = self.stabilization_time();
        let parts: Vec<String> = self.path(horizon).iter().map(|v| v.to_string()).collect();
        write!(f, "({},...)", parts.join(","))
    }
}
