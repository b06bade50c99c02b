//! Exact rational linear programming.
//!
//! [`solve_lp`] runs a dense two-phase simplex with Bland's rule and returns
//! an [`LpOutcome`] carrying certificates that [`verify_certificate`] checks
//! with exact arithmetic. [`fm_value`] is an independent Fourier–Motzkin
//! oracle for programs with at most [`FM_MAX_VARIABLES`] variables.

mod certificate;
mod fourier_motzkin;
mod simplex;

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;

pub use certificate::verify_certificate;
pub use fourier_motzkin::{fm_value, FM_MAX_CONSTRAINTS, FM_MAX_VARIABLES};
pub use simplex::solve_lp;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Free,
    NonNegative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub vars: Vec<VarKind>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<Rational>, vars: Vec<VarKind>) -> Self {
        assert_eq!(objective.len(), vars.len(), "objective length mismatch");
        Self {
            sense,
            objective,
            vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.vars.len(), "constraint length mismatch");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn with(mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        self.constrain(coeffs, relation, rhs);
        self
    }

    pub fn is_well_formed(&self) -> bool {
        self.objective.len() == self.vars.len()
            && self
                .constraints
                .iter()
                .all(|c| c.coeffs.len() == self.vars.len())
    }
}

/// Result of [`solve_lp`].
///
/// Dual vectors are indexed by constraint. For a minimization the dual of a
/// `>=` row is nonnegative and of a `<=` row nonpositive; signs flip for a
/// maximization. The Farkas vector `y` of an infeasible program satisfies the
/// minimization sign pattern, `y·A` vanishes on free variables and is
/// nonpositive on sign-constrained ones, and `y·b > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        primal: Vec<Rational>,
        dual: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible { .. })
    }

    /// A feasible point, if the program has one.
    pub fn point(&self) -> Option<&[Rational]> {
        match self {
            LpOutcome::Optimal { primal, .. } => Some(primal),
            LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

/// Optimal value on the extended rationals, as produced by [`fm_value`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtValue {
    Finite(Rational),
    PosInfinity,
    NegInfinity,
    Infeasible,
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::PosInfinity => f.write_str("+inf"),
            ExtValue::NegInfinity => f.write_str("-inf"),
            ExtValue::Infeasible => f.write_str("infeasible"),
        }
    }
}

impl LpOutcome {
    /// Projects the outcome onto the extended value line for comparison
    /// with [`fm_value`].
    pub fn ext_value(&self, sense: Sense) -> ExtValue {
        match (self, sense) {
            (LpOutcome::Optimal { value, .. }, _) => ExtValue::Finite(value.clone()),
            (LpOutcome::Infeasible { .. }, _) => ExtValue::Infeasible,
            (LpOutcome::Unbounded { .. }, Sense::Minimize) => ExtValue::NegInfinity,
            (LpOutcome::Unbounded { .. }, Sense::Maximize) => ExtValue::PosInfinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("Fourier-Motzkin oracle supports at most {max} variables, got {got}")]
    TooManyVariables { got: usize, max: usize },
    #[error("Fourier-Motzkin elimination exceeded {0} constraints")]
    ConstraintBlowup(usize),
    #[error("malformed linear program: coefficient vectors disagree with the variable count")]
    Malformed,
}
