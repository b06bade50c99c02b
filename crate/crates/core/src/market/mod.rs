//! Trajectories, parametrized families, regimes and the compiled node tree.

mod family;
mod instance;
pub mod io;
mod payoff;
mod trajectory;

use thiserror::Error;

pub use family::{
    check_complete, expand_family, Completeness, DelayedJump, Member, TrajectoryFamily,
};
pub use instance::{build_instance, ClassId, Instance, Node, NodeId, Regime};
pub use io::{load_instance, parse_instance, InstanceFile, LoadError};
pub use payoff::{evaluate_payoff, CmpOp, Expr, Payoff, PayoffError};
pub use trajectory::Trajectory;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("trajectory {trajectory} starts at {found}, expected s0 = {expected}")]
    MismatchedInitial {
        trajectory: String,
        expected: String,
        found: String,
    },
    #[error("families expand to an empty trajectory set")]
    EmptyExpansion,
    #[error("unknown class id {0}")]
    UnknownClass(ClassId),
    #[error("duplicate class label `{0}`")]
    DuplicateLabel(String),
}
