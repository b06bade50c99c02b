//! Exact-arithmetic workbench for trajectory-based markets.
//!
//! A market is a finite set of eventually-constant price paths compiled into
//! a prefix tree. On top of it the crate computes node classifications,
//! replication and superhedging prices as exact linear programs, null sets,
//! arbitrage witnesses and finitely supported martingale measures. Every
//! number is a [`rational::Rational`].

mod error;
pub mod lp;
pub mod market;
pub mod martingale;
pub mod nodes;
pub mod portfolio;
pub mod rational;
pub mod superhedge;
pub mod workbench;

pub use error::Error;
pub use market::{Instance, Payoff, Regime, Trajectory};
pub use martingale::MartingaleMeasure;
pub use portfolio::{GeneralizedPortfolio, SimplePortfolio};
pub use rational::Rational;
pub use superhedge::{Hedger, PriceResult, PriceValue};
