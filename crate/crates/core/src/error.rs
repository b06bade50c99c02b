use thiserror::Error;

use crate::market::{LoadError, ModelError, PayoffError};
use crate::martingale::MeasureError;
use crate::superhedge::PricingError;

/// Any failure surfaced by the workbench entry points.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Payoff(#[from] PayoffError),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("payoff maturity {maturity} exceeds the maturity cap M = {cap}")]
    MaturityBeyondCap { maturity: usize, cap: usize },
}
