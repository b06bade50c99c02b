//! Scenarios, instance sources, regime sweeps and the markdown dossier.

mod doc;
mod report;
mod scenario;
mod sweep;

use std::path::Path;

use crate::market::{
    build_instance, evaluate_payoff, Instance, InstanceFile, LoadError, NodeId, Payoff, Regime,
    TrajectoryFamily,
};
use crate::portfolio::SimplePortfolio;
use crate::rational::Rational;
use crate::Error;

pub use doc::{Block, Document, Format};
pub use report::dossier;
pub use scenario::{Scenario, UnknownScenario};
pub use sweep::{regime_sweep, SweepReport, SweepRow};

/// Where an instance comes from: a built-in scenario or decoded families
/// from an instance file. Either can be rebuilt under another regime.
#[derive(Debug, Clone)]
pub enum Source {
    Scenario(Scenario),
    File {
        name: String,
        s0: Rational,
        families: Vec<TrajectoryFamily>,
        regime: Regime,
    },
}

impl Source {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, Error> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(LoadError::from)?;
        let (s0, families, regime) = file.decode()?;
        Ok(Source::File {
            name: path.display().to_string(),
            s0,
            families,
            regime,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Source::Scenario(s) => s.id().to_string(),
            Source::File { name, .. } => name.clone(),
        }
    }

    /// Builds with truncation `n` and cap `m`, falling back to the source's
    /// defaults.
    pub fn build(&self, n: Option<usize>, m: Option<usize>) -> Result<Instance, Error> {
        match self {
            Source::Scenario(s) => Ok(s.build(n, m)?),
            Source::File {
                s0,
                families,
                regime,
                ..
            } => {
                let regime = Regime::new(
                    n.unwrap_or(regime.truncation),
                    m.unwrap_or(regime.maturity_cap),
                )?;
                Ok(build_instance(s0.clone(), families, regime)?)
            }
        }
    }
}

/// Evaluates `payoff` per class after checking its maturity against `M`.
pub fn materialize(payoff: &Payoff, instance: &Instance) -> Result<Vec<Rational>, Error> {
    let cap = instance.regime().maturity_cap;
    if payoff.maturity() > cap {
        return Err(Error::MaturityBeyondCap {
            maturity: payoff.maturity(),
            cap,
        });
    }
    Ok(evaluate_payoff(payoff, instance)?)
}

/// `(v0,v1,...)` for the path leading to `node`.
pub fn node_path_string(instance: &Instance, node: NodeId) -> String {
    let values: Vec<String> = instance
        .node_path(node)
        .iter()
        .map(ToString::to_string)
        .collect();
    format!("({})", values.join(","))
}

/// `V = ...; h[(1,2)] = ..., ...` with holdings in node order.
pub fn describe_portfolio(instance: &Instance, portfolio: &SimplePortfolio) -> String {
    let holdings: Vec<String> = portfolio
        .holdings
        .iter()
        .map(|(&n, h)| format!("h{} = {h}", node_path_string(instance, n)))
        .collect();
    if holdings.is_empty() {
        format!("V = {}; no holdings", portfolio.endowment)
    } else {
        format!("V = {}; {}", portfolio.endowment, holdings.join(", "))
    }
}

/// One row per held node: id, depth, path, holding.
pub fn portfolio_rows(instance: &Instance, portfolio: &SimplePortfolio) -> Vec<Vec<String>> {
    portfolio
        .holdings
        .iter()
        .map(|(&n, h)| {
            vec![
                n.to_string(),
                instance.node(n).depth.to_string(),
                node_path_string(instance, n),
                h.to_string(),
            ]
        })
        .collect()
}

/// One row per class: label and weight.
pub fn measure_rows(instance: &Instance, weights: &[Rational]) -> Vec<Vec<String>> {
    weights
        .iter()
        .enumerate()
        .map(|(c, w)| vec![instance.label(c).to_string(), w.to_string()])
        .collect()
}
