//! The same payoff priced across several `(M, N)` regimes.

use rayon::prelude::*;

use crate::market::Payoff;
use crate::rational::Rational;
use crate::superhedge::{Hedger, PriceValue};
use crate::Error;

use super::{materialize, Document, Source};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub maturity_cap: usize,
    pub truncation: usize,
    pub exact: bool,
    pub num_classes: usize,
    pub null_size: usize,
    pub check_l: bool,
    pub sigma_bar: PriceValue,
    /// `None` when the payoff takes negative values.
    pub i_bar: Option<Rational>,
    /// Dual price over martingale weights vanishing on the null set.
    pub dual: PriceValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub source: String,
    pub payoff: String,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn document(&self) -> Document {
        let mut doc = Document::new();
        doc.heading(format!("Regime sweep: {}", self.source))
            .field("payoff", &self.payoff);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.maturity_cap.to_string(),
                    r.truncation.to_string(),
                    if r.exact { "exact" } else { "emulation" }.to_string(),
                    r.num_classes.to_string(),
                    r.null_size.to_string(),
                    r.check_l.to_string(),
                    r.sigma_bar.to_string(),
                    r.i_bar
                        .as_ref()
                        .map_or_else(|| "n/a".to_string(), ToString::to_string),
                    r.dual.to_string(),
                ]
            })
            .collect();
        doc.table(
            [
                "M",
                "N",
                "regime",
                "classes",
                "null_size",
                "L",
                "sigma_bar",
                "i_bar",
                "dual",
            ],
            rows,
        );
        doc
    }
}

/// One row per `(M, N)` regime, computed in parallel and reported in input
/// order.
pub fn regime_sweep(
    source: &Source,
    payoff: &Payoff,
    regimes: &[(usize, usize)],
) -> Result<SweepReport, Error> {
    let rows = regimes
        .par_iter()
        .map(|&(m, n)| {
            let instance = source.build(Some(n), Some(m))?;
            let values = materialize(payoff, &instance)?;
            let hedger = Hedger::new(&instance);
            let i_bar = match hedger.i_bar(&values) {
                Ok(result) => result.value.finite().cloned(),
                Err(_) => None,
            };
            Ok(SweepRow {
                maturity_cap: m,
                truncation: n,
                exact: instance.is_exact(),
                num_classes: instance.num_classes(),
                null_size: hedger.null_set().len(),
                check_l: hedger.check_l(),
                sigma_bar: hedger.sigma_bar(&values).value,
                i_bar,
                dual: hedger.dual_price(&values, true).value,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(SweepReport {
        source: source.name(),
        payoff: payoff.source().to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::workbench::{Format, Scenario};

    #[test]
    fn drop_indicator_across_regimes() {
        let payoff = Payoff::parse("ind(S[1] < 1/2)").unwrap();
        let report = regime_sweep(
            &Source::Scenario(Scenario::C),
            &payoff,
            &[(3, 4), (5, 4), (6, 4)],
        )
        .unwrap();
        let i_bar: Vec<Rational> = report
            .rows
            .iter()
            .map(|r| r.i_bar.clone().unwrap())
            .collect();
        assert_eq!(i_bar, [ratio(1, 2), int(0), int(0)]);
        let sigma: Vec<PriceValue> = report.rows.iter().map(|r| r.sigma_bar.clone()).collect();
        assert_eq!(
            sigma,
            [
                PriceValue::Finite(ratio(1, 2)),
                PriceValue::Finite(int(0)),
                PriceValue::Finite(int(0))
            ]
        );
        assert!(!report.rows[0].exact && report.rows[1].exact);
        let csv = report.document().render(Format::Csv);
        assert!(csv.contains("3,4,emulation,6,2,true,1/2,1/2,1/2\n"));
    }

    #[test]
    fn jump_family_leinert_flips() {
        let payoff = Payoff::parse("abs(S[1] - 1)").unwrap();
        let report =
            regime_sweep(&Source::Scenario(Scenario::B), &payoff, &[(3, 6), (8, 6)]).unwrap();
        let l: Vec<bool> = report.rows.iter().map(|r| r.check_l).collect();
        assert_eq!(l, [true, false]);
    }

    #[test]
    fn single_row() {
        let payoff = Payoff::parse("abs(S[1] - 1)").unwrap();
        let report = regime_sweep(&Source::Scenario(Scenario::A), &payoff, &[(1, 1)]).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rows[0].sigma_bar, PriceValue::Finite(int(1)));
        assert_eq!(report.rows[0].i_bar, Some(int(1)));
    }

    #[test]
    fn maturity_beyond_cap_is_rejected() {
        let payoff = Payoff::parse("S[4]").unwrap();
        assert!(matches!(
            regime_sweep(&Source::Scenario(Scenario::C), &payoff, &[(3, 4)]),
            Err(Error::MaturityBeyondCap {
                maturity: 4,
                cap: 3
            })
        ));
    }
}
