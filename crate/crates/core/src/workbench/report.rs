//! Full markdown dossier for one instance.

use crate::market::{Completeness, Instance, Payoff};
use crate::martingale::{check_duality_bounds, construct_measure, verify_martingale};
use crate::nodes::{classify_all, compute_reduction, free_positive_portfolio};
use crate::superhedge::{
    check_l_nodewise, check_nk_sufficient, default_k_sample, Hedger, Integral, NullCertificate,
};
use crate::Error;

use super::{describe_portfolio, materialize, measure_rows, node_path_string, Document, Format};

/// Seed of the randomized part of the (K) sample used in reports.
pub const REPORT_K_SEED: u64 = 0;

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn completeness_text(c: &Completeness) -> String {
    match c {
        Completeness::Complete => "complete".into(),
        Completeness::Incomplete { witness_path, .. } => {
            format!("incomplete (missing limit {witness_path})")
        }
    }
}

/// Deterministic markdown report: instance, node table, reduction, null
/// set, conditions, martingale measure and, with a payoff, every price.
pub fn dossier(name: &str, instance: &Instance, payoff: Option<&Payoff>) -> Result<String, Error> {
    let hedger = Hedger::new(instance);
    let regime = instance.regime();
    let mut doc = Document::new();

    doc.heading("Instance")
        .field("source", name)
        .field("s0", instance.s0())
        .field("classes", instance.num_classes())
        .field("tree depth", instance.depth())
        .field("N", regime.truncation)
        .field("M", regime.maturity_cap)
        .field(
            "regime",
            if instance.is_exact() {
                "exact"
            } else {
                "emulation"
            },
        )
        .field("completeness", completeness_text(instance.completeness()));
    doc.table(
        ["class", "trajectory", "stabilizes at"],
        (0..instance.num_classes())
            .map(|c| {
                let t = instance.class(c);
                vec![
                    instance.label(c).to_string(),
                    t.to_string(),
                    t.stabilization_time().to_string(),
                ]
            })
            .collect(),
    );

    doc.heading("Nodes").table(
        [
            "node",
            "depth",
            "path",
            "children",
            "class",
            "truncation-induced",
        ],
        classify_all(instance)
            .into_iter()
            .map(|r| {
                let children: Vec<String> =
                    r.child_values.iter().map(ToString::to_string).collect();
                vec![
                    r.node.to_string(),
                    r.depth.to_string(),
                    node_path_string(instance, r.node),
                    format!("{{{}}}", children.join(",")),
                    r.class.to_string(),
                    yes_no(r.truncation_induced).to_string(),
                ]
            })
            .collect(),
    );

    let n = instance.depth();
    let reduction = compute_reduction(instance, n);
    let removed: Vec<&str> = reduction
        .removed
        .iter()
        .map(|&c| instance.label(c))
        .collect();
    doc.heading(format!("Reduction at n = {n}"))
        .field("N_n", format!("{{{}}}", removed.join(", ")))
        .table(
            ["class", "tau"],
            reduction
                .tau
                .iter()
                .enumerate()
                .map(|(c, t)| vec![instance.label(c).to_string(), t.to_string()])
                .collect(),
        );
    let free = free_positive_portfolio(instance);
    doc.field(
        "free positive portfolio",
        describe_portfolio(instance, &free),
    );

    let null = hedger.null_set();
    let members: Vec<&str> = null.members().iter().map(|&c| instance.label(c)).collect();
    doc.heading("Null set")
        .field("A", format!("{{{}}}", members.join(", ")))
        .field(
            "degenerate (every class null)",
            yes_no(null.is_everything()),
        );
    doc.table(
        ["class", "null", "certificate"],
        null.certificates
            .iter()
            .enumerate()
            .map(|(c, cert)| {
                let (is_null, text) = match cert {
                    NullCertificate::Covered(p) => (true, describe_portfolio(instance, p)),
                    NullCertificate::Excluded { .. } => (false, "Farkas certificate".to_string()),
                };
                vec![
                    instance.label(c).to_string(),
                    yes_no(is_null).to_string(),
                    text,
                ]
            })
            .collect(),
    );

    let l = hedger.l_report();
    let nk = check_nk_sufficient(instance);
    let k = hedger.check_k(&default_k_sample(instance, REPORT_K_SEED, 20));
    let mia = hedger.detect_strict_mia();
    let null_arb = hedger.detect_null_arbitrage();
    doc.heading("Conditions")
        .field("LOP", hedger.check_lop())
        .field("MON", hedger.check_mon())
        .field("L", l.holds)
        .field("nL", check_l_nodewise(instance).holds)
        .field(
            "K (sampled)",
            format!(
                "{} on {} payoffs",
                if k.pass { "pass" } else { "fail" },
                k.checked
            ),
        )
        .field("nK sufficient condition", nk.holds)
        .field(
            "strict MIA",
            mia.as_ref()
                .map_or_else(|| "none".to_string(), |p| describe_portfolio(instance, p)),
        )
        .field(
            "null-set arbitrage",
            null_arb.witness.as_ref().map_or_else(
                || "none".to_string(),
                |(c, p)| {
                    format!(
                        "on {}: {}",
                        instance.label(*c),
                        describe_portfolio(instance, p)
                    )
                },
            ),
        );
    if null_arb.degenerate {
        doc.text("Warning: every class is null, the market is degenerate (norm of 1 is 0).");
    }

    doc.heading("Martingale measure");
    let measure = match construct_measure(instance) {
        Ok(q) => {
            doc.field("construction", "ok")
                .field("verified", verify_martingale(instance, &q))
                .table(["class", "weight"], measure_rows(instance, q.weights()));
            Some(q)
        }
        Err(e) => {
            doc.field("construction", format!("failed: {e}"));
            None
        }
    };

    if let Some(payoff) = payoff {
        let f = materialize(payoff, instance)?;
        doc.heading(format!("Prices of {}", payoff.source()));
        doc.field(
            "replication I(f)",
            hedger
                .replicate(&f)
                .map_or_else(|| "not replicable".to_string(), |p| p.endowment.to_string()),
        );
        let upper = hedger.sigma_bar(&f);
        doc.field("sigma_bar(f)", &upper.value)
            .field("sigma_under(f)", hedger.sigma_under(&f).value);
        doc.field(
            "I_bar(f)",
            hedger.i_bar(&f).map_or_else(
                |_| "n/a (payoff takes negative values)".to_string(),
                |r| r.value.to_string(),
            ),
        )
        .field("norm(f)", hedger.norm(&f));
        doc.field(
            "integral_K(f)",
            match hedger.integral_k(&f) {
                Integral::Value(v) => v.to_string(),
                Integral::NotIntegrable { lower, upper } => {
                    format!("not integrable ({lower} < {upper})")
                }
            },
        )
        .field("dual price off A", hedger.dual_price(&f, true).value)
        .field(
            "dual price, all classes",
            hedger.dual_price(&f, false).value,
        );
        if let Some(p) = &upper.portfolio {
            doc.field("superhedge", describe_portfolio(instance, p));
        }
        if let Some(q) = &measure {
            let bounds = check_duality_bounds(instance, &f, std::slice::from_ref(q))?;
            let row = &bounds.rows[0];
            doc.field(
                "duality bounds",
                format!(
                    "E_Q|f| = {} <= sigma_bar(|f|) = {} <= norm = {}; E_Q f = {} <= sigma_bar(f) = {}: {}",
                    row.expectation_abs,
                    bounds.sigma_abs,
                    bounds.norm,
                    row.expectation,
                    bounds.sigma,
                    row.violated
                        .map_or_else(|| "pass".to_string(), |v| format!("violated ({v})")),
                ),
            );
        }
    }

    Ok(format!(
        "# Workbench report: {name}\n\n{}",
        doc.render(Format::Md)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::Scenario;

    #[test]
    fn report_is_deterministic() {
        let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
        let payoff = Payoff::parse("ind(S[1] < 1/2)").unwrap();
        let a = dossier("SCN-C", &inst, Some(&payoff)).unwrap();
        let b = dossier("SCN-C", &inst, Some(&payoff)).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("- **I_bar(f)**: 1/2\n"));
        assert!(a.contains("- **A**: {U1, U2}\n"));
        assert!(a.contains("failed: type-II node"));
    }
}
