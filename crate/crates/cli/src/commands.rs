use pathwise_core::market::{Instance, Payoff};
use pathwise_core::martingale::{
    check_duality_bounds, construct_measure, expectation, verify_martingale, MartingaleMeasure,
};
use pathwise_core::nodes::classify_all;
use pathwise_core::superhedge::{
    check_l_nodewise, check_nk_sufficient, default_k_sample, Hedger, Integral, NullCertificate,
    PriceResult,
};
use pathwise_core::workbench::{
    describe_portfolio, dossier, materialize, measure_rows, node_path_string, portfolio_rows,
    regime_sweep, Document, Scenario, Source,
};
use pathwise_core::Error;

use crate::{Cli, CliError, Command, Condition, MartingaleAction, PriceOp};

const PORTFOLIO_HEADERS: [&str; 4] = ["node", "depth", "path", "holding"];

fn source(cli: &Cli) -> Result<Source, CliError> {
    match (&cli.common.instance, &cli.common.scenario) {
        (Some(path), None) => Ok(Source::from_file(path)?),
        (None, Some(id)) => id
            .parse::<Scenario>()
            .map(Source::Scenario)
            .map_err(|e| CliError::Usage(e.to_string())),
        _ => Err(CliError::Usage(
            "give exactly one of --instance FILE or --scenario ID".into(),
        )),
    }
}

fn payoff(cli: &Cli) -> Result<Payoff, CliError> {
    let src = cli
        .common
        .payoff
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command needs --payoff EXPR".into()))?;
    Payoff::parse(src).map_err(|e| CliError::Input(Error::from(e).to_string()))
}

fn read_measure(
    instance: &Instance,
    path: &std::path::Path,
) -> Result<MartingaleMeasure, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    MartingaleMeasure::from_json(instance, &text)
        .map_err(|e| CliError::Input(Error::from(e).to_string()))
}

fn regime_fields(doc: &mut Document, name: &str, instance: &Instance) {
    let regime = instance.regime();
    doc.field("instance", name)
        .field("N", regime.truncation)
        .field("M", regime.maturity_cap)
        .field(
            "regime",
            if instance.is_exact() {
                "exact"
            } else {
                "emulation"
            },
        );
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    let format = cli.common.format.into();
    let source = source(cli)?;
    if let Command::Sweep { regimes } = &cli.command {
        let report = regime_sweep(&source, &payoff(cli)?, regimes)?;
        return Ok(report.document().render(format));
    }
    let instance = source.build(cli.common.truncation, cli.common.maturity_cap)?;
    let name = source.name();
    let doc = match &cli.command {
        Command::Classify => classify(&name, &instance),
        Command::Nullset => nullset(&name, &instance),
        Command::Price { op } => price(cli, &name, &instance, *op)?,
        Command::Check {
            condition,
            seed,
            samples,
        } => check(&name, &instance, *condition, *seed, *samples),
        Command::Martingale {
            action,
            measure,
            save,
            all_classes,
        } => martingale(
            cli,
            &name,
            &instance,
            *action,
            measure,
            save.as_deref(),
            *all_classes,
        )?,
        Command::Report => {
            let payoff = cli
                .common
                .payoff
                .as_ref()
                .map(|_| payoff(cli))
                .transpose()?;
            return Ok(dossier(&name, &instance, payoff.as_ref())?);
        }
        Command::Sweep { .. } => unreachable!("handled above"),
    };
    Ok(doc.render(format))
}

fn classify(name: &str, instance: &Instance) -> Document {
    let mut doc = Document::new();
    doc.heading("Node classification");
    regime_fields(&mut doc, name, instance);
    doc.table(
        [
            "node",
            "depth",
            "path",
            "children",
            "class",
            "truncation_induced",
            "classes",
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
                    r.truncation_induced.to_string(),
                    r.members.join(" "),
                ]
            })
            .collect(),
    );
    doc
}

fn nullset(name: &str, instance: &Instance) -> Document {
    let hedger = Hedger::new(instance);
    let null = hedger.null_set();
    let members: Vec<&str> = null.members().iter().map(|&c| instance.label(c)).collect();
    let mut doc = Document::new();
    doc.heading("Null set");
    regime_fields(&mut doc, name, instance);
    doc.field("A", format!("{{{}}}", members.join(", ")))
        .field("size", members.len())
        .field("degenerate", null.is_everything());
    let rows = null
        .certificates
        .iter()
        .enumerate()
        .map(|(c, cert)| {
            let (is_null, text) = match cert {
                NullCertificate::Covered(p) => (true, describe_portfolio(instance, p)),
                NullCertificate::Excluded { farkas } => {
                    let y: Vec<String> = farkas.iter().map(ToString::to_string).collect();
                    (false, format!("farkas [{}]", y.join(", ")))
                }
            };
            vec![
                instance.label(c).to_string(),
                instance.class(c).to_string(),
                is_null.to_string(),
                text,
            ]
        })
        .collect();
    doc.table(["class", "trajectory", "null", "certificate"], rows);
    doc
}

fn price_certificates(doc: &mut Document, instance: &Instance, result: &PriceResult) {
    if let Some(p) = &result.portfolio {
        doc.heading("Portfolio")
            .field("V", &p.endowment)
            .field("maturity", p.maturity)
            .table(PORTFOLIO_HEADERS, portfolio_rows(instance, p));
    }
    if let Some(q) = &result.measure {
        doc.heading("Dual measure")
            .table(["class", "weight"], measure_rows(instance, q));
    }
    if let Some(a) = &result.arbitrage {
        doc.heading("Arbitrage witness")
            .field("portfolio", describe_portfolio(instance, a));
    }
}

fn price(cli: &Cli, name: &str, instance: &Instance, op: PriceOp) -> Result<Document, CliError> {
    let payoff = payoff(cli)?;
    let f = materialize(&payoff, instance)?;
    let hedger = Hedger::new(instance);
    let mut doc = Document::new();
    doc.heading("Price");
    regime_fields(&mut doc, name, instance);
    doc.field("payoff", payoff.source());
    match op {
        PriceOp::Replicate => match hedger.replicate(&f) {
            Some(p) => {
                doc.field("op", "replicate")
                    .field("replicable", true)
                    .field("value", &p.endowment);
                doc.heading("Portfolio")
                    .table(PORTFOLIO_HEADERS, portfolio_rows(instance, &p));
            }
            None => {
                doc.field("op", "replicate")
                    .field("replicable", false)
                    .field("value", "infeasible");
            }
        },
        PriceOp::Sigmabar | PriceOp::Sigmaunder => {
            let (label, result) = if op == PriceOp::Sigmabar {
                ("sigmabar", hedger.sigma_bar(&f))
            } else {
                ("sigmaunder", hedger.sigma_under(&f))
            };
            doc.field("op", label).field("value", &result.value);
            price_certificates(&mut doc, instance, &result);
        }
        PriceOp::Ibar => {
            let result = hedger
                .i_bar(&f)
                .map_err(|e| CliError::Input(Error::from(e).to_string()))?;
            doc.field("op", "ibar").field("value", &result.value);
            price_certificates(&mut doc, instance, &result);
        }
        PriceOp::Norm => {
            doc.field("op", "norm").field("value", hedger.norm(&f));
        }
        PriceOp::IntegralK => {
            doc.field("op", "integralK");
            match hedger.integral_k(&f) {
                Integral::Value(v) => {
                    doc.field("integrable", true).field("value", v);
                }
                Integral::NotIntegrable { lower, upper } => {
                    doc.field("integrable", false)
                        .field("value", "not integrable")
                        .field("sigma_under", lower)
                        .field("sigma_bar", upper);
                }
            }
        }
    }
    Ok(doc)
}

fn check(
    name: &str,
    instance: &Instance,
    condition: Condition,
    seed: u64,
    samples: usize,
) -> Document {
    let hedger = Hedger::new(instance);
    let mut doc = Document::new();
    doc.heading("Check");
    regime_fields(&mut doc, name, instance);
    let witness = |doc: &mut Document, p: Option<pathwise_core::SimplePortfolio>| {
        doc.field(
            "witness",
            p.map_or_else(|| "none".to_string(), |p| describe_portfolio(instance, &p)),
        );
    };
    match condition {
        Condition::Lop => {
            let v = hedger.lop_violation();
            doc.field("condition", "lop").field("holds", v.is_none());
            witness(&mut doc, v);
        }
        Condition::Mon => {
            let v = hedger.mon_violation();
            doc.field("condition", "mon").field("holds", v.is_none());
            witness(&mut doc, v);
        }
        Condition::L => {
            let report = hedger.l_report();
            doc.field("condition", "L").field("holds", report.holds);
            witness(&mut doc, report.witness);
            if let Some(q) = report.measure {
                doc.heading("Martingale measure off the null set")
                    .table(["class", "weight"], measure_rows(instance, &q));
            }
        }
        Condition::NL => {
            let report = check_l_nodewise(instance);
            doc.field("condition", "nL")
                .field("holds", report.holds)
                .field(
                    "failing node",
                    report.failing_node.map_or_else(
                        || "none".to_string(),
                        |n| format!("{n} {}", node_path_string(instance, n)),
                    ),
                );
        }
        Condition::K => {
            let report = hedger.check_k(&default_k_sample(instance, seed, samples));
            doc.field("condition", "K")
                .field("pass", report.pass)
                .field("payoffs checked", report.checked);
            if let Some(cx) = report.counterexample {
                let values: Vec<String> = cx.payoff.iter().map(ToString::to_string).collect();
                doc.field("counterexample", format!("[{}]", values.join(", ")))
                    .field("i_bar", cx.i_bar)
                    .field("sigma_bar", cx.sigma_bar);
            }
        }
        Condition::NKSufficient => {
            let report = check_nk_sufficient(instance);
            let nodes: Vec<String> = report
                .type_ii_nodes
                .iter()
                .map(|&n| node_path_string(instance, n))
                .collect();
            doc.field("condition", "nK-sufficient")
                .field("holds", report.holds)
                .field("complete", report.complete)
                .field(
                    "type-II nodes",
                    if nodes.is_empty() {
                        "none".into()
                    } else {
                        nodes.join(" ")
                    },
                );
            if let pathwise_core::market::Completeness::Incomplete { witness_path, .. } =
                instance.completeness()
            {
                doc.field("missing limit", witness_path);
            }
        }
        Condition::Complete => {
            doc.field("condition", "complete")
                .field("holds", instance.completeness().is_complete());
            if let pathwise_core::market::Completeness::Incomplete { witness_path, .. } =
                instance.completeness()
            {
                doc.field("missing limit", witness_path);
            }
        }
        Condition::StrictMia => {
            let p = hedger.detect_strict_mia();
            doc.field("condition", "strict-mia")
                .field("found", p.is_some());
            witness(&mut doc, p);
        }
        Condition::NullArbitrage => {
            let report = hedger.detect_null_arbitrage();
            doc.field("condition", "null-arbitrage")
                .field("found", report.witness.is_some())
                .field("degenerate", report.degenerate);
            match report.witness {
                Some((c, p)) => {
                    doc.field("class", instance.label(c));
                    witness(&mut doc, Some(p));
                }
                None => witness(&mut doc, None),
            }
            if report.degenerate {
                let msg = "warning: degenerate market, every class is null (norm of 1 is 0)";
                eprintln!("{msg}");
                doc.text(msg);
            }
        }
    }
    doc
}

fn measure_or_construct(
    instance: &Instance,
    files: &[std::path::PathBuf],
) -> Result<Vec<MartingaleMeasure>, CliError> {
    if files.is_empty() {
        construct_measure(instance)
            .map(|q| vec![q])
            .map_err(|e| CliError::Input(format!("no measure given and construction failed: {e}")))
    } else {
        files.iter().map(|f| read_measure(instance, f)).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn martingale(
    cli: &Cli,
    name: &str,
    instance: &Instance,
    action: MartingaleAction,
    measure_files: &[std::path::PathBuf],
    save: Option<&std::path::Path>,
    all_classes: bool,
) -> Result<Document, CliError> {
    let mut doc = Document::new();
    doc.heading("Martingale");
    regime_fields(&mut doc, name, instance);
    match action {
        MartingaleAction::Construct => match construct_measure(instance) {
            Ok(q) => {
                doc.field("action", "construct")
                    .field("status", "ok")
                    .field("verified", verify_martingale(instance, &q));
                if let Some(path) = save {
                    std::fs::write(path, q.to_json(instance) + "\n").map_err(|e| {
                        CliError::Input(format!("cannot write {}: {e}", path.display()))
                    })?;
                }
                doc.table(["class", "weight"], measure_rows(instance, q.weights()));
            }
            Err(e) => {
                doc.field("action", "construct")
                    .field("status", "failed")
                    .field("reason", e);
            }
        },
        MartingaleAction::Verify => {
            let measures = measure_or_construct(instance, measure_files)?;
            doc.field("action", "verify");
            for (i, q) in measures.iter().enumerate() {
                doc.field(
                    format!("measure {i} verified"),
                    verify_martingale(instance, q),
                );
            }
        }
        MartingaleAction::Expect => {
            let payoff = payoff(cli)?;
            let f = materialize(&payoff, instance)?;
            let measures = measure_or_construct(instance, measure_files)?;
            doc.field("action", "expect")
                .field("payoff", payoff.source());
            for (i, q) in measures.iter().enumerate() {
                doc.field(format!("E_Q{i}[f]"), expectation(q, &f));
            }
        }
        MartingaleAction::Dual => {
            let payoff = payoff(cli)?;
            let f = materialize(&payoff, instance)?;
            let result = Hedger::new(instance).dual_price(&f, !all_classes);
            doc.field("action", "dual")
                .field("payoff", payoff.source())
                .field("restricted off null set", !all_classes)
                .field("value", &result.value);
            price_certificates(&mut doc, instance, &result);
        }
        MartingaleAction::Bounds => {
            let payoff = payoff(cli)?;
            let f = materialize(&payoff, instance)?;
            let measures = measure_or_construct(instance, measure_files)?;
            let report = check_duality_bounds(instance, &f, &measures)
                .map_err(|e| CliError::Input(Error::from(e).to_string()))?;
            doc.field("action", "bounds")
                .field("payoff", payoff.source())
                .field("sigma_bar(|f|)", &report.sigma_abs)
                .field("norm(f)", &report.norm)
                .field("sigma_bar(f)", &report.sigma)
                .field("pass", report.pass());
            let skipped: Vec<String> = report.skipped.iter().map(ToString::to_string).collect();
            if !skipped.is_empty() {
                doc.field("unverified measures skipped", skipped.join(" "));
            }
            doc.table(
                ["measure", "E_Q|f|", "E_Q f", "violated"],
                report
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.measure.to_string(),
                            r.expectation_abs.to_string(),
                            r.expectation.to_string(),
                            r.violated
                                .map_or_else(|| "none".to_string(), |v| v.to_string()),
                        ]
                    })
                    .collect(),
            );
        }
    }
    Ok(doc)
}
