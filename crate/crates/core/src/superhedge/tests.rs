use super::*;
use crate::market::{evaluate_payoff, Payoff};
use crate::nodes::{compute_reduction, free_positive_portfolio};
use crate::rational::{int, ratio};
use crate::workbench::Scenario;

fn payoff(inst: &Instance, src: &str) -> Vec<Rational> {
    evaluate_payoff(&Payoff::parse(src).unwrap(), inst).unwrap()
}

fn labels(inst: &Instance, classes: &[ClassId]) -> Vec<String> {
    classes.iter().map(|&c| inst.label(c).to_string()).collect()
}

fn indicator(inst: &Instance, label: &str) -> Vec<Rational> {
    let target = inst.class_by_label(label).unwrap();
    (0..inst.num_classes())
        .map(|c| if c == target { int(1) } else { int(0) })
        .collect()
}

#[test]
fn forward_replicates_and_straddle_does_not() {
    let inst = Scenario::A.build(None, None).unwrap();
    let h = Hedger::new(&inst);
    let fwd = h.replicate(&payoff(&inst, "S[1] - 1")).unwrap();
    assert_eq!(fwd.endowment, int(0));
    assert_eq!(fwd.holding(inst.root()), int(1));
    assert!(h.replicate(&payoff(&inst, "abs(S[1] - 1)")).is_none());
    let c = h.replicate(&payoff(&inst, "7/3")).unwrap();
    assert_eq!(c.endowment, ratio(7, 3));
    assert!(c.holdings.is_empty());
}

#[test]
fn tri_branch_prices() {
    let inst = Scenario::A.build(None, None).unwrap();
    let h = Hedger::new(&inst);
    assert!(h.check_lop() && h.check_mon() && h.check_l());
    assert!(h.null_set().is_empty());
    let straddle = payoff(&inst, "abs(S[1] - 1)");
    let sb = h.sigma_bar(&straddle);
    assert_eq!(sb.value, PriceValue::Finite(int(1)));
    assert_eq!(sb.measure.unwrap(), vec![ratio(1, 2), int(0), ratio(1, 2)]);
    // martingale weights (p, 1 - 2p, p) price the straddle anywhere in [0, 1]
    assert_eq!(
        h.integral_k(&straddle),
        Integral::NotIntegrable {
            lower: PriceValue::Finite(int(0)),
            upper: PriceValue::Finite(int(1)),
        }
    );
    let forward = payoff(&inst, "S[1] + 2");
    assert_eq!(h.integral_k(&forward), Integral::Value(int(3)));
    assert!(h.detect_strict_mia().is_none());
    assert!(h.detect_null_arbitrage().witness.is_none());
}

#[test]
fn emulation_regime_prices_the_drop_at_one_half() {
    let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
    let h = Hedger::new(&inst);
    assert_eq!(labels(&inst, &h.null_set().members()), ["U1", "U2"]);
    let f = indicator(&inst, "D");
    assert_eq!(h.i_bar(&f).unwrap().value, PriceValue::Finite(ratio(1, 2)));
    let sb = h.sigma_bar(&f);
    assert_eq!(sb.value, PriceValue::Finite(ratio(1, 2)));
    assert!(sb.measure.is_some());
    assert!(h.check_l());
    let na = h.detect_null_arbitrage();
    assert!(na.witness.is_none() && !na.degenerate);
    assert!(h.detect_strict_mia().is_none());
    assert_eq!(
        h.dual_price(&f, true).value,
        PriceValue::Finite(ratio(1, 2))
    );
}

#[test]
fn full_regime_prices_the_drop_at_zero() {
    for m in [5, 6] {
        let inst = Scenario::C.build(Some(4), Some(m)).unwrap();
        let h = Hedger::new(&inst);
        let f = indicator(&inst, "D");
        assert_eq!(h.i_bar(&f).unwrap().value, PriceValue::Finite(int(0)));
        assert_eq!(h.sigma_bar(&f).value, PriceValue::Finite(int(0)));
    }
}

#[test]
fn jump_family_regimes() {
    let short = Scenario::B.build(Some(6), Some(3)).unwrap();
    let h = Hedger::new(&short);
    assert_eq!(labels(&short, &h.null_set().members()), ["U1", "U2"]);
    assert!(h.check_l());
    let straddle = payoff(&short, "abs(S[1] - 1)");
    assert_eq!(h.sigma_bar(&straddle).value, PriceValue::Finite(int(1)));
    assert_eq!(
        h.i_bar(&straddle).unwrap().value,
        PriceValue::Finite(int(1))
    );

    let long = Scenario::B.build(Some(6), Some(8)).unwrap();
    let h = Hedger::new(&long);
    assert!(h.null_set().is_everything());
    assert!(!h.check_mon());
    let report = h.l_report();
    assert!(!report.holds);
    let mia = h.detect_strict_mia().unwrap();
    assert_eq!(mia.endowment, int(0));
    assert!((0..long.num_classes()).all(|c| mia.terminal_wealth(&long, c) >= int(1)));
    // short at the root, recouped by buying on every plateau
    let unit = mia.scaled(&(int(1) / -mia.holding(long.root())));
    assert_eq!(unit.holding(long.root()), int(-1));
    let plateau: Vec<NodeId> = unit
        .holdings
        .keys()
        .copied()
        .filter(|&n| n != long.root())
        .collect();
    assert!(!plateau.is_empty());
    assert!(plateau
        .iter()
        .all(|&n| long.node(n).value == int(2) && unit.holding(n) > int(0)));
    assert!((0..long.num_classes()).all(|c| unit.terminal_wealth(&long, c) > int(0)));
    assert_eq!(h.sigma_bar(&straddle).value, PriceValue::NegInfinity);
    assert!(h.detect_null_arbitrage().degenerate);
}

#[test]
fn null_set_grows_with_the_cap() {
    let mut previous = 0;
    for m in 1..=8 {
        let inst = Scenario::B.build(Some(6), Some(m)).unwrap();
        let size = Hedger::new(&inst).null_set().len();
        assert!(size >= previous);
        previous = size;
    }
}

#[test]
fn null_certificates_check_out() {
    let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
    let h = Hedger::new(&inst);
    for (c, cert) in h.null_set().certificates.iter().enumerate() {
        if let NullCertificate::Covered(p) = cert {
            assert_eq!(p.endowment, int(0));
            assert!(p.is_positive(&inst));
            assert!(p.terminal_wealth(&inst, c) >= int(1));
        }
    }
}

#[test]
fn constant_trajectory_prices_zero_at_zero() {
    let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
    let zero_payoff = vec![int(0); inst.num_classes()];
    assert_eq!(
        Hedger::new(&inst).sigma_bar(&zero_payoff).value,
        PriceValue::Finite(int(0))
    );
}

#[test]
fn i_bar_rejects_negative_payoffs() {
    let inst = Scenario::A.build(None, None).unwrap();
    let err = Hedger::new(&inst)
        .i_bar(&payoff(&inst, "S[1] - 1"))
        .unwrap_err();
    assert_eq!(err, PricingError::NegativePayoff { label: "T-".into() });
}

#[test]
fn aggregation_adds_and_cancels() {
    let inst = Scenario::A.build(None, None).unwrap();
    let long = SimplePortfolio::zero(1).hold(inst.root(), int(1));
    let twice = GeneralizedPortfolio::new(vec![long.clone(), long.clone()]);
    assert_eq!(
        aggregate(&inst, &twice, 1).unwrap(),
        BTreeMap::from([(inst.root(), int(2))])
    );
    let flat = GeneralizedPortfolio::new(vec![long.clone(), long.negated()]);
    assert!(aggregate(&inst, &flat, 1).unwrap().is_empty());
}

#[test]
fn aggregation_matches_component_increments_off_exceptional_set() {
    let inst = Scenario::B.build(Some(6), Some(3)).unwrap();
    let h = Hedger::new(&inst);
    let components = vec![
        free_positive_portfolio(&inst),
        h.i_bar(&indicator(&inst, "D1")).unwrap().portfolio.unwrap(),
        h.i_bar(&payoff(&inst, "abs(S[1] - 1)"))
            .unwrap()
            .portfolio
            .unwrap(),
    ];
    assert!(components.iter().all(|p| p.is_positive(&inst)));
    let gp = GeneralizedPortfolio::new(components);
    let total = aggregate(&inst, &gp, 3).unwrap();
    let agg = SimplePortfolio {
        endowment: int(0),
        maturity: 3,
        holdings: total,
    };
    let removed = compute_reduction(&inst, 3).removed;
    for c in (0..inst.num_classes()).filter(|c| !removed.contains(c)) {
        let gains: Rational = gp
            .components
            .iter()
            .map(|p| p.wealth(&inst, c, 3) - &p.endowment)
            .sum();
        assert_eq!(agg.wealth(&inst, c, 3), gains);
    }
}

#[test]
fn aggregation_refuses_type_ii_nodes() {
    let inst = Scenario::C.build(Some(4), Some(5)).unwrap();
    let gp = GeneralizedPortfolio::new(vec![SimplePortfolio::zero(5)]);
    assert!(matches!(
        aggregate(&inst, &gp, 5),
        Err(PricingError::TypeIINode { depth: 4, .. })
    ));
}

#[test]
fn component_count_does_not_lower_i_bar() {
    let inst = Scenario::C.build(Some(4), Some(3)).unwrap();
    let h = Hedger::new(&inst);
    let f = indicator(&inst, "D");
    for k in 1..=3 {
        assert_eq!(h.i_bar_components(&f, k).unwrap(), ratio(1, 2));
    }
}

#[test]
fn sufficient_condition_for_nk() {
    let a = Scenario::A.build(None, None).unwrap();
    assert!(check_nk_sufficient(&a).holds);
    let b = Scenario::B.build(Some(6), Some(3)).unwrap();
    let report = check_nk_sufficient(&b);
    assert!(!report.holds && !report.complete);
    assert!(report.type_ii_nodes.is_empty());
}

#[test]
fn k_sample_passes_on_small_instances() {
    for inst in [
        Scenario::A.build(None, None).unwrap(),
        Scenario::C.build(Some(4), Some(3)).unwrap(),
    ] {
        let h = Hedger::new(&inst);
        let report = h.check_k(&default_k_sample(&inst, 7, 10));
        assert!(report.pass, "{:?}", report.counterexample);
        assert!(report.checked > inst.num_classes());
    }
}

#[test]
fn nodewise_leinert() {
    let a = Scenario::A.build(None, None).unwrap();
    assert!(check_l_nodewise(&a).holds);
    let b = Scenario::B.build(Some(6), Some(8)).unwrap();
    assert!(!check_l_nodewise(&b).holds);
}
