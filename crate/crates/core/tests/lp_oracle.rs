mod common;

use pathwise_core::lp::{
    fm_value, solve_lp, verify_certificate, ExtValue, LinearProgram, LpOutcome, Relation, Sense,
    VarKind,
};
use pathwise_core::rational::{int, ratio};

#[test]
fn simplex_matches_fourier_motzkin_on_random_programs() {
    let mut rng = common::rng(7);
    let mut seen = [0usize; 3];
    for i in 0..200 {
        let lp = common::random_lp(&mut rng, 8, 6);
        let outcome = solve_lp(&lp);
        assert!(verify_certificate(&lp, &outcome), "program {i}: {lp:?}");
        let oracle = fm_value(&lp).unwrap();
        assert_eq!(outcome.ext_value(lp.sense), oracle, "program {i}: {lp:?}");
        seen[match outcome {
            LpOutcome::Optimal { .. } => 0,
            LpOutcome::Infeasible { .. } => 1,
            LpOutcome::Unbounded { .. } => 2,
        }] += 1;
    }
    assert!(seen.iter().all(|&k| k > 0), "outcome mix {seen:?}");
}

/// Beale's program cycles under the textbook largest-coefficient rule.
fn beale() -> LinearProgram {
    LinearProgram::new(
        Sense::Minimize,
        vec![ratio(-3, 4), int(20), ratio(-1, 2), int(6)],
        vec![VarKind::NonNegative; 4],
    )
    .with(
        vec![ratio(1, 4), int(-8), int(-1), int(9)],
        Relation::Le,
        int(0),
    )
    .with(
        vec![ratio(1, 2), int(-12), ratio(-1, 2), int(3)],
        Relation::Le,
        int(0),
    )
    .with(vec![int(0), int(0), int(1), int(0)], Relation::Le, int(1))
}

#[test]
fn degenerate_program_terminates() {
    let lp = beale();
    let outcome = solve_lp(&lp);
    assert!(verify_certificate(&lp, &outcome));
    assert_eq!(outcome.value(), Some(&ratio(-5, 4)));
    assert_eq!(fm_value(&lp).unwrap(), ExtValue::Finite(ratio(-5, 4)));
}

#[test]
fn tampered_certificates_are_rejected() {
    let lp = beale();
    match solve_lp(&lp) {
        LpOutcome::Optimal {
            value,
            primal,
            mut dual,
        } => {
            dual[0] += int(1);
            assert!(!verify_certificate(
                &lp,
                &LpOutcome::Optimal {
                    value,
                    primal,
                    dual
                }
            ));
        }
        other => panic!("expected an optimum, got {other:?}"),
    }
    let infeasible = LinearProgram::new(Sense::Minimize, vec![int(1)], vec![VarKind::NonNegative])
        .with(vec![int(1)], Relation::Le, int(-1));
    let outcome = solve_lp(&infeasible);
    assert!(matches!(outcome, LpOutcome::Infeasible { .. }));
    assert!(verify_certificate(&infeasible, &outcome));
    assert!(!verify_certificate(
        &infeasible,
        &LpOutcome::Infeasible {
            farkas: vec![int(0)]
        }
    ));
}
