//! Benchmark fixtures for the workbench.

use pathwise_core::lp::{LinearProgram, Relation, Sense, VarKind};
use pathwise_core::rational::{int, ratio};
use pathwise_core::workbench::Scenario;
use pathwise_core::Instance;

/// Dense feasible program with `n` nonnegative variables: a perturbed
/// assignment-style polytope.
pub fn dense_lp(n: usize) -> LinearProgram {
    let objective = (0..n).map(|j| int((j as i64 * 7) % 5 - 2)).collect();
    let mut lp = LinearProgram::new(Sense::Minimize, objective, vec![VarKind::NonNegative; n]);
    for i in 0..n {
        let coeffs = (0..n)
            .map(|j| ratio(((i * 3 + j * 5) % 7) as i64 + 1, ((i + j) % 3) as i64 + 1))
            .collect();
        lp.constrain(coeffs, Relation::Le, int(10 + i as i64));
    }
    lp.constrain(vec![int(1); n], Relation::Ge, int(1));
    lp
}

/// Scenario instances labelled for benchmark ids.
pub fn instances() -> Vec<(&'static str, Instance)> {
    vec![
        ("SCN-C(4,3)", Scenario::C.build(Some(4), Some(3)).unwrap()),
        ("SCN-B(6,8)", Scenario::B.build(Some(6), Some(8)).unwrap()),
        ("SCN-D", Scenario::D.build(None, None).unwrap()),
        ("SCN-E", Scenario::E.build(None, None).unwrap()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use pathwise_core::lp::{solve_lp, verify_certificate, LpOutcome};

    #[test]
    fn dense_program_is_solvable() {
        for n in [4, 8, 16] {
            let lp = dense_lp(n);
            let outcome = solve_lp(&lp);
            assert!(matches!(outcome, LpOutcome::Optimal { .. }));
            assert!(verify_certificate(&lp, &outcome));
        }
    }
}
