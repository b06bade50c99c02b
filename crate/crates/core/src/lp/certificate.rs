use num_traits::{Signed, Zero};

use super::{LinearProgram, LpOutcome, Relation, Sense, VarKind};
use crate::rational::{dot, Rational};

fn satisfies(lp: &LinearProgram, x: &[Rational]) -> bool {
    if x.len() != lp.num_vars() {
        return false;
    }
    let signs_ok = lp
        .vars
        .iter()
        .zip(x)
        .all(|(k, v)| *k == VarKind::Free || !v.is_negative());
    signs_ok
        && lp.constraints.iter().all(|c| {
            let lhs = dot(&c.coeffs, x);
            match c.relation {
                Relation::Le => lhs <= c.rhs,
                Relation::Eq => lhs == c.rhs,
                Relation::Ge => lhs >= c.rhs,
            }
        })
}

/// `y·A`, one entry per variable.
fn transpose_dot(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); lp.num_vars()];
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *o += yi * a;
            }
        }
    }
    out
}

/// Sign pattern of a minimization dual: `>=` rows nonnegative, `<=` rows
/// nonpositive. For a maximization the pattern is mirrored.
fn dual_sign_ok(relation: Relation, y: &Rational, sense: Sense) -> bool {
    let y = match sense {
        Sense::Minimize => y.clone(),
        Sense::Maximize => -y,
    };
    match relation {
        Relation::Ge => !y.is_negative(),
        Relation::Le => !y.is_positive(),
        Relation::Eq => true,
    }
}

fn dual_feasible(lp: &LinearProgram, y: &[Rational]) -> bool {
    if y.len() != lp.constraints.len() {
        return false;
    }
    if !lp
        .constraints
        .iter()
        .zip(y)
        .all(|(c, yi)| dual_sign_ok(c.relation, yi, lp.sense))
    {
        return false;
    }
    let ya = transpose_dot(lp, y);
    lp.vars
        .iter()
        .zip(ya.iter().zip(&lp.objective))
        .all(|(kind, (lhs, cj))| match (kind, lp.sense) {
            (VarKind::Free, _) => lhs == cj,
            (VarKind::NonNegative, Sense::Minimize) => lhs <= cj,
            (VarKind::NonNegative, Sense::Maximize) => lhs >= cj,
        })
}

fn farkas_ok(lp: &LinearProgram, y: &[Rational]) -> bool {
    if y.len() != lp.constraints.len() {
        return false;
    }
    let signs = lp
        .constraints
        .iter()
        .zip(y)
        .all(|(c, yi)| dual_sign_ok(c.relation, yi, Sense::Minimize));
    let ya = transpose_dot(lp, y);
    let columns = lp.vars.iter().zip(&ya).all(|(kind, v)| match kind {
        VarKind::Free => v.is_zero(),
        VarKind::NonNegative => !v.is_positive(),
    });
    let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
    signs && columns && dot(&rhs, y).is_positive()
}

fn ray_ok(lp: &LinearProgram, d: &[Rational]) -> bool {
    if d.len() != lp.num_vars() {
        return false;
    }
    let cones = lp
        .vars
        .iter()
        .zip(d)
        .all(|(k, v)| *k == VarKind::Free || !v.is_negative());
    let recession = lp.constraints.iter().all(|c| {
        let lhs = dot(&c.coeffs, d);
        match c.relation {
            Relation::Le => !lhs.is_positive(),
            Relation::Eq => lhs.is_zero(),
            Relation::Ge => !lhs.is_negative(),
        }
    });
    let gain = dot(&lp.objective, d);
    let improves = match lp.sense {
        Sense::Minimize => gain.is_negative(),
        Sense::Maximize => gain.is_positive(),
    };
    cones && recession && improves
}

/// Checks the certificates embedded in `outcome` against `lp` exactly.
///
/// An optimum needs a feasible primal point, a feasible dual point and equal
/// objective values (which forces complementary slackness). Infeasibility
/// needs a Farkas vector; unboundedness a feasible point plus an improving
/// recession ray.
pub fn verify_certificate(lp: &LinearProgram, outcome: &LpOutcome) -> bool {
    if !lp.is_well_formed() {
        return false;
    }
    match outcome {
        LpOutcome::Optimal {
            value,
            primal,
            dual,
        } => {
            let rhs: Vec<Rational> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
            satisfies(lp, primal)
                && dual_feasible(lp, dual)
                && dot(&lp.objective, primal) == *value
                && dot(&rhs, dual) == *value
        }
        LpOutcome::Infeasible { farkas } => farkas_ok(lp, farkas),
        LpOutcome::Unbounded { point, ray } => satisfies(lp, point) && ray_ok(lp, ray),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::solve_lp;
    use crate::rational::int;

    fn hedge_lp() -> LinearProgram {
        LinearProgram::new(
            Sense::Minimize,
            vec![int(1), int(0)],
            vec![VarKind::Free; 2],
        )
        .with(vec![int(1), int(1)], Relation::Ge, int(1))
        .with(vec![int(1), int(-1)], Relation::Ge, int(1))
    }

    #[test]
    fn perturbed_value_is_rejected() {
        let lp = hedge_lp();
        let out = solve_lp(&lp);
        assert!(verify_certificate(&lp, &out));
        let LpOutcome::Optimal {
            value,
            primal,
            dual,
        } = out
        else {
            panic!("expected optimum");
        };
        let bumped = LpOutcome::Optimal {
            value: value + int(1),
            primal,
            dual,
        };
        assert!(!verify_certificate(&lp, &bumped));
    }

    #[test]
    fn hand_written_farkas_vector() {
        // x <= -1, x >= 1: y = (-1, 1) gives y·A = 0, y·b = 2 > 0.
        let lp = LinearProgram::new(Sense::Minimize, vec![int(0)], vec![VarKind::Free])
            .with(vec![int(1)], Relation::Le, int(-1))
            .with(vec![int(1)], Relation::Ge, int(1));
        let cert = LpOutcome::Infeasible {
            farkas: vec![int(-1), int(1)],
        };
        assert!(verify_certificate(&lp, &cert));
        let wrong = LpOutcome::Infeasible {
            farkas: vec![int(1), int(1)],
        };
        assert!(!verify_certificate(&lp, &wrong));
    }

    #[test]
    fn bogus_ray_is_rejected() {
        let lp = hedge_lp();
        let fake = LpOutcome::Unbounded {
            point: vec![int(1), int(0)],
            ray: vec![int(-1), int(0)],
        };
        assert!(!verify_certificate(&lp, &fake));
    }
}
