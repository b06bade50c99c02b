//! Fourier–Motzkin elimination as a slow, independent optimum oracle.
//!
//! The objective is introduced as an extra variable `t = c·x`; every
//! original variable is then eliminated, leaving bounds on `t` alone.
//! Projection of a rational polyhedron is exact, so the surviving bounds
//! give the optimal value (or the infeasible/unbounded verdict) directly.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{ExtValue, LinearProgram, LpError, Relation, Sense, VarKind};
use crate::rational::{one, Rational};

pub const FM_MAX_VARIABLES: usize = 8;
pub const FM_MAX_CONSTRAINTS: usize = 200_000;

/// `coeffs · (x, t) <= rhs`
type Row = (Vec<Rational>, Rational);

/// Scales a row so its first nonzero coefficient has absolute value one.
fn normalize((coeffs, rhs): Row) -> Row {
    match coeffs.iter().find(|c| !c.is_zero()) {
        None => (coeffs, rhs),
        Some(lead) => {
            let s = lead.abs().recip();
            (coeffs.iter().map(|c| c * &s).collect(), rhs * s)
        }
    }
}

/// Indices of the input rows a derived row combines, as a bitset.
type History = Vec<u64>;

fn singleton(index: usize, words: usize) -> History {
    let mut h = vec![0; words];
    h[index / 64] |= 1 << (index % 64);
    h
}

fn union(a: &History, b: &History) -> History {
    a.iter().zip(b).map(|(x, y)| x | y).collect()
}

fn weight(h: &History) -> u32 {
    h.iter().map(|w| w.count_ones()).sum()
}

enum Insert {
    Ok,
    Contradiction,
}

/// Adds a row, keeping the smaller history when it is already present.
fn insert(set: &mut BTreeMap<Row, History>, row: Row, history: History) -> Insert {
    if row.0.iter().all(Zero::is_zero) {
        return if row.1.is_negative() {
            Insert::Contradiction
        } else {
            Insert::Ok
        };
    }
    let row = normalize(row);
    match set.get(&row) {
        Some(old) if weight(old) <= weight(&history) => {}
        _ => {
            set.insert(row, history);
        }
    }
    Insert::Ok
}

/// Exact optimal value of `lp` by Fourier–Motzkin elimination.
///
/// Rows combining more than `k + 1` input rows after `k` eliminations are
/// implied by the others and dropped (Chernikov's rule).
pub fn fm_value(lp: &LinearProgram) -> Result<ExtValue, LpError> {
    if !lp.is_well_formed() {
        return Err(LpError::Malformed);
    }
    let n = lp.num_vars();
    if n > FM_MAX_VARIABLES {
        return Err(LpError::TooManyVariables {
            got: n,
            max: FM_MAX_VARIABLES,
        });
    }
    let width = n + 1;
    let mut input: Vec<Row> = Vec::new();
    let widen = |c: &[Rational]| -> Vec<Rational> {
        let mut v = c.to_vec();
        v.push(Rational::zero());
        v
    };
    for c in &lp.constraints {
        let a = widen(&c.coeffs);
        let neg: Vec<Rational> = a.iter().map(|v| -v).collect();
        match c.relation {
            Relation::Le => input.push((a, c.rhs.clone())),
            Relation::Ge => input.push((neg, -&c.rhs)),
            Relation::Eq => {
                input.push((a, c.rhs.clone()));
                input.push((neg, -&c.rhs));
            }
        }
    }
    for (j, kind) in lp.vars.iter().enumerate() {
        if *kind == VarKind::NonNegative {
            let mut a = vec![Rational::zero(); width];
            a[j] = -one();
            input.push((a, Rational::zero()));
        }
    }
    // t - c·x <= 0 and c·x - t <= 0
    let mut obj: Vec<Rational> = lp.objective.iter().map(|c| -c).collect();
    obj.push(one());
    let neg_obj: Vec<Rational> = obj.iter().map(|v| -v).collect();
    input.push((obj, Rational::zero()));
    input.push((neg_obj, Rational::zero()));

    let words = input.len().div_ceil(64);
    let mut rows: BTreeMap<Row, History> = BTreeMap::new();
    for (i, row) in input.into_iter().enumerate() {
        if let Insert::Contradiction = insert(&mut rows, row, singleton(i, words)) {
            return Ok(ExtValue::Infeasible);
        }
    }

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut eliminated = 0u32;
    while !remaining.is_empty() {
        // Eliminate the variable producing the fewest new rows.
        let (pos_in_remaining, var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let p = rows.keys().filter(|r| r.0[v].is_positive()).count();
                let q = rows.keys().filter(|r| r.0[v].is_negative()).count();
                (p * q, v)
            })
            .map(|(i, &v)| (i, v))
            .expect("nonempty");
        remaining.remove(pos_in_remaining);
        eliminated += 1;

        let (mut upper, mut lower, mut rest) = (Vec::new(), Vec::new(), BTreeMap::new());
        for (row, history) in std::mem::take(&mut rows) {
            if row.0[var].is_positive() {
                upper.push((row, history));
            } else if row.0[var].is_negative() {
                lower.push((row, history));
            } else {
                rest.insert(row, history);
            }
        }
        for ((ua, ub), uh) in &upper {
            for ((la, lb), lh) in &lower {
                let history = union(uh, lh);
                if weight(&history) > eliminated + 1 {
                    continue;
                }
                let su = ua[var].clone();
                let sl = -&la[var];
                let coeffs: Vec<Rational> =
                    ua.iter().zip(la).map(|(u, l)| u * &sl + l * &su).collect();
                let rhs = ub * &sl + lb * &su;
                if let Insert::Contradiction = insert(&mut rest, (coeffs, rhs), history) {
                    return Ok(ExtValue::Infeasible);
                }
                if rest.len() > FM_MAX_CONSTRAINTS {
                    return Err(LpError::ConstraintBlowup(FM_MAX_CONSTRAINTS));
                }
            }
        }
        rows = rest;
    }

    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for (coeffs, rhs) in rows.keys() {
        let a = &coeffs[n];
        let bound = rhs / a;
        if a.is_positive() {
            if hi.as_ref().is_none_or(|h| bound < *h) {
                hi = Some(bound);
            }
        } else if lo.as_ref().is_none_or(|l| bound > *l) {
            lo = Some(bound);
        }
    }
    if let (Some(l), Some(h)) = (&lo, &hi) {
        if l > h {
            return Ok(ExtValue::Infeasible);
        }
    }
    Ok(match lp.sense {
        Sense::Minimize => lo.map_or(ExtValue::NegInfinity, ExtValue::Finite),
        Sense::Maximize => hi.map_or(ExtValue::PosInfinity, ExtValue::Finite),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn single_lower_bound() {
        let lp = LinearProgram::new(Sense::Minimize, vec![int(1)], vec![VarKind::Free]).with(
            vec![int(1)],
            Relation::Ge,
            int(3),
        );
        assert_eq!(fm_value(&lp).unwrap(), ExtValue::Finite(int(3)));
    }

    #[test]
    fn hedge_program_by_elimination() {
        let lp = LinearProgram::new(
            Sense::Minimize,
            vec![int(1), int(0)],
            vec![VarKind::Free; 2],
        )
        .with(vec![int(1), int(1)], Relation::Ge, int(1))
        .with(vec![int(1), int(-1)], Relation::Ge, int(1))
        .with(vec![int(1), int(0)], Relation::Ge, int(0));
        assert_eq!(fm_value(&lp).unwrap(), ExtValue::Finite(int(1)));
    }

    #[test]
    fn free_maximum_is_infinite() {
        let lp = LinearProgram::new(Sense::Maximize, vec![int(1)], vec![VarKind::Free]);
        assert_eq!(fm_value(&lp).unwrap(), ExtValue::PosInfinity);
    }

    #[test]
    fn contradiction_detected() {
        let lp = LinearProgram::new(Sense::Minimize, vec![int(0)], vec![VarKind::Free])
            .with(vec![int(1)], Relation::Le, int(-1))
            .with(vec![int(1)], Relation::Ge, int(1));
        assert_eq!(fm_value(&lp).unwrap(), ExtValue::Infeasible);
    }

    #[test]
    fn guard_rejects_nine_variables() {
        let lp = LinearProgram::new(Sense::Minimize, vec![int(0); 9], vec![VarKind::Free; 9]);
        assert_eq!(
            fm_value(&lp),
            Err(LpError::TooManyVariables { got: 9, max: 8 })
        );
    }
}
