use num_traits::{Signed, Zero};

use super::{LinearProgram, LpOutcome, Relation, Sense, VarKind};
use crate::rational::{one, Rational};

/// Where a standard-form column comes from.
#[derive(Debug, Clone, Copy)]
enum Column {
    /// `x_j` itself (sign-constrained) or the positive part of a free `x_j`.
    Plus(usize),
    /// Negative part of a free `x_j`.
    Minus(usize),
    Slack,
}

/// Dense tableau `B^-1 [A | I | b]` over the standard form
/// `A x = b, x >= 0, b >= 0`. The identity block holds one artificial
/// column per row; after phase 1 those columns are never entered again but
/// keep reading off `B^-1` for the dual.
struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    n_struct: usize,
    rhs_col: usize,
}

impl Tableau {
    fn art_col(&self, row: usize) -> usize {
        self.n_struct + row
    }

    fn reduced_cost(&self, costs: &[Rational], col: usize) -> Rational {
        let mut r = costs[col].clone();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if !costs[b].is_zero() && !row[col].is_zero() {
                r -= &costs[b] * &row[col];
            }
        }
        r
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let inv = self.rows[pr][pc].recip();
        for v in self.rows[pr].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[pr].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == pr || row[pc].is_zero() {
                continue;
            }
            let factor = row[pc].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        }
        self.basis[pr] = pc;
    }

    /// Bland's rule: lowest-index improving column enters; ties in the ratio
    /// test go to the lowest-index basic variable.
    fn entering(&self, costs: &[Rational]) -> Option<usize> {
        (0..self.n_struct)
            .filter(|c| !self.basis.contains(c))
            .find(|&c| self.reduced_cost(costs, c).is_negative())
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[self.rhs_col] / &row[col];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn objective(&self, costs: &[Rational]) -> Rational {
        self.rows
            .iter()
            .zip(&self.basis)
            .fold(Rational::zero(), |acc, (row, &b)| {
                acc + &costs[b] * &row[self.rhs_col]
            })
    }

    /// `c_B B^-1`, one entry per standard-form row.
    fn duals(&self, costs: &[Rational]) -> Vec<Rational> {
        (0..self.rows.len())
            .map(|k| {
                let col = self.art_col(k);
                self.rows
                    .iter()
                    .zip(&self.basis)
                    .fold(Rational::zero(), |acc, (row, &b)| {
                        if costs[b].is_zero() || row[col].is_zero() {
                            acc
                        } else {
                            acc + &costs[b] * &row[col]
                        }
                    })
            })
            .collect()
    }

    fn basic_solution(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n_struct];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n_struct {
                x[b] = row[self.rhs_col].clone();
            }
        }
        x
    }
}

enum Phase {
    Optimal,
    Unbounded(usize),
}

fn run(tab: &mut Tableau, costs: &[Rational]) -> Phase {
    while let Some(col) = tab.entering(costs) {
        match tab.leaving(col) {
            Some(row) => tab.pivot(row, col),
            None => return Phase::Unbounded(col),
        }
    }
    Phase::Optimal
}

/// Solves `lp` exactly. Deterministic for a fixed input.
pub fn solve_lp(lp: &LinearProgram) -> LpOutcome {
    assert!(lp.is_well_formed(), "malformed linear program");
    let n = lp.num_vars();
    let m = lp.constraints.len();

    let mut columns = Vec::new();
    for (j, kind) in lp.vars.iter().enumerate() {
        columns.push(Column::Plus(j));
        if *kind == VarKind::Free {
            columns.push(Column::Minus(j));
        }
    }
    let n_vars_std = columns.len();
    let mut slack_of_row = vec![None; m];
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.relation != Relation::Eq {
            slack_of_row[i] = Some(columns.len());
            columns.push(Column::Slack);
        }
    }
    let n_struct = columns.len();
    let rhs_col = n_struct + m;

    // Standard-form rows, flipped so the right-hand side is nonnegative.
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let sign = if c.rhs.is_negative() { -one() } else { one() };
        let mut row = vec![Rational::zero(); rhs_col + 1];
        for (k, col) in columns.iter().enumerate().take(n_vars_std) {
            row[k] = match *col {
                Column::Plus(j) => &c.coeffs[j] * &sign,
                Column::Minus(j) => -&c.coeffs[j] * &sign,
                Column::Slack => unreachable!(),
            };
        }
        if let Some(s) = slack_of_row[i] {
            let coef = if c.relation == Relation::Le {
                one()
            } else {
                -one()
            };
            row[s] = coef * &sign;
        }
        row[n_struct + i] = one();
        row[rhs_col] = &c.rhs * &sign;
        signs.push(sign);
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis: (n_struct..n_struct + m).collect(),
        n_struct,
        rhs_col,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![Rational::zero(); n_struct + m];
    for c in phase1.iter_mut().skip(n_struct) {
        *c = one();
    }
    if let Phase::Unbounded(_) = run(&mut tab, &phase1) {
        unreachable!("phase 1 objective is bounded below by zero");
    }
    if tab.objective(&phase1).is_positive() {
        let y = tab.duals(&phase1);
        let farkas = y.iter().zip(&signs).map(|(y, s)| y * s).collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // that cannot be cleared are redundant and keep their artificial at 0.
    for row in 0..m {
        if tab.basis[row] >= n_struct {
            if let Some(col) = (0..n_struct).find(|&c| !tab.rows[row][c].is_zero()) {
                tab.pivot(row, col);
            }
        }
    }

    let flip = match lp.sense {
        Sense::Minimize => one(),
        Sense::Maximize => -one(),
    };
    let mut costs = vec![Rational::zero(); n_struct + m];
    for (k, col) in columns.iter().enumerate() {
        costs[k] = match *col {
            Column::Plus(j) => &lp.objective[j] * &flip,
            Column::Minus(j) => -&lp.objective[j] * &flip,
            Column::Slack => Rational::zero(),
        };
    }

    let to_original = |x_std: &[Rational]| -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (k, col) in columns.iter().enumerate() {
            match *col {
                Column::Plus(j) => x[j] += &x_std[k],
                Column::Minus(j) => x[j] -= &x_std[k],
                Column::Slack => {}
            }
        }
        x
    };

    match run(&mut tab, &costs) {
        Phase::Unbounded(col) => {
            let point = to_original(&tab.basic_solution());
            let mut d = vec![Rational::zero(); n_struct];
            d[col] = one();
            for (row, &b) in tab.rows.iter().zip(&tab.basis) {
                if b < n_struct {
                    d[b] = -&row[col];
                }
            }
            LpOutcome::Unbounded {
                point,
                ray: to_original(&d),
            }
        }
        Phase::Optimal => {
            let primal = to_original(&tab.basic_solution());
            let value = crate::rational::dot(&lp.objective, &primal);
            let dual = tab
                .duals(&costs)
                .iter()
                .zip(&signs)
                .map(|(y, s)| y * s * &flip)
                .collect();
            LpOutcome::Optimal {
                value,
                primal,
                dual,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::verify_certificate;
    use crate::rational::{int, ratio};

    fn r(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn sign_constrained_minimum_is_zero() {
        let lp = LinearProgram::new(Sense::Minimize, r(&[1]), vec![VarKind::NonNegative]);
        let out = solve_lp(&lp);
        assert_eq!(out.value(), Some(&int(0)));
        assert!(verify_certificate(&lp, &out));
    }

    #[test]
    fn two_sided_hedge_program() {
        // min V s.t. V+H >= 1, V-H >= 1, V >= 0
        let lp = LinearProgram::new(Sense::Minimize, r(&[1, 0]), vec![VarKind::Free; 2])
            .with(r(&[1, 1]), Relation::Ge, int(1))
            .with(r(&[1, -1]), Relation::Ge, int(1))
            .with(r(&[1, 0]), Relation::Ge, int(0));
        let out = solve_lp(&lp);
        match &out {
            LpOutcome::Optimal { value, primal, .. } => {
                assert_eq!(value, &int(1));
                assert_eq!(primal, &r(&[1, 0]));
            }
            other => panic!("expected optimum, got {other:?}"),
        }
        assert!(verify_certificate(&lp, &out));
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let lp = LinearProgram::new(Sense::Minimize, r(&[0]), vec![VarKind::Free])
            .with(r(&[1]), Relation::Le, int(-1))
            .with(r(&[1]), Relation::Ge, int(1));
        let out = solve_lp(&lp);
        assert!(matches!(out, LpOutcome::Infeasible { .. }));
        assert!(verify_certificate(&lp, &out));
    }

    #[test]
    fn free_maximum_is_unbounded() {
        let lp = LinearProgram::new(Sense::Maximize, r(&[1]), vec![VarKind::Free]);
        let out = solve_lp(&lp);
        assert!(matches!(out, LpOutcome::Unbounded { .. }));
        assert!(verify_certificate(&lp, &out));
    }

    #[test]
    fn maximization_dual_signs() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> 14/5
        let lp = LinearProgram::new(Sense::Maximize, r(&[1, 1]), vec![VarKind::NonNegative; 2])
            .with(r(&[1, 2]), Relation::Le, int(4))
            .with(r(&[3, 1]), Relation::Le, int(6));
        let out = solve_lp(&lp);
        assert_eq!(out.value(), Some(&ratio(14, 5)));
        assert!(verify_certificate(&lp, &out));
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(Sense::Minimize, r(&[1, 1]), vec![VarKind::NonNegative; 2])
            .with(r(&[1, 1]), Relation::Eq, int(2))
            .with(r(&[2, 2]), Relation::Eq, int(4));
        let out = solve_lp(&lp);
        assert_eq!(out.value(), Some(&int(2)));
        assert!(verify_certificate(&lp, &out));
    }
}
