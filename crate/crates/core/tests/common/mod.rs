//! Seeded generators shared by the integration tests.

#![allow(dead_code)]

use num_traits::Signed;
use pathwise_core::lp::{LinearProgram, Relation, Sense, VarKind};
use pathwise_core::market::{Completeness, Instance, Regime, Trajectory};
use pathwise_core::rational::{int, ratio};
use pathwise_core::{Hedger, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rational(rng: &mut ChaCha8Rng, range: i64) -> Rational {
    ratio(
        rng.gen_range(-range..=range),
        *[1, 1, 2, 3].choose(rng).unwrap(),
    )
}

/// Explicit instance of depth at most `max_depth` with at most `max_classes`
/// classes. Steps are drawn from {-2, ..., 2}; the cap `M` lies in
/// `1..=depth + 1`, so both regimes occur.
pub fn random_instance(rng: &mut ChaCha8Rng, max_depth: usize, max_classes: usize) -> Instance {
    let depth = rng.gen_range(1..=max_depth);
    let count = rng.gen_range(1..=max_classes);
    let classes = (0..count)
        .map(|_| {
            let stop = rng.gen_range(0..=depth);
            let mut values = vec![int(4)];
            for _ in 0..stop {
                let last = values.last().unwrap().clone();
                values.push(last + int(rng.gen_range(-2..=2)));
            }
            (None, Trajectory::from_path(values).unwrap())
        })
        .collect();
    let m = rng.gen_range(1..=depth + 1);
    Instance::from_classes(
        int(4),
        classes,
        Regime::new(1, m).unwrap(),
        Vec::new(),
        Completeness::Complete,
    )
    .unwrap()
}

pub fn random_payoff(rng: &mut ChaCha8Rng, classes: usize, range: i64) -> Vec<Rational> {
    (0..classes).map(|_| small_rational(rng, range)).collect()
}

pub fn random_positive_payoff(rng: &mut ChaCha8Rng, classes: usize, range: i64) -> Vec<Rational> {
    (0..classes)
        .map(|_| small_rational(rng, range).abs())
        .collect()
}

/// Terminal wealth of a random simple portfolio, with its endowment.
pub fn random_replicable(rng: &mut ChaCha8Rng, hedger: &Hedger) -> (Rational, Vec<Rational>) {
    let inst = hedger.instance();
    let width = 1 + hedger.trading_nodes().len();
    let x: Vec<Rational> = (0..width).map(|_| small_rational(rng, 3)).collect();
    let f = (0..inst.num_classes())
        .map(|c| pathwise_core::rational::dot(hedger.wealth_row(c), &x))
        .collect();
    (x[0].clone(), f)
}

/// Small dense program with mixed relations and variable kinds.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let sense = if rng.gen_bool(0.5) {
        Sense::Minimize
    } else {
        Sense::Maximize
    };
    let vars = (0..n)
        .map(|_| {
            if rng.gen_bool(0.7) {
                VarKind::NonNegative
            } else {
                VarKind::Free
            }
        })
        .collect();
    let objective = (0..n).map(|_| int(rng.gen_range(-4..=4))).collect();
    let mut lp = LinearProgram::new(sense, objective, vars);
    for _ in 0..m {
        let coeffs = (0..n)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    int(0)
                } else {
                    small_rational(rng, 4)
                }
            })
            .collect();
        let relation = *[Relation::Le, Relation::Le, Relation::Ge, Relation::Eq]
            .choose(rng)
            .unwrap();
        lp.constrain(coeffs, relation, int(rng.gen_range(-5..=8)));
    }
    lp
}
