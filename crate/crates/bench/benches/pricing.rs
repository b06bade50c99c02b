use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pathwise_bench::{dense_lp, instances};
use pathwise_core::lp::solve_lp;
use pathwise_core::market::{evaluate_payoff, Payoff};
use pathwise_core::Hedger;

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_lp");
    for n in [4, 8, 16] {
        let lp = dense_lp(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &lp, |b, lp| {
            b.iter(|| solve_lp(black_box(lp)))
        });
    }
    group.finish();
}

fn sigma_bar(c: &mut Criterion) {
    let payoff = Payoff::parse("abs(S[1] - 1)").unwrap();
    let mut group = c.benchmark_group("sigma_bar");
    for (name, inst) in instances() {
        let f = evaluate_payoff(&payoff, &inst).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| Hedger::new(black_box(&inst)).sigma_bar(black_box(&f)))
        });
    }
    group.finish();
}

fn null_set(c: &mut Criterion) {
    let mut group = c.benchmark_group("null_set");
    for (name, inst) in instances() {
        group.bench_function(name, |b| {
            b.iter(|| Hedger::new(black_box(&inst)).null_set().len())
        });
    }
    group.finish();
}

criterion_group!(benches, solve, sigma_bar, null_set);
criterion_main!(benches);
