//! Compares the rayon batch strategy against the sequential fallback on the
//! crate's main sweep workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use condikit::exec::{batch_map_par, batch_map_seq};
use condikit::formula::random_formula;
use condikit::semantics::{random_model, satisfies, ModelClass, SatProfile};
use condikit::sequent::{prove, SearchBudget};
use condikit::{LogicId, Sequent};

fn prove_sweep(c: &mut Criterion) {
    let formulas: Vec<_> = (0..64).map(|s| random_formula(3, 3, true, s)).collect();
    let mut group = c.benchmark_group("prove_sweep");
    group.bench_with_input(BenchmarkId::new("seq", formulas.len()), &formulas, |b, fs| {
        b.iter(|| {
            batch_map_seq(fs.clone(), |f| {
                prove(&Sequent::goal(f), LogicId::ConstCK, SearchBudget::default())
                    .unwrap()
                    .is_proved()
            })
        })
    });
    group.bench_with_input(BenchmarkId::new("par", formulas.len()), &formulas, |b, fs| {
        b.iter(|| {
            batch_map_par(fs.clone(), |f| {
                prove(&Sequent::goal(f), LogicId::ConstCK, SearchBudget::default())
                    .unwrap()
                    .is_proved()
            })
        })
    });
    group.finish();
}

fn validity_sweep(c: &mut Criterion) {
    let models: Vec<_> = (0..64).map(|s| random_model(ModelClass::CCM, 4, s)).collect();
    let f = random_formula(4, 2, true, 7);
    let mut group = c.benchmark_group("validity_sweep");
    group.bench_with_input(BenchmarkId::new("seq", models.len()), &models, |b, ms| {
        b.iter(|| {
            batch_map_seq(ms.clone(), |m| {
                (0..m.world_count())
                    .all(|w| satisfies(&m, w, &f, SatProfile::ccm()).unwrap())
            })
        })
    });
    group.bench_with_input(BenchmarkId::new("par", models.len()), &models, |b, ms| {
        b.iter(|| {
            batch_map_par(ms.clone(), |m| {
                (0..m.world_count())
                    .all(|w| satisfies(&m, w, &f, SatProfile::ccm()).unwrap())
            })
        })
    });
    group.finish();
}

criterion_group!(benches, prove_sweep, validity_sweep);
criterion_main!(benches);
