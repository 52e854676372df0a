use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use dessin_forge::counting::{goupil_connection, n_count};
use dessin_forge::search::table_fixtures;
use dessin_forge::{canonical_form, enumerate_dessins, CycleType, Dessin, EnumConfig, GroupHandle, Passport, Permutation};

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for text in ["[6,3^2,6]", "[3^4,3^4,3^4]", "[2^7,7^2,14]"] {
        let p: Passport = text.parse().unwrap();
        g.bench_function(text, |b| b.iter(|| enumerate_dessins(black_box(&p), &EnumConfig { guard: 14 }).unwrap()));
    }
    g.finish();
}

fn schreier_sims(c: &mut Criterion) {
    let rows = table_fixtures();
    let row = rows.iter().max_by_key(|r| r.degree()).unwrap();
    let gens = [Permutation::standard_cycle(row.degree()), row.y.clone()];
    c.bench_function(&format!("group order n={}", row.degree()), |b| {
        b.iter(|| GroupHandle::new(black_box(&gens)).unwrap().order().clone())
    });
}

fn counting(c: &mut Criterion) {
    let full = CycleType::uniform(40, 1);
    let pairs = CycleType::uniform(2, 20);
    c.bench_function("goupil (40) x (2^20)", |b| b.iter(|| goupil_connection(black_box(&full), black_box(&pairs))));
    c.bench_function("N(3, 12)", |b| b.iter(|| n_count(black_box(3), black_box(12))));
}

fn canonical(c: &mut Criterion) {
    let d = Dessin::from_cycles(12, "(1 2 3 4 5 6 7 8 9 10 11 12)", "(1 4)(2 9)(3 6)(5 8)(7 11)(10 12)").unwrap();
    let g = Permutation::parse_cycles("(1 7 3)(2 5)(4 12 9 10)", 12).unwrap();
    let e = d.conjugate(&g).unwrap();
    c.bench_function("canonical form n=12", |b| b.iter(|| canonical_form(black_box(&e))));
}

criterion_group!(benches, enumeration, schreier_sims, counting, canonical);
criterion_main!(benches);
