use std::hint::black_box;

use approxlab::barrier::{barrier_cover, verify_distr_lemma};
use approxlab::connective::standard_basis;
use approxlab::distance::{rho_exact, CertMode, RhoBudget};
use approxlab::fusion::{enumerate_semifilters, rho_f0, PairUniverse, Universe};
use approxlab::model::gen_rs_poly_model;
use approxlab::setcover::{min_cover, Bits};
use approxlab::TruthTable;
use criterion::{criterion_group, criterion_main, Criterion};

fn distance(c: &mut Criterion) {
    let xor = TruthTable::from_u64(2, 0x6);
    let m = gen_rs_poly_model(2, 1, 1);
    let budget = RhoBudget::full(standard_basis(), 2);
    c.bench_function("rho_exact xor2 rs(2,1)", |b| {
        b.iter(|| rho_exact(black_box(&xor), &m, CertMode::Asymmetric, &budget).unwrap())
    });

    // 12 elements, 40 pseudo-random sets
    let len = 12;
    let sets: Vec<Bits> = (0..40u64)
        .map(|i| {
            let h = i.wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40;
            Bits::from_indices(len, (0..len).filter(|j| h >> j & 1 == 1))
        })
        .collect();
    let target = Bits::from_indices(len, 0..len);
    c.bench_function("min_cover 12x40", |b| b.iter(|| min_cover(len, black_box(&target), &sets, None)));
}

fn barrier(c: &mut Criterion) {
    let f = TruthTable::from_u64(2, 0x6);
    let m = gen_rs_poly_model(2, 1, 1);
    c.bench_function("verify_distr_lemma xor2", |b| b.iter(|| verify_distr_lemma(&m, black_box(&f), None).unwrap()));
    c.bench_function("barrier_cover xor2", |b| b.iter(|| barrier_cover(&m, black_box(&f)).unwrap()));
}

fn fusion(c: &mut Criterion) {
    let f = TruthTable::from_u64(3, 0x69);
    let uni = Universe::new(&f);
    c.bench_function("enumerate_semifilters xor3", |b| b.iter(|| enumerate_semifilters(black_box(&uni)).unwrap()));
    let all = enumerate_semifilters(&uni).unwrap();
    c.bench_function("rho_f0 xor3", |b| b.iter(|| rho_f0(black_box(&all), PairUniverse::All).unwrap()));
}

criterion_group!(benches, distance, barrier, fusion);
criterion_main!(benches);
