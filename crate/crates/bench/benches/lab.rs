use chaoslab::cipher::{decrypt, encrypt, encrypt_image, keystream};
use chaoslab::lyapunov::lyapunov_logistic;
use chaoslab::maps::TorusMap;
use chaoslab::period::{check_period_bounds, period_matrix_power};
use chaoslab::{attack, fixtures};
use chaoslab_bench::{bench_params, bench_text};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::rngs::StdRng;
use rand::SeedableRng;
use std::hint::black_box;

fn bench_cipher(c: &mut Criterion) {
    let params = bench_params();
    let text = bench_text(1024);

    c.bench_function("encrypt_text_1k", |b| {
        let mut rng = StdRng::seed_from_u64(1);
        b.iter(|| encrypt(black_box(&text), &params, &mut rng).unwrap())
    });

    let block = encrypt(&text, &params, &mut StdRng::seed_from_u64(2)).unwrap();
    c.bench_function("decrypt_text_1k", |b| {
        b.iter(|| decrypt(black_box(&block), &params).unwrap())
    });

    c.bench_function("keystream_2025_words", |b| {
        b.iter(|| keystream(black_box(&params), 45))
    });

    let img = fixtures::photo_like(64, 9);
    c.bench_function("encrypt_image_64", |b| {
        b.iter(|| encrypt_image(black_box(&img), &params).unwrap())
    });

    let map = TorusMap::classical(64).unwrap();
    c.bench_function("scramble_64_k7", |b| {
        b.iter(|| map.scramble(black_box(&img), 7).unwrap())
    });
}

fn bench_analysis(c: &mut Criterion) {
    c.bench_function("period_classical_499", |b| {
        let map = TorusMap::classical(499).unwrap();
        b.iter(|| period_matrix_power(black_box(&map)).unwrap())
    });

    c.bench_function("bound_table_300", |b| {
        b.iter(|| check_period_bounds(black_box(300)))
    });

    c.bench_function("lyapunov_point_1e5", |b| {
        b.iter(|| lyapunov_logistic(black_box(3.9), 0.2, 1000, 100_000).unwrap())
    });

    let original = fixtures::gradient(64);
    let map = TorusMap::classical(64).unwrap();
    let scrambled = map.scramble(&original, 7).unwrap();
    c.bench_function("attack_gradient_64", |b| {
        b.iter(|| {
            attack::brute_force_unscramble(
                black_box(&scrambled),
                attack::default_budget(64),
                Some(&original),
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, bench_cipher, bench_analysis);
criterion_main!(benches);
