//! Benchmark-only crate; the suites live in `benches/lab.rs`.
//!
//! Shared inputs are defined here so benchmarks measure the operations,
//! not fixture construction.

use chaoslab::cipher::PlainText;
use chaoslab::key::{CipherParams, SecretKey};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Fixed parameters for throughput runs (seeded key, screened by hand).
pub fn bench_params() -> CipherParams {
    SecretKey::parse("7625674573A1B2C3D4E51323445745FFFF7FFFFF")
        .unwrap()
        .extract()
}

/// Deterministic printable-ASCII payload of the given length.
pub fn bench_text(len: usize) -> PlainText {
    let mut rng = StdRng::seed_from_u64(0xBE);
    PlainText::from_bytes((0..len).map(|_| rng.gen_range(32..=126)).collect()).unwrap()
}
