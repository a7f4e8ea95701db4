#![allow(dead_code)]

use std::f64::consts::PI;

use admiss_core::{AtomicMeasure, DiagonalSystem};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Half opening angle of the random sectorial systems.
pub const SECTOR: f64 = PI / 6.0;

/// Shape of a random sectorial system: `|λ_k| ~ k^s` and `|b_k|² ~ k^tau`.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub s: f64,
    pub tau: f64,
}

/// Seeded sectorial system with `q = 2` and 10 to 200 modes. Even seeds
/// carry masses that keep every weighted criterion bounded, odd seeds masses
/// that make every one of them diverge.
pub fn sectorial_system(seed: u64) -> (DiagonalSystem, Shape) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = rng.gen_range(10..=200usize);
    let shape = if seed % 2 == 0 {
        Shape { s: rng.gen_range(2.0..3.0), tau: -1.0 }
    } else {
        Shape { s: rng.gen_range(1.0..1.5), tau: 2.0 }
    };
    let mut eig = Vec::with_capacity(modes);
    let mut coeffs = Vec::with_capacity(modes);
    for k in 1..=modes {
        let r = (k as f64).powf(shape.s) * rng.gen_range(0.9..1.1);
        let phi = rng.gen_range(-SECTOR..SECTOR);
        eig.push(-Complex64::from_polar(r, phi));
        let arg = rng.gen_range(0.0..2.0 * PI);
        coeffs.push(Complex64::from_polar((k as f64).powf(shape.tau / 2.0), arg));
    }
    (DiagonalSystem::new(eig, coeffs, 2.0).unwrap(), shape)
}

/// Random atomic measure in the open right half-plane with at most `max_atoms` atoms.
pub fn random_measure(seed: u64, max_atoms: usize) -> AtomicMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_atoms);
    AtomicMeasure::from_pairs((0..n).map(|_| {
        let x = rng.gen_range(-6.0f64..6.0).exp2();
        let y = rng.gen_range(-50.0..50.0);
        (Complex64::new(x, y), rng.gen_range(0.01..10.0))
    }))
    .unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}
