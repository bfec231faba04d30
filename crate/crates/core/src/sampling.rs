//! Deterministic direction samples and seeded random helpers.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic unit directions: 720 equiangular in the plane, 2000
/// Fibonacci-sphere points in 3D, seeded Gaussian directions otherwise.
pub fn unit_directions(dim: usize) -> Vec<DVector<f64>> {
    match dim {
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => circle_directions(720),
        3 => fibonacci_sphere(2000),
        _ => {
            let mut r = rng(0x5eed);
            (0..2000).map(|_| random_unit(&mut r, dim)).collect()
        }
    }
}

pub fn circle_directions(count: usize) -> Vec<DVector<f64>> {
    (0..count)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / count as f64;
            DVector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect()
}

pub fn fibonacci_sphere(count: usize) -> Vec<DVector<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            DVector::from_vec(vec![r * t.cos(), r * t.sin(), z])
        })
        .collect()
}

pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| standard_normal(rng));
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

pub fn random_in_box<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-half_width..=half_width))
}
