//! Seeded random gauges for tests and verification suites.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::Result;
use crate::gauge::{Gauge, Vector};
use crate::sampling;

/// The planar triangle with vertices `(1,0)`, `(0,1)`, `(−1,−1)`.
pub fn triangle() -> Gauge {
    Gauge::from_vertices(
        2,
        vec![
            Vector::from_vec(vec![1.0, 0.0]),
            Vector::from_vec(vec![0.0, 1.0]),
            Vector::from_vec(vec![-1.0, -1.0]),
        ],
    )
    .expect("triangle is a valid body")
}

/// Jittered equiangular directions; consecutive gaps stay below `π` so the
/// origin is interior.
fn jittered_angles<R: Rng>(rng: &mut R, count: usize, span: f64) -> Vec<f64> {
    let step = span / count as f64;
    (0..count)
        .map(|i| step * (i as f64 + rng.gen_range(-0.2..=0.2)))
        .collect()
}

/// Centrally symmetric polygon with 2·p vertices, `p ∈ {2,…,5}`.
pub fn symmetric_polygon(seed: u64) -> Result<Gauge> {
    let mut rng = sampling::rng(seed);
    let pairs = rng.gen_range(2..=5);
    let mut vertices = Vec::with_capacity(2 * pairs);
    for t in jittered_angles(&mut rng, pairs, PI) {
        let r = rng.gen_range(0.5..=1.5);
        let v = Vector::from_vec(vec![r * t.cos(), r * t.sin()]);
        vertices.push(-&v);
        vertices.push(v);
    }
    Gauge::from_vertices(2, vertices)
}

/// Polygon with an odd number of vertices in `{3, 5, 7}`, hence never
/// centrally symmetric.
pub fn asymmetric_polygon(seed: u64) -> Result<Gauge> {
    let mut rng = sampling::rng(seed);
    let n = [3, 5, 7][rng.gen_range(0..3)];
    let offset = rng.gen_range(0.0..2.0 * PI);
    let vertices = jittered_angles(&mut rng, n, 2.0 * PI)
        .into_iter()
        .map(|t| {
            let r = rng.gen_range(0.5..=1.5);
            Vector::from_vec(vec![r * (t + offset).cos(), r * (t + offset).sin()])
        })
        .collect();
    Gauge::from_vertices(2, vertices)
}

/// Polytope in `R³`: perturbed coordinate cross plus random points, all at
/// radii in `[0.5, 1.5]`; symmetric variants add every point's negative.
pub fn random_polytope_3d(seed: u64, symmetric: bool) -> Result<Gauge> {
    let mut rng = sampling::rng(seed);
    let mut vertices = Vec::new();
    for j in 0..3 {
        for sign in [1.0, -1.0] {
            let mut v = sampling::random_in_box(&mut rng, 3, 0.2);
            v[j] = sign;
            vertices.push(v * rng.gen_range(0.5..=1.5));
        }
    }
    for _ in 0..6 {
        vertices.push(sampling::random_unit(&mut rng, 3) * rng.gen_range(0.5..=1.5));
    }
    if symmetric {
        let negatives: Vec<Vector> = vertices.iter().map(|v| -v).collect();
        vertices.extend(negatives);
    }
    Gauge::from_vertices(3, vertices)
}

/// Seeded asymmetric polygon extended by `[−1, 1]` to `R³`.
pub fn asymmetric_prism(seed: u64) -> Result<Gauge> {
    asymmetric_polygon(seed)?.product_with_interval()
}
