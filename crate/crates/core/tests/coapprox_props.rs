use minkowski::coapprox::{audit, best_approx, coapprox_solve, violation, CoapproxStatus, SearchBudget};
use minkowski::generate;
use minkowski::{Flat, Gauge, Vector};
use nalgebra::DMatrix;
use proptest::prelude::*;

const TOL: f64 = 1e-6;

fn v(c: &[f64]) -> Vector {
    Vector::from_column_slice(c)
}

fn vec2(r: f64) -> impl Strategy<Value = Vector> {
    prop::array::uniform2(-r..r).prop_map(|a| v(&a))
}

fn line2() -> impl Strategy<Value = Flat> {
    (vec2(2.0), 0.0..std::f64::consts::PI)
        .prop_map(|(b, t)| Flat::new(b, vec![v(&[t.cos(), t.sin()])]).unwrap())
}

/// `sup_z γ(x − z) − γ(y − z)` over a dense parameter grid on the line plus
/// far points.
fn dense_violation(g: &Gauge, k: &Flat, y: &Vector, x: &Vector) -> f64 {
    let far = [-1e4, -1e3, 1e3, 1e4];
    (-5000..=5000)
        .map(|i| i as f64 * 0.01)
        .chain(far)
        .map(|t| {
            let z = k.point(&v(&[t]));
            g.value(&(x - &z)) - g.value(&(y - &z))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polytope_violation_matches_dense_oracle(seed in 0u64..500, k in line2(), y in vec2(3.0), s in -3.0..3.0f64) {
        let g = generate::asymmetric_polygon(seed).unwrap();
        let x = k.point(&v(&[s]));
        let (value, _) = violation(&g, &k, &y, &x, SearchBudget::default()).unwrap();
        let oracle = dense_violation(&g, &k, &y, &x);
        prop_assert!(value >= oracle - 1e-10, "{value} < {oracle}");
        prop_assert!(value <= oracle + 0.02 * g.lipschitz(), "{value} > {oracle}");
    }

    #[test]
    fn translation_invariance(seed in 0u64..500, k in line2(), y in vec2(3.0), shift in vec2(5.0)) {
        let g = generate::asymmetric_polygon(seed).unwrap();
        let b = SearchBudget::default();
        let a = coapprox_solve(&g, &k, &y, TOL, b).unwrap();
        let t = coapprox_solve(&g, &k.translate(&shift).unwrap(), &(&y + &shift), TOL, b).unwrap();
        prop_assert_eq!(a.status, t.status);
        if let (Some(wa), Some(wt)) = (&a.witness, &t.witness) {
            prop_assert!((wa + &shift - wt).norm() <= 1e-8, "{} vs {}", wa, wt);
        }
    }

    #[test]
    fn violation_is_convex_along_the_line(seed in 0u64..500, k in line2(), y in vec2(3.0),
                                          s1 in -4.0..4.0f64, s2 in -4.0..4.0f64, theta in 0.0..1.0f64) {
        let g = generate::asymmetric_polygon(seed).unwrap();
        let b = SearchBudget::default();
        let at = |s: f64| violation(&g, &k, &y, &k.point(&v(&[s])), b).unwrap().0;
        let mid = at(theta * s1 + (1.0 - theta) * s2);
        prop_assert!(mid <= theta * at(s1) + (1.0 - theta) * at(s2) + 1e-8);
    }

    #[test]
    fn symmetric_lines_are_coproximinal_and_audited(seed in 0u64..500, k in line2(), y in vec2(3.0)) {
        let g = generate::symmetric_polygon(seed).unwrap();
        let r = coapprox_solve(&g, &k, &y, TOL, SearchBudget::default()).unwrap();
        prop_assert_eq!(r.status, CoapproxStatus::NonEmpty);
        let w = r.witness.unwrap();
        prop_assert!(k.contains(&w, 1e-9).unwrap());
        prop_assert!(audit(&g, &k, &y, &w, 4000, seed).unwrap() <= TOL);
        prop_assert!(dense_violation(&g, &k, &y, &w) <= TOL);
    }

    #[test]
    fn planar_problems_embed_in_the_prism(seed in 0u64..500, k in line2(), y in vec2(3.0)) {
        let base = generate::asymmetric_polygon(seed).unwrap();
        let prism = base.product_with_interval().unwrap();
        let lift = |p: &Vector| v(&[p[0], p[1], 0.0]);
        let k3 = Flat::new(lift(k.base()), vec![lift(&k.directions()[0])]).unwrap();
        let b = SearchBudget::default();
        let flat = coapprox_solve(&base, &k, &y, TOL, b).unwrap();
        let lifted = coapprox_solve(&prism, &k3, &lift(&y), TOL, b).unwrap();
        prop_assert_eq!(flat.status, lifted.status);
        prop_assert!((flat.violation - lifted.violation).abs() <= 1e-9);
    }

    #[test]
    fn best_approx_beats_dense_search(seed in 0u64..500, k in line2(), y in vec2(3.0)) {
        let g = generate::asymmetric_polygon(seed).unwrap();
        let (x, d) = best_approx(&g, &k, &y).unwrap();
        prop_assert!(k.contains(&x, 1e-9).unwrap());
        prop_assert!((g.value(&(&x - &y)) - d).abs() <= 1e-9);
        let dense = (-2000..=2000)
            .map(|i| g.value(&(k.point(&v(&[i as f64 * 0.005])) - &y)))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(d <= dense + 1e-12);
    }

    #[test]
    fn inner_product_witness_is_the_projection(k in line2(), y in vec2(3.0), a in 0.5..3.0f64, c in -0.4..0.4f64) {
        let m = DMatrix::from_row_slice(2, 2, &[a, c, c, 1.0]);
        let g = Gauge::ellipsoid(m.clone()).unwrap();
        // Oracle: the 1D normal equation ⟨y − p − t q, q⟩_M = 0.
        let q = &k.directions()[0];
        let t = (q.transpose() * &m * (&y - k.base()))[0] / (q.transpose() * &m * q)[0];
        let foot = k.base() + q * t;
        let r = coapprox_solve(&g, &k, &y, TOL, SearchBudget::default()).unwrap();
        prop_assert_eq!(r.status, CoapproxStatus::NonEmpty);
        prop_assert!((r.witness.unwrap() - foot).norm() <= 1e-6);
    }
}

#[test]
fn triangle_witness_line_is_certified_empty() {
    let g = generate::triangle();
    let w = minkowski::witness::construct_witness(&g).unwrap();
    let r = coapprox_solve(&g, &w.line, &w.target, TOL, SearchBudget::default()).unwrap();
    assert_eq!(r.status, CoapproxStatus::Empty);
    let lower = r.lower_bound.unwrap();
    // Any point of the line violates by at least the certified bound.
    for i in -50..=50 {
        let x = w.line.point(&v(&[i as f64 * 0.1]));
        assert!(dense_violation(&g, &w.line, &w.target, &x) >= lower - 1e-9);
    }
}

#[test]
fn point_on_the_flat_is_its_own_coapproximation() {
    let g = generate::triangle();
    let k = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 2.0])]).unwrap();
    let y = v(&[0.5, 1.0]);
    let r = coapprox_solve(&g, &k, &y, TOL, SearchBudget::default()).unwrap();
    assert_eq!(r.status, CoapproxStatus::NonEmpty);
    assert_eq!(r.witness.unwrap(), y);
}

#[test]
fn projection_example_in_the_plane() {
    let e = Gauge::euclidean(2);
    let k = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
    let y = v(&[3.0, 4.0]);
    let r = coapprox_solve(&e, &k, &y, TOL, SearchBudget::default()).unwrap();
    assert!((r.witness.unwrap() - v(&[3.0, 0.0])).norm() <= 1e-6);
    let b = SearchBudget::default();
    assert!(violation(&e, &k, &y, &v(&[3.01, 0.0]), b).unwrap().0 > 0.0);
}
