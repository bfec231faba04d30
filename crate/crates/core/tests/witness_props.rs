use minkowski::coapprox::CoapproxStatus;
use minkowski::generate;
use minkowski::witness::{construct_witness, construct_witness_along, find_non_diameter_chord, verify_witness};
use minkowski::{Error, Gauge, Vector};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn v(c: &[f64]) -> Vector {
    Vector::from_column_slice(c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn witnesses_are_affinely_equivariant(seed in 0u64..500, m in prop::array::uniform4(-2.0..2.0f64)) {
        let a = DMatrix::from_row_slice(2, 2, &m);
        prop_assume!(a.determinant().abs() > 0.2);
        let g = generate::asymmetric_polygon(seed).unwrap();
        let w = construct_witness(&g).unwrap();
        let u = &w.x1 - &w.x0;
        let image = g.linear_image(&a).unwrap();
        let wa = construct_witness_along(&image, &(&a * &u)).unwrap();
        let scale = 1.0 + a.norm();
        for (p, q) in [(&w.x0, &wa.x0), (&w.x1, &wa.x1), (&w.y0, &wa.y0), (&w.y1, &wa.y1)] {
            prop_assert!((&a * p - q).norm() <= 1e-7 * scale, "{} vs {}", &a * p, q);
        }
        prop_assert!((w.lambda - wa.lambda).abs() <= 1e-7);
    }

    #[test]
    fn asymmetric_polygons_yield_verified_witnesses(seed in 0u64..500) {
        let g = generate::asymmetric_polygon(seed).unwrap();
        let w = construct_witness(&g).unwrap();
        let report = verify_witness(&g, &w).unwrap();
        prop_assert!(report.passed, "{:?}", report);
        prop_assert_eq!(report.coapprox.unwrap().status, CoapproxStatus::Empty);
    }

    #[test]
    fn norms_have_no_chord(seed in 0u64..500) {
        let g = generate::symmetric_polygon(seed).unwrap();
        prop_assert_eq!(find_non_diameter_chord(&g).unwrap(), None);
        prop_assert!(matches!(construct_witness(&g), Err(Error::NotFound(_))));
    }
}

#[test]
fn euclidean_and_ellipsoid_have_no_chord() {
    for g in [
        Gauge::euclidean(2),
        Gauge::ellipsoid(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap(),
    ] {
        assert!(matches!(construct_witness(&g), Err(Error::NotFound(_))));
    }
}

#[test]
fn translated_chord_misses_the_original() {
    let g = generate::triangle();
    let w = construct_witness(&g).unwrap();
    // Interval arithmetic along the chord direction: [x0, x1] + (y1 − y0)
    // starts beyond x1.
    let e = (&w.x1 - &w.x0).normalize();
    let shift = (&w.y1 - &w.y0).dot(&e);
    let (a, b) = (w.x0.dot(&e), w.x1.dot(&e));
    assert!(a + shift > b, "{a} {b} {shift}");
    assert!((w.lambda - shift / (b - a)).abs() < 1e-12);
    assert!((g.value(&w.y0) - 1.0).abs() < 1e-12 && (g.value(&w.y1) - 1.0).abs() < 1e-12);
    assert!(w.line.contains(&v(&[0.0, 0.0]), 1e-12).unwrap());
}
