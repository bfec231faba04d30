use minkowski::{Flat, LinearFunctional, Vector};
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vector> {
    prop::array::uniform3(-5.0..5.0f64).prop_map(|a| Vector::from_column_slice(&a))
}

fn flat3() -> impl Strategy<Value = Flat> {
    (vec3(), prop::collection::vec(vec3(), 1..3))
        .prop_filter_map("rank deficient", |(b, dirs)| Flat::new(b, dirs).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projection_residual_is_orthogonal(k in flat3(), y in vec3()) {
        let p = k.project(&y).unwrap();
        for d in k.directions() {
            prop_assert!((&y - &p).dot(d).abs() <= 1e-10 * (1.0 + d.norm() * y.norm()));
        }
    }

    #[test]
    fn projection_is_idempotent(k in flat3(), y in vec3()) {
        let p = k.project(&y).unwrap();
        let pp = k.project(&p).unwrap();
        prop_assert!((&p - &pp).norm() <= 1e-12 * (1.0 + p.norm()));
        prop_assert!(k.contains(&p, 1e-10).unwrap());
    }

    #[test]
    fn coordinates_round_trip(k in flat3(), t in prop::array::uniform2(-5.0..5.0f64)) {
        let t = Vector::from_column_slice(&t[..k.rank()]);
        let back = k.coords(&k.point(&t));
        prop_assert!((back - t).norm() <= 1e-12 * 10.0);
    }

    #[test]
    fn level_sets_round_trip(c in vec3(), level in -3.0..3.0f64) {
        prop_assume!(c.norm() > 1e-3);
        let f = LinearFunctional::new(c.clone());
        let h = Flat::level_set(&f, level).unwrap();
        prop_assert_eq!(h.rank(), 2);
        for x in h.sample(2.0, 9, 0).unwrap() {
            prop_assert!((f.apply(&x) - level).abs() <= 1e-10 * (1.0 + c.norm()));
        }
        let (g, l) = h.as_level_set().unwrap();
        let x = h.point(&Vector::from_vec(vec![0.7, -1.1]));
        prop_assert!((g.apply(&x) - l).abs() <= 1e-10);
    }

    #[test]
    fn translation_moves_every_point(k in flat3(), v in vec3(), y in vec3()) {
        let moved = k.translate(&v).unwrap();
        let a = k.project(&y).unwrap() + &v;
        let b = moved.project(&(&y + &v)).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + y.norm() + v.norm()));
    }
}

#[test]
fn samples_are_deterministic_and_cover_the_lattice() {
    let k = Flat::new(Vector::zeros(2), vec![Vector::from_vec(vec![2.0, 0.0])]).unwrap();
    let s = k.sample(1.0, 3, 7).unwrap();
    assert_eq!(s, k.sample(1.0, 3, 7).unwrap());
    let xs: Vec<f64> = s.iter().map(|p| p[0]).collect();
    assert_eq!(xs, vec![-1.0, 0.0, 1.0]);
    assert_eq!(k.sample(1.0, 1, 0).unwrap(), vec![Vector::zeros(2)]);
}

#[test]
fn dependent_directions_are_rejected() {
    let d = Vector::from_vec(vec![1.0, 2.0, 3.0]);
    assert!(Flat::new(Vector::zeros(3), vec![d.clone(), &d * 2.0]).is_err());
}
