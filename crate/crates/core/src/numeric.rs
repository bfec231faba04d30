//! Scalar search helpers and compensated summation.

use nalgebra::DVector;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal `f` on `[a, b]`; returns the
/// argmin and its value.
pub fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if (b - a).abs() <= tol * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Golden-section maximization, see [`golden_min`].
pub fn golden_max<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_min(&|t| -f(t), a, b, tol);
    (x, -v)
}

/// Compass search maximizing `f` over unit vectors, starting at `start`.
pub fn pattern_search_sphere<F: Fn(&DVector<f64>) -> f64>(
    f: &F,
    start: DVector<f64>,
    step: f64,
    min_step: f64,
) -> (DVector<f64>, f64) {
    let d = start.len();
    let mut u = start.normalize();
    let mut best = f(&u);
    let mut h = step;
    while h > min_step {
        let mut improved = false;
        for i in 0..d {
            for s in [h, -h] {
                let mut w = u.clone();
                w[i] += s;
                let w = w.normalize();
                let val = f(&w);
                if val > best {
                    best = val;
                    u = w;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (u, best)
}

/// Compass search minimizing `f` over `R^k` from `start`.
pub fn compass_min<F: Fn(&DVector<f64>) -> f64>(
    f: &F,
    start: DVector<f64>,
    step: f64,
    min_step: f64,
    max_evals: usize,
) -> (DVector<f64>, f64) {
    let k = start.len();
    let mut x = start;
    let mut best = f(&x);
    let mut h = step;
    let mut evals = 1;
    while h > min_step && evals < max_evals {
        let mut improved = false;
        for i in 0..k {
            for s in [h, -h] {
                let mut w = x.clone();
                w[i] += s;
                let val = f(&w);
                evals += 1;
                if val < best {
                    best = val;
                    x = w;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, best)
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_vertex() {
        let (x, v) = golden_min(&|t: f64| (t - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let vals = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(compensated_sum(vals), 2e-16);
    }

    #[test]
    fn sphere_search_finds_max_coordinate() {
        let (u, v) = pattern_search_sphere(
            &|u: &DVector<f64>| u[0] + 2.0 * u[1],
            DVector::from_vec(vec![1.0, 0.0]),
            0.1,
            1e-12,
        );
        assert!((v - 5f64.sqrt()).abs() < 1e-9, "{u}");
    }
}
