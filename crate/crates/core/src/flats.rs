//! Affine flats `p + span{d₁, …, d_k}` and linear functionals.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gauge::Vector;
use crate::sampling;

/// Smallest admissible singular value of the column-normalized direction
/// matrix.
pub const RANK_TOL: f64 = 1e-10;

/// An affine subspace. Numerics use the orthonormal basis; the directions as
/// given are kept for serialization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlatSpec", into = "FlatSpec")]
pub struct Flat {
    base: Vector,
    directions: Vec<Vector>,
    basis: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatSpec {
    base: Vec<f64>,
    directions: Vec<Vec<f64>>,
}

impl TryFrom<FlatSpec> for Flat {
    type Error = Error;

    fn try_from(s: FlatSpec) -> Result<Self> {
        Flat::new(
            Vector::from_vec(s.base),
            s.directions.into_iter().map(Vector::from_vec).collect(),
        )
    }
}

impl From<Flat> for FlatSpec {
    fn from(f: Flat) -> Self {
        FlatSpec {
            base: f.base.as_slice().to_vec(),
            directions: f.directions.iter().map(|d| d.as_slice().to_vec()).collect(),
        }
    }
}

/// `x ↦ ⟨coeffs, x⟩`, optionally tagged with its maximum `alpha` over a unit
/// ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFunctional {
    #[serde(with = "crate::serde_vec")]
    pub coeffs: Vector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

impl LinearFunctional {
    pub fn new(coeffs: Vector) -> Self {
        Self { coeffs, alpha: None }
    }

    pub fn apply(&self, x: &Vector) -> f64 {
        self.coeffs.dot(x)
    }
}

impl Flat {
    pub fn new(base: Vector, directions: Vec<Vector>) -> Result<Self> {
        let d = base.len();
        if d == 0 {
            return Err(Error::Precondition("flat in dimension 0".into()));
        }
        if base.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("flat base"));
        }
        if directions.is_empty() {
            return Err(Error::Precondition("a flat needs at least one direction".into()));
        }
        if directions.len() > d {
            return Err(Error::RankDeficient(0.0));
        }
        for v in &directions {
            check_dim(d, v.len())?;
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite("flat direction"));
            }
            if v.norm() == 0.0 {
                return Err(Error::RankDeficient(0.0));
            }
        }
        let normalized: Vec<Vector> = directions.iter().map(|v| v.normalize()).collect();
        let m = DMatrix::from_columns(&normalized);
        let smallest = m
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if smallest <= RANK_TOL {
            return Err(Error::RankDeficient(smallest));
        }
        let basis = m.qr().q();
        Ok(Self {
            base,
            directions,
            basis,
        })
    }

    /// The line through `a` and `b`.
    pub fn line_through(a: &Vector, b: &Vector) -> Result<Self> {
        Self::new(a.clone(), vec![b - a])
    }

    /// The hyperplane `{x : f(x) = level}`.
    pub fn level_set(f: &LinearFunctional, level: f64) -> Result<Self> {
        let c = &f.coeffs;
        let n2 = c.norm_squared();
        if n2 == 0.0 {
            return Err(Error::Precondition("zero functional".into()));
        }
        let d = c.len();
        if d < 2 {
            return Err(Error::Precondition("hyperplane in dimension 1".into()));
        }
        // Orthonormal complement of c: the last d − 1 columns of a full QR of
        // [c | I].
        let mut m = DMatrix::zeros(d, d + 1);
        m.set_column(0, c);
        for i in 0..d {
            m[(i, i + 1)] = 1.0;
        }
        let q = m.qr().q();
        let dirs: Vec<Vector> = (1..d).map(|j| q.column(j).into_owned()).collect();
        Self::new(c * (level / n2), dirs)
    }

    /// For a hyperplane: a unit-norm functional `f` and the level with
    /// `self = {x : f(x) = level}`.
    pub fn as_level_set(&self) -> Result<(LinearFunctional, f64)> {
        let d = self.dim();
        if self.rank() + 1 != d {
            return Err(Error::Precondition("flat is not a hyperplane".into()));
        }
        let proj = DMatrix::identity(d, d) - &self.basis * self.basis.transpose();
        let (col, _) = proj
            .column_iter()
            .enumerate()
            .map(|(j, c)| (j, c.norm()))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let normal = proj.column(col).normalize();
        let level = normal.dot(&self.base);
        Ok((LinearFunctional::new(normal), level))
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    /// Orthonormal basis of the direction space (d × k).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `p + Q t`.
    pub fn point(&self, t: &Vector) -> Vector {
        &self.base + &self.basis * t
    }

    /// Orthonormal coordinates `Qᵀ (x − p)` of the projection of `x`.
    pub fn coords(&self, x: &Vector) -> Vector {
        self.basis.transpose() * (x - &self.base)
    }

    pub fn project(&self, y: &Vector) -> Result<Vector> {
        check_dim(self.dim(), y.len())?;
        Ok(self.point(&self.coords(y)))
    }

    pub fn distance(&self, x: &Vector) -> Result<f64> {
        Ok((x - self.project(x)?).norm())
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        Ok(self.distance(x)? <= tol)
    }

    pub fn translate(&self, v: &Vector) -> Result<Self> {
        check_dim(self.dim(), v.len())?;
        Ok(Self {
            base: &self.base + v,
            directions: self.directions.clone(),
            basis: self.basis.clone(),
        })
    }

    /// Deterministic points with orthonormal coordinates in `[−bound, bound]^k`:
    /// an inclusive lattice with `n = ⌊count^{1/k}⌋` points per axis, topped up
    /// with seeded uniform draws.
    pub fn sample(&self, bound: f64, count: usize, seed: u64) -> Result<Vec<Vector>> {
        if !(bound > 0.0) || count == 0 {
            return Err(Error::Precondition("sampling needs bound > 0 and count ≥ 1".into()));
        }
        if count == 1 {
            return Ok(vec![self.base.clone()]);
        }
        let k = self.rank();
        let mut n = 1usize;
        while (n + 1).checked_pow(k as u32).is_some_and(|p| p <= count) {
            n += 1;
        }
        let axis: Vec<f64> = if n == 1 {
            vec![0.0]
        } else {
            (0..n)
                .map(|i| -bound + 2.0 * bound * i as f64 / (n - 1) as f64)
                .collect()
        };
        let mut out = Vec::with_capacity(count);
        let total = n.pow(k as u32);
        for idx in 0..total {
            let mut rest = idx;
            let t = Vector::from_fn(k, |_, _| {
                let c = axis[rest % n];
                rest /= n;
                c
            });
            out.push(self.point(&t));
        }
        let mut rng = sampling::rng(seed);
        while out.len() < count {
            let t = Vector::from_fn(k, |_, _| rng.gen_range(-bound..=bound));
            out.push(self.point(&t));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_column_slice(c)
    }

    #[test]
    fn construction_examples() {
        let x_axis = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
        assert_eq!(x_axis.rank(), 1);
        assert!(matches!(
            Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0]), v(&[2.0, 0.0])]),
            Err(Error::RankDeficient(_))
        ));
        let diag = Flat::new(v(&[1.0, 1.0]), vec![v(&[1.0, 1.0])]).unwrap();
        assert!(diag.contains(&v(&[2.0, 2.0]), 1e-12).unwrap());
    }

    #[test]
    fn membership_examples() {
        let k = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
        assert!(k.contains(&v(&[0.0, 0.0]), 1e-9).unwrap());
        assert!(k.contains(&v(&[5.0, 1e-12]), 1e-9).unwrap());
        assert!(!k.contains(&v(&[0.0, 1.0]), 1e-9).unwrap());
    }

    #[test]
    fn sampling_examples() {
        let k = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
        let s = k.sample(1.0, 3, 9).unwrap();
        let xs: Vec<f64> = s.iter().map(|p| p[0]).collect();
        assert_eq!(xs, vec![-1.0, 0.0, 1.0]);
        assert_eq!(k.sample(2.0, 17, 5).unwrap(), k.sample(2.0, 17, 5).unwrap());
        assert_eq!(k.sample(2.0, 1, 5).unwrap(), vec![v(&[0.0, 0.0])]);
        let plane = Flat::new(v(&[0.0, 0.0, 1.0]), vec![v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0])]).unwrap();
        assert_eq!(plane.sample(1.0, 11, 0).unwrap().len(), 11);
    }

    #[test]
    fn projection_examples() {
        let k = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
        assert!((k.project(&v(&[3.0, 4.0])).unwrap() - v(&[3.0, 0.0])).norm() < 1e-15);
        let y = v(&[-2.5, 0.0]);
        assert!((k.project(&y).unwrap() - &y).norm() < 1e-15);
        let d = Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 1.0]) / 2f64.sqrt()]).unwrap();
        // Normal equation (dᵀd) t = dᵀy with d = (1, 1): t = 1/2.
        assert!((d.project(&v(&[1.0, 0.0])).unwrap() - v(&[0.5, 0.5])).norm() < 1e-15);
    }

    #[test]
    fn functional_round_trip() {
        let f = LinearFunctional::new(v(&[1.0, -2.0, 0.5]));
        let h = Flat::level_set(&f, 3.0).unwrap();
        assert_eq!(h.rank(), 2);
        for p in h.sample(2.0, 9, 1).unwrap() {
            assert!((f.apply(&p) - 3.0).abs() < 1e-12);
        }
        let (g, level) = h.as_level_set().unwrap();
        let scale = f.coeffs.dot(&g.coeffs);
        assert!((scale.abs() - f.coeffs.norm()).abs() < 1e-12);
        assert!((level * scale - 3.0).abs() < 1e-12);
    }

    #[test]
    fn serde_uses_user_directions() {
        let k = Flat::new(v(&[1.0, 2.0]), vec![v(&[3.0, 0.0])]).unwrap();
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(json, r#"{"base":[1.0,2.0],"directions":[[3.0,0.0]]}"#);
        let back: Flat = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        assert!(serde_json::from_str::<Flat>(r#"{"base":[0,0],"directions":[[1,0],[2,0]]}"#).is_err());
    }
}
