//! Facet enumeration for low-dimensional convex hulls.
//!
//! Every `d`-subset of the input spans a candidate hyperplane; it is a facet
//! when all points lie on one side. Cubic in the point count for `d = 3`,
//! which is fine for unit balls with tens of vertices.

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};

/// Minimum offset of a facet plane from the origin (unit normal scale).
pub(crate) const INTERIOR_TOL: f64 = 1e-9;

/// Facets of `conv(points)` as scaled normals `a` with `⟨a, p⟩ ≤ 1` for every
/// point and equality on the facet. Fails when 0 is not strictly interior.
pub(crate) fn facet_normals(points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let d = points
        .first()
        .ok_or_else(|| Error::InvalidBody("empty point set".into()))?
        .len();
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!(
            "facet enumeration in dimension {d}"
        )));
    }
    if points.len() < d + 1 {
        return Err(Error::InvalidBody(format!(
            "{} points cannot span a full-dimensional body in dimension {d}",
            points.len()
        )));
    }
    let scale = points.iter().map(|p| p.amax()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::InvalidBody("all points are zero".into()));
    }
    let side_tol = 1e-10 * scale;

    let mut normals: Vec<DVector<f64>> = Vec::new();
    let mut consider = |n: DVector<f64>, anchor: &DVector<f64>| -> Result<()> {
        let norm = n.norm();
        if norm <= 1e-12 * scale.powi(d as i32 - 1).max(1e-300) {
            return Ok(());
        }
        let n = n / norm;
        let b = n.dot(anchor);
        let (mut above, mut below) = (false, false);
        for p in points {
            let s = n.dot(p) - b;
            if s > side_tol {
                above = true;
            } else if s < -side_tol {
                below = true;
            }
            if above && below {
                return Ok(());
            }
        }
        // Orient the normal outward.
        let (n, b) = if above { (-n, -b) } else { (n, b) };
        if b <= INTERIOR_TOL * scale {
            return Err(Error::InvalidBody(format!(
                "origin is not strictly interior (facet offset {b:e})"
            )));
        }
        if above == below {
            // Every point on one plane: the body is flat.
            return Err(Error::InvalidBody("points do not span a full-dimensional body".into()));
        }
        let a = n / b;
        let a_norm = a.norm();
        if !normals
            .iter()
            .any(|q| (q - &a).norm() <= 1e-9 * a_norm.max(q.norm()))
        {
            normals.push(a);
        }
        Ok(())
    };

    let n = points.len();
    match d {
        1 => {
            for p in points {
                consider(DVector::from_element(1, 1.0), p)?;
            }
        }
        2 => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let e = &points[j] - &points[i];
                    consider(DVector::from_vec(vec![-e[1], e[0]]), &points[i])?;
                }
            }
        }
        _ => {
            for i in 0..n {
                for j in (i + 1)..n {
                    for k in (j + 1)..n {
                        let u = to3(&(&points[j] - &points[i]));
                        let v = to3(&(&points[k] - &points[i]));
                        let c = u.cross(&v);
                        consider(DVector::from_column_slice(c.as_slice()), &points[i])?;
                    }
                }
            }
        }
    }
    if normals.len() < d + 1 {
        return Err(Error::InvalidBody(
            "points do not span a full-dimensional body".into(),
        ));
    }
    Ok(normals)
}

/// Points of `points` that are vertices of the polytope `{⟨a, x⟩ ≤ 1}`
/// described by `normals`, i.e. lie on at least `d` facets. Duplicates are
/// dropped.
pub(crate) fn extreme_points(
    points: &[DVector<f64>],
    normals: &[DVector<f64>],
) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for p in points {
        let d = p.len();
        let touching = normals
            .iter()
            .filter(|a| (a.dot(p) - 1.0).abs() <= 1e-9)
            .count();
        if touching >= d && !out.iter().any(|q| (q - p).norm() <= 1e-12 * (1.0 + p.norm())) {
            out.push(p.clone());
        }
    }
    out
}

fn to3(v: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}
