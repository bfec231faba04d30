//! Gauges given by their unit balls.
//!
//! A gauge is the Minkowski functional `γ(x) = min{t > 0 : x/t ∈ B}` of a
//! bounded convex body `B` with the origin in its interior. Three internal
//! representations cover every body the crate accepts:
//!
//! - polytopes in half-space form `{x : ⟨aᵢ, x⟩ ≤ 1}`, where `γ` is the
//!   maximum of the linear forms `aᵢ`; vertex input in dimension ≤ 3 is
//!   converted by facet enumeration,
//! - vertex hulls in dimension > 3, evaluated by a small linear program,
//! - ellipsoids `{x : (x − c)ᵀ M (x − c) ≤ 1}`, covering the euclidean,
//!   ellipsoid and shifted-ball builtins in closed form.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::hull;
use crate::lp::{Cmp, LinearProgram};
use crate::sampling;
use crate::spec::{self, GaugeSpec};

pub type Vector = DVector<f64>;

/// Default relative tolerance of the symmetry test.
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Gauge {
    dim: usize,
    body: Body,
    spec: GaugeSpec,
    lipschitz: OnceLock<f64>,
    coercivity: OnceLock<f64>,
}

#[derive(Clone, Debug)]
pub(crate) enum Body {
    Polytope(Polytope),
    Hull(Vec<Vector>),
    Ellipsoid(Ellipsoid),
}

#[derive(Clone, Debug)]
pub(crate) struct Polytope {
    pub normals: Vec<Vector>,
    /// Known whenever the dimension is at most 3 or the body came from a
    /// builtin with closed-form vertices.
    pub vertices: Option<Vec<Vector>>,
}

#[derive(Clone, Debug)]
pub(crate) struct Ellipsoid {
    shape: DMatrix<f64>,
    center: Vector,
    shape_inv: DMatrix<f64>,
    /// `M c`
    mc: Vector,
    /// `1 − cᵀ M c`
    kappa: f64,
    /// `M c cᵀ M + κ M`
    quad: DMatrix<f64>,
}

impl Ellipsoid {
    fn new(shape: DMatrix<f64>, center: Vector) -> Result<Self> {
        let d = shape.nrows();
        if shape.ncols() != d || center.len() != d {
            return Err(Error::InvalidBody("ellipsoid shape/center size mismatch".into()));
        }
        if shape.iter().chain(center.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ellipsoid"));
        }
        let asym = (&shape - shape.transpose()).amax();
        if asym > 1e-12 * shape.amax().max(1.0) {
            return Err(Error::InvalidBody("ellipsoid matrix is not symmetric".into()));
        }
        let shape = (&shape + shape.transpose()) * 0.5;
        let chol = shape
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidBody("ellipsoid matrix is not positive definite".into()))?;
        let shape_inv = chol.inverse();
        let mc = &shape * &center;
        let kappa = 1.0 - center.dot(&mc);
        if kappa <= hull::INTERIOR_TOL {
            return Err(Error::InvalidBody(
                "origin is not strictly inside the shifted ball".into(),
            ));
        }
        let quad = &mc * mc.transpose() + &shape * kappa;
        Ok(Self {
            shape,
            center,
            shape_inv,
            mc,
            kappa,
            quad,
        })
    }

    fn value(&self, u: &Vector) -> f64 {
        let a = u.dot(&self.mc);
        let q = u.dot(&(&self.quad * u)).max(0.0);
        let s = q.sqrt();
        if a > 0.0 {
            let m = u.dot(&(&self.shape * u));
            if s + a > 0.0 {
                m / (s + a)
            } else {
                0.0
            }
        } else {
            (s - a) / self.kappa
        }
    }

    /// `γ(u) − γ(v)` without cancellation when both are large.
    fn diff(&self, u: &Vector, v: &Vector) -> f64 {
        let du = u - v;
        let su = u + v;
        let qu = u.dot(&(&self.quad * u)).max(0.0).sqrt();
        let qv = v.dot(&(&self.quad * v)).max(0.0).sqrt();
        let dq = if qu + qv > 0.0 {
            du.dot(&(&self.quad * su)) / (qu + qv)
        } else {
            0.0
        };
        (dq - du.dot(&self.mc)) / self.kappa
    }

    fn gradient(&self, u: &Vector) -> Vector {
        let q = u.dot(&(&self.quad * u)).max(0.0).sqrt();
        if q == 0.0 {
            return Vector::zeros(u.len());
        }
        (&self.quad * u / q - &self.mc) / self.kappa
    }

    fn support(&self, u: &Vector) -> f64 {
        self.center.dot(u) + u.dot(&(&self.shape_inv * u)).max(0.0).sqrt()
    }

    fn line_interval(&self, p: &Vector, d: &Vector) -> Option<(f64, f64)> {
        let w = p - &self.center;
        let md = &self.shape * d;
        let a = d.dot(&md);
        let b = 2.0 * w.dot(&md);
        let c = w.dot(&(&self.shape * &w)) - 1.0;
        let disc = b * b - 4.0 * a * c;
        if a <= 0.0 || disc < 0.0 {
            return None;
        }
        let root = disc.sqrt();
        let q = -0.5 * (b + b.signum() * root);
        let (r1, r2) = if q != 0.0 { (q / a, c / q) } else { (-root / (2.0 * a), root / (2.0 * a)) };
        Some((r1.min(r2), r1.max(r2)))
    }
}

/// Bounds `c0 γ₁ ≤ γ₂ ≤ c1 γ₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConstants {
    pub c0: f64,
    pub c1: f64,
    /// True when either side came from direction sampling rather than a
    /// vertex enumeration.
    pub approximate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallKind {
    Closed,
    Open,
    Sphere,
}

impl Gauge {
    pub fn from_spec(spec: &GaugeSpec) -> Result<Self> {
        let dim = spec.dim;
        let to_vecs = |pts: Vec<Vec<f64>>| -> Vec<Vector> {
            pts.into_iter().map(Vector::from_vec).collect()
        };
        let mut g = match spec.body()? {
            spec::Body::Vertices(p) => Self::from_vertices(dim, to_vecs(p))?,
            spec::Body::Halfspaces(p) => Self::from_halfspaces(dim, to_vecs(p))?,
            spec::Body::Builtin(b) => match b {
                spec::Builtin::Euclidean => Self::euclidean(dim),
                spec::Builtin::L1 => Self::l1(dim)?,
                spec::Builtin::Linf => Self::linf(dim)?,
                spec::Builtin::Ellipsoid(m) => {
                    let m = DMatrix::from_fn(dim, dim, |i, j| m[i][j]);
                    Self::ellipsoid(m)?
                }
                spec::Builtin::Shifted { base, offset } => {
                    Self::from_spec(&base)?.shifted(&Vector::from_vec(offset))?
                }
            },
        };
        g.spec = spec.clone();
        Ok(g)
    }

    /// Unit ball = convex hull of `vertices`.
    pub fn from_vertices(dim: usize, vertices: Vec<Vector>) -> Result<Self> {
        check_points(dim, &vertices, "vertices")?;
        let spec = GaugeSpec::vertices(dim, vertices.iter().map(|v| v.as_slice().to_vec()).collect());
        let body = if dim <= 3 {
            let normals = hull::facet_normals(&vertices)?;
            let vertices = hull::extreme_points(&vertices, &normals);
            Body::Polytope(Polytope {
                normals,
                vertices: Some(vertices),
            })
        } else {
            check_positive_span(dim, &vertices)?;
            Body::Hull(vertices)
        };
        Ok(Self::assemble(dim, body, spec))
    }

    /// Unit ball = `{x : ⟨aᵢ, x⟩ ≤ 1}`.
    pub fn from_halfspaces(dim: usize, normals: Vec<Vector>) -> Result<Self> {
        check_points(dim, &normals, "halfspaces")?;
        let spec = GaugeSpec::halfspaces(dim, normals.iter().map(|v| v.as_slice().to_vec()).collect());
        let normals: Vec<Vector> = normals.into_iter().filter(|a| a.amax() > 0.0).collect();
        let polytope = if dim <= 3 {
            // Vertices of the body are the facets of conv(normals).
            let vertices = hull::facet_normals(&normals).map_err(|e| match e {
                Error::InvalidBody(m) => Error::InvalidBody(format!("unbounded body ({m})")),
                other => other,
            })?;
            let normals = hull::extreme_points(&normals, &vertices);
            Polytope {
                normals,
                vertices: Some(vertices),
            }
        } else {
            check_positive_span(dim, &normals)
                .map_err(|_| Error::InvalidBody("unbounded body: normals do not positively span".into()))?;
            Polytope {
                normals,
                vertices: None,
            }
        };
        Ok(Self::assemble(dim, Body::Polytope(polytope), spec))
    }

    pub fn euclidean(dim: usize) -> Self {
        let e = Ellipsoid::new(DMatrix::identity(dim, dim), Vector::zeros(dim)).expect("identity ball");
        Self::assemble(dim, Body::Ellipsoid(e), GaugeSpec::builtin(dim, "euclidean", Default::default()))
    }

    pub fn l1(dim: usize) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::Unsupported(format!("l1 builtin in dimension {dim}")));
        }
        let polytope = Polytope {
            normals: sign_vectors(dim),
            vertices: Some(signed_units(dim)),
        };
        Ok(Self::assemble(
            dim,
            Body::Polytope(polytope),
            GaugeSpec::builtin(dim, "l1", Default::default()),
        ))
    }

    pub fn linf(dim: usize) -> Result<Self> {
        if dim == 0 || dim > 16 {
            return Err(Error::Unsupported(format!("linf builtin in dimension {dim}")));
        }
        let polytope = Polytope {
            normals: signed_units(dim),
            vertices: Some(sign_vectors(dim)),
        };
        Ok(Self::assemble(
            dim,
            Body::Polytope(polytope),
            GaugeSpec::builtin(dim, "linf", Default::default()),
        ))
    }

    /// `γ(x) = sqrt(xᵀ M x)` for a symmetric positive definite `M`.
    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        let e = Ellipsoid::new(matrix, Vector::zeros(dim))?;
        let spec = ellipsoid_spec(&e.shape, &e.center);
        Ok(Self::assemble(dim, Body::Ellipsoid(e), spec))
    }

    /// Gauge of the translated body `B + offset`; needs `γ(−offset) < 1`.
    pub fn shifted(&self, offset: &Vector) -> Result<Self> {
        check_dim(self.dim, offset.len())?;
        let reach = self.value(&(-offset));
        if reach >= 1.0 - hull::INTERIOR_TOL {
            return Err(Error::InvalidBody(format!(
                "shift moves the origin out of the ball interior (γ(−offset) = {reach})"
            )));
        }
        let body = match &self.body {
            Body::Ellipsoid(e) => Body::Ellipsoid(Ellipsoid::new(e.shape.clone(), &e.center + offset)?),
            Body::Polytope(p) => Body::Polytope(Polytope {
                normals: p
                    .normals
                    .iter()
                    .map(|a| a / (1.0 + a.dot(offset)))
                    .collect(),
                vertices: p
                    .vertices
                    .as_ref()
                    .map(|vs| vs.iter().map(|v| v + offset).collect()),
            }),
            Body::Hull(vs) => Body::Hull(vs.iter().map(|v| v + offset).collect()),
        };
        let spec = GaugeSpec::shifted(self.spec.clone(), offset.as_slice().to_vec());
        Ok(Self::assemble(self.dim, body, spec))
    }

    fn assemble(dim: usize, body: Body, spec: GaugeSpec) -> Self {
        Self {
            dim,
            body,
            spec,
            lipschitz: OnceLock::new(),
            coercivity: OnceLock::new(),
        }
    }

    fn from_body(dim: usize, body: Body) -> Self {
        let spec = match &body {
            Body::Polytope(p) => GaugeSpec::halfspaces(
                dim,
                p.normals.iter().map(|a| a.as_slice().to_vec()).collect(),
            ),
            Body::Hull(vs) => {
                GaugeSpec::vertices(dim, vs.iter().map(|v| v.as_slice().to_vec()).collect())
            }
            Body::Ellipsoid(e) => ellipsoid_spec(&e.shape, &e.center),
        };
        Self::assemble(dim, body, spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &GaugeSpec {
        &self.spec
    }

    pub(crate) fn body(&self) -> &Body {
        &self.body
    }

    /// Facet normals when the body is a polytope in half-space form.
    pub fn normals(&self) -> Option<&[Vector]> {
        match &self.body {
            Body::Polytope(p) => Some(&p.normals),
            _ => None,
        }
    }

    /// Vertices of a polytopal body, when known.
    pub fn vertices(&self) -> Option<&[Vector]> {
        match &self.body {
            Body::Polytope(p) => p.vertices.as_deref(),
            Body::Hull(vs) => Some(vs),
            Body::Ellipsoid(_) => None,
        }
    }

    pub fn is_polytope(&self) -> bool {
        !matches!(self.body, Body::Ellipsoid(_))
    }

    pub fn eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value(x))
    }

    /// Evaluation without the dimension check.
    pub fn value(&self, x: &Vector) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.body {
            Body::Polytope(p) => p
                .normals
                .iter()
                .map(|a| a.dot(x))
                .fold(0.0, f64::max),
            Body::Ellipsoid(e) => e.value(x),
            Body::Hull(vs) => hull_value(vs, x).0,
        }
    }

    /// `γ(u) − γ(v)`, computed stably for far-away arguments of ellipsoids.
    pub fn diff(&self, u: &Vector, v: &Vector) -> f64 {
        match &self.body {
            Body::Ellipsoid(e) => e.diff(u, v),
            _ => self.value(u) - self.value(v),
        }
    }

    /// A subgradient of `γ` at `x` (the lowest-index active normal for
    /// polytopes).
    pub fn subgradient(&self, x: &Vector) -> Vector {
        match &self.body {
            Body::Polytope(p) => {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for (i, a) in p.normals.iter().enumerate() {
                    let v = a.dot(x);
                    if v > best_val {
                        best_val = v;
                        best = i;
                    }
                }
                p.normals[best].clone()
            }
            Body::Ellipsoid(e) => e.gradient(x),
            Body::Hull(vs) => hull_value(vs, x).1,
        }
    }

    /// Support function of the unit ball, `max{⟨u, b⟩ : γ(b) ≤ 1}`.
    pub fn support(&self, u: &Vector) -> f64 {
        match &self.body {
            Body::Ellipsoid(e) => e.support(u),
            _ => match self.vertices() {
                Some(vs) => vs.iter().map(|v| v.dot(u)).fold(f64::NEG_INFINITY, f64::max),
                None => {
                    let normals = self.normals().expect("polytope");
                    let mut lp = LinearProgram::new(self.dim);
                    for a in normals {
                        lp.add_row(a.as_slice().to_vec(), Cmp::Le, 1.0);
                    }
                    lp.maximize(u.as_slice()).map(|s| s.objective).unwrap_or(f64::NAN)
                }
            },
        }
    }

    /// The boundary point `u / γ(u)` of the unit ball.
    pub fn boundary_point(&self, u: &Vector) -> Vector {
        u / self.value(u)
    }

    /// Parameter range `{τ : γ(p + τ d) ≤ 1}`, or `None` when the line misses
    /// the ball.
    pub fn line_interval(&self, p: &Vector, d: &Vector) -> Option<(f64, f64)> {
        match &self.body {
            Body::Ellipsoid(e) => e.line_interval(p, d),
            Body::Polytope(poly) => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for a in &poly.normals {
                    let slope = a.dot(d);
                    let room = 1.0 - a.dot(p);
                    if slope.abs() <= 1e-15 * a.norm() * d.norm() {
                        if room < 0.0 {
                            return None;
                        }
                    } else if slope > 0.0 {
                        hi = hi.min(room / slope);
                    } else {
                        lo = lo.max(room / slope);
                    }
                }
                (lo <= hi).then_some((lo, hi))
            }
            Body::Hull(_) => {
                // Bisection on the convex function τ ↦ γ(p + τ d).
                let f = |t: f64| self.value(&(p + d * t));
                let (mut a, mut b) = (-1.0, 1.0);
                let argmin = crate::numeric::golden_min(&f, -1e6, 1e6, 1e-12).0;
                if f(argmin) > 1.0 {
                    return None;
                }
                let edge = |mut inside: f64, mut outside: f64| {
                    for _ in 0..200 {
                        let m = 0.5 * (inside + outside);
                        if f(m) <= 1.0 {
                            inside = m;
                        } else {
                            outside = m;
                        }
                    }
                    inside
                };
                while f(argmin + b) <= 1.0 {
                    b *= 2.0;
                }
                while f(argmin + a) <= 1.0 {
                    a *= 2.0;
                }
                Some((edge(argmin, argmin + a), edge(argmin, argmin + b)))
            }
        }
    }

    /// The reversed gauge `x ↦ γ(−x)`, whose ball is the point reflection.
    pub fn reverse(&self) -> Gauge {
        let body = match &self.body {
            Body::Polytope(p) => Body::Polytope(Polytope {
                normals: p.normals.iter().map(|a| -a).collect(),
                vertices: p.vertices.as_ref().map(|vs| vs.iter().map(|v| -v).collect()),
            }),
            Body::Hull(vs) => Body::Hull(vs.iter().map(|v| -v).collect()),
            Body::Ellipsoid(e) => Body::Ellipsoid(
                Ellipsoid::new(e.shape.clone(), -&e.center).expect("reflection keeps validity"),
            ),
        };
        let spec = self
            .spec
            .reversed()
            .unwrap_or_else(|_| Self::from_body(self.dim, body.clone()).spec);
        Self::assemble(self.dim, body, spec)
    }

    /// Gauge whose unit ball is `A · B`.
    pub fn linear_image(&self, a: &DMatrix<f64>) -> Result<Gauge> {
        check_dim(self.dim, a.nrows())?;
        check_dim(self.dim, a.ncols())?;
        let inv = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Precondition("linear map is singular".into()))?;
        let inv_t = inv.transpose();
        let body = match &self.body {
            Body::Polytope(p) => Body::Polytope(Polytope {
                normals: p.normals.iter().map(|n| &inv_t * n).collect(),
                vertices: p.vertices.as_ref().map(|vs| vs.iter().map(|v| a * v).collect()),
            }),
            Body::Hull(vs) => Body::Hull(vs.iter().map(|v| a * v).collect()),
            Body::Ellipsoid(e) => {
                let shape = &inv_t * &e.shape * &inv;
                let shape = (&shape + shape.transpose()) * 0.5;
                Body::Ellipsoid(Ellipsoid::new(shape, a * &e.center)?)
            }
        };
        Ok(Self::from_body(self.dim, body))
    }

    /// The restriction `ξ ↦ γ(B ξ)` to the column span of `basis` (d × k,
    /// full column rank).
    pub fn restrict(&self, basis: &DMatrix<f64>) -> Result<Gauge> {
        check_dim(self.dim, basis.nrows())?;
        let k = basis.ncols();
        match &self.body {
            Body::Polytope(p) => {
                let normals: Vec<Vector> = p.normals.iter().map(|a| basis.transpose() * a).collect();
                Self::from_halfspaces(k, normals)
            }
            Body::Ellipsoid(e) => {
                let m1 = basis.transpose() * &e.shape * basis;
                let b = basis.transpose() * &e.mc;
                let chol = m1
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::Precondition("basis is rank deficient".into()))?;
                let center = chol.solve(&b);
                let rho = 1.0 - e.center.dot(&e.mc) + center.dot(&(&m1 * &center));
                let shape = m1 / rho;
                let body = Body::Ellipsoid(Ellipsoid::new((&shape + shape.transpose()) * 0.5, center)?);
                Ok(Self::from_body(k, body))
            }
            Body::Hull(_) => Err(Error::Unsupported(
                "restriction of a vertex hull evaluated by linear programming".into(),
            )),
        }
    }

    /// Half-space description of a polytopal body (identity on half-space
    /// input).
    pub fn halfspace_form(&self) -> Result<Gauge> {
        match &self.body {
            Body::Polytope(p) => Self::from_halfspaces(self.dim, p.normals.clone()),
            _ => Err(Error::Unsupported("half-space form of a non-polytopal body".into())),
        }
    }

    /// Gauge of `B × [−1, 1]` in one dimension more.
    pub fn product_with_interval(&self) -> Result<Gauge> {
        let Body::Polytope(p) = &self.body else {
            return Err(Error::Unsupported("interval product of a non-polytopal body".into()));
        };
        let d = self.dim;
        let lift = |v: &Vector, last: f64| {
            let mut w = Vector::zeros(d + 1);
            w.rows_mut(0, d).copy_from(v);
            w[d] = last;
            w
        };
        let mut normals: Vec<Vector> = p.normals.iter().map(|a| lift(a, 0.0)).collect();
        normals.push(lift(&Vector::zeros(d), 1.0));
        normals.push(lift(&Vector::zeros(d), -1.0));
        let vertices = p.vertices.as_ref().map(|vs| {
            vs.iter()
                .flat_map(|v| [lift(v, 1.0), lift(v, -1.0)])
                .collect()
        });
        Ok(Self::from_body(
            d + 1,
            Body::Polytope(Polytope { normals, vertices }),
        ))
    }

    /// `max γ(u)` over Euclidean unit vectors.
    pub fn lipschitz(&self) -> f64 {
        *self.lipschitz.get_or_init(|| match &self.body {
            Body::Polytope(p) => p.normals.iter().map(|a| a.norm()).fold(0.0, f64::max),
            _ => sampling::unit_directions(self.dim)
                .iter()
                .map(|u| self.value(u))
                .fold(0.0, f64::max),
        })
    }

    /// `min γ(u)` over Euclidean unit vectors.
    pub fn coercivity(&self) -> f64 {
        *self.coercivity.get_or_init(|| match self.vertices() {
            Some(vs) => 1.0 / vs.iter().map(|v| v.norm()).fold(0.0, f64::max),
            None => sampling::unit_directions(self.dim)
                .iter()
                .map(|u| self.value(u))
                .fold(f64::INFINITY, f64::min),
        })
    }

    /// `sup |γ(u) − γ(−u)| / max(γ(u), γ(−u))` over the direction sample and
    /// the vertices.
    pub fn symmetry_defect(&self) -> f64 {
        let mut probes = sampling::unit_directions(self.dim);
        if let Some(vs) = self.vertices() {
            probes.extend(vs.iter().cloned());
        }
        probes
            .iter()
            .map(|u| {
                let a = self.value(u);
                let b = self.value(&(-u));
                (a - b).abs() / a.max(b).max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }

    pub fn is_norm(&self, tol: f64) -> bool {
        if let Body::Ellipsoid(e) = &self.body {
            return e.center.amax() <= tol;
        }
        self.symmetry_defect() <= tol
    }

    /// Gram matrix `M` when the gauge is `x ↦ √(xᵀMx)`.
    pub fn inner_product(&self) -> Option<&DMatrix<f64>> {
        match &self.body {
            Body::Ellipsoid(e) if e.center.iter().all(|&c| c == 0.0) => Some(&e.shape),
            _ => None,
        }
    }

    /// `max{γ(x), γ(−x)}`.
    pub fn sym_norm_eval(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value(x).max(self.value(&(-x))))
    }

    pub fn ball_membership(
        &self,
        center: &Vector,
        radius: f64,
        x: &Vector,
        kind: BallKind,
        tol: f64,
    ) -> Result<bool> {
        check_dim(self.dim, center.len())?;
        check_dim(self.dim, x.len())?;
        if radius < 0.0 {
            return Err(Error::Precondition("radius must be non-negative".into()));
        }
        let r = self.value(&(x - center));
        Ok(match kind {
            BallKind::Closed => r <= radius + tol,
            BallKind::Open => r < radius - tol,
            BallKind::Sphere => (r - radius).abs() <= tol,
        })
    }
}

/// Best constants with `c0 γ₁(x) ≤ γ₂(x) ≤ c1 γ₁(x)`.
///
/// `c1` is the maximum of `γ₂` over the vertices of the `γ₁` ball and `c0`
/// the reciprocal of the maximum of `γ₁` over the vertices of the `γ₂` ball;
/// a side without vertices falls back to direction sampling plus a local
/// pattern search and sets `approximate`.
pub fn equivalence_constants(g1: &Gauge, g2: &Gauge) -> Result<EquivalenceConstants> {
    check_dim(g1.dim(), g2.dim())?;
    let ratio_max = |num: &Gauge, den: &Gauge| -> (f64, bool) {
        match den.vertices() {
            Some(vs) => (
                vs.iter()
                    .map(|v| num.value(v) / den.value(v))
                    .fold(0.0, f64::max),
                false,
            ),
            None => (sampled_ratio_max(num, den), true),
        }
    };
    let (c1, approx1) = ratio_max(g2, g1);
    let (inv_c0, approx0) = ratio_max(g1, g2);
    Ok(EquivalenceConstants {
        c0: 1.0 / inv_c0,
        c1,
        approximate: approx0 || approx1,
    })
}

fn sampled_ratio_max(num: &Gauge, den: &Gauge) -> f64 {
    let ratio = |u: &Vector| num.value(u) / den.value(u);
    let dirs = sampling::unit_directions(num.dim());
    let mut ranked: Vec<(f64, usize)> = dirs.iter().enumerate().map(|(i, u)| (ratio(u), i)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    ranked
        .iter()
        .take(8)
        .map(|&(_, i)| crate::numeric::pattern_search_sphere(&ratio, dirs[i].clone(), 0.05, 1e-13).1)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Value and maximizing dual vector of `max{⟨w, x⟩ : ⟨w, v⟩ ≤ 1 ∀ v}`.
fn hull_value(vertices: &[Vector], x: &Vector) -> (f64, Vector) {
    let d = x.len();
    if x.amax() == 0.0 {
        return (0.0, Vector::zeros(d));
    }
    let mut lp = LinearProgram::new(d);
    for v in vertices {
        lp.add_row(v.as_slice().to_vec(), Cmp::Le, 1.0);
    }
    match lp.maximize(x.as_slice()) {
        Ok(s) => (s.objective.max(0.0), Vector::from_vec(s.x)),
        Err(_) => (f64::NAN, Vector::zeros(d)),
    }
}

fn check_points(dim: usize, pts: &[Vector], what: &'static str) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidBody("dimension must be positive".into()));
    }
    for p in pts {
        check_dim(dim, p.len())?;
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(what));
        }
    }
    if pts.len() < dim + 1 {
        return Err(Error::InvalidBody(format!(
            "{} {what} cannot describe a bounded body with interior in dimension {dim}",
            pts.len()
        )));
    }
    Ok(())
}

/// 0 lies in the interior of `conv(points)` iff the points have full rank and
/// admit a strictly positive combination summing to zero.
fn check_positive_span(dim: usize, points: &[Vector]) -> Result<()> {
    let m = DMatrix::from_columns(points);
    let sv = m.clone().svd(false, false).singular_values;
    let smallest = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if sv.len() < dim || smallest <= 1e-10 * sv.amax() {
        return Err(Error::InvalidBody("points do not span the space".into()));
    }
    let n = points.len();
    let mut lp = LinearProgram::new(n);
    for j in 0..n {
        lp.set_bounds(j, 1.0, f64::INFINITY);
    }
    for i in 0..dim {
        lp.add_row(points.iter().map(|p| p[i]).collect(), Cmp::Eq, 0.0);
    }
    lp.minimize(&vec![0.0; n])
        .map(|_| ())
        .map_err(|_| Error::InvalidBody("origin is not strictly interior".into()))
}

fn sign_vectors(dim: usize) -> Vec<Vector> {
    (0..1usize << dim)
        .map(|mask| Vector::from_fn(dim, |i, _| if mask >> i & 1 == 0 { 1.0 } else { -1.0 }))
        .collect()
}

fn signed_units(dim: usize) -> Vec<Vector> {
    (0..dim)
        .flat_map(|i| {
            [1.0, -1.0].map(|s| {
                let mut v = Vector::zeros(dim);
                v[i] = s;
                v
            })
        })
        .collect()
}

fn ellipsoid_spec(shape: &DMatrix<f64>, center: &Vector) -> GaugeSpec {
    let rows: Vec<Vec<f64>> = shape.row_iter().map(|r| r.iter().cloned().collect()).collect();
    let base = GaugeSpec::ellipsoid(rows);
    if center.amax() == 0.0 {
        base
    } else {
        GaugeSpec::shifted(base, center.as_slice().to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_column_slice(c)
    }

    fn triangle() -> Gauge {
        Gauge::from_vertices(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, -1.0])]).unwrap()
    }

    /// Ray-boundary oracle: bisection for the largest t with t·x in the
    /// polygon, using the polygon's own edge inequalities from the vertex
    /// list (independent of facet enumeration).
    fn ray_oracle(vertices: &[[f64; 2]], x: [f64; 2]) -> f64 {
        let inside = |p: [f64; 2]| {
            let n = vertices.len();
            (0..n).all(|i| {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= -1e-15
            })
        };
        let (mut lo, mut hi) = (0.0, 1e6);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if inside([m * x[0], m * x[1]]) {
                lo = m;
            } else {
                hi = m;
            }
        }
        1.0 / lo
    }

    #[test]
    fn eval_examples() {
        let g = triangle();
        assert_eq!(g.eval(&v(&[0.0, 0.0])).unwrap(), 0.0);
        let oracle = ray_oracle(&[[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]], [-1.0, 0.0]);
        assert!((oracle - 2.0).abs() < 1e-12);
        assert!((g.eval(&v(&[-1.0, 0.0])).unwrap() - oracle).abs() < 1e-12);
        let linf = Gauge::linf(2).unwrap();
        assert_eq!(linf.eval(&v(&[3.0, 4.0])).unwrap(), 4.0);
        assert_eq!(Gauge::euclidean(2).eval(&v(&[3.0, 4.0])).unwrap(), 5.0);
    }

    #[test]
    fn eval_checks_dimension() {
        assert!(matches!(
            triangle().eval(&v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn reverse_examples() {
        let g = triangle();
        let r = g.reverse();
        assert!((r.eval(&v(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-12);
        let rr = r.reverse();
        for x in sampling::unit_directions(2).iter().step_by(37) {
            assert_eq!(rr.value(x), g.value(x));
            assert_eq!(r.value(x), g.value(&(-x)));
        }
        let e = Gauge::euclidean(2);
        let er = e.reverse();
        for x in sampling::unit_directions(2).iter().step_by(72) {
            assert_eq!(er.value(x), e.value(x));
        }
        assert_eq!(r.spec().body().unwrap(), g.spec().reversed().unwrap().body().unwrap());
    }

    #[test]
    fn norm_examples() {
        assert!(Gauge::euclidean(2).is_norm(SYMMETRY_TOL));
        assert!(!triangle().is_norm(SYMMETRY_TOL));
        let square = Gauge::from_vertices(
            2,
            vec![v(&[1.0, 1.0]), v(&[-1.0, 1.0]), v(&[-1.0, -1.0]), v(&[1.0, -1.0])],
        )
        .unwrap();
        assert!(square.is_norm(SYMMETRY_TOL));
        let shifted = Gauge::euclidean(2).shifted(&v(&[0.3, 0.0])).unwrap();
        assert!(!shifted.is_norm(SYMMETRY_TOL));
    }

    #[test]
    fn sym_norm_examples() {
        let g = triangle();
        assert!((g.sym_norm_eval(&v(&[1.0, 0.0])).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(Gauge::euclidean(2).sym_norm_eval(&v(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(g.sym_norm_eval(&v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn equivalence_examples() {
        let linf = Gauge::linf(2).unwrap();
        let l1 = Gauge::l1(2).unwrap();
        let c = equivalence_constants(&linf, &l1).unwrap();
        assert!((c.c0 - 1.0).abs() < 1e-12 && (c.c1 - 2.0).abs() < 1e-12, "{c:?}");
        assert!(!c.approximate);
        let t = triangle();
        let same = equivalence_constants(&t, &t).unwrap();
        assert!((same.c0 - 1.0).abs() < 1e-12 && (same.c1 - 1.0).abs() < 1e-12);
        let e = Gauge::euclidean(2);
        let ee = equivalence_constants(&e, &e).unwrap();
        assert!(ee.approximate);
        assert!((ee.c0 - 1.0).abs() < 1e-12 && (ee.c1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_examples() {
        let g = triangle();
        let x = v(&[0.3, -0.2]);
        for r in [0.0, 0.5, 3.0] {
            assert!(g.ball_membership(&x, r, &x, BallKind::Closed, 0.0).unwrap());
        }
        let e = Gauge::euclidean(2);
        assert!(e
            .ball_membership(&v(&[0.0, 0.0]), 1.0, &v(&[1.0, 0.0]), BallKind::Sphere, 1e-12)
            .unwrap());
        assert!(!g
            .ball_membership(&v(&[0.0, 0.0]), 1.0, &v(&[-1.0, 0.0]), BallKind::Closed, 1e-12)
            .unwrap());
        assert!(!e
            .ball_membership(&v(&[0.0, 0.0]), 1.0, &v(&[1.0, 0.0]), BallKind::Open, 1e-12)
            .unwrap());
    }

    #[test]
    fn invalid_bodies_are_rejected() {
        assert!(Gauge::from_vertices(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])]).is_err());
        assert!(Gauge::from_halfspaces(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])]).is_err());
        assert!(Gauge::ellipsoid(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
        assert!(Gauge::euclidean(2).shifted(&v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn shifted_ball_matches_circle_geometry() {
        let g = Gauge::euclidean(2).shifted(&v(&[0.3, 0.0])).unwrap();
        // Ball is the unit disk centred at (0.3, 0): it reaches x = 1.3 and x = -0.7.
        assert!((g.value(&v(&[1.3, 0.0])) - 1.0).abs() < 1e-14);
        assert!((g.value(&v(&[-0.7, 0.0])) - 1.0).abs() < 1e-14);
        assert!((g.value(&v(&[0.0, 0.91f64.sqrt()])) - 1.0).abs() < 1e-14);
        let far = v(&[1e9, 3.0]);
        let near = v(&[1e9, -2.0]);
        let direct = g.value(&far) - g.value(&near);
        assert!((g.diff(&far, &near) - direct).abs() < 1e-5);
    }

    #[test]
    fn shifted_polygon_and_interval_product() {
        let sq = Gauge::linf(2).unwrap();
        let s = sq.shifted(&v(&[0.5, 0.0])).unwrap();
        assert!((s.value(&v(&[1.5, 0.0])) - 1.0).abs() < 1e-14);
        assert!((s.value(&v(&[-0.5, 0.0])) - 1.0).abs() < 1e-14);
        let p = triangle().product_with_interval().unwrap();
        assert_eq!(p.dim(), 3);
        assert!((p.value(&v(&[-1.0, 0.0, 0.5])) - 2.0).abs() < 1e-12);
        assert!((p.value(&v(&[0.1, 0.1, -3.0])) - 3.0).abs() < 1e-12);
        assert_eq!(p.vertices().unwrap().len(), 6);
    }

    #[test]
    fn high_dimensional_vertex_hull_uses_lp() {
        let mut vs = Vec::new();
        for i in 0..4 {
            for s in [1.0, -1.0] {
                let mut e = Vector::zeros(4);
                e[i] = s;
                vs.push(e);
            }
        }
        let g = Gauge::from_vertices(4, vs).unwrap();
        let l1 = Gauge::l1(4).unwrap();
        let x = v(&[0.5, -1.0, 2.0, 0.25]);
        assert!((g.value(&x) - l1.value(&x)).abs() < 1e-9);
        assert!((g.value(&x) - 3.75).abs() < 1e-9);
    }

    #[test]
    fn restriction_to_a_plane() {
        let g = Gauge::euclidean(3).shifted(&v(&[0.2, -0.1, 0.3])).unwrap();
        let basis = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.6, 0.8]);
        let r = g.restrict(&basis).unwrap();
        for xi in sampling::unit_directions(2).iter().step_by(45) {
            let x = &basis * xi;
            assert!((r.value(xi) - g.value(&x)).abs() < 1e-12);
        }
        let p = Gauge::l1(3).unwrap().restrict(&basis).unwrap();
        for xi in sampling::unit_directions(2).iter().step_by(45) {
            assert!((p.value(xi) - Gauge::l1(3).unwrap().value(&(&basis * xi))).abs() < 1e-12);
        }
    }
}
