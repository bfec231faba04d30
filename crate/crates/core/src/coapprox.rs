//! Best approximation and certified best coapproximation on flats.
//!
//! `x ∈ K` is a best coapproximation of `y` when `γ(x − z) ≤ γ(y − z)` for
//! every `z ∈ K`, i.e. when the violation
//!
//! ```text
//! V(x) = sup_{z ∈ K} [γ(x − z) − γ(y − z)]
//! ```
//!
//! is at most zero. `V` is convex, so `min_K V` is found by a cutting-plane
//! loop over flat coordinates `x = p + Q s`, `z = p + Q t`.
//!
//! For polytopal gauges the supremum is attained on the finite set `T*` of
//! vertices of the linearity cells of `t ↦ γ(y − p − Q t)`: on each cell the
//! objective is convex and non-increasing along recession rays. `V` is then
//! exact and the cuts are the exact linear pieces. For ellipsoids the
//! supremum is estimated by a parameter grid, local refinement, and the
//! closed-form limit `⟨∇γ(−Q e), x − y⟩` along each recession direction `e`;
//! the cuts are tangent planes, so the lower bound stays valid.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::flats::Flat;
use crate::gauge::{Body, Gauge, Vector, SYMMETRY_TOL};
use crate::lp::{Cmp, LinearProgram};
use crate::numeric;
use crate::sampling;

pub const DEFAULT_TOL: f64 = 1e-6;

/// Relative tolerance for "x lies on K".
pub const ON_FLAT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBudget {
    /// Cap on parameter-grid evaluations per violation estimate.
    pub max_grid_evals: usize,
    /// Cap on cutting-plane rounds.
    pub max_rounds: usize,
    /// `R₀` in the grid radius `R = R₀ (1 + ‖s‖ + ‖y − p‖)`.
    pub radius_factor: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_grid_evals: 64 * 64 * 64,
            max_rounds: 200,
            radius_factor: 4.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoapproxStatus {
    NonEmpty,
    Empty,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationProbe {
    #[serde(with = "crate::serde_vec")]
    pub z: Vector,
    pub value: f64,
    pub is_asymptotic: bool,
    /// Recession direction of an asymptotic probe.
    #[serde(with = "crate::serde_vec::option", default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vector>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoapproxResult {
    pub status: CoapproxStatus,
    #[serde(with = "crate::serde_vec::option")]
    pub witness: Option<Vector>,
    /// `V` at the best point found (the witness when there is one).
    pub violation: f64,
    /// Certified lower bound on `min_K V` from the cutting-plane model.
    pub lower_bound: Option<f64>,
    pub iterations: usize,
    #[serde(with = "crate::serde_vec::list")]
    pub active_z: Vec<Vector>,
}

/// A cut `⟨coeffs, s⟩ − v ≤ rhs`, i.e. `v ≥ ⟨coeffs, s⟩ − rhs`.
#[derive(Clone, Debug)]
struct Cut {
    coeffs: Vec<f64>,
    rhs: f64,
}

struct Evaluation {
    value: f64,
    probe: ViolationProbe,
    cuts: Vec<Cut>,
}

/// `V` on a fixed `(g, K, y)` in flat coordinates.
struct Oracle<'a> {
    gauge: &'a Gauge,
    flat: &'a Flat,
    /// `y − p`
    w: Vector,
    budget: SearchBudget,
    kind: OracleKind,
}

enum OracleKind {
    Exact {
        /// `Qᵀ aᵢ`
        beta: Vec<Vector>,
        /// Vertices of the linearity cells, with `γ(y − z)` at each.
        cells: Vec<(Vector, f64)>,
    },
    Smooth,
}

impl<'a> Oracle<'a> {
    fn new(gauge: &'a Gauge, flat: &'a Flat, y: &'a Vector, budget: SearchBudget) -> Result<Self> {
        check_dim(gauge.dim(), flat.dim())?;
        check_dim(gauge.dim(), y.len())?;
        let w = y - flat.base();
        let kind = match gauge.body() {
            Body::Polytope(p) => {
                let q = flat.basis();
                let beta: Vec<Vector> = p.normals.iter().map(|a| q.transpose() * a).collect();
                let alpha: Vec<f64> = p.normals.iter().map(|a| a.dot(&w)).collect();
                let verts = cell_vertices(&beta, &alpha)?;
                let cells = verts
                    .into_iter()
                    .map(|t| {
                        let z = flat.point(&t);
                        let r = gauge.value(&(y - &z));
                        (t, r)
                    })
                    .collect();
                OracleKind::Exact { beta, cells }
            }
            Body::Ellipsoid(_) => OracleKind::Smooth,
            Body::Hull(_) => {
                return Err(Error::Unsupported(
                    "coapproximation for vertex hulls in dimension > 3".into(),
                ))
            }
        };
        Ok(Self {
            gauge,
            flat,
            w,
            budget,
            kind,
        })
    }

    fn k(&self) -> usize {
        self.flat.rank()
    }

    fn scale(&self, s: &Vector) -> f64 {
        1.0 + s.norm() + self.w.norm()
    }

    fn radius(&self, s: &Vector) -> f64 {
        self.budget.radius_factor * self.scale(s)
    }

    fn evaluate(&self, s: &Vector) -> Evaluation {
        match &self.kind {
            OracleKind::Exact { beta, cells } => {
                let mut best = (f64::NEG_INFINITY, 0usize);
                for (j, (t, r)) in cells.iter().enumerate() {
                    let u = s - t;
                    let g1 = beta.iter().map(|b| b.dot(&u)).fold(0.0, f64::max);
                    let val = g1 - r;
                    if val > best.0 {
                        best = (val, j);
                    }
                }
                let (t, r) = &cells[best.1];
                let cuts = beta
                    .iter()
                    .map(|b| Cut {
                        coeffs: b.as_slice().to_vec(),
                        rhs: b.dot(t) + r,
                    })
                    .collect();
                Evaluation {
                    value: best.0,
                    probe: ViolationProbe {
                        z: self.flat.point(t),
                        value: best.0,
                        is_asymptotic: false,
                        direction: None,
                    },
                    cuts,
                }
            }
            OracleKind::Smooth => self.evaluate_smooth(s),
        }
    }

    /// `γ(Q(s − t)) − γ(w − Q t)`
    fn smooth_term(&self, s: &Vector, t: &Vector) -> f64 {
        let q = self.flat.basis();
        self.gauge.diff(&(q * (s - t)), &(&self.w - q * t))
    }

    /// Limit of the term along `t = λ e`, `λ → ∞`, and its gradient in `s`.
    fn asymptote(&self, s: &Vector, e: &Vector) -> (f64, Vector, f64) {
        let q = self.flat.basis();
        let g = self.gauge.subgradient(&(-(q * e)));
        let coeffs = q.transpose() * &g;
        let rhs = g.dot(&self.w);
        (coeffs.dot(s) - rhs, coeffs, rhs)
    }

    fn evaluate_smooth(&self, s: &Vector) -> Evaluation {
        let k = self.k();
        let q = self.flat.basis();
        let r = self.radius(s);

        let cap = self.budget.max_grid_evals.clamp(1, 2049);
        let mut n = 1usize;
        while (n + 1).checked_pow(k as u32).is_some_and(|p| p <= cap) {
            n += 1;
        }
        let n = n.max(2);
        let spacing = 2.0 * r / (n - 1) as f64;
        let mut best_t = Vector::zeros(k);
        let mut best = f64::NEG_INFINITY;
        for idx in 0..n.pow(k as u32) {
            let mut rest = idx;
            let t = Vector::from_fn(k, |_, _| {
                let c = -r + spacing * (rest % n) as f64;
                rest /= n;
                c
            });
            let val = self.smooth_term(s, &t);
            if val > best {
                best = val;
                best_t = t;
            }
        }
        for t in [s.clone(), Vector::zeros(k)] {
            let val = self.smooth_term(s, &t);
            if val > best {
                best = val;
                best_t = t;
            }
        }
        let (t_ref, neg) = numeric::compass_min(
            &|t: &Vector| -self.smooth_term(s, t),
            best_t,
            spacing,
            1e-10 * r,
            4000,
        );
        let (best_t, best) = (t_ref, -neg);

        let (dir, limit) = self.best_asymptote(s);
        let (_, coeffs_inf, rhs_inf) = self.asymptote(s, &dir);

        let mut cuts = Vec::with_capacity(2);
        let u = q * (s - &best_t);
        let grad = q.transpose() * self.gauge.subgradient(&u);
        // Tangent plane of the convex term at s.
        cuts.push(Cut {
            coeffs: grad.as_slice().to_vec(),
            rhs: grad.dot(s) - best,
        });
        cuts.push(Cut {
            coeffs: coeffs_inf.as_slice().to_vec(),
            rhs: rhs_inf,
        });

        if limit > best {
            // Walk out along the ray until the term settles on its limit.
            let mut lambda = 2.0 * r;
            let mut prev = self.smooth_term(s, &(&dir * lambda));
            for _ in 0..60 {
                lambda *= 2.0;
                let cur = self.smooth_term(s, &(&dir * lambda));
                let settled = (cur - prev).abs() < 1e-10;
                prev = cur;
                if settled {
                    break;
                }
            }
            Evaluation {
                value: limit,
                probe: ViolationProbe {
                    z: self.flat.point(&(&dir * lambda)),
                    value: limit,
                    is_asymptotic: true,
                    direction: Some(q * &dir),
                },
                cuts,
            }
        } else {
            Evaluation {
                value: best,
                probe: ViolationProbe {
                    z: self.flat.point(&best_t),
                    value: best,
                    is_asymptotic: false,
                    direction: None,
                },
                cuts,
            }
        }
    }

    /// Recession direction (unit, flat coordinates) with the largest limit.
    fn best_asymptote(&self, s: &Vector) -> (Vector, f64) {
        let k = self.k();
        let limit = |e: &Vector| self.asymptote(s, e).0;
        match k {
            1 => [1.0, -1.0]
                .iter()
                .map(|&c| {
                    let e = Vector::from_element(1, c);
                    let v = limit(&e);
                    (e, v)
                })
                .fold((Vector::zeros(1), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a }),
            2 => {
                let at = |th: f64| limit(&Vector::from_vec(vec![th.cos(), th.sin()]));
                let steps = 64;
                let h = 2.0 * std::f64::consts::PI / steps as f64;
                let (i, _) = (0..steps)
                    .map(|i| (i, at(i as f64 * h)))
                    .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                let (th, v) = numeric::golden_max(&at, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h, 1e-14);
                (Vector::from_vec(vec![th.cos(), th.sin()]), v)
            }
            _ => {
                let dirs = sampling::unit_directions(k);
                let (i, _) = dirs
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (i, limit(e)))
                    .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                let (e, v) = numeric::pattern_search_sphere(&limit, dirs[i].clone(), 0.05, 1e-12);
                (e, v)
            }
        }
    }

    /// Asymptotic cuts along a fixed fan of directions; they keep the first
    /// linear program bounded for smooth gauges.
    fn initial_cuts(&self) -> Vec<Cut> {
        let k = self.k();
        let dirs: Vec<Vector> = match k {
            1 => vec![Vector::from_element(1, 1.0), Vector::from_element(1, -1.0)],
            2 => sampling::circle_directions(8),
            _ => (0..k)
                .flat_map(|i| {
                    [1.0, -1.0].map(|c| {
                        let mut e = Vector::zeros(k);
                        e[i] = c;
                        e
                    })
                })
                .collect(),
        };
        let s0 = Vector::zeros(k);
        dirs.iter()
            .map(|e| {
                let (_, coeffs, rhs) = self.asymptote(&s0, e);
                Cut {
                    coeffs: coeffs.as_slice().to_vec(),
                    rhs,
                }
            })
            .collect()
    }
}

/// Vertices of the linearity cells of `t ↦ maxᵢ (αᵢ − ⟨βᵢ, t⟩)` in `R^k`:
/// points where `k + 1` pieces tie at the maximum with independent
/// differences.
fn cell_vertices(beta: &[Vector], alpha: &[f64]) -> Result<Vec<Vector>> {
    let m = beta.len();
    let k = beta.first().map_or(0, |b| b.len());
    let subsets = binomial(m, k + 1);
    if subsets > 2_000_000 {
        return Err(Error::Unsupported(format!(
            "{m} facets on a {k}-dimensional flat is too many for exact violation"
        )));
    }
    let scale = 1.0 + alpha.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let g2 = |t: &Vector| {
        beta.iter()
            .zip(alpha)
            .map(|(b, a)| a - b.dot(t))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut out: Vec<Vector> = Vec::new();
    let mut idx: Vec<usize> = (0..=k).collect();
    loop {
        let i0 = idx[0];
        let mut a = DMatrix::zeros(k, k);
        let mut b = DVector::zeros(k);
        for j in 0..k {
            let ij = idx[j + 1];
            let row = &beta[i0] - &beta[ij];
            a.set_row(j, &row.transpose());
            b[j] = alpha[i0] - alpha[ij];
        }
        if let Some(t) = a.clone().lu().solve(&b) {
            let det = a.determinant().abs();
            let row_scale: f64 = a.row_iter().map(|r| r.norm()).product();
            if t.iter().all(|c| c.is_finite()) && det > 1e-12 * row_scale {
                let top = g2(&t);
                let tol = 1e-7 * (scale + top.abs());
                let active = idx.iter().all(|&i| top - (alpha[i] - beta[i].dot(&t)) <= tol);
                if active && !out.iter().any(|q| (q - &t).norm() <= 1e-12 * (1.0 + t.norm())) {
                    out.push(t);
                }
            }
        }
        // Next (k+1)-combination in lexicographic order.
        let mut pos = k as isize;
        while pos >= 0 && idx[pos as usize] == m - (k + 1) + pos as usize {
            pos -= 1;
        }
        if pos < 0 {
            break;
        }
        let p = pos as usize;
        idx[p] += 1;
        for j in p + 1..=k {
            idx[j] = idx[j - 1] + 1;
        }
    }
    if out.is_empty() {
        return Err(Error::Internal("no cell vertices for the violation function".into()));
    }
    Ok(out)
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    (0..r).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Estimate (exact for polytopes) of `sup_{z∈K} [γ(x − z) − γ(y − z)]`.
pub fn violation(
    g: &Gauge,
    k: &Flat,
    y: &Vector,
    x: &Vector,
    budget: SearchBudget,
) -> Result<(f64, ViolationProbe)> {
    check_dim(g.dim(), x.len())?;
    let oracle = Oracle::new(g, k, y, budget)?;
    let dist = k.distance(x)?;
    if dist > ON_FLAT_TOL * (1.0 + x.norm()) {
        return Err(Error::NotOnFlat(dist));
    }
    let e = oracle.evaluate(&k.coords(x));
    Ok((e.value, e.probe))
}

/// The linear program of the cutting-plane loop: variables `s` (k of them)
/// and `v`.
struct CutModel {
    k: usize,
    lp: LinearProgram,
    seen: Vec<(Vec<u64>, u64)>,
}

impl CutModel {
    fn new(k: usize) -> Self {
        Self {
            k,
            lp: LinearProgram::new(k + 1),
            seen: Vec::new(),
        }
    }

    /// Adds the cuts not already present; returns how many were new.
    fn add(&mut self, cuts: &[Cut]) -> usize {
        let mut added = 0;
        for c in cuts {
            let key = (
                c.coeffs.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                c.rhs.to_bits(),
            );
            if self.seen.contains(&key) {
                continue;
            }
            self.seen.push(key);
            let mut row = c.coeffs.clone();
            row.push(-1.0);
            self.lp.add_row(row, Cmp::Le, c.rhs);
            added += 1;
        }
        added
    }

    fn minimize_v(&self) -> Result<(Vector, f64)> {
        let mut obj = vec![0.0; self.k + 1];
        obj[self.k] = 1.0;
        let sol = self.lp.minimize(&obj)?;
        Ok((Vector::from_column_slice(&sol.x[..self.k]), sol.objective))
    }
}

/// Certified search for a point of `Q_K(y)`.
pub fn coapprox_solve(
    g: &Gauge,
    k: &Flat,
    y: &Vector,
    tol: f64,
    budget: SearchBudget,
) -> Result<CoapproxResult> {
    check_dim(g.dim(), k.dim())?;
    check_dim(g.dim(), y.len())?;
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    if y.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("point"));
    }
    if k.distance(y)? <= 1e-12 * (1.0 + y.norm()) {
        return Ok(CoapproxResult {
            status: CoapproxStatus::NonEmpty,
            witness: Some(y.clone()),
            violation: 0.0,
            lower_bound: Some(0.0),
            iterations: 0,
            active_z: Vec::new(),
        });
    }
    let oracle = Oracle::new(g, k, y, budget)?;
    let dim_k = oracle.k();
    let exact = matches!(oracle.kind, OracleKind::Exact { .. });
    let mut model = CutModel::new(dim_k);
    let mut active_z: Vec<Vector> = Vec::new();
    if !exact {
        model.add(&oracle.initial_cuts());
    }

    let s0 = k.coords(y);
    let first = oracle.evaluate(&s0);
    model.add(&first.cuts);
    active_z.push(first.probe.z.clone());
    let mut best_s = s0;
    let mut best_v = first.value;
    let mut lower = f64::NEG_INFINITY;
    let mut iterations = 0;

    while iterations < budget.max_rounds {
        iterations += 1;
        let (s, v_lp) = model.minimize_v()?;
        lower = lower.max(v_lp);
        let eval = oracle.evaluate(&s);
        if eval.value < best_v {
            best_v = eval.value;
            best_s = s.clone();
        }
        if best_v - lower < tol / 4.0 {
            break;
        }
        let added = model.add(&eval.cuts);
        if added > 0 {
            active_z.push(eval.probe.z.clone());
        } else {
            // The model already has the exact piece at s; the gap is
            // backend round-off.
            break;
        }
    }

    let status = if best_v <= tol {
        CoapproxStatus::NonEmpty
    } else if lower > 2.0 * tol {
        CoapproxStatus::Empty
    } else {
        CoapproxStatus::Undecided
    };

    let (witness, violation) = if status == CoapproxStatus::NonEmpty {
        let s = canonical_point(&oracle, &mut model, &best_s, best_v, tol, exact);
        let v = oracle.evaluate(&s).value;
        if v <= tol {
            (Some(k.point(&s)), v)
        } else {
            (Some(k.point(&best_s)), best_v)
        }
    } else {
        (None, best_v)
    };

    Ok(CoapproxResult {
        status,
        witness,
        violation,
        lower_bound: lower.is_finite().then_some(lower),
        iterations,
        active_z,
    })
}

/// A representation-independent point of `{V ≤ v*}`: the midpoint of the
/// segment on lines, the lexicographic minimum otherwise.
fn canonical_point(
    oracle: &Oracle,
    model: &mut CutModel,
    best_s: &Vector,
    best_v: f64,
    tol: f64,
    exact: bool,
) -> Vector {
    let scale = oracle.scale(best_s);
    let slack = if exact { 1e-9 * scale } else { 1e-4 * tol };
    let cap = best_v + slack;
    let dim_k = model.k;
    let mut capped = model.lp.clone();
    let mut v_row = vec![0.0; dim_k + 1];
    v_row[dim_k] = 1.0;
    capped.add_row(v_row, Cmp::Le, cap);

    let mut extreme = |lp: &mut LinearProgram, obj: &[f64]| -> Option<Vector> {
        for _ in 0..oracle.budget.max_rounds {
            let sol = lp.minimize(obj).ok()?;
            let s = Vector::from_column_slice(&sol.x[..dim_k]);
            let eval = oracle.evaluate(&s);
            if eval.value <= cap + slack {
                return Some(s);
            }
            let before = model.add(&eval.cuts);
            if before == 0 {
                return Some(s);
            }
            for c in &eval.cuts {
                let mut row = c.coeffs.clone();
                row.push(-1.0);
                lp.add_row(row, Cmp::Le, c.rhs);
            }
        }
        None
    };

    if dim_k == 1 {
        let lo = extreme(&mut capped, &[1.0, 0.0]);
        let hi = extreme(&mut capped, &[-1.0, 0.0]);
        match (lo, hi) {
            (Some(a), Some(b)) => (a + b) * 0.5,
            _ => best_s.clone(),
        }
    } else {
        let mut current = best_s.clone();
        for i in 0..dim_k {
            let mut obj = vec![0.0; dim_k + 1];
            obj[i] = 1.0;
            match extreme(&mut capped, &obj) {
                Some(s) => {
                    let mut row = vec![0.0; dim_k + 1];
                    row[i] = 1.0;
                    capped.add_row(row, Cmp::Le, s[i] + slack);
                    current = s;
                }
                None => break,
            }
        }
        current
    }
}

/// Largest `γ(x − z) − γ(y − z)` over `count` deterministic audit points of
/// `K`: a lattice plus random draws in a window, far points along random
/// recession directions, and the cell vertices for polytopes.
pub fn audit(g: &Gauge, k: &Flat, y: &Vector, x: &Vector, count: usize, seed: u64) -> Result<f64> {
    check_dim(g.dim(), x.len())?;
    check_dim(g.dim(), y.len())?;
    let oracle = Oracle::new(g, k, y, SearchBudget::default())?;
    let s = k.coords(x);
    let r = oracle.radius(&s);
    let mut worst = f64::NEG_INFINITY;
    let mut probe = |z: &Vector| {
        let v = g.diff(&(x - z), &(y - z));
        if v > worst {
            worst = v;
        }
    };
    let near = count - count / 5;
    for z in k.sample(r, near.max(1), seed)? {
        probe(&z);
    }
    let mut rng = sampling::rng(seed ^ 0xa0d1);
    for j in 0..count / 5 {
        let e = sampling::random_unit(&mut rng, k.rank());
        let lambda = r * 10f64.powi((j % 4) as i32 + 1) * rng.gen_range(1.0..2.0);
        probe(&k.point(&(e * lambda)));
    }
    if let OracleKind::Exact { cells, .. } = &oracle.kind {
        for (t, _) in cells {
            probe(&k.point(t));
        }
    }
    Ok(worst)
}

/// The cell vertices `z ∈ K` at which the violation of a polytopal gauge
/// attains its supremum; `None` for smooth gauges.
pub fn critical_points(g: &Gauge, k: &Flat, y: &Vector) -> Result<Option<Vec<Vector>>> {
    let oracle = Oracle::new(g, k, y, SearchBudget::default())?;
    Ok(match &oracle.kind {
        OracleKind::Exact { cells, .. } => Some(cells.iter().map(|(t, _)| k.point(t)).collect()),
        OracleKind::Smooth => None,
    })
}

/// A minimizer of `γ(x − y)` over `x ∈ K` and the minimum. Polytopal gauges
/// get the lexicographically smallest optimal flat coordinates.
pub fn best_approx(g: &Gauge, k: &Flat, y: &Vector) -> Result<(Vector, f64)> {
    check_dim(g.dim(), k.dim())?;
    check_dim(g.dim(), y.len())?;
    if k.distance(y)? == 0.0 {
        return Ok((y.clone(), 0.0));
    }
    let q = k.basis();
    let w = y - k.base();
    let dim_k = k.rank();
    match g.body() {
        Body::Polytope(p) => {
            let mut lp = LinearProgram::new(dim_k + 1);
            for a in &p.normals {
                let mut row: Vec<f64> = (q.transpose() * a).as_slice().to_vec();
                row.push(-1.0);
                lp.add_row(row, Cmp::Le, a.dot(&w));
            }
            let mut obj = vec![0.0; dim_k + 1];
            obj[dim_k] = 1.0;
            let order: Vec<usize> = (0..dim_k).collect();
            let sol = lp.lex_minimize(&obj, &order, 1e-12)?;
            let x = k.point(&Vector::from_column_slice(&sol.x[..dim_k]));
            let value = g.value(&(&x - y));
            Ok((x, value))
        }
        _ => {
            let f = |s: &Vector| g.value(&(q * s - &w));
            let coerc = g.coercivity();
            let r = 2.0 * (w.norm() + g.value(&(-&w)) / coerc) + 1.0;
            let s = nested_golden(&f, dim_k, r);
            let x = k.point(&s);
            let value = g.value(&(&x - y));
            Ok((x, value))
        }
    }
}

/// Minimizes a convex `f` over `[−r, r]^k` by nested golden-section search.
fn nested_golden<F: Fn(&Vector) -> f64>(f: &F, k: usize, r: f64) -> Vector {
    fn inner<F: Fn(&Vector) -> f64>(f: &F, prefix: &mut Vec<f64>, k: usize, r: f64) -> f64 {
        if prefix.len() == k {
            return f(&Vector::from_column_slice(prefix));
        }
        let level = |c: f64, prefix: &mut Vec<f64>| {
            prefix.push(c);
            let v = inner(f, prefix, k, r);
            prefix.pop();
            v
        };
        let cell = std::cell::RefCell::new(prefix.clone());
        let (_, v) = numeric::golden_min(&|c| level(c, &mut cell.borrow_mut()), -r, r, 1e-12);
        v
    }
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let cell = std::cell::RefCell::new(out.clone());
        let (c, _) = numeric::golden_min(
            &|c| {
                let mut p = cell.borrow_mut();
                p.push(c);
                let v = inner(f, &mut p, k, r);
                p.pop();
                v
            },
            -r,
            r,
            1e-12,
        );
        out.push(c);
    }
    Vector::from_vec(out)
}

/// The coapproximation `f(y)/f(x₀) · x₀` from a functional `f` supporting
/// the unit ball at `x₀ = e/γ(e)` on the line `K = span{e}`.
pub fn functional_coapprox_2d(g: &Gauge, k: &Flat, y: &Vector) -> Result<Vector> {
    if g.dim() != 2 {
        return Err(Error::Precondition("functional construction needs d = 2".into()));
    }
    check_dim(2, k.dim())?;
    check_dim(2, y.len())?;
    if !g.is_norm(SYMMETRY_TOL) {
        return Err(Error::NotANorm);
    }
    if k.rank() != 1 || k.distance(&Vector::zeros(2))? > 1e-9 * (1.0 + k.base().norm()) {
        return Err(Error::Precondition("K must be a line through the origin".into()));
    }
    let e = k.basis().column(0).into_owned();
    let x0 = g.boundary_point(&e);
    let f = match g.normals() {
        Some(normals) => {
            let top = normals.iter().map(|a| a.dot(&x0)).fold(f64::NEG_INFINITY, f64::max);
            normals
                .iter()
                .find(|a| a.dot(&x0) >= top - 1e-12 * (1.0 + top.abs()))
                .cloned()
                .expect("some facet is active")
        }
        None => g.subgradient(&x0),
    };
    let fx0 = f.dot(&x0);
    if !(fx0 > 0.0) {
        return Err(Error::Internal("degenerate supporting functional".into()));
    }
    Ok(x0 * (f.dot(y) / fx0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::from_column_slice(c)
    }

    fn x_axis() -> Flat {
        Flat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap()
    }

    fn triangle() -> Gauge {
        Gauge::from_vertices(2, vec![v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, -1.0])]).unwrap()
    }

    #[test]
    fn violation_examples() {
        let g = triangle();
        let y = v(&[0.4, 0.0]);
        let (val, _) = violation(&g, &x_axis(), &y, &y, SearchBudget::default()).unwrap();
        assert!(val.abs() < 1e-15);

        let e = Gauge::euclidean(2);
        let (val, _) =
            violation(&e, &x_axis(), &v(&[0.0, 1.0]), &v(&[0.0, 0.0]), SearchBudget::default()).unwrap();
        // |z| − sqrt(z² + 1) ≤ 0 with supremum 0 approached as |z| → ∞.
        let oracle = (-2000..=2000)
            .map(|i| {
                let z = i as f64 * 0.05;
                z.abs() - (z * z + 1.0).sqrt()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(oracle <= 0.0);
        assert!(val.abs() < 1e-9, "{val}");

        assert!(matches!(
            violation(&e, &x_axis(), &v(&[0.0, 1.0]), &v(&[0.0, 0.5]), SearchBudget::default()),
            Err(Error::NotOnFlat(_))
        ));
    }

    #[test]
    fn solve_examples() {
        let g = triangle();
        let y = v(&[2.0, 0.0]);
        let r = coapprox_solve(&g, &x_axis(), &y, DEFAULT_TOL, SearchBudget::default()).unwrap();
        assert_eq!(r.status, CoapproxStatus::NonEmpty);
        assert_eq!(r.witness, Some(y));

        let e = Gauge::euclidean(2);
        let r = coapprox_solve(&e, &x_axis(), &v(&[3.0, 4.0]), DEFAULT_TOL, SearchBudget::default())
            .unwrap();
        assert_eq!(r.status, CoapproxStatus::NonEmpty);
        // Dense x-grid minimizing a dense-z violation estimate.
        let dense_v = |x: f64| {
            (-4000..=4000)
                .map(|i| {
                    let z = i as f64 * 0.01;
                    (x - z).abs() - ((3.0 - z).powi(2) + 16.0).sqrt()
                })
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let grid_best = (0..=600)
            .map(|i| i as f64 * 0.01)
            .min_by(|a, b| dense_v(*a).total_cmp(&dense_v(*b)))
            .unwrap();
        assert!((grid_best - 3.0).abs() <= 0.01);
        let w = r.witness.unwrap();
        assert!((&w - v(&[3.0, 0.0])).norm() < 1e-6, "{w}");
    }

    #[test]
    fn best_approx_examples() {
        let y = v(&[1.5, 0.0]);
        let (x, d) = best_approx(&triangle(), &x_axis(), &y).unwrap();
        assert_eq!((x, d), (y, 0.0));
        let (x, d) = best_approx(&Gauge::euclidean(2), &x_axis(), &v(&[3.0, 4.0])).unwrap();
        // Golden-section search resolves a smooth minimizer to about sqrt(ε).
        assert!((&x - v(&[3.0, 0.0])).norm() < 1e-6 && (d - 4.0).abs() < 1e-12, "{x} {d}");
        let linf = Gauge::linf(2).unwrap();
        let (x, d) = best_approx(&linf, &x_axis(), &v(&[0.0, 1.0])).unwrap();
        // 1D grid oracle: min over x of max(|x|, 1) is 1, attained on [−1, 1].
        let grid = (-300..=300)
            .map(|i| (i as f64 * 0.01).abs().max(1.0))
            .fold(f64::INFINITY, f64::min);
        assert!((d - grid).abs() < 1e-12, "{d} {x}");
        assert!((linf.value(&(&x - v(&[0.0, 1.0]))) - 1.0).abs() < 1e-12);
        assert!((x[0] + 1.0).abs() < 1e-9, "lexicographic tie-break: {x}");
    }

    #[test]
    fn functional_examples() {
        let e = Gauge::euclidean(2);
        let x = functional_coapprox_2d(&e, &x_axis(), &v(&[3.0, 4.0])).unwrap();
        assert!((x - v(&[3.0, 0.0])).norm() < 1e-12);
        let linf = Gauge::linf(2).unwrap();
        let y = v(&[0.5, 0.7]);
        let x = functional_coapprox_2d(&linf, &x_axis(), &y).unwrap();
        assert!((&x - v(&[0.5, 0.0])).norm() < 1e-12);
        let (val, _) = violation(&linf, &x_axis(), &y, &x, SearchBudget::default()).unwrap();
        assert!(val <= 1e-12);
        let on = v(&[-2.0, 0.0]);
        assert!((functional_coapprox_2d(&linf, &x_axis(), &on).unwrap() - &on).norm() < 1e-12);
        assert!(matches!(
            functional_coapprox_2d(&triangle(), &x_axis(), &y),
            Err(Error::NotANorm)
        ));
    }

    #[test]
    fn cell_vertices_of_a_simple_max() {
        // max(t, −t, 0.5) = max(|t|, 0.5) breaks at t = ±0.5; the tie t = −t
        // at 0 lies below the constant piece.
        let beta = vec![v(&[-1.0]), v(&[1.0]), v(&[0.0])];
        let alpha = vec![0.0, 0.0, 0.5];
        let mut ts: Vec<f64> = cell_vertices(&beta, &alpha).unwrap().iter().map(|t| t[0]).collect();
        ts.sort_by(f64::total_cmp);
        assert_eq!(ts, vec![-0.5, 0.5]);
    }

    #[test]
    fn result_json_field_names() {
        let r = CoapproxResult {
            status: CoapproxStatus::Empty,
            witness: None,
            violation: 0.5,
            lower_bound: Some(0.25),
            iterations: 3,
            active_z: vec![v(&[1.0, 0.0])],
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"status":"empty","witness":null,"violation":0.5,"lower_bound":0.25,"iterations":3,"active_z":[[1.0,0.0]]}"#
        );
    }
}
