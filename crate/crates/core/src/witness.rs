//! Witnesses of non-coproximinality.
//!
//! In the plane, a gauge that is not a norm has a chord `[x₀, x₁]` through
//! the origin that is not an affine diameter: no pair of parallel supporting
//! lines touches the ball at `x₀` and `x₁`. A longer parallel chord
//! `[y₀, y₁]` then exists, and the line `K` through `x₀, x₁` has an empty
//! coapproximation set at `y₁`, because any candidate would have to lie in
//! `[x₀, x₁] ∩ ([x₀, x₁] + y₁ − y₀) = ∅`.
//!
//! In three dimensions a non-coproximinal line `X₀` is extended to a
//! non-coproximinal plane by separating `X₀` from an enlarged sample of the
//! set `C = ⋂_{z ∈ X₀} B[z, γ(y₀ − z)]`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::coapprox::{self, CoapproxResult, CoapproxStatus, SearchBudget, DEFAULT_TOL};
use crate::error::{check_dim, Error, Result};
use crate::flats::{Flat, LinearFunctional};
use crate::gauge::{Gauge, Vector, SYMMETRY_TOL};
use crate::lp::{Cmp, LinearProgram};
use crate::numeric;
use crate::sampling;

/// Smallest accepted parallel-chord ratio.
pub const MIN_LAMBDA: f64 = 1.0 + 1e-6;

const POINT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChordWitness {
    #[serde(with = "crate::serde_vec")]
    pub x0: Vector,
    #[serde(with = "crate::serde_vec")]
    pub x1: Vector,
    #[serde(with = "crate::serde_vec")]
    pub y0: Vector,
    #[serde(with = "crate::serde_vec")]
    pub y1: Vector,
    pub lambda: f64,
    #[serde(rename = "K")]
    pub line: Flat,
    #[serde(with = "crate::serde_vec")]
    pub target: Vector,
    /// Set when the chord was certified by the sampled supporting-line test
    /// instead of exact normal cones.
    #[serde(default)]
    pub approximate: bool,
}

/// A chord `[x₀, x₁]` through the origin with no parallel supporting lines at
/// its endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct ChordCandidate {
    pub x0: Vector,
    pub x1: Vector,
    /// Angular separation of `N(x₁)` and `−N(x₀)` in radians.
    pub gap: f64,
    pub approximate: bool,
}

/// Scans chord directions and returns the chord whose endpoint normal cones
/// are separated by the widest angle, or `None` when the gauge is a norm.
pub fn find_non_diameter_chord(g: &Gauge) -> Result<Option<ChordCandidate>> {
    if g.dim() != 2 {
        return Err(Error::Precondition("chord search needs d = 2".into()));
    }
    if g.is_norm(SYMMETRY_TOL) {
        return Ok(None);
    }
    let mut dirs = sampling::circle_directions(720);
    if let Some(vs) = g.vertices() {
        for v in vs {
            let u = v.normalize();
            dirs.push(-&u);
            dirs.push(u);
        }
    }
    let approximate = !g.is_polytope();
    let mut best: Option<ChordCandidate> = None;
    for u in &dirs {
        let x1 = g.boundary_point(u);
        let x0 = g.boundary_point(&(-u));
        let gap = match g.normals() {
            Some(normals) => {
                let n1 = normal_arc(normals, &x1);
                let n0 = normal_arc(normals, &x0);
                let n0_neg = Arc {
                    start: wrap(n0.start + PI),
                    width: n0.width,
                };
                arc_gap(&n1, &n0_neg)
            }
            None => {
                let a = angle(&g.subgradient(&x1));
                let b = angle(&(-g.subgradient(&x0)));
                let d = wrap(a - b);
                d.min(2.0 * PI - d)
            }
        };
        if gap > 1e-9 && best.as_ref().map_or(true, |b| gap > b.gap) {
            best = Some(ChordCandidate {
                x0,
                x1,
                gap,
                approximate,
            });
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug)]
struct Arc {
    start: f64,
    width: f64,
}

fn angle(v: &Vector) -> f64 {
    wrap(v[1].atan2(v[0]))
}

fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// The outer normal cone at a boundary point, as the smallest arc holding the
/// active facet normals.
fn normal_arc(normals: &[Vector], b: &Vector) -> Arc {
    let top = normals.iter().map(|a| a.dot(b)).fold(f64::NEG_INFINITY, f64::max);
    let mut angles: Vec<f64> = normals
        .iter()
        .filter(|a| a.dot(b) >= top - 1e-9 * top.abs().max(1.0))
        .map(angle)
        .collect();
    angles.sort_by(f64::total_cmp);
    if angles.len() == 1 {
        return Arc {
            start: angles[0],
            width: 0.0,
        };
    }
    // The arc is the complement of the widest circular gap.
    let n = angles.len();
    let (mut gap, mut after) = (angles[0] + 2.0 * PI - angles[n - 1], 0);
    for i in 1..n {
        let g = angles[i] - angles[i - 1];
        if g > gap {
            gap = g;
            after = i;
        }
    }
    Arc {
        start: angles[after],
        width: 2.0 * PI - gap,
    }
}

fn in_arc(t: f64, a: &Arc) -> bool {
    wrap(t - a.start) <= a.width + 1e-12
}

fn dist_to_arc(t: f64, a: &Arc) -> f64 {
    if in_arc(t, a) {
        0.0
    } else {
        wrap(a.start - t).min(wrap(t - (a.start + a.width)))
    }
}

/// Zero when the arcs meet, otherwise their angular distance.
fn arc_gap(a: &Arc, b: &Arc) -> f64 {
    let ends = |x: &Arc| [x.start, x.start + x.width];
    if ends(a).iter().any(|&t| in_arc(t, b)) || ends(b).iter().any(|&t| in_arc(t, a)) {
        return 0.0;
    }
    ends(a)
        .iter()
        .map(|&t| dist_to_arc(t, b))
        .chain(ends(b).iter().map(|&t| dist_to_arc(t, a)))
        .fold(f64::INFINITY, f64::min)
}

/// Builds the chord witness from the widest-gap chord.
pub fn construct_witness(g: &Gauge) -> Result<ChordWitness> {
    let chord = find_non_diameter_chord(g)?.ok_or_else(|| {
        Error::NotFound("every chord through the origin is an affine diameter (the gauge is a norm)".into())
    })?;
    let mut w = construct_witness_along(g, &(&chord.x1 - &chord.x0))?;
    w.approximate = chord.approximate;
    Ok(w)
}

/// Witness for the chord through the origin in direction `u`: the longest
/// parallel chord is found by golden-section search on the concave width
/// function, taking the midpoint of a plateau of maximal chords.
pub fn construct_witness_along(g: &Gauge, u: &Vector) -> Result<ChordWitness> {
    if g.dim() != 2 {
        return Err(Error::Precondition("chord witnesses need d = 2".into()));
    }
    check_dim(2, u.len())?;
    if u.norm() == 0.0 {
        return Err(Error::Precondition("zero chord direction".into()));
    }
    let x1 = g.boundary_point(u);
    let x0 = g.boundary_point(&(-u));
    let base_len = (&x1 - &x0).norm();
    let e = (&x1 - &x0) / base_len;
    let n = Vector::from_vec(vec![-e[1], e[0]]);
    let lo = -g.support(&(-&n));
    let hi = g.support(&n);
    let length = |s: f64| {
        g.line_interval(&(&n * s), &e)
            .map_or(0.0, |(a, b)| (b - a).max(0.0))
    };
    let (s_star, l_star) = numeric::golden_max(&length, lo, hi, 1e-15);
    let threshold = l_star * (1.0 - 1e-12);
    let edge = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let m = 0.5 * (inside + outside);
            if length(m) >= threshold {
                inside = m;
            } else {
                outside = m;
            }
        }
        inside
    };
    let s_mid = 0.5 * (edge(s_star, lo) + edge(s_star, hi));
    let (ta, tb) = g
        .line_interval(&(&n * s_mid), &e)
        .ok_or_else(|| Error::Internal("longest chord search left the ball".into()))?;
    let y0 = &n * s_mid + &e * ta;
    let y1 = &n * s_mid + &e * tb;
    let lambda = (tb - ta) / base_len;
    if lambda < MIN_LAMBDA {
        return Err(Error::Internal(format!(
            "longest parallel chord is not longer (λ = {lambda})"
        )));
    }
    let line = Flat::new(Vector::zeros(2), vec![&x1 - &x0])?;
    Ok(ChordWitness {
        x0,
        x1,
        y0,
        target: y1.clone(),
        y1,
        lambda,
        line,
        approximate: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessStep {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub passed: bool,
    pub steps: Vec<WitnessStep>,
    /// The coapproximation query at the target, when the geometric checks
    /// passed.
    pub coapprox: Option<CoapproxResult>,
}

/// Checks the witness geometry step by step, then certifies that the
/// coapproximation set at the target is empty.
pub fn verify_witness(g: &Gauge, w: &ChordWitness) -> Result<WitnessReport> {
    check_dim(g.dim(), 2)?;
    for p in [&w.x0, &w.x1, &w.y0, &w.y1, &w.target] {
        check_dim(2, p.len())?;
    }
    check_dim(2, w.line.dim())?;
    let mut steps = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        steps.push(WitnessStep {
            name: name.into(),
            passed,
            detail,
        });
        passed
    };

    let worst = [&w.x0, &w.x1, &w.y0, &w.y1]
        .iter()
        .map(|p| (g.value(p) - 1.0).abs())
        .fold(0.0, f64::max);
    let mut ok = push(
        "unit_sphere",
        worst <= POINT_TOL,
        format!("max |γ − 1| = {worst:e}"),
    );

    let chord = &w.x1 - &w.x0;
    let len = chord.norm();
    let t = if len > 0.0 { (-w.x0.dot(&chord) / (len * len)).clamp(0.0, 1.0) } else { 0.0 };
    let off = (&w.x0 + &chord * t).norm();
    ok &= push(
        "origin_on_chord",
        len > 0.0 && off <= POINT_TOL,
        format!("distance from 0 to [x0, x1] = {off:e}"),
    );

    let mismatch = (&w.y1 - &w.y0 - &chord * w.lambda).norm();
    ok &= push(
        "parallel_longer",
        mismatch <= POINT_TOL * (1.0 + len) && w.lambda >= MIN_LAMBDA,
        format!("lambda = {}, |y1 − y0 − λ(x1 − x0)| = {mismatch:e}", w.lambda),
    );

    let on_line = w.line.rank() == 1
        && w.line.contains(&w.x0, POINT_TOL)?
        && w.line.contains(&w.x1, POINT_TOL)?;
    let e = w.line.basis().column(0).into_owned();
    let (a, b) = {
        let (p, q) = (w.line.coords(&w.x0)[0], w.line.coords(&w.x1)[0]);
        (p.min(q), p.max(q))
    };
    let section = g.line_interval(w.line.base(), &e);
    let section_ok = on_line
        && section.is_some_and(|(lo, hi)| (lo - a).abs() <= POINT_TOL && (hi - b).abs() <= POINT_TOL);
    ok &= push(
        "line_section",
        section_ok,
        format!("K ∩ B = {section:?}, chord = ({a}, {b})"),
    );

    let shift = (&w.y1 - &w.y0).dot(&e);
    let width = b - a;
    let disjoint = shift.abs() > width * (1.0 + 1e-9);
    ok &= push(
        "translate_disjoint",
        disjoint,
        format!("shift {shift} against chord length {width}"),
    );

    let mut coapprox = None;
    if ok {
        let r = coapprox::coapprox_solve(g, &w.line, &w.target, DEFAULT_TOL, SearchBudget::default())?;
        ok &= push(
            "coapprox_empty",
            r.status == CoapproxStatus::Empty,
            format!("status {:?}, lower bound {:?}", r.status, r.lower_bound),
        );
        coapprox = Some(r);
    } else {
        push("coapprox_empty", false, "skipped after a failed geometric step".into());
    }
    Ok(WitnessReport {
        passed: ok,
        steps,
        coapprox,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub h: LinearFunctional,
    #[serde(rename = "H")]
    pub plane: Flat,
    #[serde(rename = "X0")]
    pub line: Flat,
    #[serde(with = "crate::serde_vec")]
    pub y0: Vector,
    pub n0: usize,
    pub margin: f64,
    /// Number of feasible samples of `C` that were separated.
    pub samples: usize,
    /// Largest `|h(z)|` over sampled `z ∈ X₀`.
    pub x0_residual: f64,
    /// Coapproximation query on the returned plane.
    pub plane_result: CoapproxResult,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeparationConfig {
    /// Uniform draws in the sampling window.
    pub draws: usize,
    pub max_n0: usize,
    pub seed: u64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            draws: 4000,
            max_n0: 64,
            seed: 0,
        }
    }
}

/// Extends a non-coproximinal line through the origin in `R³` to a plane
/// `H ⊃ X₀` with `h < 0` on a `1/n₀`-enlargement of the sampled set `C`.
pub fn extend_to_hyperplane(
    g: &Gauge,
    x0: &Flat,
    y0: &Vector,
    cfg: SeparationConfig,
) -> Result<SeparationWitness> {
    if g.dim() != 3 {
        return Err(Error::Precondition("hyperplane extension needs d = 3".into()));
    }
    check_dim(3, x0.dim())?;
    check_dim(3, y0.len())?;
    if x0.rank() != 1 || x0.distance(&Vector::zeros(3))? > 1e-9 * (1.0 + x0.base().norm()) {
        return Err(Error::Precondition("X0 must be a line through the origin".into()));
    }
    let base = coapprox::coapprox_solve(g, x0, y0, DEFAULT_TOL, SearchBudget::default())?;
    if base.status != CoapproxStatus::Empty {
        return Err(Error::Precondition(format!(
            "the coapproximation set of y0 on X0 is not certified empty (status {:?})",
            base.status
        )));
    }

    // Audit set Z ⊂ X₀ and radii γ(y₀ − z).
    let reach = 4.0 * (1.0 + y0.norm());
    let mut zs = x0.sample(reach, 65, cfg.seed)?;
    zs.extend(base.active_z.iter().cloned());
    if let Some(crit) = coapprox::critical_points(g, x0, y0)? {
        zs.extend(crit);
    }
    let balls: Vec<(Vector, f64)> = zs.into_iter().map(|z| {
        let r = g.value(&(y0 - &z));
        (z, r)
    }).collect();

    // Window: intersection of the bounding boxes of the balls.
    let mut lo = Vector::from_element(3, f64::NEG_INFINITY);
    let mut hi = Vector::from_element(3, f64::INFINITY);
    for (z, r) in &balls {
        for j in 0..3 {
            let mut e = Vector::zeros(3);
            e[j] = 1.0;
            hi[j] = hi[j].min(z[j] + r * g.support(&e));
            lo[j] = lo[j].max(z[j] - r * g.support(&(-&e)));
        }
    }
    let feasible = |x: &Vector| balls.iter().all(|(z, r)| g.value(&(x - z)) <= r + 1e-9);
    let mut rng = sampling::rng(cfg.seed ^ 0x5e9a);
    let mut draw = |count: usize, out: &mut Vec<Vector>| {
        use rand::Rng;
        for _ in 0..count {
            let x = Vector::from_fn(3, |j, _| if hi[j] > lo[j] { rng.gen_range(lo[j]..=hi[j]) } else { lo[j] });
            if feasible(&x) {
                out.push(x);
            }
        }
    };
    let mut samples = vec![y0.clone()];
    draw(cfg.draws, &mut samples);
    if samples.len() < 10 {
        draw(4 * cfg.draws, &mut samples);
    }
    if samples.len() < 10 {
        if let Some(normals) = g.normals() {
            samples.extend(polytope_samples(normals, &balls, &lo, &hi, cfg.seed, &feasible)?);
        }
    }
    if samples.len() < 10 {
        return Err(Error::Undecided(format!(
            "only {} feasible samples of C",
            samples.len()
        )));
    }

    // Smallest n₀ with the enlargement missing X₀.
    let delta = samples
        .iter()
        .map(|c| coapprox::best_approx(g, x0, c).map(|(_, d)| d))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    if !(delta > 0.0) {
        return Err(Error::Undecided("sampled C touches X0".into()));
    }
    let first_n0 = (1.0 / delta).ceil().max(1.0) as usize;
    let ball_pts: Vec<Vector> = match g.vertices() {
        Some(vs) => vs.to_vec(),
        None => sampling::unit_directions(3).iter().map(|u| g.boundary_point(u)).collect(),
    };
    let d = x0.basis().column(0).into_owned();
    for n0 in first_n0..=cfg.max_n0 {
        let (h, margin) = separating_functional(&samples, &ball_pts, &d, n0)?;
        if margin <= 1e-12 {
            continue;
        }
        let h3 = Vector3::new(h[0], h[1], h[2]);
        let d3 = Vector3::new(d[0], d[1], d[2]);
        let other = h3.cross(&d3);
        let plane = Flat::new(
            Vector::zeros(3),
            vec![d.clone(), Vector::from_column_slice(other.as_slice())],
        )?;
        let x0_residual = x0
            .sample(reach, 33, cfg.seed)?
            .iter()
            .map(|z| h.dot(z).abs())
            .fold(0.0, f64::max);
        let plane_result = coapprox::coapprox_solve(g, &plane, y0, DEFAULT_TOL, SearchBudget::default())?;
        return Ok(SeparationWitness {
            h: LinearFunctional::new(h),
            plane,
            line: x0.clone(),
            y0: y0.clone(),
            n0,
            margin,
            samples: samples.len(),
            x0_residual,
            plane_result,
        });
    }
    Err(Error::Undecided(format!(
        "no separating functional for n0 in {first_n0}..={}",
        cfg.max_n0
    )))
}

/// Samples of a possibly flat polytopal `C`: LP maxima in spread directions
/// and random convex combinations of them.
fn polytope_samples(
    normals: &[Vector],
    balls: &[(Vector, f64)],
    lo: &Vector,
    hi: &Vector,
    seed: u64,
    feasible: &dyn Fn(&Vector) -> bool,
) -> Result<Vec<Vector>> {
    use rand::Rng;
    let mut lp = LinearProgram::new(3);
    for j in 0..3 {
        lp.set_bounds(j, lo[j], hi[j]);
    }
    for (z, r) in balls {
        for a in normals {
            lp.add_row(vec![a[0], a[1], a[2]], Cmp::Le, r + a.dot(z));
        }
    }
    let mut extreme: Vec<Vector> = Vec::new();
    for u in sampling::fibonacci_sphere(64) {
        let Ok(sol) = lp.maximize(u.as_slice()) else {
            continue;
        };
        let x = Vector::from_column_slice(&sol.x);
        if feasible(&x) && extreme.iter().all(|e| (e - &x).norm() > 1e-12) {
            extreme.push(x);
        }
    }
    if extreme.is_empty() {
        return Ok(extreme);
    }
    let mut rng = sampling::rng(seed ^ 0xc0de);
    let mut out = extreme.clone();
    for _ in 0..200 {
        let mut w: Vec<f64> = (0..extreme.len()).map(|_| rng.gen::<f64>()).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let x = extreme.iter().zip(&w).fold(Vector::zeros(3), |acc, (e, t)| acc + e * *t);
        if feasible(&x) {
            out.push(x);
        }
    }
    Ok(out)
}

/// Maximizes `m` subject to `⟨h, d⟩ = 0`, `‖h‖∞ ≤ 1` and
/// `⟨h, c⟩ + ⟨h, v⟩ / n₀ ≤ −m` for every sample `c` and ball point `v`,
/// adding the most violated sample in rounds.
fn separating_functional(
    samples: &[Vector],
    ball_pts: &[Vector],
    d: &Vector,
    n0: usize,
) -> Result<(Vector, f64)> {
    let inv = 1.0 / n0 as f64;
    let mut lp = LinearProgram::new(4);
    for j in 0..3 {
        lp.set_bounds(j, -1.0, 1.0);
    }
    lp.add_row(vec![d[0], d[1], d[2], 0.0], Cmp::Eq, 0.0);
    let add_sample = |lp: &mut LinearProgram, c: &Vector| {
        for v in ball_pts {
            let p = c + v * inv;
            lp.add_row(vec![p[0], p[1], p[2], 1.0], Cmp::Le, 0.0);
        }
    };
    let mut used = vec![false; samples.len()];
    for j in 0..3 {
        for sign in [1.0, -1.0] {
            let (i, _) = samples
                .iter()
                .enumerate()
                .map(|(i, c)| (i, sign * c[j]))
                .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            if !used[i] {
                used[i] = true;
                add_sample(&mut lp, &samples[i]);
            }
        }
    }
    for _ in 0..samples.len() {
        let sol = lp.maximize(&[0.0, 0.0, 0.0, 1.0])?;
        let h = Vector::from_column_slice(&sol.x[..3]);
        let m = sol.x[3];
        let support = ball_pts.iter().map(|v| h.dot(v)).fold(f64::NEG_INFINITY, f64::max) * inv;
        let (worst, value) = samples
            .iter()
            .enumerate()
            .map(|(i, c)| (i, h.dot(c) + support))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        if value <= -m + 1e-12 || used[worst] {
            return Ok((h, -value));
        }
        used[worst] = true;
        add_sample(&mut lp, &samples[worst]);
    }
    Err(Error::Internal("separation cutting planes did not settle".into()))
}
