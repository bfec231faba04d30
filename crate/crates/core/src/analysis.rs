//! Verification suites: the truncated sequence-space example, inner-product
//! detection, projection versus coapproximation, and randomized checks of the
//! line, plane and hyperplane coproximinality statements.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::coapprox::{self, CoapproxStatus, SearchBudget, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::flats::Flat;
use crate::gauge::{Gauge, Vector};
use crate::generate;
use crate::numeric::compensated_sum;
use crate::sampling::{self, SeededRng};
use crate::spec::GaugeSpec;
use crate::witness::{self, SeparationConfig};

/// Finitely supported real sequence `(ξ₁, …, ξ_m, 0, 0, …)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedSequence {
    pub entries: Vec<f64>,
}

impl TruncatedSequence {
    pub fn new(entries: Vec<f64>) -> Self {
        Self { entries }
    }

    /// `x_n = (1/n, …, 1/n)` with `n` entries.
    pub fn x_n(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `x₀ = (1, 1/2, 1/4, …)` truncated to `m` entries.
    pub fn x0(m: usize) -> Self {
        Self::new((0..m).map(|i| 0.5f64.powi(i as i32)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.entries.iter().map(|x| -x).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.entries.len().max(other.entries.len());
        let at = |s: &Self, i: usize| s.entries.get(i).copied().unwrap_or(0.0);
        Self::new((0..len).map(|i| at(self, i) - at(other, i)).collect())
    }
}

/// `max{sup_i |ξ_i|, Σ_i ξ_i}` with a compensated sum.
pub fn l1_gauge_eval(s: &TruncatedSequence) -> f64 {
    let sup = s.entries.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    sup.max(compensated_sum(s.entries.iter().copied()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub case: String,
    pub inputs: Value,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: Vec<CaseFailure>,
    /// Worst observed value per monitored quantity.
    pub margins: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        Self {
            suite: suite.to_string(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, case: String, inputs: Value, detail: String) {
        self.cases += 1;
        if !ok {
            self.failures.push(CaseFailure {
                case,
                inputs,
                detail,
            });
        }
    }

    fn worst_max(&mut self, key: &str, value: f64) {
        let e = self.margins.entry(key.to_string()).or_insert(value);
        *e = e.max(value);
    }

    fn worst_min(&mut self, key: &str, value: f64) {
        let e = self.margins.entry(key.to_string()).or_insert(value);
        *e = e.min(value);
    }

    fn absorb(&mut self, prefix: &str, other: SuiteReport) {
        self.cases += other.cases;
        for mut f in other.failures {
            f.case = format!("{prefix}/{}", f.case);
            self.failures.push(f);
        }
        for (k, v) in other.margins {
            self.margins.insert(format!("{prefix}.{k}"), v);
        }
        for n in other.notes {
            self.notes.push(format!("{prefix}: {n}"));
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "{verdict} {}: {} cases, {} failures",
            self.suite,
            self.cases,
            self.failures.len()
        )?;
        for (k, v) in &self.margins {
            writeln!(f, "  {k} = {v:e}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for c in &self.failures {
            writeln!(f, "  failed {}: {} {}", c.case, c.detail, c.inputs)?;
        }
        Ok(())
    }
}

fn vec_json(v: &Vector) -> Value {
    json!(v.iter().collect::<Vec<_>>())
}

fn flat_json(k: &Flat) -> Value {
    json!({
        "base": vec_json(k.base()),
        "directions": k.directions().iter().map(vec_json).collect::<Vec<_>>(),
    })
}

/// Checks the sequence-space example on `x_n`, `n ≤ n_max`, and the
/// truncation `x₀^{(m)}`, recording convergence margins.
pub fn l1_example_check(n_max: usize, m: usize) -> Result<SuiteReport> {
    if n_max < 2 || m < n_max {
        return Err(Error::Precondition("need n_max ≥ 2 and m ≥ n_max".into()));
    }
    let start = Instant::now();
    let mut r = SuiteReport::new("sequence-example");
    let x0 = TruncatedSequence::x0(m);
    let g0 = l1_gauge_eval(&x0);
    let g0_expected = 2.0 - 2f64.powi(1 - m as i32);
    r.check(
        g0 == g0_expected,
        "x0".into(),
        json!({ "m": m }),
        format!("γ(x0) = {g0}, expected {g0_expected}"),
    );
    r.margins.insert("gamma_x0".into(), g0);
    r.margins.insert("gamma_x0_tail".into(), 2.0 - g0);
    for n in 1..=n_max {
        let xn = TruncatedSequence::x_n(n);
        let a = l1_gauge_eval(&xn);
        r.check(
            (a - 1.0).abs() <= 1e-15,
            format!("x_{n}"),
            json!({ "n": n }),
            format!("γ(x_n) = {a}"),
        );
        r.worst_max("x_n_deviation", (a - 1.0).abs());
        let b = l1_gauge_eval(&xn.neg());
        let expected = 1.0 / n as f64;
        r.check(
            (b - expected).abs() <= 1e-15,
            format!("-x_{n}"),
            json!({ "n": n }),
            format!("γ(−x_n) = {b}, expected {expected}"),
        );
        let c = l1_gauge_eval(&x0.sub(&xn));
        r.check(
            c <= 1.0,
            format!("x0-x_{n}"),
            json!({ "n": n, "m": m }),
            format!("γ(x0 − x_n) = {c} exceeds 1"),
        );
        r.worst_min("ball_slack", 1.0 - c);
    }
    r.notes.push(format!(
        "truncation to {m} entries; the untruncated limit x0 has γ = 2 > 1 while γ(x0 − x_n) ≤ 1"
    ));
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Largest `|‖u+v‖² + ‖u−v‖² − 2‖u‖² − 2‖v‖²|` over coordinate pairs,
/// diagonal pairs and `sample_count` seeded pairs of unit vectors.
pub fn parallelogram_defect(g: &Gauge, sample_count: usize, seed: u64) -> Result<f64> {
    if !g.is_norm(crate::gauge::SYMMETRY_TOL) {
        return Err(Error::NotANorm);
    }
    let d = g.dim();
    let defect = |u: &Vector, v: &Vector| {
        let sq = |x: Vector| g.value(&x).powi(2);
        (sq(u + v) + sq(u - v) - 2.0 * sq(u.clone()) - 2.0 * sq(v.clone())).abs()
    };
    let unit = |i: usize| {
        let mut e = Vector::zeros(d);
        e[i] = 1.0;
        e
    };
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                let (a, b) = (unit(i), unit(j));
                worst = worst.max(defect(&a, &b));
                worst = worst.max(defect(&(&a + &b), &(&a - &b)));
            }
        }
    }
    let mut rng = sampling::rng(seed);
    for _ in 0..sample_count {
        let u = sampling::random_unit(&mut rng, d);
        let v = sampling::random_unit(&mut rng, d);
        worst = worst.max(defect(&u, &v));
    }
    Ok(worst)
}

fn random_flat(rng: &mut SeededRng, d: usize, k: usize, base_box: f64) -> Flat {
    loop {
        let base = sampling::random_in_box(rng, d, base_box);
        let dirs = (0..k).map(|_| sampling::random_unit(rng, d)).collect();
        if let Ok(f) = Flat::new(base, dirs) {
            return f;
        }
    }
}

/// Foot of `y` on `K` in the inner product `⟨a, b⟩ = aᵀMb`.
pub fn inner_product_projection(m: &DMatrix<f64>, k: &Flat, y: &Vector) -> Result<Vector> {
    let q = k.basis();
    let gram = q.transpose() * m * q;
    let rhs = q.transpose() * m * (y - k.base());
    let t = gram
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Internal("singular Gram matrix".into()))?;
    Ok(k.point(&t))
}

/// Projection versus coapproximation on random flats for an inner-product
/// gauge: the projection has `V ≤ tol`, the coapproximation witness lies
/// within `1e−6` of it, and moving the projection by `1e−2` along `K` gives
/// `V > 0`.
pub fn projection_coapprox_check(g: &Gauge, trials: usize, seed: u64) -> Result<SuiteReport> {
    let m = g
        .inner_product()
        .ok_or_else(|| Error::Precondition("gauge must be a centred ellipsoid".into()))?
        .clone();
    if parallelogram_defect(g, 200, seed)? > 1e-8 {
        return Err(Error::Precondition("gauge fails the parallelogram law".into()));
    }
    let start = Instant::now();
    let d = g.dim();
    let mut r = SuiteReport::new(&format!("projection-d{d}"));
    let mut rng = sampling::rng(seed);
    let budget = SearchBudget::default();
    for trial in 0..trials {
        let k_dim = if d == 1 { 1 } else { 1 + trial % (d - 1) };
        let k = random_flat(&mut rng, d, k_dim, 2.0);
        let y = sampling::random_in_box(&mut rng, d, 3.0);
        let p = inner_product_projection(&m, &k, &y)?;
        let inputs = json!({ "K": flat_json(&k), "y": vec_json(&y) });

        let v_proj = coapprox::violation(g, &k, &y, &p, budget)?.0;
        r.worst_max("projection_violation", v_proj);
        r.check(
            v_proj <= DEFAULT_TOL,
            format!("{trial}/projection"),
            inputs.clone(),
            format!("V(projection) = {v_proj}"),
        );

        let res = coapprox::coapprox_solve(g, &k, &y, DEFAULT_TOL, budget)?;
        let dist = res.witness.as_ref().map_or(f64::INFINITY, |w| (w - &p).norm());
        r.worst_max("witness_distance", dist);
        r.check(
            res.status == CoapproxStatus::NonEmpty && dist <= 1e-6,
            format!("{trial}/witness"),
            inputs.clone(),
            format!("status {:?}, distance to projection {dist}", res.status),
        );

        let e = k.basis().column(rng.gen_range(0..k_dim)).into_owned();
        let moved = &p + e * 1e-2;
        let v_moved = coapprox::violation(g, &k, &y, &moved, budget)?.0;
        r.worst_min("perturbed_violation", v_moved);
        r.check(
            v_moved > 0.0,
            format!("{trial}/perturbed"),
            inputs,
            format!("V(perturbed) = {v_moved}"),
        );
    }
    r.wall_time = start.elapsed();
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LineSuite {
    /// Seeded random symmetric polygons in addition to `gauges`.
    pub random: usize,
    pub gauges: Vec<GaugeSpec>,
    pub lines_per_gauge: usize,
    pub audit_samples: usize,
}

impl Default for LineSuite {
    fn default() -> Self {
        Self {
            random: 20,
            gauges: Vec::new(),
            lines_per_gauge: 50,
            audit_samples: 2000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessSuite {
    /// Seeded random asymmetric polygons in addition to `gauges`.
    pub random: usize,
    pub gauges: Vec<GaugeSpec>,
    pub min_lower_bound: f64,
}

impl Default for WitnessSuite {
    fn default() -> Self {
        Self {
            random: 20,
            gauges: Vec::new(),
            min_lower_bound: 2e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtensionSuite {
    /// Include the triangle `{(1,0), (0,1), (−1,−1)}` as a base.
    pub triangle: bool,
    /// Seeded random asymmetric polygon bases in addition to `gauges`.
    pub random: usize,
    /// Planar bases; each is extended by `[−1, 1]`.
    pub gauges: Vec<GaugeSpec>,
    pub separation: SeparationConfig,
}

impl Default for ExtensionSuite {
    fn default() -> Self {
        Self {
            triangle: true,
            random: 2,
            gauges: Vec::new(),
            separation: SeparationConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlaneSuite {
    /// Gauges whose planes must all be coproximinal.
    pub inner_product: Vec<GaugeSpec>,
    pub planes: usize,
    /// Gauges searched for a non-coproximinal plane.
    pub search: Vec<GaugeSpec>,
    pub draws: usize,
}

impl Default for PlaneSuite {
    fn default() -> Self {
        Self {
            inner_product: vec![GaugeSpec::builtin(3, "euclidean", Default::default())],
            planes: 30,
            search: vec![GaugeSpec::builtin(3, "linf", Default::default())],
            draws: 500,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub seed: u64,
    pub lines: LineSuite,
    pub witnesses: WitnessSuite,
    pub extensions: ExtensionSuite,
    pub planes: PlaneSuite,
}

fn gauge_list(specs: &[GaugeSpec], random: usize, seed: u64, make: fn(u64) -> Result<Gauge>) -> Result<Vec<(String, Gauge)>> {
    let mut out = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        out.push((format!("gauge{i}"), Gauge::from_spec(s)?));
    }
    for i in 0..random as u64 {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i);
        out.push((format!("random{i}"), make(s)?));
    }
    Ok(out)
}

/// Suite A: every sampled line of a symmetric gauge is coproximinal.
pub fn line_suite(cfg: &LineSuite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new("lines");
    let gauges = gauge_list(&cfg.gauges, cfg.random, seed, generate::symmetric_polygon)?;
    let budget = SearchBudget::default();
    for (gi, (name, g)) in gauges.iter().enumerate() {
        let mut rng = sampling::rng(seed ^ (0xa000 + gi as u64));
        let d = g.dim();
        for li in 0..cfg.lines_per_gauge {
            let k = random_flat(&mut rng, d, 1, 2.0);
            let y = sampling::random_in_box(&mut rng, d, 3.0);
            let inputs = json!({ "gauge": g.spec(), "K": flat_json(&k), "y": vec_json(&y) });
            let res = coapprox::coapprox_solve(g, &k, &y, DEFAULT_TOL, budget)?;
            let audited = match &res.witness {
                Some(w) if res.status == CoapproxStatus::NonEmpty => {
                    coapprox::audit(g, &k, &y, w, cfg.audit_samples, seed ^ li as u64)?.max(res.violation)
                }
                _ => f64::INFINITY,
            };
            r.worst_max("audited_violation", audited);
            r.check(
                audited <= DEFAULT_TOL,
                format!("{name}/line{li}"),
                inputs,
                format!("status {:?}, audited violation {audited}", res.status),
            );
        }
    }
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Suite B: asymmetric planar gauges have a verified chord witness.
pub fn witness_suite(cfg: &WitnessSuite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new("witnesses");
    let gauges = gauge_list(&cfg.gauges, cfg.random, seed, generate::asymmetric_polygon)?;
    for (name, g) in &gauges {
        let inputs = json!({ "gauge": g.spec() });
        let w = match witness::construct_witness(g) {
            Ok(w) => w,
            Err(e) => {
                r.check(false, name.clone(), inputs, format!("no witness: {e}"));
                continue;
            }
        };
        let report = witness::verify_witness(g, &w)?;
        let lower = report
            .coapprox
            .as_ref()
            .filter(|c| c.status == CoapproxStatus::Empty)
            .and_then(|c| c.lower_bound)
            .unwrap_or(0.0);
        r.worst_min("lambda", w.lambda);
        r.worst_min("lower_bound", lower);
        let failed: Vec<&str> = report.steps.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        r.check(
            report.passed && lower >= cfg.min_lower_bound,
            name.clone(),
            inputs,
            format!("failed steps {failed:?}, lower bound {lower}"),
        );
    }
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Suite C: witness lines of planar bases, lifted into the product with
/// `[−1, 1]`, extend to non-coproximinal planes.
pub fn extension_suite(cfg: &ExtensionSuite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new("extensions");
    let mut bases = Vec::new();
    if cfg.triangle {
        bases.push(("triangle".to_string(), generate::triangle()));
    }
    bases.extend(gauge_list(&cfg.gauges, cfg.random, seed, generate::asymmetric_polygon)?);
    for (name, base) in &bases {
        let inputs = json!({ "base": base.spec() });
        let outcome = (|| -> Result<(f64, CoapproxStatus, f64)> {
            let g = base.product_with_interval()?;
            let (x0, y0) = lifted_witness(base)?;
            let cfg = SeparationConfig { seed, ..cfg.separation };
            let s = witness::extend_to_hyperplane(&g, &x0, &y0, cfg)?;
            Ok((s.margin, s.plane_result.status, s.x0_residual))
        })();
        match outcome {
            Ok((margin, status, residual)) => {
                r.worst_min("separation_margin", margin);
                r.worst_max("x0_residual", residual);
                r.check(
                    margin > 0.0 && status == CoapproxStatus::Empty && residual <= 1e-9,
                    name.clone(),
                    inputs,
                    format!("margin {margin}, plane status {status:?}, residual {residual}"),
                );
            }
            Err(e) => r.check(false, name.clone(), inputs, e.to_string()),
        }
    }
    r.wall_time = start.elapsed();
    Ok(r)
}

/// The witness line of a planar gauge and its target, embedded at height 0.
pub fn lifted_witness(base: &Gauge) -> Result<(Flat, Vector)> {
    let w = witness::construct_witness(base)?;
    let lift = |p: &Vector| Vector::from_vec(vec![p[0], p[1], 0.0]);
    let x0 = Flat::new(Vector::zeros(3), vec![lift(&w.line.directions()[0])])?;
    Ok((x0, lift(&w.target)))
}

/// Suite D: planes of inner-product gauges are coproximinal; a randomized
/// search finds a non-coproximinal plane for the other gauges.
pub fn plane_suite(cfg: &PlaneSuite, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new("planes");
    let budget = SearchBudget::default();
    for (gi, spec) in cfg.inner_product.iter().enumerate() {
        let g = Gauge::from_spec(spec)?;
        let mut rng = sampling::rng(seed ^ (0xd000 + gi as u64));
        for pi in 0..cfg.planes {
            let k = random_flat(&mut rng, g.dim(), 2, 2.0);
            let y = sampling::random_in_box(&mut rng, g.dim(), 3.0);
            let res = coapprox::coapprox_solve(&g, &k, &y, DEFAULT_TOL, budget)?;
            r.worst_max("inner_product_violation", res.violation);
            r.check(
                res.status == CoapproxStatus::NonEmpty,
                format!("gauge{gi}/plane{pi}"),
                json!({ "gauge": spec, "K": flat_json(&k), "y": vec_json(&y) }),
                format!("status {:?}", res.status),
            );
        }
    }
    for (gi, spec) in cfg.search.iter().enumerate() {
        let g = Gauge::from_spec(spec)?;
        let mut rng = sampling::rng(seed ^ (0xe000 + gi as u64));
        let mut found = None;
        for draw in 0..cfg.draws {
            let k = random_flat(&mut rng, g.dim(), 2, 0.0);
            let y = sampling::random_in_box(&mut rng, g.dim(), 3.0);
            let res = coapprox::coapprox_solve(&g, &k, &y, DEFAULT_TOL, budget)?;
            if res.status == CoapproxStatus::Empty {
                found = Some((draw + 1, k, y, res.lower_bound.unwrap_or(0.0)));
                break;
            }
        }
        match found {
            Some((draws, k, y, lower)) => {
                r.cases += 1;
                r.worst_min("search_lower_bound", lower);
                r.notes.push(format!(
                    "search{gi}: empty certificate after {draws} draws, K = {}, y = {}",
                    flat_json(&k),
                    vec_json(&y)
                ));
            }
            None => r.notes.push(format!(
                "search{gi}: inconclusive, no empty certificate within {} draws",
                cfg.draws
            )),
        }
    }
    r.notes.push("finite-dimensional instances only".into());
    r.wall_time = start.elapsed();
    Ok(r)
}

/// Runs suites A (lines), B (witnesses), C (extensions) and D (planes).
pub fn verify_theorems(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut r = SuiteReport::new("theorems");
    r.absorb("A", line_suite(&cfg.lines, cfg.seed)?);
    r.absorb("B", witness_suite(&cfg.witnesses, cfg.seed)?);
    r.absorb("C", extension_suite(&cfg.extensions, cfg.seed)?);
    r.absorb("D", plane_suite(&cfg.planes, cfg.seed)?);
    r.wall_time = start.elapsed();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_values() {
        assert_eq!(l1_gauge_eval(&TruncatedSequence::x_n(1)), 1.0);
        assert_eq!(l1_gauge_eval(&TruncatedSequence::x_n(7).neg()), 1.0 / 7.0);
        assert_eq!(l1_gauge_eval(&TruncatedSequence::x0(20)), 2.0 - 2f64.powi(-19));
        let r = l1_example_check(10, 30).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.margins["gamma_x0"], 2.0 - 2f64.powi(-29));
        let v = l1_gauge_eval(&TruncatedSequence::x0(30).sub(&TruncatedSequence::x_n(5)));
        assert_eq!(v, 1.0 - 2f64.powi(-29));
    }

    #[test]
    fn parallelogram_examples() {
        assert!(parallelogram_defect(&Gauge::euclidean(3), 100, 0).unwrap() <= 1e-9);
        assert!(parallelogram_defect(&Gauge::linf(2).unwrap(), 100, 0).unwrap() >= 2.0);
        let tri = generate::triangle();
        assert!(matches!(parallelogram_defect(&tri, 10, 0), Err(Error::NotANorm)));
    }

    #[test]
    fn projection_examples() {
        let e = Gauge::euclidean(2);
        let k = Flat::new(Vector::zeros(2), vec![Vector::from_vec(vec![1.0, 0.0])]).unwrap();
        let y = Vector::from_vec(vec![3.0, 4.0]);
        let p = inner_product_projection(e.inner_product().unwrap(), &k, &y).unwrap();
        assert_eq!(p, Vector::from_vec(vec![3.0, 0.0]));
        let b = SearchBudget::default();
        assert!(coapprox::violation(&e, &k, &y, &p, b).unwrap().0 <= 1e-9);
        let moved = Vector::from_vec(vec![3.01, 0.0]);
        assert!(coapprox::violation(&e, &k, &y, &moved, b).unwrap().0 > 0.0);
        assert!(projection_coapprox_check(&e, 6, 1).unwrap().passed());
        assert!(projection_coapprox_check(&generate::triangle(), 1, 0).is_err());
    }

    #[test]
    fn report_json_omits_wall_time() {
        let r = l1_example_check(2, 2).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(!text.contains("wall_time"));
        let back: SuiteReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.cases, r.cases);
    }
}
