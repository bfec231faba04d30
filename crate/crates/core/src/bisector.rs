//! Sampled bisectors `{z : γ(z − x) = γ(z − y)}` in the plane.
//!
//! `F(z) = γ(z − x) − γ(z − y)` is evaluated on an inclusive grid and each
//! node is labelled by the sign of `F`, with a tolerance band because the
//! bisector of a gauge that is not strictly convex can have interior. The
//! boundary of `{F > 0}` is traced by marching squares with vertices placed
//! by bisection on `F` itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gauge::{Gauge, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Label {
    Negative,
    Positive,
    Band,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Negative => "NEGATIVE",
            Label::Positive => "POSITIVE",
            Label::Band => "BAND",
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
            Label::Band => Label::Band,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Window {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1]) || min.iter().chain(&max).any(|c| !c.is_finite()) {
            return Err(Error::Precondition("window must have min < max in both axes".into()));
        }
        Ok(Self { min, max })
    }

    pub fn diagonal(&self) -> f64 {
        (self.max[0] - self.min[0]).hypot(self.max[1] - self.min[1])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BisectorSample {
    pub window: Window,
    /// Grid nodes per axis, `[nx, ny]`.
    pub resolution: [usize; 2],
    pub band_tol: f64,
    /// `F` at the nodes, row-major with `x` varying fastest.
    pub values: Vec<f64>,
    pub labels: Vec<Label>,
    pub contours: Vec<Vec<[f64; 2]>>,
}

impl BisectorSample {
    pub fn node(&self, i: usize, j: usize) -> [f64; 2] {
        grid_node(&self.window, self.resolution, i, j)
    }

    pub fn label(&self, i: usize, j: usize) -> Label {
        self.labels[j * self.resolution[0] + i]
    }
}

fn grid_node(w: &Window, res: [usize; 2], i: usize, j: usize) -> [f64; 2] {
    let t = |k: usize, n: usize, lo: f64, hi: f64| {
        if k + 1 == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    };
    [
        t(i, res[0], w.min[0], w.max[0]),
        t(j, res[1], w.min[1], w.max[1]),
    ]
}

fn classify(f: f64, band_tol: f64) -> Label {
    if f.abs() <= band_tol {
        Label::Band
    } else if f > 0.0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// `1e−3 × window diagonal × max γ on the Euclidean unit circle`.
pub fn default_band_tol(g: &Gauge, window: &Window) -> f64 {
    1e-3 * window.diagonal() * g.lipschitz()
}

pub fn classify_point(g: &Gauge, x: &Vector, y: &Vector, z: &Vector, band_tol: f64) -> Result<Label> {
    if g.dim() != 2 {
        return Err(Error::Precondition("bisector sampling is planar".into()));
    }
    for p in [x, y, z] {
        check_dim(2, p.len())?;
    }
    if x == y {
        return Ok(Label::Band);
    }
    Ok(classify(g.value(&(z - x)) - g.value(&(z - y)), band_tol))
}

pub fn sample_bisector(
    g: &Gauge,
    x: &Vector,
    y: &Vector,
    window: Window,
    resolution: [usize; 2],
    band_tol: Option<f64>,
) -> Result<BisectorSample> {
    if g.dim() != 2 {
        return Err(Error::Precondition("bisector sampling is planar".into()));
    }
    check_dim(2, x.len())?;
    check_dim(2, y.len())?;
    let window = Window::new(window.min, window.max)?;
    let [nx, ny] = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::Precondition("resolution must be at least 2×2".into()));
    }
    let band_tol = band_tol.unwrap_or_else(|| default_band_tol(g, &window));
    if !(band_tol >= 0.0) {
        return Err(Error::Precondition("band tolerance must be non-negative".into()));
    }
    let f = |p: [f64; 2]| {
        let z = Vector::from_vec(p.to_vec());
        g.value(&(&z - x)) - g.value(&(&z - y))
    };
    let mut values = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            values.push(f(grid_node(&window, resolution, i, j)));
        }
    }
    let labels = if x == y {
        vec![Label::Band; nx * ny]
    } else {
        values.iter().map(|&v| classify(v, band_tol)).collect()
    };
    let contours = if x == y {
        Vec::new()
    } else {
        trace_contours(&window, resolution, &values, &f)
    };
    Ok(BisectorSample {
        window,
        resolution,
        band_tol,
        values,
        labels,
        contours,
    })
}

/// Grid edge: `(i, j, vertical)`; horizontal edges join `(i, j)–(i+1, j)`,
/// vertical ones `(i, j)–(i, j+1)`.
type EdgeKey = (usize, usize, bool);

fn trace_contours<F: Fn([f64; 2]) -> f64>(
    window: &Window,
    res: [usize; 2],
    values: &[f64],
    f: &F,
) -> Vec<Vec<[f64; 2]>> {
    let [nx, ny] = res;
    let inside = |i: usize, j: usize| values[j * nx + i] > 0.0;
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let idx = inside(i, j) as u8
                | (inside(i + 1, j) as u8) << 1
                | (inside(i + 1, j + 1) as u8) << 2
                | (inside(i, j + 1) as u8) << 3;
            let bottom = (i, j, false);
            let right = (i + 1, j, true);
            let top = (i, j + 1, false);
            let left = (i, j, true);
            let center_inside = || {
                let a = grid_node(window, res, i, j);
                let b = grid_node(window, res, i + 1, j + 1);
                f([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]) > 0.0
            };
            match idx {
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((left, top)),
                5 => {
                    if center_inside() {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                10 => {
                    if center_inside() {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    } else {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    }
                }
                _ => {}
            }
        }
    }

    let mut adjacency: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut point_cache: BTreeMap<EdgeKey, [f64; 2]> = BTreeMap::new();
    let mut vertex = |key: EdgeKey| -> [f64; 2] {
        *point_cache.entry(key).or_insert_with(|| {
            let (i, j, vertical) = key;
            let a = grid_node(window, res, i, j);
            let b = if vertical {
                grid_node(window, res, i, j + 1)
            } else {
                grid_node(window, res, i + 1, j)
            };
            edge_root(f, a, b)
        })
    };

    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    let starts: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(k, _)| *k)
        .chain(adjacency.keys().copied())
        .collect();
    for start in starts {
        let Some(&first) = adjacency[&start].iter().find(|&&s| !used[s]) else {
            continue;
        };
        let mut keys = vec![start];
        let mut current = start;
        let mut seg = first;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == current { b } else { a };
            keys.push(next);
            current = next;
            match adjacency[&current].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        polylines.push(keys.into_iter().map(&mut vertex).collect());
    }
    polylines
}

/// Point on `[a, b]` where `F` changes from `> 0` to `≤ 0`, by bisection.
fn edge_root<F: Fn([f64; 2]) -> f64>(f: &F, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let lerp = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let a_in = f(a) > 0.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if (f(lerp(m)) > 0.0) == a_in {
            lo = m;
        } else {
            hi = m;
        }
    }
    lerp(0.5 * (lo + hi))
}

pub fn to_csv(sample: &BisectorSample) -> String {
    let mut out = String::from("zx,zy,F,label\n");
    let [nx, ny] = sample.resolution;
    for j in 0..ny {
        for i in 0..nx {
            let p = sample.node(i, j);
            let k = j * nx + i;
            let _ = writeln!(out, "{},{},{},{}", p[0], p[1], sample.values[k], sample.labels[k].as_str());
        }
    }
    out
}

fn label_fill(l: Label) -> &'static str {
    match l {
        Label::Negative => "#cfe2f3",
        Label::Positive => "#f4cccc",
        Label::Band => "#d9d9d9",
    }
}

/// SVG 1.1 drawing with the window as view box (y pointing up), one shaded
/// rectangle per run of equal labels in a grid row, and one polyline per
/// contour.
pub fn to_svg(sample: &BisectorSample) -> String {
    let w = &sample.window;
    let [nx, ny] = sample.resolution;
    let width = w.max[0] - w.min[0];
    let height = w.max[1] - w.min[1];
    let dx = width / (nx - 1) as f64;
    let dy = height / (ny - 1) as f64;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        w.min[0] - 0.5 * dx,
        -w.max[1] - 0.5 * dy,
        width + dx,
        height + dy
    );
    let _ = writeln!(out, r#"<g shape-rendering="crispEdges" stroke="none">"#);
    for j in 0..ny {
        let mut i = 0;
        while i < nx {
            let label = sample.label(i, j);
            let mut run = 1;
            while i + run < nx && sample.label(i + run, j) == label {
                run += 1;
            }
            let p = sample.node(i, j);
            let _ = writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                p[0] - 0.5 * dx,
                -p[1] - 0.5 * dy,
                run as f64 * dx,
                dy,
                label_fill(label)
            );
            i += run;
        }
    }
    let _ = writeln!(out, "</g>");
    let stroke = 0.003 * w.diagonal();
    for line in &sample.contours {
        let pts: Vec<String> = line.iter().map(|p| format!("{},{}", p[0], -p[1])).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="black" stroke-width="{stroke}" points="{}"/>"#,
            pts.join(" ")
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

pub fn emit_csv(sample: &BisectorSample, path: &Path) -> Result<()> {
    write_file(path, &to_csv(sample))
}

pub fn emit_svg(sample: &BisectorSample, path: &Path) -> Result<()> {
    write_file(path, &to_svg(sample))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
