//! `minkowski`: evaluate gauges, solve coapproximation queries, build
//! witnesses, sample bisectors and run the verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use minkowski::analysis::{self, VerifyConfig};
use minkowski::bisector::{self, Label, Window};
use minkowski::witness::{self, SeparationConfig};
use minkowski::{
    best_approx, coapprox_solve, equivalence_constants, Error, Flat, Gauge, GaugeSpec,
    SearchBudget, Vector,
};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Parser)]
#[command(name = "minkowski", version, about = "Computations in generalized Minkowski spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GaugeArg {
    /// Gauge spec file, or `builtin:euclidean|l1|linf|ellipsoid:a11,a12,a22|shifted:<builtin>:<offset>`.
    #[arg(long, allow_hyphen_values = true)]
    gauge: String,
    /// Ambient dimension for dimension-free builtins (default: from the geometry, else 2).
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the gauge at a point.
    Eval {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Evaluate the reversed gauge `x ↦ γ(−x)`.
        #[arg(long)]
        reverse: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Certify or refute a best coapproximation of a point on a flat.
    Coapprox {
        #[command(flatten)]
        gauge: GaugeArg,
        /// `base=x,y,..;dirs=u1,u2,..|v1,v2,..`
        #[arg(long, allow_hyphen_values = true)]
        flat: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Nearest point `x` of a flat in the gauge distance `γ(x − y)`.
    Bestapprox {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, allow_hyphen_values = true)]
        flat: String,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        output: Output,
    },
    /// Construct and verify the chord witness of a non-symmetric planar gauge.
    Witness {
        #[command(flatten)]
        gauge: GaugeArg,
        /// Use this chord direction instead of searching.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<String>,
        /// Also extend the witness line to a plane in the product with [−1, 1].
        #[arg(long)]
        extend: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the spec of the gauge the witness lives in.
        #[arg(long)]
        emit_gauge: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Sample the bisector of two points in the plane.
    Bisector {
        #[command(flatten)]
        gauge: GaugeArg,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// `xmin,ymin,xmax,ymax`
        #[arg(long, allow_hyphen_values = true, default_value = "-3,-3,3,3")]
        window: String,
        /// `nx,ny` grid nodes.
        #[arg(long, default_value = "256,256")]
        resolution: String,
        #[arg(long)]
        band_tol: Option<f64>,
        /// Sample with the reversed gauge.
        #[arg(long)]
        reverse: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Equivalence constants `c0 γ₁ ≤ γ₂ ≤ c1 γ₁`.
    Constants {
        #[command(flatten)]
        gauge: GaugeArg,
        /// The second gauge `γ₂`.
        #[arg(long, allow_hyphen_values = true)]
        other: String,
        #[command(flatten)]
        output: Output,
    },
    /// Run the verification suites.
    Verify {
        /// Suite configuration (JSON); defaults apply to omitted fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Failure with its exit code: 1 for negative results, 2 for bad input.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotFound(_) | Error::Undecided(_) | Error::Internal(_) | Error::Lp(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Eval {
            gauge,
            point,
            reverse,
            output,
        } => {
            let x = parse_vector(&point, "--point")?;
            let mut g = load_gauge(&gauge, Some(x.len()))?;
            if reverse {
                g = g.reverse();
            }
            emit(&output, &json!({ "value": g.eval(&x)? }))?;
            Ok(0)
        }
        Command::Coapprox {
            gauge,
            flat,
            point,
            tol,
            max_rounds,
            output,
        } => {
            let y = parse_vector(&point, "--point")?;
            let k = parse_flat(&flat)?;
            let g = load_gauge(&gauge, Some(y.len()))?;
            let mut budget = SearchBudget::default();
            if let Some(r) = max_rounds {
                budget.max_rounds = r;
            }
            emit(&output, &coapprox_solve(&g, &k, &y, tol, budget)?)?;
            Ok(0)
        }
        Command::Bestapprox {
            gauge,
            flat,
            point,
            output,
        } => {
            let y = parse_vector(&point, "--point")?;
            let k = parse_flat(&flat)?;
            let g = load_gauge(&gauge, Some(y.len()))?;
            let (x, d) = best_approx(&g, &k, &y)?;
            emit(&output, &json!({ "point": x.as_slice(), "distance": d }))?;
            Ok(0)
        }
        Command::Witness {
            gauge,
            direction,
            extend,
            seed,
            emit_gauge,
            output,
        } => {
            let g = load_gauge(&gauge, Some(2))?;
            let w = match direction {
                Some(u) => witness::construct_witness_along(&g, &parse_vector(&u, "--direction")?)?,
                None => witness::construct_witness(&g)?,
            };
            let report = witness::verify_witness(&g, &w)?;
            let mut result = Map::new();
            result.insert("witness".into(), to_value(&w));
            result.insert("verification".into(), to_value(&report));
            let mut emitted = g.spec().clone();
            if extend {
                let prism = g.product_with_interval()?;
                let (x0, y0) = analysis::lifted_witness(&g)?;
                let cfg = SeparationConfig {
                    seed,
                    ..SeparationConfig::default()
                };
                let s = witness::extend_to_hyperplane(&prism, &x0, &y0, cfg)?;
                result.insert("separation".into(), to_value(&s));
                emitted = prism.spec().clone();
            }
            if let Some(path) = emit_gauge {
                write_text(&path, &(emitted.to_json() + "\n"))?;
            }
            emit(&output, &Value::Object(result))?;
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::Bisector {
            gauge,
            x,
            y,
            window,
            resolution,
            band_tol,
            reverse,
            svg,
            csv,
            output,
        } => {
            let x = parse_vector(&x, "--x")?;
            let y = parse_vector(&y, "--y")?;
            let mut g = load_gauge(&gauge, Some(2))?;
            if reverse {
                g = g.reverse();
            }
            let w = parse_list(&window, "--window")?;
            let r = parse_list(&resolution, "--resolution")?;
            if w.len() != 4 || r.len() != 2 || r.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
                return Err(usage("--window needs 4 numbers and --resolution 2 counts"));
            }
            let window = Window::new([w[0], w[1]], [w[2], w[3]])?;
            let res = [r[0] as usize, r[1] as usize];
            let sample = bisector::sample_bisector(&g, &x, &y, window, res, band_tol)?;
            if let Some(p) = &svg {
                bisector::emit_svg(&sample, p)?;
            }
            if let Some(p) = &csv {
                bisector::emit_csv(&sample, p)?;
            }
            let count = |l: Label| sample.labels.iter().filter(|&&m| m == l).count();
            emit(
                &output,
                &json!({
                    "resolution": sample.resolution,
                    "band_tol": sample.band_tol,
                    "contours": sample.contours.len(),
                    "contour_vertices": sample.contours.iter().map(Vec::len).sum::<usize>(),
                    "labels": {
                        "NEGATIVE": count(Label::Negative),
                        "POSITIVE": count(Label::Positive),
                        "BAND": count(Label::Band),
                    },
                }),
            )?;
            Ok(0)
        }
        Command::Constants {
            gauge,
            other,
            output,
        } => {
            let g1 = load_gauge(&gauge, None)?;
            let g2 = load_gauge(
                &GaugeArg {
                    gauge: other,
                    dim: Some(g1.dim()),
                },
                None,
            )?;
            emit(&output, &equivalence_constants(&g1, &g2)?)?;
            Ok(0)
        }
        Command::Verify {
            config,
            seed,
            format,
            output,
        } => {
            let mut cfg = match &config {
                Some(p) => serde_json::from_str::<VerifyConfig>(&read_text(p)?)
                    .map_err(|e| usage(format!("{}: {e}", p.display())))?,
                None => VerifyConfig::default(),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let report = analysis::verify_theorems(&cfg)?;
            eprintln!("verification finished in {:.2} s", report.wall_time.as_secs_f64());
            match format {
                Format::Json => emit(&output, &report)?,
                Format::Text => write_output(&output, &report.to_string())?,
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn emit<T: Serialize>(output: &Output, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("results serialize") + "\n";
    write_output(output, &text)
}

fn write_output(output: &Output, text: &str) -> CliResult<()> {
    match &output.out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    })
}

fn parse_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| usage(format!("{what}: `{s}` is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(usage(format!("{what}: `{s}` is not finite")))
            }
        })
        .collect()
}

fn parse_vector(text: &str, what: &str) -> CliResult<Vector> {
    Ok(Vector::from_vec(parse_list(text, what)?))
}

/// `base=…;dirs=…|…` (also `dir=`).
fn parse_flat(text: &str) -> CliResult<Flat> {
    let mut base = None;
    let mut dirs = Vec::new();
    for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("--flat: expected key=value, got `{part}`")))?;
        match key.trim() {
            "base" => base = Some(parse_vector(value, "--flat base")?),
            "dirs" | "dir" => {
                for d in value.split('|') {
                    dirs.push(parse_vector(d, "--flat dirs")?);
                }
            }
            other => return Err(usage(format!("--flat: unknown key `{other}`"))),
        }
    }
    let base = base.ok_or_else(|| usage("--flat: missing base="))?;
    Ok(Flat::new(base, dirs)?)
}

fn load_gauge(arg: &GaugeArg, geometry_dim: Option<usize>) -> CliResult<Gauge> {
    let spec = match arg.gauge.strip_prefix("builtin:") {
        Some(rest) => builtin_spec(rest, arg.dim.or(geometry_dim).unwrap_or(2))?,
        None => {
            let path = Path::new(&arg.gauge);
            GaugeSpec::from_json(&read_text(path)?)
                .map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
    };
    Ok(Gauge::from_spec(&spec)?)
}

fn builtin_spec(text: &str, dim: usize) -> CliResult<GaugeSpec> {
    let (tag, rest) = text.split_once(':').unwrap_or((text, ""));
    match tag {
        "euclidean" | "l2" | "l1" | "linf" if rest.is_empty() => {
            Ok(GaugeSpec::builtin(dim, tag, Map::new()))
        }
        "ellipsoid" => {
            let a = parse_list(rest, "builtin:ellipsoid")?;
            if a.len() != 3 {
                return Err(usage("builtin:ellipsoid takes a11,a12,a22"));
            }
            Ok(GaugeSpec::ellipsoid(vec![vec![a[0], a[1]], vec![a[1], a[2]]]))
        }
        "shifted" => {
            let (base, offset) = rest
                .rsplit_once(':')
                .ok_or_else(|| usage("builtin:shifted takes <builtin>:<offset>"))?;
            let offset = parse_list(offset, "builtin:shifted offset")?;
            let base = builtin_spec(base, offset.len())?;
            Ok(GaugeSpec::shifted(base, offset))
        }
        _ => Err(usage(format!("unknown builtin `{text}`"))),
    }
}
