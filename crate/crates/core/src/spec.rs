//! JSON description of a gauge.
//!
//! ```json
//! {"dim": 2, "kind": "vertices", "data": [[1, 0], [0, 1], [-1, -1]]}
//! {"dim": 2, "kind": "builtin", "data": {"tag": "lp", "params": {"p": "inf"}}}
//! ```
//!
//! Builtin tags: `euclidean`, `l1`, `linf`, `lp` (`p` = 1, 2 or `"inf"`),
//! `ellipsoid` (`matrix`), `shifted` (`base` gauge spec, `offset`).

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeSpec {
    pub dim: usize,
    pub kind: SpecKind,
    pub data: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecKind {
    Vertices,
    Halfspaces,
    Builtin,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinData {
    tag: String,
    #[serde(default)]
    params: Map<String, Value>,
}

/// Parsed builtin body.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Euclidean,
    L1,
    Linf,
    Ellipsoid(Vec<Vec<f64>>),
    Shifted { base: Box<GaugeSpec>, offset: Vec<f64> },
}

/// Parsed `data` field.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Vertices(Vec<Vec<f64>>),
    Halfspaces(Vec<Vec<f64>>),
    Builtin(Builtin),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LpParams {
    p: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EllipsoidParams {
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftedParams {
    base: GaugeSpec,
    offset: Vec<f64>,
}

impl GaugeSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GaugeSpec =
            serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.body()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gauge spec serializes")
    }

    pub fn vertices(dim: usize, points: Vec<Vec<f64>>) -> Self {
        Self {
            dim,
            kind: SpecKind::Vertices,
            data: serde_json::to_value(points).expect("finite"),
        }
    }

    pub fn halfspaces(dim: usize, normals: Vec<Vec<f64>>) -> Self {
        Self {
            dim,
            kind: SpecKind::Halfspaces,
            data: serde_json::to_value(normals).expect("finite"),
        }
    }

    pub fn builtin(dim: usize, tag: &str, params: Map<String, Value>) -> Self {
        Self {
            dim,
            kind: SpecKind::Builtin,
            data: serde_json::to_value(BuiltinData {
                tag: tag.to_string(),
                params,
            })
            .expect("builtin data serializes"),
        }
    }

    pub fn ellipsoid(matrix: Vec<Vec<f64>>) -> Self {
        let mut params = Map::new();
        params.insert("matrix".into(), serde_json::to_value(&matrix).expect("finite"));
        Self::builtin(matrix.len(), "ellipsoid", params)
    }

    pub fn shifted(base: GaugeSpec, offset: Vec<f64>) -> Self {
        let mut params = Map::new();
        params.insert("base".into(), serde_json::to_value(&base).expect("spec"));
        params.insert("offset".into(), serde_json::to_value(&offset).expect("finite"));
        Self::builtin(base.dim, "shifted", params)
    }

    /// Decodes `data` according to `kind`, rejecting unknown fields.
    pub fn body(&self) -> Result<Body> {
        if self.dim == 0 {
            return Err(Error::Spec("dim: must be positive".into()));
        }
        match self.kind {
            SpecKind::Vertices => Ok(Body::Vertices(self.point_list("vertices")?)),
            SpecKind::Halfspaces => Ok(Body::Halfspaces(self.point_list("halfspaces")?)),
            SpecKind::Builtin => {
                let data: BuiltinData = serde_json::from_value(self.data.clone())
                    .map_err(|e| Error::Spec(format!("data: {e}")))?;
                let params = Value::Object(data.params.clone());
                let no_params = || {
                    if data.params.is_empty() {
                        Ok(())
                    } else {
                        Err(Error::Spec(format!(
                            "data.params: builtin `{}` takes no parameters",
                            data.tag
                        )))
                    }
                };
                let builtin = match data.tag.as_str() {
                    "euclidean" | "l2" => {
                        no_params()?;
                        Builtin::Euclidean
                    }
                    "l1" => {
                        no_params()?;
                        Builtin::L1
                    }
                    "linf" => {
                        no_params()?;
                        Builtin::Linf
                    }
                    "lp" => {
                        let p: LpParams = serde_json::from_value(params)
                            .map_err(|e| Error::Spec(format!("data.params: {e}")))?;
                        match &p.p {
                            Value::Number(n) if n.as_f64() == Some(1.0) => Builtin::L1,
                            Value::Number(n) if n.as_f64() == Some(2.0) => Builtin::Euclidean,
                            Value::String(s) if s == "inf" => Builtin::Linf,
                            other => {
                                return Err(Error::Spec(format!(
                                    "data.params.p: expected 1, 2 or \"inf\", got {other}"
                                )))
                            }
                        }
                    }
                    "ellipsoid" => {
                        let p: EllipsoidParams = serde_json::from_value(params)
                            .map_err(|e| Error::Spec(format!("data.params: {e}")))?;
                        if p.matrix.len() != self.dim || p.matrix.iter().any(|r| r.len() != self.dim)
                        {
                            return Err(Error::Spec(format!(
                                "data.params.matrix: expected {0}x{0}",
                                self.dim
                            )));
                        }
                        Builtin::Ellipsoid(p.matrix)
                    }
                    "shifted" => {
                        let p: ShiftedParams = serde_json::from_value(params)
                            .map_err(|e| Error::Spec(format!("data.params: {e}")))?;
                        if p.base.dim != self.dim {
                            return Err(Error::Spec(format!(
                                "data.params.base.dim: expected {}, got {}",
                                self.dim, p.base.dim
                            )));
                        }
                        if p.offset.len() != self.dim {
                            return Err(Error::Spec(format!(
                                "data.params.offset: expected {} coordinates",
                                self.dim
                            )));
                        }
                        p.base.body()?;
                        Builtin::Shifted {
                            base: Box::new(p.base),
                            offset: p.offset,
                        }
                    }
                    other => return Err(Error::Spec(format!("data.tag: unknown builtin `{other}`"))),
                };
                Ok(Body::Builtin(builtin))
            }
        }
    }

    /// The spec of the point-reflected body.
    pub fn reversed(&self) -> Result<GaugeSpec> {
        let neg = |pts: Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            pts.into_iter()
                .map(|p| p.into_iter().map(|c| -c).collect())
                .collect()
        };
        Ok(match self.body()? {
            Body::Vertices(p) => GaugeSpec::vertices(self.dim, neg(p)),
            Body::Halfspaces(p) => GaugeSpec::halfspaces(self.dim, neg(p)),
            Body::Builtin(Builtin::Shifted { base, offset }) => GaugeSpec::shifted(
                base.reversed()?,
                offset.into_iter().map(|c| -c).collect(),
            ),
            Body::Builtin(_) => self.clone(),
        })
    }

    fn point_list(&self, what: &str) -> Result<Vec<Vec<f64>>> {
        let pts: Vec<Vec<f64>> = serde_json::from_value(self.data.clone())
            .map_err(|e| Error::Spec(format!("data: expected a list of {what}: {e}")))?;
        for (i, p) in pts.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::Spec(format!(
                    "data[{i}]: expected {} coordinates, got {}",
                    self.dim,
                    p.len()
                )));
            }
        }
        Ok(pts)
    }
}
