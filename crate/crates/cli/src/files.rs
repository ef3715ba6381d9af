//! JSON instance and table files.
//!
//! Every rational is a string: `"p/q"` in lowest terms with the sign on the
//! numerator, or a bare integer when the denominator is 1.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use gpp_core::model::{Dag, GppInstance, Path, ScalarWeight, Weights};
use gpp_core::pgpp::TableEntry;
use gpp_core::piecewise::Line;
use gpp_core::{AffineMap, PgppTable, PlFunction, Rational};
use serde::{Deserialize, Serialize};

/// A CLI-level validation failure, reported with a stable name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invalid {
    pub name: &'static str,
    pub message: String,
}

impl Invalid {
    pub fn new(name: &'static str, message: impl Into<String>) -> Self {
        Invalid { name, message: message.into() }
    }
}

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Invalid {}

type Result<T, E = Invalid> = std::result::Result<T, E>;

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Invalid::new("InvalidRational", format!("not a rational: {s:?}"));
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut parts = body.splitn(2, '/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || den.is_some_and(|d| !digits(d)) {
        return Err(bad());
    }
    Rational::from_str(s).map_err(|_| bad())
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Parses a comma-separated list of rationals.
pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>> {
    s.split(',').map(|p| parse_rational(p.trim())).collect()
}

fn parse_all(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|v| parse_rational(v)).collect()
}

fn format_all(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Scalar,
    Vector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum WeightDef {
    Affine {
        a: String,
        b: String,
    },
    Piecewise {
        breakpoints: Vec<String>,
        pieces: Vec<(String, String)>,
    },
    Quadratic {
        a: String,
        b: String,
        c: String,
    },
    Matrix {
        #[serde(rename = "A")]
        matrix: Vec<Vec<String>>,
        b: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDef {
    pub id: usize,
    pub from: String,
    pub to: String,
    pub weight: WeightDef,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub kind: Kind,
    pub k: usize,
    pub vertices: Vec<String>,
    pub source: String,
    pub target: String,
    pub edges: Vec<EdgeDef>,
    #[serde(rename = "L")]
    pub liquidation: Vec<String>,
    pub x0: Option<Vec<String>>,
}

impl InstanceFile {
    /// Serializes an instance, naming vertex `i` as `v{i}`.
    pub fn from_instance(inst: &GppInstance) -> Self {
        let names: Vec<String> = (0..inst.dag().vertex_count()).map(|i| format!("v{i}")).collect();
        Self::from_instance_named(inst, names)
    }

    pub fn from_instance_named(inst: &GppInstance, vertices: Vec<String>) -> Self {
        let dag = inst.dag();
        let weight = |id: usize| match inst.weights() {
            Weights::Scalar(ws) => match &ws[id] {
                ScalarWeight::Affine(l) => {
                    WeightDef::Affine { a: format_rational(&l.slope), b: format_rational(&l.intercept) }
                }
                ScalarWeight::PiecewiseAffine(f) => WeightDef::Piecewise {
                    breakpoints: format_all(f.breakpoints()),
                    pieces: f
                        .pieces()
                        .iter()
                        .map(|l| (format_rational(&l.slope), format_rational(&l.intercept)))
                        .collect(),
                },
                ScalarWeight::Quadratic { a, b, c } => WeightDef::Quadratic {
                    a: format_rational(a),
                    b: format_rational(b),
                    c: format_rational(c),
                },
            },
            Weights::Vector(ms) => WeightDef::Matrix {
                matrix: ms[id].matrix().iter().map(|row| format_all(row)).collect(),
                b: format_all(ms[id].offset()),
            },
        };
        InstanceFile {
            kind: if inst.is_scalar() { Kind::Scalar } else { Kind::Vector },
            k: inst.k(),
            source: vertices[dag.source()].clone(),
            target: vertices[dag.target()].clone(),
            edges: dag
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| EdgeDef {
                    id,
                    from: vertices[e.from].clone(),
                    to: vertices[e.to].clone(),
                    weight: weight(id),
                })
                .collect(),
            vertices,
            liquidation: format_all(inst.liquidation()),
            x0: inst.x0().map(format_all),
        }
    }

    /// Validates names, ids and weight kinds and builds the instance.
    pub fn to_instance(&self) -> anyhow::Result<GppInstance> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, name) in self.vertices.iter().enumerate() {
            if index.insert(name, i).is_some() {
                return Err(Invalid::new("DuplicateVertex", format!("vertex {name:?} listed twice")).into());
            }
        }
        let vertex = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Invalid::new("UnknownVertex", format!("unknown vertex {name:?}")))
        };
        let mut edges: Vec<&EdgeDef> = self.edges.iter().collect();
        edges.sort_by_key(|e| e.id);
        if let Some((pos, e)) = edges.iter().enumerate().find(|(pos, e)| e.id != *pos) {
            return Err(Invalid::new("NonDenseEdgeIds", format!("edge ids must be 0..m, found {} at {pos}", e.id)).into());
        }
        let mut pairs = Vec::with_capacity(edges.len());
        for e in &edges {
            pairs.push((vertex(&e.from)?, vertex(&e.to)?));
        }
        let dag = Dag::new(self.vertices.len(), vertex(&self.source)?, vertex(&self.target)?, pairs)?;
        let weights = match self.kind {
            Kind::Scalar => {
                if self.k != 1 {
                    return Err(Invalid::new("KindMismatch", format!("scalar instances have k = 1, got {}", self.k)).into());
                }
                let mut ws = Vec::with_capacity(edges.len());
                for e in &edges {
                    ws.push(scalar_weight(e)?);
                }
                Weights::Scalar(ws)
            }
            Kind::Vector => {
                let mut ms = Vec::with_capacity(edges.len());
                for e in &edges {
                    let WeightDef::Matrix { matrix, b } = &e.weight else {
                        return Err(Invalid::new("KindMismatch", format!("edge {} of a vector instance needs a matrix weight", e.id)).into());
                    };
                    let rows = matrix.iter().map(|r| parse_all(r)).collect::<Result<Vec<_>>>()?;
                    ms.push(AffineMap::new(rows, parse_all(b)?)?);
                }
                Weights::Vector(ms)
            }
        };
        let liquidation = parse_all(&self.liquidation)?;
        let x0 = self.x0.as_deref().map(parse_all).transpose()?;
        let inst = GppInstance::new(dag, weights, liquidation, x0)?;
        if inst.k() != self.k {
            return Err(Invalid::new("KindMismatch", format!("declared k = {} but weights have dimension {}", self.k, inst.k())).into());
        }
        Ok(inst)
    }
}

fn scalar_weight(e: &EdgeDef) -> anyhow::Result<ScalarWeight> {
    Ok(match &e.weight {
        WeightDef::Affine { a, b } => ScalarWeight::affine(parse_rational(a)?, parse_rational(b)?),
        WeightDef::Piecewise { breakpoints, pieces } => {
            let lines = pieces
                .iter()
                .map(|(a, b)| Ok(Line::new(parse_rational(a)?, parse_rational(b)?)))
                .collect::<Result<Vec<_>>>()?;
            let f = PlFunction::new(parse_all(breakpoints)?, lines)
                .map_err(|err| gpp_core::Error::InvalidWeight { edge: e.id, reason: err.to_string() })?;
            // keep the declared representation even for a single piece
            ScalarWeight::PiecewiseAffine(f)
        }
        WeightDef::Quadratic { a, b, c } => {
            ScalarWeight::Quadratic { a: parse_rational(a)?, b: parse_rational(b)?, c: parse_rational(c)? }
        }
        WeightDef::Matrix { .. } => {
            return Err(Invalid::new("KindMismatch", format!("edge {} of a scalar instance has a matrix weight", e.id)).into())
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDef {
    pub x_lo: String,
    pub x_hi: String,
    pub slope: String,
    pub intercept: String,
    pub path: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableFile {
    pub objective_sign: i8,
    pub entries: Vec<EntryDef>,
}

impl TableFile {
    pub fn from_table(table: &PgppTable) -> Self {
        let bound = |b: Option<&Rational>, inf: &str| b.map_or_else(|| inf.to_string(), format_rational);
        TableFile {
            objective_sign: table.objective_sign(),
            entries: table
                .entries()
                .iter()
                .map(|e| EntryDef {
                    x_lo: bound(e.lo.as_ref(), "-inf"),
                    x_hi: bound(e.hi.as_ref(), "+inf"),
                    slope: format_rational(&e.line.slope),
                    intercept: format_rational(&e.line.intercept),
                    path: e.path.edges().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> anyhow::Result<PgppTable> {
        let bound = |s: &str, inf: &str| -> Result<Option<Rational>> {
            if s == inf {
                Ok(None)
            } else {
                parse_rational(s).map(Some)
            }
        };
        let entries = self
            .entries
            .iter()
            .map(|e| {
                Ok(TableEntry {
                    lo: bound(&e.x_lo, "-inf")?,
                    hi: bound(&e.x_hi, "+inf")?,
                    line: Line::new(parse_rational(&e.slope)?, parse_rational(&e.intercept)?),
                    path: Path::new(e.path.clone()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PgppTable::from_entries(entries, self.objective_sign)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use gpp_core::{q, rational};

    #[test]
    fn rationals_are_canonical() {
        assert_eq!(parse_rational("6/4").unwrap(), rational(3, 2));
        assert_eq!(format_rational(&rational(-6, 4)), "-3/2");
        assert_eq!(format_rational(&q(5)), "5");
        for bad in ["", "+1", "1/0", "1/-2", "1.5", "--1", "1/", "/2", " 1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = r#"{"kind":"scalar","k":1,"vertices":["s","t"],"source":"s","target":"t",
            "edges":[{"id":0,"from":"s","to":"t","weight":{"type":"affine","a":"2","b":"1"}}],
            "L":["-1"],"x0":null,"extra":1}"#;
        assert!(serde_json::from_str::<InstanceFile>(text).is_err());
        let ok = text.replace(",\"extra\":1", "");
        let file: InstanceFile = serde_json::from_str(&ok).unwrap();
        assert_eq!(file.to_instance().unwrap().dag().edge_count(), 1);
    }
}
