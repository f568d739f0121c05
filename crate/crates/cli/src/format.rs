//! JSON encodings of scenarios and distributions. Rationals are strings
//! `"num/den"`; plain integers (as numbers or strings) are accepted on input.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use simpol_core::dist::{EdgeMatrix, OutcomeProfile, Scenario, SimplicialDistribution};
use simpol_core::rational::{format_rational, parse_rational};
use simpol_core::space::{Edge, MeasurementSpace, VertexId};
use simpol_core::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub outcomes: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub id: String,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<EdgeJson>,
}

/// Either an inline scenario or a named cycle scenario such as `"C4_d2"`
/// (the directed n-circle with d outcomes everywhere).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Inline(ScenarioJson),
    Named(String),
}

impl ScenarioRef {
    pub fn to_scenario(&self) -> Result<Scenario> {
        match self {
            ScenarioRef::Inline(s) => s.to_scenario(),
            ScenarioRef::Named(name) => named_scenario(name),
        }
    }
}

pub fn named_scenario(name: &str) -> Result<Scenario> {
    let parsed = name
        .strip_prefix('C')
        .and_then(|rest| rest.split_once("_d"))
        .and_then(|(n, d)| Some((n.parse::<usize>().ok()?, d.parse::<usize>().ok()?)));
    let (n, d) = parsed.ok_or_else(|| anyhow!("unknown scenario id {name:?}; expected e.g. \"C4_d2\""))?;
    Ok(Scenario::uniform(MeasurementSpace::cycle(n)?, d)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub scenario: ScenarioRef,
    pub matrices: BTreeMap<String, Vec<Vec<Value>>>,
}

pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(n) if n.is_i64() => Ok(parse_rational(&n.to_string())?),
        other => bail!("expected a rational string like \"1/2\", found {other}"),
    }
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

impl ScenarioJson {
    pub fn to_scenario(&self) -> Result<Scenario> {
        let vertices = self.vertices.iter().map(|v| VertexId::new(v.id.as_str())).collect();
        let edges = self
            .edges
            .iter()
            .map(|e| Edge::new(e.id.as_str(), e.from.as_str(), e.to.as_str()))
            .collect();
        let space = MeasurementSpace::new(vertices, edges)?;
        let profile =
            OutcomeProfile::from_pairs(self.vertices.iter().map(|v| (VertexId::new(v.id.as_str()), v.outcomes)));
        Ok(Scenario::new(space, &profile)?)
    }

    pub fn from_scenario(scenario: &Scenario) -> Self {
        let space = scenario.space();
        ScenarioJson {
            vertices: space
                .vertices()
                .iter()
                .enumerate()
                .map(|(i, v)| VertexJson {
                    id: v.to_string(),
                    outcomes: scenario.arity(i),
                })
                .collect(),
            edges: space
                .edges()
                .iter()
                .map(|e| EdgeJson {
                    id: e.id.to_string(),
                    from: e.src.to_string(),
                    to: e.tgt.to_string(),
                })
                .collect(),
        }
    }
}

impl DistributionJson {
    pub fn to_distribution(&self) -> Result<SimplicialDistribution> {
        let scenario = Arc::new(self.scenario.to_scenario()?);
        let mut named = BTreeMap::new();
        for (id, rows) in &self.matrices {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(rational_from_json).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .with_context(|| format!("matrix of edge {id}"))?;
            named.insert(id.as_str().into(), EdgeMatrix::from_rows(rows)?);
        }
        Ok(SimplicialDistribution::from_named(scenario, named)?)
    }

    pub fn from_distribution(p: &SimplicialDistribution, note: Option<String>) -> Self {
        DistributionJson {
            note,
            scenario: ScenarioRef::Inline(ScenarioJson::from_scenario(p.scenario())),
            matrices: p
                .space()
                .edges()
                .iter()
                .zip(p.matrices())
                .map(|(e, m)| (e.id.to_string(), matrix_to_json(m)))
                .collect(),
        }
    }
}

pub fn matrix_to_json(m: &EdgeMatrix) -> Vec<Vec<Value>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(rational_to_json).collect())
        .collect()
}

/// Matrices keyed by edge id, for embedding in reports.
pub fn matrices_json(p: &SimplicialDistribution) -> Value {
    let map: serde_json::Map<String, Value> = p
        .space()
        .edges()
        .iter()
        .zip(p.matrices())
        .map(|(e, m)| (e.id.to_string(), serde_json::to_value(matrix_to_json(m)).expect("plain json")))
        .collect();
    Value::Object(map)
}

pub fn parse_distribution(text: &str) -> Result<SimplicialDistribution> {
    let json: DistributionJson = serde_json::from_str(text).context("malformed distribution JSON")?;
    json.to_distribution()
}

/// A scenario file may be a bare scenario or a distribution file.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let value: Value = serde_json::from_str(text).context("malformed scenario JSON")?;
    let inner = value.get("scenario").cloned().unwrap_or(value);
    let json: ScenarioRef = serde_json::from_value(inner).context("malformed scenario JSON")?;
    json.to_scenario()
}

/// Pretty JSON with one line per vertex, edge and matrix row.
pub fn distribution_to_string(p: &SimplicialDistribution, note: Option<String>) -> String {
    let j = DistributionJson::from_distribution(p, note);
    let mut out = String::from("{\n");
    if let Some(note) = &j.note {
        out += &format!("  \"note\": {},\n", compact(note));
    }
    let ScenarioRef::Inline(sc) = &j.scenario else {
        unreachable!("written scenarios are inline")
    };
    let list = |items: Vec<String>| items.join(",\n      ");
    out += "  \"scenario\": {\n    \"vertices\": [\n      ";
    out += &list(sc.vertices.iter().map(compact).collect());
    out += "\n    ],\n    \"edges\": [\n      ";
    out += &list(sc.edges.iter().map(compact).collect());
    out += "\n    ]\n  },\n  \"matrices\": {\n";
    let matrices: Vec<String> = j
        .matrices
        .iter()
        .map(|(id, rows)| {
            let rows: Vec<String> = rows.iter().map(compact).collect();
            format!("    {}: [\n      {}\n    ]", compact(id), rows.join(",\n      "))
        })
        .collect();
    out += &matrices.join(",\n");
    out += "\n  }\n}";
    out
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain json")
}

pub fn read_file(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_distribution(path: &std::path::Path) -> Result<SimplicialDistribution> {
    parse_distribution(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn load_scenario(path: &std::path::Path) -> Result<Scenario> {
    parse_scenario(&read_file(path)?).with_context(|| format!("in {}", path.display()))
}

/// Parses `a,b,c` into trimmed non-empty items.
pub fn split_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(String::from)
        .collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    split_list(text)
        .iter()
        .map(|s| s.parse::<usize>().map_err(|_| anyhow!("not a nonnegative integer: {s:?}")))
        .collect()
}
