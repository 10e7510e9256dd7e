//! JSON instance files.
//!
//! ```json
//! {
//!   "agents": 3,
//!   "resources": [{ "name": "r", "costs": [1, 2, 3], "copies": 2 }],
//!   "coalitions": [[1, 2], [3]],
//!   "path": [1, 2, 3],
//!   "embedding": {
//!     "positions": { "1": [0, 0], "2": [1, 0], "3": [[7, 2], 0] },
//!     "circles": { "1": { "center": 2, "radius": 1 }, "2": { "center": 3, "radius_squared": "1/4" } }
//!   },
//!   "allocation": [[1, 2], [3]]
//! }
//! ```
//!
//! Numbers are exact: a JSON number (decimals are read exactly), a `"p/q"`
//! string or a `[p, q]` pair. `copies` repeats a resource. Circle keys are
//! 1-based coalition indices. `allocation` lists agents per resource.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer};
use serde_json::{json, Value};

use crate::coalition::{AgentId, CoalitionStructure};
use crate::embedding::{Circle, PlanarWitness};
use crate::error::{Error, Result};
use crate::fixtures::{Fixture, EX2_Y, EX2_Z};
use crate::rational::{from_cost, parse_rational, rational_sqrt, to_cost, Coord, Cost};
use crate::rsg::{Allocation, Rsg};
use crate::structure::PathWitness;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceGroup {
    pub name: String,
    pub copies: usize,
}

/// Everything an instance file can carry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub game: Rsg,
    /// Consecutive runs of resources, in resource order.
    pub groups: Vec<ResourceGroup>,
    pub structure: CoalitionStructure,
    pub path: Option<PathWitness>,
    pub embedding: Option<PlanarWitness>,
    pub allocation: Option<Allocation>,
}

/// Exact rational read from any of the accepted spellings.
#[derive(Clone, Debug)]
struct Num(BigRational);

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        num_from_value(&v).map(Num).map_err(D::Error::custom)
    }
}

fn num_from_value(v: &Value) -> std::result::Result<BigRational, String> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()).ok_or_else(|| format!("cannot read number {n}")),
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("cannot read \"{s}\" as a rational")),
        Value::Array(parts) if parts.len() == 2 => {
            let p = integer_from_value(&parts[0])?;
            let q = integer_from_value(&parts[1])?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(p, q))
        }
        other => Err(format!("expected a number, \"p/q\" or [p, q], found {other}")),
    }
}

fn integer_from_value(v: &Value) -> std::result::Result<BigInt, String> {
    let r = num_from_value(v)?;
    if r.is_integer() {
        Ok(r.to_integer())
    } else {
        Err(format!("expected an integer, found {r}"))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    agents: usize,
    resources: Vec<RawResource>,
    #[serde(default)]
    coalitions: Vec<Vec<AgentId>>,
    #[serde(default)]
    path: Option<Vec<AgentId>>,
    #[serde(default)]
    embedding: Option<RawEmbedding>,
    #[serde(default)]
    allocation: Option<Vec<Vec<AgentId>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResource {
    #[serde(default)]
    name: Option<String>,
    costs: Vec<Num>,
    #[serde(default)]
    copies: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEmbedding {
    positions: BTreeMap<String, (Num, Num)>,
    #[serde(default)]
    circles: BTreeMap<String, RawCircle>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircle {
    center: AgentId,
    #[serde(default)]
    radius: Option<Num>,
    #[serde(default)]
    radius_squared: Option<Num>,
}

fn field(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {msg}"))
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let raw: RawInstance = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let path = if path == "." { "document".to_string() } else { path };
            Error::Parse(format!("{path}: {inner}"))
        })?;
        de.end().map_err(|e| Error::Parse(format!("document: {e}")))?;
        Self::from_raw(raw)
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn from_raw(raw: RawInstance) -> Result<Self> {
        let n = raw.agents;
        if n == 0 {
            return Err(field("agents", "must be at least 1"));
        }
        if raw.resources.is_empty() {
            return Err(field("resources", "at least one resource is required"));
        }
        let mut tables: Vec<Arc<[Cost]>> = Vec::new();
        let mut groups = Vec::new();
        for (k, r) in raw.resources.iter().enumerate() {
            let here = format!("resources[{k}]");
            if r.costs.len() != n {
                return Err(field(&format!("{here}.costs"), format!("has {} entries, expected {n}", r.costs.len())));
            }
            let mut table = Vec::with_capacity(n);
            for (q, c) in r.costs.iter().enumerate() {
                let v = to_cost(&c.0).ok_or_else(|| field(&format!("{here}.costs[{q}]"), "value out of range"))?;
                if v <= Cost::zero() {
                    return Err(field(&format!("{here}.costs[{q}]"), "costs must be positive"));
                }
                if q > 0 && v <= table[q - 1] {
                    return Err(field(&format!("{here}.costs[{q}]"), "costs must be strictly increasing"));
                }
                table.push(v);
            }
            let copies = r.copies.unwrap_or(1);
            if copies == 0 {
                return Err(field(&format!("{here}.copies"), "must be at least 1"));
            }
            let shared: Arc<[Cost]> = Arc::from(table);
            tables.extend(std::iter::repeat_n(shared, copies));
            groups.push(ResourceGroup { name: r.name.clone().unwrap_or_else(|| format!("r{}", k + 1)), copies });
        }
        let game = Rsg::from_shared(n, tables).map_err(|e| field("resources", e))?;

        for (k, list) in raw.coalitions.iter().enumerate() {
            if list.is_empty() {
                return Err(field(&format!("coalitions[{k}]"), "coalitions must be nonempty"));
            }
            if let Some(&j) = list.iter().find(|&&j| j == 0 || j > n) {
                return Err(field(&format!("coalitions[{k}]"), format!("agent {j} out of range 1..={n}")));
            }
        }
        let structure = CoalitionStructure::from_lists(n, &raw.coalitions).map_err(|e| field("coalitions", e))?;
        // Circle keys index the coalitions as written; map them past dedup.
        let mut written_to_kept = Vec::with_capacity(raw.coalitions.len());
        for list in &raw.coalitions {
            let c = crate::coalition::Coalition::new(list.clone()).expect("checked");
            written_to_kept.push(structure.coalitions().iter().position(|k| *k == c).expect("kept"));
        }

        let path = match raw.path {
            None => None,
            Some(order) => {
                let w = PathWitness { order };
                if !w.is_permutation_of(n) {
                    return Err(field("path", format!("must be a permutation of 1..={n}")));
                }
                Some(w)
            }
        };

        let embedding = match raw.embedding {
            None => None,
            Some(e) => Some(embedding_from_raw(n, e, &written_to_kept, structure.len())?),
        };

        let allocation = match raw.allocation {
            None => None,
            Some(sets) => {
                if sets.len() != game.n_resources() {
                    return Err(field(
                        "allocation",
                        format!("lists {} resources, the game has {}", sets.len(), game.n_resources()),
                    ));
                }
                Some(Allocation::from_sets(n, &sets).map_err(|e| field("allocation", e))?)
            }
        };
        Ok(Self { game, groups, structure, path, embedding, allocation })
    }

    pub fn from_fixture(f: &Fixture) -> Self {
        let groups = if f.name == "example2" {
            vec![
                ResourceGroup { name: "x".into(), copies: 1 },
                ResourceGroup { name: "y".into(), copies: EX2_Y },
                ResourceGroup { name: "z".into(), copies: EX2_Z },
            ]
        } else {
            (1..=f.game.n_resources()).map(|k| ResourceGroup { name: format!("r{k}"), copies: 1 }).collect()
        };
        Self {
            game: f.game.clone(),
            groups,
            structure: f.structure.clone(),
            path: f.path.clone(),
            embedding: f.embedding.clone(),
            allocation: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut resources = Vec::new();
        let mut first = 0;
        for g in &self.groups {
            let costs: Vec<Value> = self.game.table(first).iter().map(cost_value).collect();
            let mut obj = json!({ "name": g.name, "costs": costs });
            if g.copies != 1 {
                obj["copies"] = json!(g.copies);
            }
            resources.push(obj);
            first += g.copies;
        }
        let mut doc = json!({
            "agents": self.game.n_agents(),
            "resources": resources,
            "coalitions": self.structure.coalitions().iter().map(|c| c.members().to_vec()).collect::<Vec<_>>(),
        });
        if let Some(p) = &self.path {
            doc["path"] = json!(p.order);
        }
        if let Some(e) = &self.embedding {
            let positions: serde_json::Map<String, Value> = e
                .positions
                .iter()
                .enumerate()
                .map(|(k, (x, y))| ((k + 1).to_string(), json!([pair_value(x), pair_value(y)])))
                .collect();
            let circles: serde_json::Map<String, Value> = e
                .circles
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let v = match rational_sqrt(&c.radius_sq) {
                        Some(r) => json!({ "center": c.center, "radius": pair_value(&r) }),
                        None => json!({ "center": c.center, "radius_squared": pair_value(&c.radius_sq) }),
                    };
                    ((k + 1).to_string(), v)
                })
                .collect();
            doc["embedding"] = json!({ "positions": positions, "circles": circles });
        }
        if let Some(a) = &self.allocation {
            doc["allocation"] = json!(a.sets());
        }
        doc
    }

    /// Indented JSON with arrays of numbers kept on one line.
    pub fn to_json_string(&self) -> String {
        let mut out = String::new();
        render(&self.to_json(), 0, &mut out);
        out
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_object() && is_flat(x)),
        Value::Object(map) => map.values().all(|x| !x.is_object() && is_flat(x)),
        _ => true,
    }
}

fn render(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Object(map) if !map.is_empty() && !is_flat(v) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                render(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) if !is_flat(v) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                render(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                render(item, depth, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (k, (key, item)) in map.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                render(item, depth, out);
            }
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

fn embedding_from_raw(n: usize, e: RawEmbedding, written_to_kept: &[usize], kept: usize) -> Result<PlanarWitness> {
    let mut positions: Vec<Option<(Coord, Coord)>> = vec![None; n];
    for (key, (x, y)) in e.positions {
        let j: usize = key
            .parse()
            .ok()
            .filter(|&j| j >= 1 && j <= n)
            .ok_or_else(|| field("embedding.positions", format!("key \"{key}\" is not an agent in 1..={n}")))?;
        positions[j - 1] = Some((x.0, y.0));
    }
    let positions = positions
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| field("embedding.positions", format!("agent {} has no position", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    let mut circles: Vec<Option<Circle>> = vec![None; kept];
    for (key, c) in e.circles {
        let here = format!("embedding.circles.{key}");
        let idx: usize = key
            .parse()
            .ok()
            .filter(|&k| k >= 1 && k <= written_to_kept.len())
            .ok_or_else(|| field(&here, format!("key is not a coalition index in 1..={}", written_to_kept.len())))?;
        let radius_sq = match (c.radius, c.radius_squared) {
            (Some(r), None) => &r.0 * &r.0,
            (None, Some(r2)) => r2.0,
            _ => return Err(field(&here, "give exactly one of radius and radius_squared")),
        };
        circles[written_to_kept[idx - 1]] = Some(Circle { center: c.center, radius_sq });
    }
    let circles = circles
        .into_iter()
        .enumerate()
        .map(|(k, c)| c.ok_or_else(|| field("embedding.circles", format!("coalition {} has no circle", k + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanarWitness { positions, circles })
}

fn cost_value(c: &Cost) -> Value {
    if c.is_integer() {
        json!(c.to_integer())
    } else {
        pair_value(&from_cost(c))
    }
}

/// `[numerator, denominator]`, always.
fn pair_value(v: &BigRational) -> Value {
    let num = |b: &BigInt| -> Value { Value::Number(b.to_string().parse().expect("integer literal")) };
    let den = if v.denom().is_one() { BigInt::one() } else { v.denom().clone() };
    json!([num(v.numer()), num(&den)])
}
