//! JSON documents: instances and solver results.
//!
//! Instance files look like
//!
//! ```json
//! {"a": 2, "b": 1, "edges": [
//!   {"i": 0, "j": 0, "w": 2.0},
//!   {"i": 1, "j": 0, "w": 1.0, "payoff_j": {"kind": "power", "params": {"exponent": 0.5}}}
//! ]}
//! ```
//!
//! with zero-based `i` (side A) and `j` (side B). A missing payoff is the
//! identity. Numbers are read as `f64` and converted to the solver scalar.
//! Output documents are pretty-printed with keys in sorted order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::{Edge, Instance, NodeId};
use crate::matching::Matching;
use crate::payoff::PayoffFn;
use crate::profile::{NodeMap, StableWeightedMatching};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub a: usize,
    pub b: usize,
    pub edges: Vec<EdgeDoc>,
}

// Field order is alphabetical so serialized keys come out sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub i: usize,
    pub j: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_i: Option<PayoffDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payoff_j: Option<PayoffDoc>,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffDoc {
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LinearParams {
    a: f64,
    #[serde(default)]
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerParams {
    exponent: f64,
    #[serde(default = "one")]
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Log1pParams {
    #[serde(default = "one")]
    scale: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PiecewiseParams {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn params<P: for<'de> Deserialize<'de>>(doc: &PayoffDoc) -> Result<P> {
    let value = if doc.params.is_null() {
        Value::Object(Default::default())
    } else {
        doc.params.clone()
    };
    serde_json::from_value(value).map_err(|e| Error::Parse(format!("{} params: {e}", doc.kind)))
}

impl PayoffDoc {
    pub fn to_payoff(&self) -> Result<PayoffFn<f64>> {
        match self.kind.as_str() {
            "linear" => {
                let p: LinearParams = params(self)?;
                Ok(PayoffFn::Linear { a: p.a, b: p.b })
            }
            "power" => {
                let p: PowerParams = params(self)?;
                Ok(PayoffFn::power(p.exponent, p.scale))
            }
            "log1p" => {
                let p: Log1pParams = params(self)?;
                Ok(PayoffFn::log1p(p.scale))
            }
            "piecewise_linear" => {
                let p: PiecewiseParams = params(self)?;
                PayoffFn::piecewise(p.breakpoints, p.slopes)
            }
            other => Err(Error::Parse(format!("unknown payoff kind '{other}'"))),
        }
    }

    pub fn from_payoff<T: Scalar>(f: &PayoffFn<T>) -> Self {
        let n = |x: T| Value::from(x.as_f64());
        let params = match f {
            PayoffFn::Linear { a, b } => serde_json::json!({ "a": n(*a), "b": n(*b) }),
            PayoffFn::Power { exponent, scale } => serde_json::json!({ "exponent": n(*exponent), "scale": n(*scale) }),
            PayoffFn::Log1p { scale } => serde_json::json!({ "scale": n(*scale) }),
            PayoffFn::PiecewiseLinear(p) => serde_json::json!({
                "breakpoints": p.breakpoints().iter().map(|&x| n(x)).collect::<Vec<_>>(),
                "slopes": p.slopes().iter().map(|&x| n(x)).collect::<Vec<_>>(),
            }),
        };
        PayoffDoc {
            kind: f.kind_name().to_string(),
            params,
        }
    }
}

impl InstanceDoc {
    pub fn to_instance<T: Scalar>(&self) -> Result<Instance<T>> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let payoff = |p: &Option<PayoffDoc>| -> Result<PayoffFn<f64>> {
                p.as_ref().map_or(Ok(PayoffFn::identity()), PayoffDoc::to_payoff)
            };
            let mut edge = Edge::linear(e.i, e.j, e.w);
            edge.payoff_a = payoff(&e.payoff_i)?;
            edge.payoff_b = payoff(&e.payoff_j)?;
            edges.push(edge);
        }
        Ok(Instance::new(self.a, self.b, edges)?.cast())
    }

    pub fn from_instance<T: Scalar>(inst: &Instance<T>) -> Self {
        let spec = |f: &PayoffFn<T>| (!f.is_identity()).then(|| PayoffDoc::from_payoff(f));
        InstanceDoc {
            a: inst.a_count(),
            b: inst.b_count(),
            edges: inst
                .edges()
                .iter()
                .map(|e| EdgeDoc {
                    i: e.a,
                    j: e.b,
                    payoff_i: spec(&e.payoff_a),
                    payoff_j: spec(&e.payoff_b),
                    w: e.weight.as_f64(),
                })
                .collect(),
        }
    }
}

/// Parses an instance document. Structural problems (out-of-range nodes,
/// duplicate edges, malformed payoffs) are errors; semantic checks are left
/// to [`Instance::validate`].
pub fn parse_instance<T: Scalar>(text: &str) -> Result<Instance<T>> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_instance()
}

pub fn write_instance<T: Scalar>(inst: &Instance<T>) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from_instance(inst)).expect("instance serializes");
    s.push('\n');
    s
}

/// Solver output as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDoc {
    pub feasible: bool,
    pub iterations: usize,
    /// `[i, j]` pairs, zero-based.
    pub matching: Vec<[usize; 2]>,
    /// Offer per node label (`a1`, `b2`, ...).
    pub offers: BTreeMap<String, f64>,
    pub splits: BTreeMap<String, f64>,
    pub stable: bool,
}

fn labelled<T: Scalar>(map: &NodeMap<T>) -> BTreeMap<String, f64> {
    map.iter().map(|(n, v)| (n.label(), v.as_f64())).collect()
}

impl ResultDoc {
    pub fn new<T: Scalar>(sol: &StableWeightedMatching<T>, stable: bool, feasible: bool) -> Self {
        ResultDoc {
            feasible,
            iterations: sol.iterations,
            matching: sol.matching.pairs().map(|(a, b)| [a, b]).collect(),
            offers: labelled(&sol.profile),
            splits: labelled(&sol.splits),
            stable,
        }
    }

    /// Rebuilds the solution for `inst`; every node must have an offer and
    /// a split, and every matched pair must be an edge.
    pub fn to_solution<T: Scalar>(&self, inst: &Instance<T>) -> Result<StableWeightedMatching<T>> {
        for &[a, b] in &self.matching {
            if a >= inst.a_count() || b >= inst.b_count() || inst.edge_index(a, b).is_none() {
                return Err(Error::Parse(format!("matched pair [{a}, {b}] is not an edge")));
            }
        }
        let matching = Matching::from_pairs(
            inst.a_count(),
            inst.b_count(),
            self.matching.iter().map(|&[a, b]| (a, b)),
        )
        .map_err(|e| Error::Parse(e.to_string()))?;
        let read = |values: &BTreeMap<String, f64>, what: &str| -> Result<NodeMap<T>> {
            let mut map = NodeMap::zeros(inst.a_count(), inst.b_count());
            for n in inst.nodes() {
                let v = values
                    .get(&n.label())
                    .ok_or_else(|| Error::Parse(format!("missing {what} for {n}")))?;
                map[n] = T::lit(*v);
            }
            for key in values.keys() {
                let known = NodeId::parse_label(key).is_some_and(|n| inst.nodes().any(|m| m == n));
                if !known {
                    return Err(Error::Parse(format!("unknown node label '{key}' in {what}")));
                }
            }
            Ok(map)
        };
        Ok(StableWeightedMatching {
            matching,
            splits: read(&self.splits, "splits")?,
            profile: read(&self.offers, "offers")?,
            iterations: self.iterations,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }
}

pub fn parse_result(text: &str) -> Result<ResultDoc> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
