//! Graphviz export of an offer profile and its matching.

use std::fmt::Write;

use crate::error::Result;
use crate::instance::{Instance, Side};
use crate::matching::{build_equality_subgraph, Matching};
use crate::profile::OfferProfile;
use crate::scalar::Scalar;

/// Renders `inst` as an undirected DOT graph: matched edges solid,
/// equality edges outside the matching dashed, other edges dotted grey.
/// Node labels carry the offers, edge labels the weights.
pub fn to_dot<T: Scalar>(inst: &Instance<T>, profile: &OfferProfile<T>, matching: &Matching, eps_eq: T) -> Result<String> {
    let eq = build_equality_subgraph(&inst.full(), profile, eps_eq)?;
    let mut out = String::from("graph swm {\n  rankdir=LR;\n  node [shape=circle];\n");
    for n in inst.nodes() {
        let _ = writeln!(out, "  {} [label=\"{}\\n{}\"];", n.label(), n.label(), fmt_num(profile[n].as_f64()));
    }
    for e in inst.edges() {
        let style = if matching.contains(e.a, e.b) {
            "solid"
        } else if eq.contains(e.a, e.b) {
            "dashed"
        } else {
            "dotted, color=grey"
        };
        let (a, b) = (e.endpoint(Side::A).label(), e.endpoint(Side::B).label());
        let _ = writeln!(out, "  {a} -- {b} [style={style}, label=\"{}\"];", fmt_num(e.weight.as_f64()));
    }
    out.push_str("}\n");
    Ok(out)
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}
