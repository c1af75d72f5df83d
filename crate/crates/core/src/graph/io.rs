//! Plain-text interchange format.
//!
//! ```text
//! graph <n>
//! edge <u> <v> <num>/<den>
//! ...
//! label <id> <string>
//! ```
//!
//! Edges appear in id order and labels trail the edge list. Other modules add
//! their own keyword lines after the labels; [`parse_document`] hands those
//! back untouched.

use std::fmt::Write as _;

use super::{GraphBuilder, GraphError, MetricGraph};
use crate::rational::parse_q;

pub fn write_graph(g: &MetricGraph) -> String {
    let mut out = String::new();
    writeln!(out, "graph {}", g.vertex_count()).unwrap();
    for e in g.edges() {
        writeln!(out, "edge {} {} {}/{}", e.u, e.v, e.len.numer(), e.len.denom()).unwrap();
    }
    for (i, l) in g.labels().iter().enumerate() {
        if !l.is_empty() {
            writeln!(out, "label {i} {l}").unwrap();
        }
    }
    out
}

/// A keyword line not understood by the graph parser, with its line number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionLine {
    pub line: usize,
    pub keyword: String,
    pub fields: Vec<String>,
    pub rest: String,
}

pub fn parse_graph(text: &str) -> Result<MetricGraph, GraphError> {
    let (g, ext) = parse_document(text)?;
    if let Some(x) = ext.first() {
        return Err(GraphError::Parse { line: x.line, msg: format!("unexpected keyword `{}`", x.keyword) });
    }
    Ok(g)
}

pub fn parse_document(text: &str) -> Result<(MetricGraph, Vec<ExtensionLine>), GraphError> {
    let mut builder: Option<GraphBuilder> = None;
    let mut ext = Vec::new();
    let mut labels_started = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
        let (kw, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let rest = rest.trim();
        match kw {
            "graph" => {
                if builder.is_some() {
                    return Err(err("duplicate header"));
                }
                let n: usize = rest.parse().map_err(|_| err("bad vertex count"))?;
                builder = Some(GraphBuilder::with_vertices(n));
            }
            "edge" => {
                let b = builder.as_mut().ok_or_else(|| err("edge before header"))?;
                if labels_started || !ext.is_empty() {
                    return Err(err("edge after labels"));
                }
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 3 {
                    return Err(err("edge needs <u> <v> <length>"));
                }
                let u: usize = f[0].parse().map_err(|_| err("bad endpoint"))?;
                let v: usize = f[1].parse().map_err(|_| err("bad endpoint"))?;
                let len = parse_q(f[2]).map_err(|e| err(&e.to_string()))?;
                b.add_edge(u, v, len).map_err(|e| err(&e.to_string()))?;
            }
            "label" => {
                let b = builder.as_mut().ok_or_else(|| err("label before header"))?;
                if !ext.is_empty() {
                    return Err(err("label after extension lines"));
                }
                labels_started = true;
                let (id, text) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let id: usize = id.parse().map_err(|_| err("bad label id"))?;
                if id >= b.vertex_count() {
                    return Err(err("label for unknown vertex"));
                }
                b.set_label(id, text.trim());
            }
            _ => {
                if builder.is_none() {
                    return Err(err("missing `graph <n>` header"));
                }
                ext.push(ExtensionLine {
                    line,
                    keyword: kw.to_string(),
                    fields: rest.split_whitespace().map(str::to_string).collect(),
                    rest: rest.to_string(),
                });
            }
        }
    }
    let b = builder.ok_or(GraphError::Parse { line: 0, msg: "empty document".into() })?;
    Ok((b.build(), ext))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn round_trip() {
        let mut b = GraphBuilder::with_vertices(3);
        b.add_edge(0, 1, q(1, 2)).unwrap();
        b.add_edge(1, 2, q(3, 1)).unwrap();
        b.set_label(2, "a b");
        let g = b.build();
        let text = write_graph(&g);
        assert_eq!(text, "graph 3\nedge 0 1 1/2\nedge 1 2 3/1\nlabel 2 a b\n");
        let h = parse_graph(&text).unwrap();
        assert_eq!(write_graph(&h), text);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_graph("edge 0 1 1").is_err());
        assert!(parse_graph("graph 2\nedge 0 1 0/1").is_err());
        assert!(parse_graph("graph 2\nlabel 0 x\nedge 0 1 1").is_err());
        assert!(parse_graph("graph 2\ncone x graph 1").is_err());
        let (_, ext) = parse_document("graph 2\nedge 0 1 1\ncone x graph 1").unwrap();
        assert_eq!(ext[0].keyword, "cone");
    }
}
