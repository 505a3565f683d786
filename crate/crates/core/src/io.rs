//! The line-based `.lg` graph format.
//!
//! ```text
//! # comment
//! node u label=010 id=0
//! node v label=10
//! edge u v
//! ```
//!
//! Labels holding spaces may be double-quoted: `label="x | !y"`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{validate_graph, LabeledGraph};

/// A parsed graph file; `ids` is present when every node carries `id=`.
#[derive(Debug, Clone)]
pub struct GraphFile {
    pub graph: LabeledGraph,
    pub ids: Option<Vec<String>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn tokens(line: &str, lineno: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => quoted = !quoted,
            c if c.is_whitespace() && !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if quoted {
        return Err(Error::Parse { line: lineno, msg: "unterminated quote".into() });
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<GraphFile> {
    let mut nodes = Vec::new();
    let mut ids = Vec::new();
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let err = |msg: String| Error::Parse { line, msg };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks = tokens(trimmed, line)?;
        match toks[0].as_str() {
            "node" => {
                let name = toks.get(1).ok_or_else(|| err("node needs a name".into()))?;
                if !valid_name(name) {
                    return Err(err(format!("invalid node name {name:?}")));
                }
                let mut label = String::new();
                let mut id = None;
                for attr in &toks[2..] {
                    if let Some(v) = attr.strip_prefix("label=") {
                        label = v.to_string();
                    } else if let Some(v) = attr.strip_prefix("id=") {
                        if !v.bytes().all(|b| b == b'0' || b == b'1') {
                            return Err(err(format!("identifier {v:?} is not a bit string")));
                        }
                        id = Some(v.to_string());
                    } else {
                        return Err(err(format!("unknown attribute {attr:?}")));
                    }
                }
                nodes.push((name.clone(), label));
                ids.push(id);
            }
            "edge" => {
                if toks.len() != 3 {
                    return Err(err("edge needs exactly two endpoints".into()));
                }
                if !nodes.iter().any(|(n, _)| n == &toks[1]) || !nodes.iter().any(|(n, _)| n == &toks[2]) {
                    return Err(err(format!("edge {} {} mentions an undeclared node", toks[1], toks[2])));
                }
                edges.push((toks[1].clone(), toks[2].clone()));
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    let graph = LabeledGraph::from_parts(nodes, edges).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
    validate_graph(&graph)?;
    let ids = match ids.iter().filter(|i| i.is_some()).count() {
        0 => None,
        n if n == ids.len() => Some(ids.into_iter().map(Option::unwrap).collect()),
        _ => return Err(Error::Parse { line: 0, msg: "either all nodes or none carry id=".into() }),
    };
    Ok(GraphFile { graph, ids })
}

fn quote(label: &str) -> String {
    if label.chars().any(char::is_whitespace) {
        format!("\"{label}\"")
    } else {
        label.to_string()
    }
}

pub fn write_graph(g: &LabeledGraph, ids: Option<&[String]>) -> String {
    let mut out = String::new();
    for v in 0..g.node_count() {
        write!(out, "node {}", g.name(v)).unwrap();
        if !g.label(v).is_empty() {
            write!(out, " label={}", quote(g.label(v))).unwrap();
        }
        if let Some(ids) = ids {
            write!(out, " id={}", ids[v]).unwrap();
        }
        out.push('\n');
    }
    for &(a, b) in g.edges() {
        writeln!(out, "edge {} {}", g.name(a), g.name(b)).unwrap();
    }
    out
}
