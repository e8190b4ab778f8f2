//! Line-oriented graph files.
//!
//! ```text
//! graph <name> rank <k>
//! vertex <id>
//! edge <id> <u> <v> <length>
//! ```
//!
//! Lengths are written with 17 significant digits. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;

use super::{Edge, GraphError, MetricGraph};
use crate::format::fmt17;

/// The raw content of a graph file. Lines with keywords other than
/// `graph`/`vertex`/`edge` are kept in `extra` for extended formats.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub name: String,
    pub rank: i64,
    pub vertices: Vec<usize>,
    pub edges: Vec<Edge>,
    pub extra: Vec<ExtraLine>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtraLine {
    pub line: usize,
    pub keyword: String,
    pub args: Vec<String>,
}

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

pub(crate) fn parse_num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, GraphError> {
    tok.parse().map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(String, i64)> = None;
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        let mut extra = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks[0] {
                "graph" => {
                    if header.is_some() {
                        return Err(parse_err(line, "duplicate graph header"));
                    }
                    if toks.len() != 4 || toks[2] != "rank" {
                        return Err(parse_err(line, "expected `graph <name> rank <k>`"));
                    }
                    header = Some((toks[1].to_string(), parse_num(line, toks[3], "rank")?));
                }
                _ if header.is_none() => {
                    return Err(parse_err(line, "expected `graph <name> rank <k>` header first"));
                }
                "vertex" => {
                    if toks.len() != 2 {
                        return Err(parse_err(line, "expected `vertex <id>`"));
                    }
                    vertices.push(parse_num(line, toks[1], "vertex id")?);
                }
                "edge" => {
                    if toks.len() != 5 {
                        return Err(parse_err(line, "expected `edge <id> <u> <v> <length>`"));
                    }
                    edges.push(Edge {
                        id: parse_num(line, toks[1], "edge id")?,
                        u: parse_num(line, toks[2], "vertex id")?,
                        v: parse_num(line, toks[3], "vertex id")?,
                        length: parse_num(line, toks[4], "length")?,
                    });
                }
                kw => extra.push(ExtraLine {
                    line,
                    keyword: kw.to_string(),
                    args: toks[1..].iter().map(|s| s.to_string()).collect(),
                }),
            }
        }
        let (name, rank) = header.ok_or_else(|| parse_err(1, "missing graph header"))?;
        Ok(GraphFile { name, rank, vertices, edges, extra })
    }
}

impl MetricGraph {
    /// Parses a plain graph file; the declared rank must match.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let file = GraphFile::parse(text)?;
        if let Some(x) = file.extra.first() {
            return Err(parse_err(x.line, format!("unknown keyword `{}`", x.keyword)));
        }
        let g = MetricGraph::new(file.name, file.vertices, file.edges)?;
        if g.rank() != file.rank {
            return Err(parse_err(1, format!("header declares rank {} but graph has rank {}", file.rank, g.rank())));
        }
        Ok(g)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let name = if self.name().is_empty() { "unnamed" } else { self.name() };
        writeln!(out, "graph {} rank {}", name.replace(char::is_whitespace, "_"), self.rank()).unwrap();
        for v in self.vertices() {
            writeln!(out, "vertex {v}").unwrap();
        }
        for e in self.edges() {
            writeln!(out, "edge {} {} {} {}", e.id, e.u, e.v, fmt17(e.length)).unwrap();
        }
        out
    }
}
