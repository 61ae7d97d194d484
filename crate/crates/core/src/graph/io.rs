//! DIMACS edge format (`p edge n m`, `e u v`, 1-based) and plain 0-based edge lists.
//!
//! Edge lists carry no header; the vertex count is the largest id plus one,
//! unless a `# vertices N` comment line fixes it (the writer always emits one so
//! isolated trailing vertices survive a round trip).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Dimacs,
    Edgelist,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimacs" => Ok(Format::Dimacs),
            "edgelist" => Ok(Format::Edgelist),
            other => Err(Error::Input(format!("unknown format {other:?}"))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Dimacs => "dimacs",
            Format::Edgelist => "edgelist",
        })
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn num(tok: Option<&str>, line: usize) -> Result<usize> {
    tok.ok_or_else(|| perr(line, "missing field"))?
        .parse()
        .map_err(|_| perr(line, "not a non-negative integer"))
}

pub fn parse(text: &str, format: Format) -> Result<Graph> {
    match format {
        Format::Dimacs => parse_dimacs(text),
        Format::Edgelist => parse_edgelist(text),
    }
}

pub fn write(g: &Graph, format: Format) -> String {
    match format {
        Format::Dimacs => write_dimacs(g),
        Format::Edgelist => write_edgelist(g),
    }
}

pub fn parse_dimacs(text: &str) -> Result<Graph> {
    let mut n = None;
    let mut declared_m = 0;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if n.is_some() {
                    return Err(perr(line, "duplicate problem line"));
                }
                match toks.next() {
                    Some("edge") | Some("col") => {}
                    _ => return Err(perr(line, "expected `p edge n m`")),
                }
                n = Some(num(toks.next(), line)?);
                declared_m = num(toks.next(), line)?;
            }
            Some("e") => {
                let nn = n.ok_or_else(|| perr(line, "edge before problem line"))?;
                let u = num(toks.next(), line)?;
                let v = num(toks.next(), line)?;
                if u == 0 || v == 0 || u > nn || v > nn {
                    return Err(perr(line, format!("vertex out of range 1..={nn}")));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => return Err(perr(line, format!("unknown line type {other:?}"))),
        }
    }
    let n = n.ok_or_else(|| perr(0, "missing problem line"))?;
    if edges.len() != declared_m {
        return Err(perr(0, format!("declared {declared_m} edges, found {}", edges.len())));
    }
    Graph::new(n, &edges)
}

pub fn parse_edgelist(text: &str) -> Result<Graph> {
    let mut fixed_n = None;
    let mut edges = Vec::new();
    let mut max_id = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            let mut toks = rest.split_whitespace();
            if toks.next() == Some("vertices") {
                fixed_n = Some(num(toks.next(), line)?);
            }
            continue;
        }
        let mut toks = t.split_whitespace();
        let u = num(toks.next(), line)?;
        let v = num(toks.next(), line)?;
        if toks.next().is_some() {
            return Err(perr(line, "expected exactly two ids"));
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let inferred = max_id.map_or(0, |m| m + 1);
    let n = match fixed_n {
        Some(n) if n < inferred => return Err(perr(0, "edge id exceeds declared vertex count")),
        Some(n) => n,
        None => inferred,
    };
    Graph::new(n, &edges)
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", u + 1, v + 1);
    }
    s
}

pub fn write_edgelist(g: &Graph) -> String {
    let mut s = format!("# vertices {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(s, "{u} {v}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use proptest::prelude::*;

    #[test]
    fn dimacs_example() {
        let g = parse_dimacs("c hi\np edge 3 2\ne 1 2\ne 2 3\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 2));
        assert!(g.has_edge(0, 1) && g.has_edge(1, 2));
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_dimacs("e 1 2\n").is_err());
        assert!(parse_dimacs("p edge 2 1\ne 1 3\n").is_err());
        assert!(parse_dimacs("p edge 2 2\ne 1 2\n").is_err());
        assert!(parse_edgelist("0 x\n").is_err());
        assert!(parse_edgelist("0 0\n").is_err());
    }

    #[test]
    fn edgelist_keeps_isolated_vertices() {
        let g = Graph::new(5, &[(0, 1)]).unwrap();
        let back = parse_edgelist(&write_edgelist(&g)).unwrap();
        assert_eq!(back, g);
    }

    proptest! {
        #[test]
        fn roundtrip_both_formats(n in 1usize..15, density in 0usize..100, seed in 0u64..1000) {
            let m = n * (n - 1) / 2 * density / 100;
            let g = generate(GraphKind::Random { n, m, seed }).unwrap();
            prop_assert_eq!(parse_dimacs(&write_dimacs(&g)).unwrap(), g.clone());
            prop_assert_eq!(parse_edgelist(&write_edgelist(&g)).unwrap(), g);
        }
    }
}
