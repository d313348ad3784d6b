//! Text format for graphs.
//!
//! ```text
//! # comment
//! n 5
//! 1 2 3
//! 2 5 1
//! ```
//!
//! Header `n <count>`, then one `u v w` line per edge with `1 <= u < v <= n`
//! and `w >= 1`. Canonical form sorts the edge lines; `save_graph` always
//! writes canonical form, so save(load(f)) is byte-identical for canonical
//! files.

use std::fmt::Write as _;
use std::path::Path;

use super::{Graph, Weight};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate edge {u}-{v} with conflicting weight")]
    AsymmetricWeight { line: usize, u: u32, v: u32 },
    #[error("line {line}: edge weight must be >= 1")]
    NonPositiveWeight { line: usize },
}

fn parse_err(line: usize, msg: impl Into<String>) -> LoadError {
    LoadError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, LoadError> {
    let mut n: Option<usize> = None;
    let mut raw: Vec<(u32, u32, Weight)> = Vec::new();
    let mut seen: std::collections::BTreeMap<(u32, u32), Weight> = Default::default();
    for (i, full) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = full.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if n.is_none() {
            if fields.len() != 2 || fields[0] != "n" {
                return Err(parse_err(lineno, "expected header `n <count>`"));
            }
            let count: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(lineno, "bad node count"))?;
            if count == 0 {
                return Err(parse_err(lineno, "node count must be >= 1"));
            }
            n = Some(count);
            continue;
        }
        let n = n.unwrap();
        if fields.len() != 3 {
            return Err(parse_err(lineno, "expected edge line `u v w`"));
        }
        let u: u32 = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, "bad node id"))?;
        let v: u32 = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, "bad node id"))?;
        let w: Weight = fields[2]
            .parse()
            .map_err(|_| parse_err(lineno, "bad weight"))?;
        if u == v {
            return Err(parse_err(lineno, format!("self-loop on node {u}")));
        }
        if !(u < v) {
            return Err(parse_err(lineno, "edge endpoints must satisfy u < v"));
        }
        if v as usize > n {
            return Err(parse_err(lineno, format!("node id {v} exceeds n={n}")));
        }
        if u < 1 {
            return Err(parse_err(lineno, "node ids start at 1"));
        }
        if w == 0 {
            return Err(LoadError::NonPositiveWeight { line: lineno });
        }
        if let Some(&prev) = seen.get(&(u, v)) {
            if prev != w {
                return Err(LoadError::AsymmetricWeight { line: lineno, u, v });
            }
            return Err(parse_err(lineno, format!("duplicate edge {u}-{v}")));
        }
        seen.insert((u, v), w);
        raw.push((u, v, w));
    }
    let n = n.ok_or_else(|| parse_err(1, "missing header `n <count>`"))?;
    Graph::new(n, &raw).map_err(|e| parse_err(0, e.to_string()))
}

pub fn format_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.n()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    out
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph, LoadError> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<(), LoadError> {
    std::fs::write(path, format_graph(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_no_edges() {
        let g = parse_graph("n 1\n").unwrap();
        assert_eq!(g.n(), 1);
    }

    #[test]
    fn round_trip_is_canonical() {
        let text = "n 4\n1 2 2\n1 4 1\n2 3 5\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(format_graph(&g), text);
        // comments and blank lines are dropped by canonicalization
        let g2 = parse_graph("# hello\nn 4\n\n2 3 5\n1 2 2  # inline\n1 4 1\n").unwrap();
        assert_eq!(format_graph(&g2), text);
    }

    #[test]
    fn self_loop_is_a_parse_error() {
        let err = parse_graph("n 3\n2 2 1\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn conflicting_duplicate_weight() {
        let err = parse_graph("n 3\n1 2 1\n1 2 4\n").unwrap_err();
        assert!(matches!(err, LoadError::AsymmetricWeight { line: 3, u: 1, v: 2 }));
    }

    #[test]
    fn zero_weight_rejected() {
        let err = parse_graph("n 3\n1 2 0\n").unwrap_err();
        assert!(matches!(err, LoadError::NonPositiveWeight { line: 2 }));
    }
}
