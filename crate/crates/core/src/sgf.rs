//! The plain-text graph format.
//!
//! ```text
//! # comment
//! sgf 1 <nvertices> <ndirected_edges>
//! e <id> <src> <dst> <inv_id>
//! ```
//!
//! Edge ids must be consecutive from 0. Loops must say whether they are half-loops
//! (`inv_id == id`) or loop pairs; nothing is inferred.

use std::fmt::Write as _;

use crate::error::GraphError;
use crate::graph::{Edge, SerreGraph};

pub fn write_sgf(g: &SerreGraph) -> String {
    let mut s = String::new();
    if let Some(name) = g.name() {
        let _ = writeln!(s, "# {name}");
    }
    let _ = writeln!(s, "sgf 1 {} {}", g.vertex_count(), g.edge_count());
    for (id, e) in g.edges().iter().enumerate() {
        let _ = writeln!(s, "e {id} {} {} {}", e.src, e.dst, e.inv);
    }
    s
}

pub fn read_sgf(text: &str) -> Result<SerreGraph, GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<Edge> = Vec::new();
    let mut name = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if header.is_none() && name.is_none() && !c.trim().is_empty() {
                name = Some(c.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |message: String| GraphError::Parse { line: line_no, message };
        let num = |s: &str| s.parse::<usize>().map_err(|_| err(format!("expected a non-negative integer, found {s:?}")));
        match fields[0] {
            "sgf" => {
                if header.is_some() {
                    return Err(err("second header".into()));
                }
                if fields.len() != 4 {
                    return Err(err("header needs `sgf 1 <nvertices> <nedges>`".into()));
                }
                if fields[1] != "1" {
                    return Err(err(format!("unsupported version {}", fields[1])));
                }
                header = Some((num(fields[2])?, num(fields[3])?));
            }
            "e" => {
                if header.is_none() {
                    return Err(err("edge before header".into()));
                }
                if fields.len() != 5 {
                    return Err(err("edge line needs `e <id> <src> <dst> <inv>`".into()));
                }
                let id = num(fields[1])?;
                if id != edges.len() {
                    return Err(err(format!("edge id {id} out of sequence, expected {}", edges.len())));
                }
                edges.push(Edge { src: num(fields[2])?, dst: num(fields[3])?, inv: num(fields[4])? });
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    let (nv, ne) = header.ok_or(GraphError::Parse { line: 0, message: "missing header".into() })?;
    if edges.len() != ne {
        return Err(GraphError::Parse { line: 0, message: format!("header declares {ne} edges, found {}", edges.len()) });
    }
    let g = SerreGraph::from_edges(nv, edges)?;
    Ok(match name {
        Some(n) => g.with_name(n),
        None => g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn round_trip_is_exact() {
        for g in [families::complete(4), families::petersen(), families::rose(2), families::half_loop_bouquet(3)] {
            let text = write_sgf(&g);
            let back = read_sgf(&text).unwrap();
            assert_eq!(back.edges(), g.edges());
            assert_eq!(write_sgf(&back), text);
        }
    }

    #[test]
    fn rejects_broken_involution_and_bad_ids() {
        assert!(read_sgf("sgf 1 2 2\ne 0 0 1 1\ne 1 1 0 1\n").is_err());
        assert!(read_sgf("sgf 1 2 2\ne 0 0 1 1\ne 2 1 0 0\n").is_err());
        assert!(read_sgf("sgf 1 2 3\ne 0 0 1 1\ne 1 1 0 0\n").is_err());
        assert!(read_sgf("e 0 0 1 1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let g = read_sgf("# one half-loop\n\nsgf 1 1 1\n# body\ne 0 0 0 0\n").unwrap();
        assert!(g.is_half_loop(0));
        assert_eq!(g.name(), Some("one half-loop"));
    }
}
