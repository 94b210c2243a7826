//! Plain-text mesh format.
//!
//! ```text
//! NODES
//! <id> <x> <y>
//! ELEMS
//! <id> <body> <n1> <n2> <n3> <n4>
//! FACETS
//! <id> <set-name> <n1> <n2>
//! ```
//! Blank lines and `#` comments are ignored. Node ids may be any distinct
//! integers.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Element, Mesh};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Nodes,
    Elems,
    Facets,
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let mut section = Section::None;
    let mut seen = [false; 3];
    let mut ids: HashMap<i64, usize> = HashMap::new();
    let mut nodes = Vec::new();
    let mut raw_elems: Vec<(usize, usize, [i64; 4])> = Vec::new();
    let mut raw_facets: Vec<(usize, String, [i64; 2])> = Vec::new();

    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::MeshFormat { line: line_no, msg };
        match line {
            "NODES" => {
                section = Section::Nodes;
                seen[0] = true;
                continue;
            }
            "ELEMS" => {
                section = Section::Elems;
                seen[1] = true;
                continue;
            }
            "FACETS" => {
                section = Section::Facets;
                seen[2] = true;
                continue;
            }
            _ => {}
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| s.parse::<i64>().map_err(|_| err(format!("expected integer, got '{s}'")));
        match section {
            Section::None => return Err(err(format!("data before any section header: '{line}'"))),
            Section::Nodes => {
                if tok.len() != 3 {
                    return Err(err(format!("node line needs 3 fields, got {}", tok.len())));
                }
                let id = int(tok[0])?;
                let mut xy = [0.0; 2];
                for k in 0..2 {
                    xy[k] = tok[k + 1]
                        .parse::<f64>()
                        .map_err(|_| err(format!("expected number, got '{}'", tok[k + 1])))?;
                }
                if ids.insert(id, nodes.len()).is_some() {
                    return Err(err(format!("duplicate node id {id}")));
                }
                nodes.push(xy);
            }
            Section::Elems => {
                if tok.len() != 6 {
                    return Err(err(format!("element line needs 6 fields, got {}", tok.len())));
                }
                let body = int(tok[1])?;
                if body < 0 {
                    return Err(err("body index must be nonnegative".into()));
                }
                let mut n = [0; 4];
                for k in 0..4 {
                    n[k] = int(tok[k + 2])?;
                }
                raw_elems.push((line_no, body as usize, n));
            }
            Section::Facets => {
                if tok.len() != 4 {
                    return Err(err(format!("facet line needs 4 fields, got {}", tok.len())));
                }
                raw_facets.push((line_no, tok[1].to_string(), [int(tok[2])?, int(tok[3])?]));
            }
        }
    }
    for (k, name) in ["NODES", "ELEMS", "FACETS"].iter().enumerate() {
        if !seen[k] {
            return Err(Error::MeshFormat {
                line: text.lines().count(),
                msg: format!("missing {name} section"),
            });
        }
    }
    let lookup = |line: usize, id: i64| {
        ids.get(&id).copied().ok_or(Error::MeshFormat {
            line,
            msg: format!("unknown node id {id}"),
        })
    };
    let mut elements = Vec::with_capacity(raw_elems.len());
    for (line, body, n) in raw_elems {
        let mut nodes = [0; 4];
        for k in 0..4 {
            nodes[k] = lookup(line, n[k])?;
        }
        elements.push(Element { body, nodes });
    }
    let mut facets = Vec::with_capacity(raw_facets.len());
    for (line, set, n) in raw_facets {
        facets.push((set, [lookup(line, n[0])?, lookup(line, n[1])?]));
    }
    Mesh::from_parts(nodes, elements, facets)
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::from("NODES\n");
    for (i, x) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{} {:e} {:e}", i + 1, x[0], x[1]);
    }
    s.push_str("ELEMS\n");
    for (i, e) in mesh.elements.iter().enumerate() {
        let n = e.nodes;
        let _ = writeln!(s, "{} {} {} {} {} {}", i + 1, e.body, n[0] + 1, n[1] + 1, n[2] + 1, n[3] + 1);
    }
    s.push_str("FACETS\n");
    for (i, f) in mesh.facets.iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", i + 1, f.set, f.nodes[0] + 1, f.nodes[1] + 1);
    }
    s
}
