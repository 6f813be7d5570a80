//! `MESH2D v1` text format.
//!
//! ```text
//! MESH2D v1
//! # comment
//! REGIONS 2            (optional declaration; names must be unique)
//! base weld_pass_1
//! NODES n
//! id x y
//! ELEMENTS m
//! id n3 a b c region
//! id n4 a b c d region
//! NODESET name k
//! id id id ...
//! EDGESET name k
//! elem localEdge ...
//! ```
//!
//! Tokens are whitespace separated and `#` starts a comment. Node and element
//! ids may be any distinct integers; sets refer to those ids. Local edge `k`
//! joins the element's k-th and (k+1)-th node in counter-clockwise order.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{signed_area, Element, ElementKind, Mesh2D, Point};
use crate::{Error, Result};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                items.push((i + 1, tok));
            }
        }
        Self { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or_else(|| self.items.last())
            .map(|t| t.0)
            .unwrap_or(0)
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|t| t.1)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.line();
        let t = self.items.get(self.pos).copied().ok_or_else(|| Error::Parse {
            line,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn int(&mut self, what: &str) -> Result<i64> {
        let (line, t) = self.next(what)?;
        t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected integer {what}, found `{t}`"),
        })
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let (line, t) = self.next(what)?;
        t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected count {what}, found `{t}`"),
        })
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        let (line, t) = self.next(what)?;
        t.parse().map_err(|_| Error::Parse {
            line,
            msg: format!("expected number {what}, found `{t}`"),
        })
    }
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<Mesh2D> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Mesh2D> {
    let mut tk = Tokens::new(text);
    let (line, magic) = tk.next("header")?;
    let (_, version) = tk.next("header version")?;
    if magic != "MESH2D" || version != "v1" {
        return Err(Error::Parse { line, msg: "expected header `MESH2D v1`".into() });
    }

    let mut declared: Option<Vec<String>> = None;
    let mut node_index: HashMap<i64, usize> = HashMap::new();
    let mut nodes: Vec<Point> = Vec::new();
    let mut elem_index: HashMap<i64, usize> = HashMap::new();
    let mut elements: Vec<Element> = Vec::new();
    let mut reversed: Vec<bool> = Vec::new();
    let mut regions: Vec<String> = Vec::new();
    let mut node_sets: Vec<(String, Vec<usize>)> = Vec::new();
    let mut edge_sets: Vec<(String, Vec<(usize, usize)>)> = Vec::new();

    while let Some(kw) = tk.peek() {
        let line = tk.line();
        tk.pos += 1;
        match kw {
            "REGIONS" => {
                let k = tk.count("region count")?;
                let mut names = Vec::with_capacity(k);
                for _ in 0..k {
                    let (_, name) = tk.next("region name")?;
                    if names.iter().any(|n: &String| n == name) {
                        return Err(Error::DuplicateRegion(name.to_string()));
                    }
                    names.push(name.to_string());
                }
                regions = names.clone();
                declared = Some(names);
            }
            "NODES" => {
                let n = tk.count("node count")?;
                for _ in 0..n {
                    let line = tk.line();
                    let id = tk.int("node id")?;
                    let x = tk.float("x")?;
                    let y = tk.float("y")?;
                    if node_index.insert(id, nodes.len()).is_some() {
                        return Err(Error::Parse { line, msg: format!("duplicate node id {id}") });
                    }
                    nodes.push([x, y]);
                }
            }
            "ELEMENTS" => {
                let m = tk.count("element count")?;
                for _ in 0..m {
                    let line = tk.line();
                    let id = tk.int("element id")?;
                    let (tl, ty) = tk.next("element type")?;
                    let kind = match ty {
                        "n3" => ElementKind::Tri3,
                        "n4" => ElementKind::Quad4,
                        _ => {
                            return Err(Error::Parse {
                                line: tl,
                                msg: format!("unknown element type `{ty}`"),
                            })
                        }
                    };
                    let mut ids = Vec::with_capacity(4);
                    for _ in 0..kind.node_count() {
                        let nid = tk.int("element node")?;
                        let idx = *node_index.get(&nid).ok_or(Error::DanglingNode {
                            element: elements.len(),
                            node: nid,
                        })?;
                        ids.push(idx);
                    }
                    let (_, region) = tk.next("region name")?;
                    let r = match regions.iter().position(|n| n == region) {
                        Some(r) => r,
                        None if declared.is_some() => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("undeclared region `{region}`"),
                            })
                        }
                        None => {
                            regions.push(region.to_string());
                            regions.len() - 1
                        }
                    };
                    let rev = signed_area(&nodes, &ids) < 0.0;
                    if rev {
                        ids.reverse();
                    }
                    if elem_index.insert(id, elements.len()).is_some() {
                        return Err(Error::Parse { line, msg: format!("duplicate element id {id}") });
                    }
                    reversed.push(rev);
                    elements.push(Element::new(kind, &ids, r));
                }
            }
            "NODESET" => {
                let (_, name) = tk.next("set name")?;
                let k = tk.count("set size")?;
                let mut ids = Vec::with_capacity(k);
                for _ in 0..k {
                    let line = tk.line();
                    let nid = tk.int("node id")?;
                    ids.push(*node_index.get(&nid).ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("dangling node index {nid} in set `{name}`"),
                    })?);
                }
                node_sets.push((name.to_string(), ids));
            }
            "EDGESET" => {
                let (_, name) = tk.next("set name")?;
                let k = tk.count("set size")?;
                let mut edges = Vec::with_capacity(k);
                for _ in 0..k {
                    let line = tk.line();
                    let eid = tk.int("element id")?;
                    let local = tk.count("local edge")?;
                    let e = *elem_index.get(&eid).ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("unknown element {eid} in edge set `{name}`"),
                    })?;
                    let n = elements[e].kind.node_count();
                    if local >= n {
                        return Err(Error::Parse { line, msg: format!("local edge {local} out of range") });
                    }
                    // Reversal maps original edge k to (n - 2 - k) mod n.
                    let local = if reversed[e] { (2 * n - 2 - local) % n } else { local };
                    edges.push((e, local));
                }
                edge_sets.push((name.to_string(), edges));
            }
            other => {
                return Err(Error::Parse { line, msg: format!("unexpected token `{other}`") });
            }
        }
    }

    let mut mesh = Mesh2D::new(nodes, elements, regions)?;
    for (name, ids) in node_sets {
        mesh.add_node_set(&name, ids)?;
    }
    for (name, edges) in edge_sets {
        mesh.add_edge_set(&name, edges)?;
    }
    Ok(mesh)
}

/// Serializes with dense 0-based ids. Floats use shortest round-trip form.
pub fn write_mesh(mesh: &Mesh2D) -> String {
    let mut s = String::new();
    s.push_str("MESH2D v1\n");
    let _ = writeln!(s, "REGIONS {}", mesh.region_names().len());
    let _ = writeln!(s, "{}", mesh.region_names().join(" "));
    let _ = writeln!(s, "NODES {}", mesh.node_count());
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{i} {:?} {:?}", p[0], p[1]);
    }
    let _ = writeln!(s, "ELEMENTS {}", mesh.element_count());
    for (e, el) in mesh.elements.iter().enumerate() {
        let ty = match el.kind {
            ElementKind::Tri3 => "n3",
            ElementKind::Quad4 => "n4",
        };
        let ids: Vec<String> = el.nodes().iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "{e} {ty} {} {}", ids.join(" "), mesh.region_of(e));
    }
    for (name, ids) in mesh.node_sets() {
        let _ = writeln!(s, "NODESET {name} {}", ids.len());
        for chunk in ids.chunks(16) {
            let row: Vec<String> = chunk.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    for (name, edges) in mesh.edge_sets() {
        let _ = writeln!(s, "EDGESET {name} {}", edges.len());
        for (e, k) in edges {
            let _ = writeln!(s, "{e} {k}");
        }
    }
    s
}
