//! Unstructured 2D mesh with named regions, boundary sets and element
//! activation flags for staged weld-bead deposition.

mod format;
pub mod grid;
pub mod pipe;

use std::collections::{BTreeMap, HashMap};

use crate::{Error, Result};

pub use format::{load_mesh, parse_mesh, write_mesh};
pub use pipe::{Polygon, PipeSectionSpec};

/// Coordinates in mm.
pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Tri3,
    Quad4,
}

impl ElementKind {
    pub fn node_count(self) -> usize {
        match self {
            ElementKind::Tri3 => 3,
            ElementKind::Quad4 => 4,
        }
    }

    /// Quadrature points per element: 1-point triangles, 2x2 Gauss quads.
    pub fn quad_point_count(self) -> usize {
        match self {
            ElementKind::Tri3 => 1,
            ElementKind::Quad4 => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub kind: ElementKind,
    nodes: [usize; 4],
    pub region: usize,
}

impl Element {
    pub fn new(kind: ElementKind, nodes: &[usize], region: usize) -> Self {
        assert_eq!(nodes.len(), kind.node_count());
        let mut n = [usize::MAX; 4];
        n[..nodes.len()].copy_from_slice(nodes);
        Self { kind, nodes: n, region }
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.kind.node_count()]
    }

    /// Node pair of local edge `k` (counter-clockwise, edge k joins node k and k+1).
    pub fn edge(&self, k: usize) -> (usize, usize) {
        let n = self.kind.node_count();
        (self.nodes[k % n], self.nodes[(k + 1) % n])
    }
}

/// Edge reference: (element index, local edge index).
pub type EdgeRef = (usize, usize);

#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub nodes: Vec<Point>,
    pub elements: Vec<Element>,
    region_names: Vec<String>,
    node_sets: BTreeMap<String, Vec<usize>>,
    edge_sets: BTreeMap<String, Vec<EdgeRef>>,
    active: Vec<bool>,
    qp_offsets: Vec<usize>,
}

fn signed_area(nodes: &[Point], ids: &[usize]) -> f64 {
    let n = ids.len();
    let mut a = 0.0;
    for k in 0..n {
        let p = nodes[ids[k]];
        let q = nodes[ids[(k + 1) % n]];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

impl Mesh2D {
    /// Builds and validates a mesh. Clockwise elements are reoriented; elements
    /// with (near) zero area are rejected. All elements start active.
    pub fn new(
        nodes: Vec<Point>,
        mut elements: Vec<Element>,
        region_names: Vec<String>,
    ) -> Result<Self> {
        let mut seen = HashMap::new();
        for name in &region_names {
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(Error::DuplicateRegion(name.clone()));
            }
        }
        for (e, el) in elements.iter_mut().enumerate() {
            if el.region >= region_names.len() {
                return Err(Error::Invalid(format!("element {e} has no region")));
            }
            for &n in el.nodes() {
                if n >= nodes.len() {
                    return Err(Error::DanglingNode { element: e, node: n as i64 });
                }
            }
            let ids = el.nodes().to_vec();
            let area = signed_area(&nodes, &ids);
            let scale = ids
                .iter()
                .map(|&i| nodes[i][0].abs().max(nodes[i][1].abs()))
                .fold(1.0_f64, f64::max);
            if !area.is_finite() || area.abs() <= 1e-14 * scale * scale {
                return Err(Error::ZeroArea(e));
            }
            if area < 0.0 {
                let n = el.kind.node_count();
                el.nodes[..n].reverse();
            }
        }
        let mut qp_offsets = Vec::with_capacity(elements.len() + 1);
        let mut acc = 0;
        for el in &elements {
            qp_offsets.push(acc);
            acc += el.kind.quad_point_count();
        }
        qp_offsets.push(acc);
        let active = vec![true; elements.len()];
        Ok(Self {
            nodes,
            elements,
            region_names,
            node_sets: BTreeMap::new(),
            edge_sets: BTreeMap::new(),
            active,
            qp_offsets,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn quad_point_count(&self) -> usize {
        *self.qp_offsets.last().unwrap_or(&0)
    }

    /// Range of global quadrature-point indices owned by element `e`.
    pub fn quad_points(&self, e: usize) -> std::ops::Range<usize> {
        self.qp_offsets[e]..self.qp_offsets[e + 1]
    }

    pub fn region_names(&self) -> &[String] {
        &self.region_names
    }

    pub fn region_index(&self, name: &str) -> Result<usize> {
        self.region_names
            .iter()
            .position(|r| r == name)
            .ok_or_else(|| Error::UnknownRegion(name.to_string()))
    }

    pub fn region_of(&self, e: usize) -> &str {
        &self.region_names[self.elements[e].region]
    }

    pub fn region_elements(&self, name: &str) -> Result<Vec<usize>> {
        let r = self.region_index(name)?;
        Ok((0..self.elements.len())
            .filter(|&e| self.elements[e].region == r)
            .collect())
    }

    /// Moves elements into region `name`, creating it if needed.
    pub fn assign_region(&mut self, name: &str, elements: &[usize]) -> usize {
        let r = match self.region_names.iter().position(|n| n == name) {
            Some(r) => r,
            None => {
                self.region_names.push(name.to_string());
                self.region_names.len() - 1
            }
        };
        for &e in elements {
            self.elements[e].region = r;
        }
        r
    }

    pub fn add_node_set(&mut self, name: &str, mut nodes: Vec<usize>) -> Result<()> {
        if self.node_sets.contains_key(name) {
            return Err(Error::DuplicateSet(name.to_string()));
        }
        if let Some(&bad) = nodes.iter().find(|&&n| n >= self.nodes.len()) {
            return Err(Error::Invalid(format!("node set `{name}` references node {bad}")));
        }
        nodes.sort_unstable();
        nodes.dedup();
        self.node_sets.insert(name.to_string(), nodes);
        Ok(())
    }

    pub fn add_edge_set(&mut self, name: &str, edges: Vec<EdgeRef>) -> Result<()> {
        if self.edge_sets.contains_key(name) {
            return Err(Error::DuplicateSet(name.to_string()));
        }
        for &(e, k) in &edges {
            if e >= self.elements.len() || k >= self.elements[e].kind.node_count() {
                return Err(Error::Invalid(format!("edge set `{name}` references ({e}, {k})")));
            }
        }
        self.edge_sets.insert(name.to_string(), edges);
        Ok(())
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize]> {
        self.node_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownSet(name.to_string()))
    }

    pub fn edge_set(&self, name: &str) -> Result<&[EdgeRef]> {
        self.edge_sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownSet(name.to_string()))
    }

    pub fn node_sets(&self) -> impl Iterator<Item = (&String, &Vec<usize>)> {
        self.node_sets.iter()
    }

    pub fn edge_sets(&self) -> impl Iterator<Item = (&String, &Vec<EdgeRef>)> {
        self.edge_sets.iter()
    }

    /// Nodes touched by an edge set.
    pub fn edge_set_nodes(&self, name: &str) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = self
            .edge_set(name)?
            .iter()
            .flat_map(|&(e, k)| {
                let (a, b) = self.elements[e].edge(k);
                [a, b]
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.active[e]
    }

    pub fn active_flags(&self) -> &[bool] {
        &self.active
    }

    pub fn set_active_flags(&mut self, flags: &[bool]) {
        assert_eq!(flags.len(), self.active.len());
        self.active.copy_from_slice(flags);
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Marks every element of `region` active. Returns the elements whose flag
    /// changed (empty on a repeated call).
    pub fn activate(&mut self, region: &str) -> Result<Vec<usize>> {
        let r = self.region_index(region)?;
        let mut changed = Vec::new();
        for (e, el) in self.elements.iter().enumerate() {
            if el.region == r && !self.active[e] {
                self.active[e] = true;
                changed.push(e);
            }
        }
        Ok(changed)
    }

    pub fn deactivate(&mut self, region: &str) -> Result<()> {
        let r = self.region_index(region)?;
        for (e, el) in self.elements.iter().enumerate() {
            if el.region == r {
                self.active[e] = false;
            }
        }
        Ok(())
    }

    /// Nodes touched by at least one active element.
    pub fn active_nodes(&self) -> Vec<bool> {
        let mut flags = vec![false; self.nodes.len()];
        for (e, el) in self.elements.iter().enumerate() {
            if self.active[e] {
                for &n in el.nodes() {
                    flags[n] = true;
                }
            }
        }
        flags
    }

    pub fn element_coords(&self, e: usize) -> Vec<Point> {
        self.elements[e].nodes().iter().map(|&n| self.nodes[n]).collect()
    }

    pub fn centroid(&self, e: usize) -> Point {
        let ids = self.elements[e].nodes();
        let mut c = [0.0, 0.0];
        for &n in ids {
            c[0] += self.nodes[n][0];
            c[1] += self.nodes[n][1];
        }
        let k = ids.len() as f64;
        [c[0] / k, c[1] / k]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        signed_area(&self.nodes, self.elements[e].nodes())
    }

    fn edge_length(&self, a: usize, b: usize) -> f64 {
        let p = self.nodes[a];
        let q = self.nodes[b];
        ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
    }

    /// Largest element edge length in a region (diagonals are not edges).
    pub fn characteristic_length(&self, region: &str) -> Result<f64> {
        let elems = self.region_elements(region)?;
        if elems.is_empty() {
            return Err(Error::Invalid(format!("region `{region}` is empty")));
        }
        let mut h: f64 = 0.0;
        for e in elems {
            let el = &self.elements[e];
            for k in 0..el.kind.node_count() {
                let (a, b) = el.edge(k);
                h = h.max(self.edge_length(a, b));
            }
        }
        Ok(h)
    }

    /// Checks the phase-field resolution rule h <= ell/5 in a region. Logs a
    /// warning and returns `false` when violated.
    pub fn check_resolution(&self, region: &str, ell: f64) -> Result<bool> {
        let h = self.characteristic_length(region)?;
        let ok = h <= ell / 5.0 * (1.0 + 1e-12);
        if !ok {
            log::warn!(
                "region `{region}`: element size {h:.4} mm exceeds ell/5 = {:.4} mm",
                ell / 5.0
            );
        }
        Ok(ok)
    }

    /// Map from sorted node pair to the elements sharing that edge.
    fn edge_map(&self, active_only: bool) -> HashMap<(usize, usize), Vec<EdgeRef>> {
        let mut map: HashMap<(usize, usize), Vec<EdgeRef>> = HashMap::new();
        for (e, el) in self.elements.iter().enumerate() {
            if active_only && !self.active[e] {
                continue;
            }
            for k in 0..el.kind.node_count() {
                let (a, b) = el.edge(k);
                map.entry((a.min(b), a.max(b))).or_default().push((e, k));
            }
        }
        map
    }

    /// Local edge index of element `e` joining nodes `a` and `b` (either order).
    pub fn local_edge(&self, e: usize, a: usize, b: usize) -> Option<usize> {
        let el = &self.elements[e];
        (0..el.kind.node_count()).find(|&k| {
            let (p, q) = el.edge(k);
            (p == a && q == b) || (p == b && q == a)
        })
    }

    /// Edges of the active domain that belong to exactly one active element,
    /// in ascending (element, edge) order.
    pub fn exterior_edges(&self) -> Vec<EdgeRef> {
        let mut out: Vec<EdgeRef> = self
            .edge_map(true)
            .into_values()
            .filter(|v| v.len() == 1)
            .map(|v| v[0])
            .collect();
        out.sort_unstable();
        out
    }

    /// Edges separating an element of region `inner` from an element outside it.
    pub fn region_interface(&self, inner: &str) -> Result<Vec<EdgeRef>> {
        let r = self.region_index(inner)?;
        let mut out = Vec::new();
        for v in self.edge_map(false).into_values() {
            if v.len() == 2 {
                let (ea, eb) = (v[0].0, v[1].0);
                let ra = self.elements[ea].region == r;
                let rb = self.elements[eb].region == r;
                if ra != rb {
                    out.push(if ra { v[1] } else { v[0] });
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Element adjacency through shared edges.
    pub fn element_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.elements.len()];
        for v in self.edge_map(false).into_values() {
            if v.len() == 2 {
                adj[v[0].0].push(v[1].0);
                adj[v[1].0].push(v[0].0);
            }
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }

    /// Node adjacency through shared elements (active elements only).
    pub fn node_neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (e, el) in self.elements.iter().enumerate() {
            if !self.active[e] {
                continue;
            }
            for &a in el.nodes() {
                for &b in el.nodes() {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        adj
    }

    /// Element containing `p`, if any (active or not).
    pub fn locate(&self, p: Point) -> Option<usize> {
        (0..self.elements.len()).find(|&e| self.contains(e, p))
    }

    pub fn contains(&self, e: usize, p: Point) -> bool {
        let ids = self.elements[e].nodes();
        let n = ids.len();
        let tol = 1e-12 * self.element_area(e).abs().sqrt().max(1.0);
        for k in 0..n {
            let a = self.nodes[ids[k]];
            let b = self.nodes[ids[(k + 1) % n]];
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            if cross < -tol {
                return false;
            }
        }
        true
    }

    /// Polar node frames (angle of each node's position vector about `center`),
    /// used to express radial/circumferential constraints.
    pub fn polar_frames(&self, center: Point) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|p| (p[1] - center[1]).atan2(p[0] - center[0]))
            .collect()
    }
}
