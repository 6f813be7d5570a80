//! Parametric generator for a welded pipe-wall sector.
//!
//! The sector is centred on the positive y axis (weld at the top of the pipe),
//! with the pipe centre at the origin. Weld polygons are given in local
//! coordinates: `x` is the Cartesian lateral coordinate, `d = r - R` the depth
//! measured outward from the inner surface.

use serde::{Deserialize, Serialize};

use super::grid::{graded_line, linspace};
use super::{Element, ElementKind, Mesh2D, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub points: Vec<Point>,
}

impl Polygon {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    /// Even-odd point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.points.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[j];
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn distance(&self, p: Point) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| segment_distance(p, self.points[i], self.points[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn area(&self) -> f64 {
        let n = self.points.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a.abs()
    }
}

pub fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipeSectionSpec {
    /// Inner radius R [mm].
    pub inner_radius: f64,
    /// Wall thickness b [mm].
    pub wall_thickness: f64,
    /// Bead polygons in deposition order, local (x, depth) coordinates.
    pub passes: Vec<Polygon>,
    /// HAZ band width around the weld [mm]; 0 disables the region.
    pub haz_width: f64,
    /// Half opening angle of the sector [deg].
    pub half_angle_deg: f64,
    pub radial_divisions: usize,
    /// Half-width of the uniformly refined band around the weld [mm].
    pub fine_half_width: f64,
    pub fine_spacing: f64,
    pub coarse_spacing: f64,
}

impl Default for PipeSectionSpec {
    fn default() -> Self {
        Self {
            inner_radius: 110.0,
            wall_thickness: 7.5,
            passes: Self::two_pass_double_v(),
            haz_width: 1.0,
            half_angle_deg: 30.0,
            radial_divisions: 30,
            fine_half_width: 12.0,
            fine_spacing: 0.25,
            coarse_spacing: 2.5,
        }
    }
}

impl PipeSectionSpec {
    /// Double-V seam weld: a root pass from the inner surface and a wider cap
    /// pass from the outer surface, 17 mm wide at the outer face.
    pub fn two_pass_double_v() -> Vec<Polygon> {
        vec![
            Polygon::new(vec![[-6.0, 0.0], [6.0, 0.0], [1.5, 4.0], [-1.5, 4.0]]),
            Polygon::new(vec![[-1.5, 3.5], [1.5, 3.5], [8.5, 7.5], [-8.5, 7.5]]),
        ]
    }

    pub fn outer_radius(&self) -> f64 {
        self.inner_radius + self.wall_thickness
    }

    /// Local (x, depth) coordinates of a Cartesian point.
    pub fn to_local(&self, p: Point) -> Point {
        [p[0], (p[0] * p[0] + p[1] * p[1]).sqrt() - self.inner_radius]
    }

    /// Cartesian point at lateral `x` and depth `d`.
    pub fn to_global(&self, q: Point) -> Point {
        let r = self.inner_radius + q[1];
        [q[0], (r * r - q[0] * q[0]).sqrt()]
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.wall_thickness > 0.0) {
            return Err(Error::Invalid("pipe radius and thickness must be positive".into()));
        }
        if self.radial_divisions == 0 || self.fine_spacing <= 0.0 || self.coarse_spacing < self.fine_spacing {
            return Err(Error::Invalid("pipe mesh spacing is inconsistent".into()));
        }
        let half_width = self.inner_radius * self.half_angle_deg.to_radians();
        for (k, poly) in self.passes.iter().enumerate() {
            if poly.points.len() < 3 {
                return Err(Error::Invalid(format!("weld pass {} needs at least 3 vertices", k + 1)));
            }
            for p in &poly.points {
                let tol = 1e-9;
                if p[1] < -tol || p[1] > self.wall_thickness + tol || p[0].abs() >= half_width {
                    return Err(Error::Invalid(format!(
                        "weld pass {} vertex ({}, {}) lies outside the wall",
                        k + 1,
                        p[0],
                        p[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Region name of pass `k` (1-based).
    pub fn pass_region(k: usize) -> String {
        format!("weld_pass_{k}")
    }

    /// Builds the mesh. Regions: `base`, `haz` (if non-empty) and
    /// `weld_pass_k`. Sets: `inner_surface`, `outer_surface`,
    /// `symmetry_left`, `symmetry_right` (node and edge sets) and
    /// `weld_cavity_pass_k` (bead nodes and edges shared with the domain that
    /// is active when pass k is deposited).
    pub fn generate(&self) -> Result<Mesh2D> {
        self.validate()?;
        let r0 = self.inner_radius;
        let half = r0 * self.half_angle_deg.to_radians();
        let fine = self.fine_half_width.min(half * 0.999);
        let ss = graded_line(-half, half, -fine, fine, self.fine_spacing, 1.15, self.coarse_spacing);
        let rs = linspace(r0, self.outer_radius(), self.radial_divisions);
        let ns = ss.len();
        let nr = rs.len();
        let id = |i: usize, j: usize| j * ns + i;

        let mut nodes = Vec::with_capacity(ns * nr);
        for &r in &rs {
            for &s in &ss {
                let th = std::f64::consts::FRAC_PI_2 - s / r0;
                nodes.push([r * th.cos(), r * th.sin()]);
            }
        }

        let n_pass = self.passes.len();
        let mut names = vec!["base".to_string(), "haz".to_string()];
        names.extend((1..=n_pass).map(Self::pass_region));
        let mut elements = Vec::with_capacity((ns - 1) * (nr - 1));
        for j in 0..nr - 1 {
            for i in 0..ns - 1 {
                let ids = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
                let mut c = [0.0, 0.0];
                for &n in &ids {
                    c[0] += 0.25 * nodes[n][0];
                    c[1] += 0.25 * nodes[n][1];
                }
                let q = self.to_local(c);
                let region = match self.passes.iter().position(|p| p.contains(q)) {
                    Some(k) => 2 + k,
                    None if self.haz_width > 0.0
                        && self.passes.iter().any(|p| p.distance(q) <= self.haz_width) =>
                    {
                        1
                    }
                    None => 0,
                };
                elements.push(Element::new(ElementKind::Quad4, &ids, region));
            }
        }

        let mut used = vec![false; names.len()];
        for el in &elements {
            used[el.region] = true;
        }
        for k in 0..n_pass {
            if !used[2 + k] {
                return Err(Error::Invalid(format!(
                    "weld pass {} contains no element centroid; refine the mesh",
                    k + 1
                )));
            }
        }
        if !used[1] {
            // Drop the empty HAZ region and shift indices.
            names.remove(1);
            for el in &mut elements {
                if el.region > 1 {
                    el.region -= 1;
                }
            }
        }

        let mut mesh = Mesh2D::new(nodes, elements, names)?;
        let ne_s = ns - 1;
        let el = |i: usize, j: usize| j * ne_s + i;
        let line_sets: [(&str, Vec<(usize, usize, usize)>); 4] = [
            ("inner_surface", (0..ne_s).map(|i| (el(i, 0), id(i, 0), id(i + 1, 0))).collect()),
            (
                "outer_surface",
                (0..ne_s).map(|i| (el(i, nr - 2), id(i, nr - 1), id(i + 1, nr - 1))).collect(),
            ),
            ("symmetry_left", (0..nr - 1).map(|j| (el(0, j), id(0, j), id(0, j + 1))).collect()),
            (
                "symmetry_right",
                (0..nr - 1).map(|j| (el(ne_s - 1, j), id(ns - 1, j), id(ns - 1, j + 1))).collect(),
            ),
        ];
        for (name, segs) in line_sets {
            let mut nodes_in = Vec::new();
            let mut edges = Vec::new();
            for (e, a, b) in segs {
                nodes_in.push(a);
                nodes_in.push(b);
                edges.push((e, mesh.local_edge(e, a, b).expect("edge of element")));
            }
            mesh.add_node_set(name, nodes_in)?;
            mesh.add_edge_set(name, edges)?;
        }

        // Cavity faces: edges between bead k and what is active before it.
        for k in 1..=n_pass {
            let bead = mesh.region_index(&Self::pass_region(k))?;
            let later: Vec<usize> = (k..=n_pass)
                .map(|m| mesh.region_index(&Self::pass_region(m)))
                .collect::<Result<_>>()?;
            let mut edges = Vec::new();
            let mut cav_nodes = Vec::new();
            let neighbors = mesh.element_neighbors();
            for e in 0..mesh.element_count() {
                if mesh.elements[e].region != bead {
                    continue;
                }
                for &f in &neighbors[e] {
                    if later.contains(&mesh.elements[f].region) {
                        continue;
                    }
                    let shared: Vec<usize> = mesh.elements[e]
                        .nodes()
                        .iter()
                        .copied()
                        .filter(|n| mesh.elements[f].nodes().contains(n))
                        .collect();
                    if let [a, b] = shared[..] {
                        edges.push((e, mesh.local_edge(e, a, b).expect("shared edge")));
                        cav_nodes.extend([a, b]);
                    }
                }
            }
            edges.sort_unstable();
            edges.dedup();
            mesh.add_node_set(&format!("weld_cavity_pass_{k}"), cav_nodes)?;
            mesh.add_edge_set(&format!("weld_cavity_pass_{k}"), edges)?;
        }
        Ok(mesh)
    }
}
