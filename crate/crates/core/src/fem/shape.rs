//! Linear shape functions and quadrature: 1-point triangles, 2x2 Gauss quads.

use crate::mesh::{ElementKind, Mesh2D, Point};

/// Shape data at one quadrature point.
#[derive(Debug, Clone, Copy, Default)]
pub struct QpData {
    /// Shape function values (unused slots zero).
    pub n: [f64; 4],
    /// Cartesian shape function gradients.
    pub dn: [[f64; 2]; 4],
    /// Integration weight times Jacobian determinant [mm²].
    pub w: f64,
    pub x: Point,
}

const G: f64 = 0.577_350_269_189_625_8;
/// Gauss points ordered like the element nodes.
pub(crate) const QUAD_GAUSS: [[f64; 2]; 4] = [[-G, -G], [G, -G], [G, G], [-G, G]];
const QUAD_NODES: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

pub(crate) fn quad_shape(xi: f64, eta: f64) -> ([f64; 4], [[f64; 2]; 4]) {
    let mut n = [0.0; 4];
    let mut d = [[0.0; 2]; 4];
    for (i, c) in QUAD_NODES.iter().enumerate() {
        n[i] = 0.25 * (1.0 + c[0] * xi) * (1.0 + c[1] * eta);
        d[i][0] = 0.25 * c[0] * (1.0 + c[1] * eta);
        d[i][1] = 0.25 * c[1] * (1.0 + c[0] * xi);
    }
    (n, d)
}

fn qp_from_reference(x: &[Point], n: [f64; 4], dref: [[f64; 2]; 4], nn: usize, weight: f64) -> QpData {
    let mut j = [[0.0; 2]; 2];
    let mut pos = [0.0; 2];
    for a in 0..nn {
        for r in 0..2 {
            pos[r] += n[a] * x[a][r];
            for s in 0..2 {
                j[r][s] += x[a][r] * dref[a][s];
            }
        }
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [[j[1][1] / det, -j[0][1] / det], [-j[1][0] / det, j[0][0] / det]];
    let mut dn = [[0.0; 2]; 4];
    for a in 0..nn {
        for s in 0..2 {
            dn[a][s] = dref[a][0] * inv[0][s] + dref[a][1] * inv[1][s];
        }
    }
    QpData { n, dn, w: weight * det, x: pos }
}

/// Quadrature data for every quadrature point of the mesh, indexed like
/// [`Mesh2D::quad_points`]. Geometry never changes, so this is built once.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub qps: Vec<QpData>,
}

impl Geometry {
    pub fn new(mesh: &Mesh2D) -> Self {
        let mut qps = Vec::with_capacity(mesh.quad_point_count());
        for e in 0..mesh.element_count() {
            let x = mesh.element_coords(e);
            match mesh.elements[e].kind {
                ElementKind::Tri3 => {
                    let n = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
                    let dref = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0], [0.0, 0.0]];
                    qps.push(qp_from_reference(&x, n, dref, 3, 0.5));
                }
                ElementKind::Quad4 => {
                    for g in QUAD_GAUSS {
                        let (n, d) = quad_shape(g[0], g[1]);
                        qps.push(qp_from_reference(&x, n, d, 4, 1.0));
                    }
                }
            }
        }
        Self { qps }
    }

    pub fn element(&self, mesh: &Mesh2D, e: usize) -> &[QpData] {
        &self.qps[mesh.quad_points(e)]
    }
}

/// Two-point Gauss rule on [0, 1]: (parameter, weight).
pub const EDGE_GAUSS: [(f64, f64); 2] = [(0.5 - 0.5 * G, 0.5), (0.5 + 0.5 * G, 0.5)];

/// Edge quadrature between nodes a and b: (N_a, N_b, length-weighted weight).
pub fn edge_gauss(pa: Point, pb: Point) -> [(f64, f64, f64); 2] {
    let len = ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt();
    EDGE_GAUSS.map(|(t, w)| (1.0 - t, t, w * len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{grid, Element};

    #[test]
    fn weights_sum_to_area() {
        let m = grid::tensor(&[0.0, 0.3, 1.0], &[0.0, 0.5, 2.0]);
        let g = Geometry::new(&m);
        let total: f64 = g.qps.iter().map(|q| q.w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let nodes = vec![[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]];
        let t = Mesh2D::new(nodes, vec![Element::new(ElementKind::Tri3, &[0, 1, 2], 0)], vec!["base".into()]).unwrap();
        let gt = Geometry::new(&t);
        assert!((gt.qps[0].w - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gradients_reproduce_linear_field() {
        let nodes = vec![[0.0, 0.0], [2.0, 0.2], [2.3, 1.7], [-0.1, 1.2]];
        let m = Mesh2D::new(nodes.clone(), vec![Element::new(ElementKind::Quad4, &[0, 1, 2, 3], 0)], vec!["b".into()]).unwrap();
        let g = Geometry::new(&m);
        let f = |p: Point| 3.0 * p[0] - 2.0 * p[1] + 1.0;
        for q in &g.qps {
            let mut grad = [0.0; 2];
            let mut val = 0.0;
            for a in 0..4 {
                val += q.n[a] * f(nodes[a]);
                grad[0] += q.dn[a][0] * f(nodes[a]);
                grad[1] += q.dn[a][1] * f(nodes[a]);
            }
            assert!((val - f(q.x)).abs() < 1e-12);
            assert!((grad[0] - 3.0).abs() < 1e-12 && (grad[1] + 2.0).abs() < 1e-12);
        }
    }
}
