//! Quadrature-to-node recovery and nodal-field gradients.

use super::shape::{quad_shape, Geometry, QUAD_GAUSS};
use crate::mesh::{ElementKind, Mesh2D};

/// Extrapolates a quadrature field to element nodes (bilinear through the
/// 2x2 Gauss values for quads, constant for triangles), then averages at
/// each node weighted by element area. Only active elements contribute;
/// nodes without an active element get zero.
pub fn extrapolate_to_nodes(mesh: &Mesh2D, field: &[f64]) -> Vec<f64> {
    let s3 = 3.0_f64.sqrt();
    // Node i sits at sqrt(3) times the Gauss coordinates of point i.
    let mut ex = [[0.0; 4]; 4];
    for i in 0..4 {
        let g = QUAD_GAUSS[i];
        let (n, _) = quad_shape(g[0] * s3 * s3, g[1] * s3 * s3);
        ex[i] = n;
    }
    let mut acc = vec![0.0; mesh.node_count()];
    let mut wsum = vec![0.0; mesh.node_count()];
    for e in 0..mesh.element_count() {
        if !mesh.is_active(e) {
            continue;
        }
        let area = mesh.element_area(e);
        let qp = mesh.quad_points(e);
        let el = &mesh.elements[e];
        match el.kind {
            ElementKind::Tri3 => {
                for &n in el.nodes() {
                    acc[n] += area * field[qp.start];
                    wsum[n] += area;
                }
            }
            ElementKind::Quad4 => {
                let g = &field[qp];
                for (i, &n) in el.nodes().iter().enumerate() {
                    let v: f64 = (0..4).map(|k| ex[i][k] * g[k]).sum();
                    acc[n] += area * v;
                    wsum[n] += area;
                }
            }
        }
    }
    acc.iter().zip(&wsum).map(|(a, w)| if *w > 0.0 { a / w } else { 0.0 }).collect()
}

/// Value of a nodal field at every quadrature point.
pub fn interpolate_at_qps(mesh: &Mesh2D, geom: &Geometry, nodal: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; geom.qps.len()];
    for e in 0..mesh.element_count() {
        let nodes = mesh.elements[e].nodes();
        for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
            out[k] = nodes.iter().enumerate().map(|(a, &n)| q.n[a] * nodal[n]).sum();
        }
    }
    out
}

/// Gradient of a nodal field at every quadrature point.
pub fn gradient_at_qps(mesh: &Mesh2D, geom: &Geometry, nodal: &[f64]) -> Vec<[f64; 2]> {
    let mut out = vec![[0.0; 2]; geom.qps.len()];
    for e in 0..mesh.element_count() {
        let nodes = mesh.elements[e].nodes();
        for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
            let mut g = [0.0; 2];
            for (a, &n) in nodes.iter().enumerate() {
                g[0] += q.dn[a][0] * nodal[n];
                g[1] += q.dn[a][1] * nodal[n];
            }
            out[k] = g;
        }
    }
    out
}
