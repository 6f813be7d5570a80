//! AT2 phase-field fracture: energy split, history field, degradation and
//! the nodal phase-field solve.

use std::sync::Arc;

use crate::fem::{apply_dirichlet, CscMatrix, Geometry, LinearSolver, Pattern};
use crate::mech::Sym;
use crate::mesh::Mesh2D;
use crate::Result;

/// Residual stiffness added to g(φ) in the equilibrium problem.
pub const RESIDUAL_STIFFNESS: f64 = 1e-7;

/// φ above which material counts as cracked.
pub const CRACK_THRESHOLD: f64 = 0.95;

/// Volumetric–deviatoric split of the elastic energy density.
pub fn split_energy(eps_e: &Sym, k: f64, g: f64) -> (f64, f64) {
    let tr = eps_e.trace();
    let d = eps_e.dev();
    let dev = g * d.ddot(&d);
    let vol = 0.5 * k * tr * tr;
    if tr > 0.0 {
        (vol + dev, 0.0)
    } else {
        (dev, vol)
    }
}

/// Running maximum of the combined driving energy.
pub fn update_history(h_old: f64, psi_pos: f64, psi_p: f64, beta: f64) -> f64 {
    h_old.max(psi_pos + beta * psi_p)
}

/// Quadratic degradation of stiffness and yield surface: (g, ḡ).
pub fn degradation(phi: f64, beta: f64) -> (f64, f64) {
    let g = (1.0 - phi) * (1.0 - phi);
    (g, beta * g + 1.0 - beta)
}

/// g with a residual stiffness floor.
pub fn with_residual(g: f64, k_res: f64) -> f64 {
    (1.0 - k_res) * g + k_res
}

/// Crack surface density G_c(φ²/2ℓ + ℓ/2|∇φ|²) integrated over active
/// elements with a per-point G_c and ℓ.
pub fn crack_energy(mesh: &Mesh2D, geom: &Geometry, phi: &[f64], gc: &[f64], ell: &[f64]) -> f64 {
    let mut total = 0.0;
    for e in 0..mesh.element_count() {
        if !mesh.is_active(e) {
            continue;
        }
        let nodes = mesh.elements[e].nodes();
        for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
            let mut v = 0.0;
            let mut gr = [0.0; 2];
            for (a, &n) in nodes.iter().enumerate() {
                v += q.n[a] * phi[n];
                gr[0] += q.dn[a][0] * phi[n];
                gr[1] += q.dn[a][1] * phi[n];
            }
            let l = ell[k];
            total += q.w * gc[k] * (v * v / (2.0 * l) + 0.5 * l * (gr[0] * gr[0] + gr[1] * gr[1]));
        }
    }
    total
}

/// Nodal AT2 solver. Holds the scalar sparsity pattern so factorizations can
/// be reused across staggered passes.
pub struct PhaseFieldSolver {
    pattern: Arc<Pattern>,
    pub linear: LinearSolver,
}

impl PhaseFieldSolver {
    pub fn new(mesh: &Mesh2D) -> Self {
        Self { pattern: Pattern::from_mesh(mesh, 1), linear: LinearSolver::default() }
    }

    /// Solves ∫[(G_c/ℓ + 2H)φv + G_cℓ∇φ·∇v] = ∫2Hv on the active domain.
    /// `seeded` nodes are held at φ = 1, nodes outside the active domain at
    /// their previous value. The result is clamped to [φ_prev, 1].
    pub fn solve(
        &mut self,
        mesh: &Mesh2D,
        geom: &Geometry,
        history: &[f64],
        gc: &[f64],
        ell: &[f64],
        phi_prev: &[f64],
        seeded: &[usize],
    ) -> Result<Vec<f64>> {
        let nn = mesh.node_count();
        let mut mat = CscMatrix::zeros(self.pattern.clone());
        let mut rhs = vec![0.0; nn];
        let mut ke = [0.0; 16];
        for e in 0..mesh.element_count() {
            if !mesh.is_active(e) {
                continue;
            }
            let nodes = mesh.elements[e].nodes();
            let m = nodes.len();
            ke[..m * m].iter_mut().for_each(|v| *v = 0.0);
            for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
                let h = history[k];
                let react = gc[k] / ell[k] + 2.0 * h;
                let diff = gc[k] * ell[k];
                for a in 0..m {
                    rhs[nodes[a]] += q.w * 2.0 * h * q.n[a];
                    for b in 0..m {
                        ke[a * m + b] += q.w
                            * (react * q.n[a] * q.n[b] + diff * (q.dn[a][0] * q.dn[b][0] + q.dn[a][1] * q.dn[b][1]));
                    }
                }
            }
            mat.add_block(e, nodes, &ke[..m * m])?;
        }
        let active = mesh.active_nodes();
        let mut fixed: Vec<(usize, f64)> = (0..nn).filter(|&n| !active[n]).map(|n| (n, phi_prev[n])).collect();
        fixed.extend(seeded.iter().map(|&n| (n, 1.0)));
        apply_dirichlet(&mut mat, &mut rhs, &fixed);
        let phi = self.linear.solve_spd(&mat, &rhs)?;
        Ok(phi.iter().zip(phi_prev).map(|(&p, &o)| p.clamp(0.0, 1.0).max(o)).collect())
    }
}

/// Elements whose mean nodal φ exceeds `threshold`.
pub fn cracked_elements(mesh: &Mesh2D, phi: &[f64], threshold: f64) -> Vec<usize> {
    (0..mesh.element_count())
        .filter(|&e| mesh.is_active(e))
        .filter(|&e| {
            let n = mesh.elements[e].nodes();
            n.iter().map(|&i| phi[i]).sum::<f64>() / n.len() as f64 > threshold
        })
        .collect()
}
