//! Stress-assisted hydrogen transport in the dilute limit:
//! ∂C/∂t = ∇·(D∇C) − ∇·(D C κ ∇σ_h), κ = V̄_H/(R T).

use std::sync::Arc;

use crate::fem::{apply_dirichlet, interpolate_at_qps, CscMatrix, Geometry, LinearSolver, Pattern};
use crate::mesh::Mesh2D;
use crate::Result;

/// D = D₀(1 + k_d⟨φ − φ_th⟩).
pub fn effective_diffusivity(d0: f64, phi: f64, k_d: f64, phi_th: f64) -> f64 {
    d0 * (1.0 + k_d * (phi - phi_th).max(0.0))
}

/// Per-quadrature-point diffusivity from a nodal phase field.
pub fn diffusivity_field(mesh: &Mesh2D, geom: &Geometry, phi: &[f64], d0: &[f64], k_d: f64, phi_th: f64) -> Vec<f64> {
    interpolate_at_qps(mesh, geom, phi)
        .iter()
        .zip(d0)
        .map(|(&p, &d)| effective_diffusivity(d, p, k_d, phi_th))
        .collect()
}

/// Total hydrogen content ∫C over the active domain.
pub fn total_mass(mesh: &Mesh2D, geom: &Geometry, c: &[f64]) -> f64 {
    let nodal = interpolate_at_qps(mesh, geom, c);
    (0..mesh.element_count())
        .filter(|&e| mesh.is_active(e))
        .flat_map(|e| mesh.quad_points(e).zip(geom.element(mesh, e)))
        .map(|(k, q)| q.w * nodal[k])
        .sum()
}

/// Inputs of one implicit transport step.
pub struct TransportStep<'a> {
    pub dt: f64,
    /// D at each quadrature point.
    pub d: &'a [f64],
    /// ∇σ_h at each quadrature point.
    pub grad_sigma_h: &'a [[f64; 2]],
    /// V̄_H/(R T) [1/MPa].
    pub drift: f64,
    /// Prescribed nodal concentrations.
    pub dirichlet: &'a [(usize, f64)],
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub c: Vec<f64>,
    /// Hydrogen that entered through prescribed nodes during the step.
    pub inflow: f64,
    /// Content added by clipping negative undershoots.
    pub clipped: f64,
}

/// Backward-Euler transport solver with lumped capacity.
pub struct TransportSolver {
    pattern: Arc<Pattern>,
    pub linear: LinearSolver,
}

impl TransportSolver {
    pub fn new(mesh: &Mesh2D) -> Self {
        Self { pattern: Pattern::from_mesh(mesh, 1), linear: LinearSolver::default() }
    }

    pub fn step(&mut self, mesh: &Mesh2D, geom: &Geometry, c_old: &[f64], s: &TransportStep) -> Result<StepOutcome> {
        let nn = mesh.node_count();
        let mut mat = CscMatrix::zeros(self.pattern.clone());
        let mut lumped = vec![0.0; nn];
        let mut ke = [0.0; 16];
        for e in 0..mesh.element_count() {
            if !mesh.is_active(e) {
                continue;
            }
            let nodes = mesh.elements[e].nodes();
            let m = nodes.len();
            ke[..m * m].iter_mut().for_each(|v| *v = 0.0);
            for (k, q) in mesh.quad_points(e).zip(geom.element(mesh, e)) {
                let d = s.d[k];
                let v = [d * s.drift * s.grad_sigma_h[k][0], d * s.drift * s.grad_sigma_h[k][1]];
                for a in 0..m {
                    lumped[nodes[a]] += q.w * q.n[a];
                    for b in 0..m {
                        let diff = d * (q.dn[a][0] * q.dn[b][0] + q.dn[a][1] * q.dn[b][1]);
                        let adv = q.n[b] * (v[0] * q.dn[a][0] + v[1] * q.dn[a][1]);
                        ke[a * m + b] += q.w * (diff - adv);
                    }
                }
            }
            mat.add_block(e, nodes, &ke[..m * m])?;
        }
        let mut rhs = vec![0.0; nn];
        for n in 0..nn {
            if lumped[n] > 0.0 {
                mat.add(n, n, lumped[n] / s.dt);
                rhs[n] = lumped[n] / s.dt * c_old[n];
            }
        }
        let full = mat.clone();
        let active = mesh.active_nodes();
        let mut fixed: Vec<(usize, f64)> = (0..nn).filter(|&n| !active[n]).map(|n| (n, c_old[n])).collect();
        fixed.extend(s.dirichlet.iter().copied().filter(|&(n, _)| active[n]));
        let rhs0 = rhs.clone();
        apply_dirichlet(&mut mat, &mut rhs, &fixed);
        let mut c = self.linear.solve_general(&mat, &rhs)?;
        // Reaction at prescribed nodes is the inflow rate.
        let ac = full.matvec(&c);
        let inflow: f64 = s
            .dirichlet
            .iter()
            .filter(|&&(n, _)| active[n])
            .map(|&(n, _)| (ac[n] - rhs0[n]) * s.dt)
            .sum();
        let mut clipped = 0.0;
        for n in 0..nn {
            if c[n] < 0.0 {
                clipped -= lumped[n] * c[n];
                c[n] = 0.0;
            }
        }
        Ok(StepOutcome { c, inflow, clipped })
    }
}

/// Running hydrogen balance.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
pub struct MassAudit {
    pub initial: f64,
    pub current: f64,
    pub inflow: f64,
    pub clipped: f64,
    pub peak: f64,
}

impl MassAudit {
    pub fn new(initial: f64) -> Self {
        Self { initial, current: initial, peak: initial, ..Default::default() }
    }

    pub fn record(&mut self, mass: f64, step: &StepOutcome) {
        self.current = mass;
        self.inflow += step.inflow;
        self.clipped += step.clipped;
        self.peak = self.peak.max(mass);
    }

    /// |ΔM − ∫inflow − clipped| / max M.
    pub fn closure(&self) -> f64 {
        let scale = self.peak.max(f64::MIN_POSITIVE);
        (self.current - self.initial - self.inflow - self.clipped).abs() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::grid;
    use proptest::prelude::*;

    #[test]
    fn diffusivity_examples() {
        assert_eq!(effective_diffusivity(1.0, 0.5, 1e4, 0.8), 1.0);
        assert!((effective_diffusivity(1.0, 0.9, 1e4, 0.8) - 1001.0).abs() < 1e-9);
        assert!((effective_diffusivity(1.0, 1.0, 1e4, 0.8) - 2001.0).abs() < 1e-9);
    }

    fn wall(n: usize) -> Mesh2D {
        grid::rectangle(0.0, 1.0, 0.0, 0.05, n, 1)
    }

    fn steady(m: &Mesh2D, grad: f64, drift: f64, cstar: f64) -> (Vec<f64>, StepOutcome) {
        let g = Geometry::new(m);
        let nq = m.quad_point_count();
        let d = vec![1.0; nq];
        let gs = vec![[grad, 0.0]; nq];
        let mut bc: Vec<(usize, f64)> = m.node_set("left").unwrap().iter().map(|&n| (n, cstar)).collect();
        bc.extend(m.node_set("right").unwrap().iter().map(|&n| (n, 0.0)));
        let mut s = TransportSolver::new(m);
        let st = TransportStep { dt: 1e12, d: &d, grad_sigma_h: &gs, drift, dirichlet: &bc };
        let out = s.step(m, &g, &vec![0.0; m.node_count()], &st).unwrap();
        (out.c.clone(), out)
    }

    #[test]
    fn steady_fickian_is_linear() {
        let m = wall(20);
        let (c, _) = steady(&m, 0.0, 1.0, 0.4);
        for (n, p) in m.nodes.iter().enumerate() {
            assert!((c[n] - 0.4 * (1.0 - p[0])).abs() < 1e-9);
        }
    }

    #[test]
    fn steady_drift_matches_exponential_profile() {
        let m = wall(100);
        let kappa = 2.0;
        let (c, _) = steady(&m, kappa / 8.2e-4, 8.2e-4, 1.0);
        let exact = |x: f64| ((kappa * x).exp() - kappa.exp()) / (1.0 - kappa.exp());
        for (n, p) in m.nodes.iter().enumerate() {
            assert!((c[n] - exact(p[0])).abs() <= 0.01 * exact(p[0]).max(1e-3), "{} {}", c[n], exact(p[0]));
        }
    }

    #[test]
    fn uniform_stress_offset_is_invisible() {
        // only ∇σ_h enters; a constant σ_h gives zero gradient
        let m = wall(10);
        let g = Geometry::new(&m);
        let sh = vec![300.0; m.node_count()];
        let grad = crate::fem::gradient_at_qps(&m, &g, &sh);
        assert!(grad.iter().all(|v| v[0].abs() < 1e-9 && v[1].abs() < 1e-9));
    }

    #[test]
    fn sealed_domain_conserves_mass() {
        let m = grid::rectangle(0.0, 1.0, 0.0, 1.0, 8, 8);
        let g = Geometry::new(&m);
        let nq = m.quad_point_count();
        let c0: Vec<f64> = m.nodes.iter().map(|p| (3.0 * p[0]).sin().abs() + p[1]).collect();
        let d = vec![0.3; nq];
        let gs: Vec<[f64; 2]> = g.qps.iter().map(|q| [50.0 * q.x[1], -20.0]).collect();
        let mut s = TransportSolver::new(&m);
        let m0 = total_mass(&m, &g, &c0);
        let mut c = c0;
        for _ in 0..10 {
            let st = TransportStep { dt: 0.05, d: &d, grad_sigma_h: &gs, drift: 8.2e-4, dirichlet: &[] };
            c = s.step(&m, &g, &c, &st).unwrap().c;
        }
        assert!((total_mass(&m, &g, &c) - m0).abs() / m0 < 1e-10);
    }

    #[test]
    fn drift_benchmark_audit_closes() {
        let m = wall(50);
        let g = Geometry::new(&m);
        let nq = m.quad_point_count();
        let d = vec![1.0; nq];
        let gs = vec![[1000.0, 0.0]; nq];
        let mut bc: Vec<(usize, f64)> = m.node_set("left").unwrap().iter().map(|&n| (n, 1.0)).collect();
        bc.extend(m.node_set("right").unwrap().iter().map(|&n| (n, 0.0)));
        let mut s = TransportSolver::new(&m);
        let mut c = vec![0.0; m.node_count()];
        let mut audit = MassAudit::new(0.0);
        let mut last = 0.0;
        for _ in 0..40 {
            let st = TransportStep { dt: 0.01, d: &d, grad_sigma_h: &gs, drift: 8.2e-4, dirichlet: &bc };
            let out = s.step(&m, &g, &c, &st).unwrap();
            c = out.c.clone();
            let mass = total_mass(&m, &g, &c);
            assert!(mass >= last - 1e-14);
            last = mass;
            audit.record(mass, &out);
        }
        assert!(audit.closure() <= 1e-6, "{}", audit.closure());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn raising_boundary_concentration_never_lowers_c(c1 in 0.0f64..1.0, bump in 0.0f64..1.0, grad in -500.0f64..500.0) {
            let m = wall(20);
            let g = Geometry::new(&m);
            let nq = m.quad_point_count();
            let d = vec![1.0; nq];
            let gs = vec![[grad, 0.0]; nq];
            let run = |cstar: f64| {
                let mut bc: Vec<(usize, f64)> = m.node_set("left").unwrap().iter().map(|&n| (n, cstar)).collect();
                bc.extend(m.node_set("right").unwrap().iter().map(|&n| (n, 0.0)));
                let mut s = TransportSolver::new(&m);
                let mut c = vec![0.0; m.node_count()];
                let mut hist = Vec::new();
                for _ in 0..5 {
                    let st = TransportStep { dt: 0.02, d: &d, grad_sigma_h: &gs, drift: 8.2e-4, dirichlet: &bc };
                    c = s.step(&m, &g, &c, &st).unwrap().c;
                    hist.push(c.clone());
                }
                hist
            };
            let lo = run(c1);
            let hi = run(c1 + bump);
            for (a, b) in lo.iter().zip(&hi) {
                for (x, y) in a.iter().zip(b) {
                    prop_assert!(*y >= x - 1e-12);
                }
            }
        }

        #[test]
        fn zero_kd_ignores_phase_field(phi in 0.0f64..=1.0, d0 in 1e-5f64..1e-2) {
            prop_assert_eq!(effective_diffusivity(d0, phi, 0.0, 0.8), d0);
        }
    }
}
