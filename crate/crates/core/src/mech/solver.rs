//! Quasi-static plane-strain elastoplastic equilibrium with nodal frames.
//!
//! Unknowns are nodal displacement components in a per-node rotated basis
//! (angle 0 = Cartesian). In polar frames component 0 is radial and 1 is
//! circumferential, which makes radial and symmetry constraints simple
//! Dirichlet conditions.

use std::sync::Arc;

use super::return_map::{plane_tangent, return_map, QpParams, ReturnResult};
use super::tensor::Sym;
use super::QuadStates;
use crate::fem::{apply_dirichlet, newton_solve, CscMatrix, Geometry, LinearSolver, NewtonOptions, NonlinearSystem, Pattern};
use crate::mesh::Mesh2D;
use crate::{Error, Result};

/// Per-quadrature-point inputs of one mechanical solve.
pub struct MechInputs<'a> {
    pub params: &'a [QpParams],
    /// Thermal strain (zero in isothermal runs).
    pub eps_t: &'a [Sym],
    /// (g, ḡ) degradation with residual stiffness already included.
    pub g: &'a [(f64, f64)],
    /// Converged state of the previous increment.
    pub committed: &'a QuadStates,
}

pub struct MechModel<'a> {
    pub mesh: &'a Mesh2D,
    pub geom: &'a Geometry,
    /// Node frame angles [rad].
    pub frames: Vec<f64>,
    pattern: Arc<Pattern>,
}

impl<'a> MechModel<'a> {
    pub fn new(mesh: &'a Mesh2D, geom: &'a Geometry, frames: Vec<f64>) -> Self {
        assert_eq!(frames.len(), mesh.node_count());
        Self { mesh, geom, frames, pattern: Pattern::from_mesh(mesh, 2) }
    }

    /// Reuses a pattern built earlier for the same mesh so cached
    /// factorizations stay valid.
    pub fn with_pattern(mesh: &'a Mesh2D, geom: &'a Geometry, frames: Vec<f64>, pattern: Arc<Pattern>) -> Self {
        Self { mesh, geom, frames, pattern }
    }

    pub fn pattern(&self) -> Arc<Pattern> {
        self.pattern.clone()
    }

    pub fn ndof(&self) -> usize {
        2 * self.mesh.node_count()
    }

    /// Cartesian displacement of every node from local components.
    pub fn to_cartesian(&self, u_loc: &[f64]) -> Vec<[f64; 2]> {
        (0..self.mesh.node_count())
            .map(|n| {
                let (s, c) = self.frames[n].sin_cos();
                let (a, b) = (u_loc[2 * n], u_loc[2 * n + 1]);
                [c * a - s * b, s * a + c * b]
            })
            .collect()
    }

    /// Local components from Cartesian displacements.
    pub fn to_local(&self, u_cart: &[[f64; 2]]) -> Vec<f64> {
        let mut out = vec![0.0; self.ndof()];
        for n in 0..self.mesh.node_count() {
            let (s, c) = self.frames[n].sin_cos();
            out[2 * n] = c * u_cart[n][0] + s * u_cart[n][1];
            out[2 * n + 1] = -s * u_cart[n][0] + c * u_cart[n][1];
        }
        out
    }

    /// Strain ε(u) at every quadrature point of element `e` (Cartesian).
    fn element_strains(&self, e: usize, ucart: &[[f64; 2]]) -> [Sym; 4] {
        let nodes = self.mesh.elements[e].nodes();
        let mut out = [Sym::ZERO; 4];
        for (k, q) in self.geom.element(self.mesh, e).iter().enumerate() {
            let mut s = [0.0; 3];
            for (a, &n) in nodes.iter().enumerate() {
                let u = ucart[n];
                s[0] += q.dn[a][0] * u[0];
                s[1] += q.dn[a][1] * u[1];
                s[2] += q.dn[a][1] * u[0] + q.dn[a][0] * u[1];
            }
            out[k] = Sym::new(s[0], s[1], 0.0, 0.5 * s[2]);
        }
        out
    }

    /// Strain ε(u) at all quadrature points.
    pub fn strains(&self, u_loc: &[f64]) -> Vec<Sym> {
        let ucart = self.to_cartesian(u_loc);
        let mut out = vec![Sym::ZERO; self.geom.qps.len()];
        for e in 0..self.mesh.element_count() {
            let st = self.element_strains(e, &ucart);
            for (i, k) in self.mesh.quad_points(e).enumerate() {
                out[k] = st[i];
            }
        }
        out
    }

    fn point_update(&self, k: usize, eps_u: Sym, inp: &MechInputs) -> Result<(Sym, ReturnResult)> {
        let c = inp.committed;
        let eps = eps_u + c.shift[k];
        let trial = eps - c.eps_p[k] - inp.eps_t[k];
        let (g, gbar) = inp.g[k];
        let r = return_map(trial, c.eps_p[k], c.eps_bar[k], &inp.params[k], g, gbar).ok_or(Error::ReturnMap(k))?;
        Ok((eps, r))
    }

    /// Internal force (local components) and optionally the tangent.
    fn assemble(&self, u_loc: &[f64], inp: &MechInputs, want_k: bool) -> Result<(Vec<f64>, Option<CscMatrix>)> {
        let ucart = self.to_cartesian(u_loc);
        let mut f = vec![0.0; self.ndof()];
        let mut kmat = want_k.then(|| CscMatrix::zeros(self.pattern.clone()));
        let mut dofs = [0usize; 8];
        for e in 0..self.mesh.element_count() {
            if !self.mesh.is_active(e) {
                continue;
            }
            let nodes = self.mesh.elements[e].nodes();
            let nn = nodes.len();
            let nd = 2 * nn;
            let strains = self.element_strains(e, &ucart);
            let mut fe = [0.0; 8];
            let mut ke = [0.0; 64];
            for (i, (k, q)) in self.mesh.quad_points(e).zip(self.geom.element(self.mesh, e)).enumerate() {
                let (_, r) = self.point_update(k, strains[i], inp)?;
                let s = r.sigma.0;
                let d = plane_tangent(&r.tangent);
                // B columns: node a, comp x -> (dNx, 0, dNy); comp y -> (0, dNy, dNx)
                let mut b = [[0.0; 8]; 3];
                for a in 0..nn {
                    b[0][2 * a] = q.dn[a][0];
                    b[1][2 * a + 1] = q.dn[a][1];
                    b[2][2 * a] = q.dn[a][1];
                    b[2][2 * a + 1] = q.dn[a][0];
                }
                let sv = [s[0], s[1], s[3]];
                for p in 0..nd {
                    fe[p] += q.w * (b[0][p] * sv[0] + b[1][p] * sv[1] + b[2][p] * sv[2]);
                }
                if want_k {
                    let mut db = [[0.0; 8]; 3];
                    for r_ in 0..3 {
                        for p in 0..nd {
                            db[r_][p] = d[r_][0] * b[0][p] + d[r_][1] * b[1][p] + d[r_][2] * b[2][p];
                        }
                    }
                    for p in 0..nd {
                        for c_ in 0..nd {
                            ke[p * nd + c_] += q.w * (b[0][p] * db[0][c_] + b[1][p] * db[1][c_] + b[2][p] * db[2][c_]);
                        }
                    }
                }
            }
            // Rotate node blocks to local frames.
            let rot: Vec<(f64, f64)> = nodes.iter().map(|&n| self.frames[n].sin_cos()).collect();
            let rotate_vec = |v: &mut [f64], a: usize| {
                let (s, c) = rot[a];
                let (x, y) = (v[2 * a], v[2 * a + 1]);
                v[2 * a] = c * x + s * y;
                v[2 * a + 1] = -s * x + c * y;
            };
            for a in 0..nn {
                rotate_vec(&mut fe[..nd], a);
            }
            for (a, &n) in nodes.iter().enumerate() {
                f[2 * n] += fe[2 * a];
                f[2 * n + 1] += fe[2 * a + 1];
                dofs[2 * a] = 2 * n;
                dofs[2 * a + 1] = 2 * n + 1;
            }
            if let Some(km) = kmat.as_mut() {
                // K_loc = R^T K R applied on rows then columns.
                for col in 0..nd {
                    let mut colv = [0.0; 8];
                    for row in 0..nd {
                        colv[row] = ke[row * nd + col];
                    }
                    for a in 0..nn {
                        rotate_vec(&mut colv[..nd], a);
                    }
                    for row in 0..nd {
                        ke[row * nd + col] = colv[row];
                    }
                }
                for row in 0..nd {
                    let mut rowv = [0.0; 8];
                    rowv[..nd].copy_from_slice(&ke[row * nd..row * nd + nd]);
                    for a in 0..nn {
                        rotate_vec(&mut rowv[..nd], a);
                    }
                    ke[row * nd..row * nd + nd].copy_from_slice(&rowv[..nd]);
                }
                km.add_block(e, &dofs[..nd], &ke[..nd * nd])?;
            }
        }
        Ok((f, kmat))
    }

    pub fn internal_force(&self, u_loc: &[f64], inp: &MechInputs) -> Result<Vec<f64>> {
        Ok(self.assemble(u_loc, inp, false)?.0)
    }

    /// DOFs without an active element.
    pub fn inactive_dofs(&self) -> Vec<usize> {
        let act = self.mesh.active_nodes();
        (0..self.mesh.node_count()).filter(|&n| !act[n]).flat_map(|n| [2 * n, 2 * n + 1]).collect()
    }

    /// Solves equilibrium with prescribed local DOF values. `u0` is the start
    /// iterate (usually the previous solution).
    pub fn solve(
        &self,
        u0: &[f64],
        fixed: &[(usize, f64)],
        inp: &MechInputs,
        opts: &NewtonOptions,
        solver: &mut LinearSolver,
    ) -> Result<(Vec<f64>, usize)> {
        let mut x0 = u0.to_vec();
        let mut pinned: Vec<(usize, f64)> = fixed.to_vec();
        for d in self.inactive_dofs() {
            pinned.push((d, u0[d]));
        }
        for &(d, v) in &pinned {
            x0[d] = v;
        }
        let mut sys = MechSystem { model: self, inp, fixed: pinned };
        newton_solve(&mut sys, x0, opts, solver)
    }

    /// Evaluates the converged state at `u` and writes it into `out`.
    pub fn commit(&self, u_loc: &[f64], inp: &MechInputs, out: &mut QuadStates) -> Result<()> {
        let ucart = self.to_cartesian(u_loc);
        for e in 0..self.mesh.element_count() {
            let strains = self.element_strains(e, &ucart);
            for (i, k) in self.mesh.quad_points(e).enumerate() {
                if !self.mesh.is_active(e) {
                    continue;
                }
                let (eps, r) = self.point_update(k, strains[i], inp)?;
                out.eps[k] = eps;
                out.eps_p[k] = r.eps_p;
                out.eps_bar[k] = r.eps_bar;
                out.eps_t[k] = inp.eps_t[k];
                out.eps_e[k] = eps - r.eps_p - inp.eps_t[k];
                out.sigma[k] = r.sigma;
            }
        }
        Ok(())
    }
}

struct MechSystem<'m, 'a> {
    model: &'m MechModel<'a>,
    inp: &'m MechInputs<'m>,
    fixed: Vec<(usize, f64)>,
}

impl NonlinearSystem for MechSystem<'_, '_> {
    fn residual_and_jacobian(&mut self, x: &[f64]) -> Result<(Vec<f64>, CscMatrix)> {
        let (mut r, k) = self.model.assemble(x, self.inp, true)?;
        let mut k = k.expect("tangent requested");
        let zero: Vec<(usize, f64)> = self.fixed.iter().map(|&(d, _)| (d, 0.0)).collect();
        apply_dirichlet(&mut k, &mut r, &zero);
        Ok((r, k))
    }
}
