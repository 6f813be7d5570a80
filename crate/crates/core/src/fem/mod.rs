//! Shared finite-element machinery.

mod newton;
mod recovery;
mod shape;
mod solve;
mod sparse;

pub use newton::{newton_solve, NewtonOptions, NonlinearSystem};
pub use recovery::{extrapolate_to_nodes, gradient_at_qps, interpolate_at_qps};
pub use shape::{edge_gauss, Geometry, QpData, EDGE_GAUSS};
pub use solve::{LinearSolver, SolverKind};
pub use sparse::{apply_dirichlet, pin_inactive, CscMatrix, Pattern};

/// Global DOF index of `comp` at `node` with `nd` unknowns per node.
#[inline]
pub fn dof(node: usize, comp: usize, nd: usize) -> usize {
    node * nd + comp
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
