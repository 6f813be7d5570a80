use super::solve::LinearSolver;
use super::sparse::CscMatrix;
use super::norm;
use crate::error::NewtonFailure;
use crate::{Error, Result};

/// A discrete nonlinear system R(x) = 0. Constrained DOFs must come back with
/// a zero residual and an identity Jacobian row/column.
pub trait NonlinearSystem {
    fn residual_and_jacobian(&mut self, x: &[f64]) -> Result<(Vec<f64>, CscMatrix)>;

    fn symmetric(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Residual scale floor: converged when ‖R‖ ≤ tol·max(floor, ‖R(x0)‖).
    pub floor: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 25, floor: 1.0 }
    }
}

/// Full Newton iteration. Returns the solution and the number of linear
/// solves performed.
pub fn newton_solve(
    sys: &mut dyn NonlinearSystem,
    x0: Vec<f64>,
    opts: &NewtonOptions,
    solver: &mut LinearSolver,
) -> Result<(Vec<f64>, usize)> {
    let mut x = x0;
    let (mut r, mut jac) = sys.residual_and_jacobian(&x)?;
    let r0 = norm(&r);
    let target = opts.tol * opts.floor.max(r0);
    let mut rn = r0;
    for it in 0..opts.max_iter {
        if rn <= target {
            return Ok((x, it));
        }
        let neg: Vec<f64> = r.iter().map(|v| -v).collect();
        let dx = if sys.symmetric() { solver.solve_spd(&jac, &neg)? } else { solver.solve_general(&jac, &neg)? };
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        let (r1, j1) = sys.residual_and_jacobian(&x)?;
        r = r1;
        jac = j1;
        rn = norm(&r);
        if !rn.is_finite() {
            break;
        }
    }
    if rn <= target {
        return Ok((x, opts.max_iter));
    }
    Err(Error::Newton(Box::new(NewtonFailure { last_iterate: x, iterations: opts.max_iter, residual_norm: rn })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::Pattern;
    use std::sync::Arc;

    struct Scalar<F: Fn(f64) -> (f64, f64)>(F, Arc<crate::fem::Pattern>);

    impl<F: Fn(f64) -> (f64, f64)> NonlinearSystem for Scalar<F> {
        fn residual_and_jacobian(&mut self, x: &[f64]) -> Result<(Vec<f64>, CscMatrix)> {
            let (r, d) = (self.0)(x[0]);
            let mut j = CscMatrix::zeros(self.1.clone());
            j.add(0, 0, d);
            Ok((vec![r], j))
        }
        fn symmetric(&self) -> bool {
            false
        }
    }

    #[test]
    fn linear_converges_in_one_iteration() {
        let mut s = Scalar(|x| (3.0 * x - 6.0, 3.0), Pattern::from_triplets(1, &[]));
        let (x, it) = newton_solve(&mut s, vec![0.0], &NewtonOptions::default(), &mut LinearSolver::default()).unwrap();
        assert_eq!(it, 1);
        assert!((x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cubic_root() {
        // x^3 - 2x - 5 has the real root 2.0945514815423265
        let mut s = Scalar(|x| (x * x * x - 2.0 * x - 5.0, 3.0 * x * x - 2.0), Pattern::from_triplets(1, &[]));
        let opts = NewtonOptions { tol: 1e-12, ..Default::default() };
        let (x, _) = newton_solve(&mut s, vec![2.0], &opts, &mut LinearSolver::default()).unwrap();
        assert!((x[0] - 2.094_551_481_542_326_5).abs() < 1e-12);
    }

    #[test]
    fn failure_carries_last_iterate() {
        // no real root
        let mut s = Scalar(|x| (x * x + 1.0, 2.0 * x), Pattern::from_triplets(1, &[]));
        let opts = NewtonOptions { max_iter: 5, ..Default::default() };
        match newton_solve(&mut s, vec![0.5], &opts, &mut LinearSolver::default()) {
            Err(Error::Newton(f)) => {
                assert_eq!(f.iterations, 5);
                assert_eq!(f.last_iterate.len(), 1);
            }
            other => panic!("{other:?}"),
        }
    }
}
