//! Linear solvers: cached sparse Cholesky/LU (faer) or Jacobi-preconditioned CG.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, Lu, SymbolicLlt, SymbolicLu};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{MatMut, Side};
use serde::{Deserialize, Serialize};

use super::sparse::{CscMatrix, Pattern};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[default]
    Direct,
    Cg,
}

/// Reusable solver. Symbolic factorizations are cached per pattern.
pub struct LinearSolver {
    pub kind: SolverKind,
    pub cg_tol: f64,
    pub cg_max_iter: usize,
    llt: Option<(Arc<Pattern>, SymbolicLlt<usize>)>,
    lu: Option<(Arc<Pattern>, SymbolicLu<usize>)>,
}

impl Default for LinearSolver {
    fn default() -> Self {
        Self::new(SolverKind::Direct)
    }
}

impl LinearSolver {
    pub fn new(kind: SolverKind) -> Self {
        // Sequential kernels keep results bitwise reproducible.
        faer::set_global_parallelism(faer::Par::Seq);
        Self { kind, cg_tol: 1e-12, cg_max_iter: 20000, llt: None, lu: None }
    }

    fn symbolic(p: &Pattern) -> SymbolicSparseColMatRef<'_, usize> {
        SymbolicSparseColMatRef::new_checked(p.n, p.n, &p.col_ptr, None, &p.row_idx)
    }

    /// Solves a symmetric positive definite system; falls back to LU if the
    /// Cholesky factorization breaks down.
    pub fn solve_spd(&mut self, a: &CscMatrix, b: &[f64]) -> Result<Vec<f64>> {
        if self.kind == SolverKind::Cg {
            return self.cg(a, b);
        }
        let sym = Self::symbolic(&a.pattern);
        let cached = matches!(&self.llt, Some((p, _)) if Arc::ptr_eq(p, &a.pattern));
        if !cached {
            let s = SymbolicLlt::try_new(sym, Side::Lower).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
            self.llt = Some((a.pattern.clone(), s));
        }
        let s = self.llt.as_ref().unwrap().1.clone();
        let mat = SparseColMatRef::new(sym, &a.values);
        match Llt::try_new_with_symbolic(s, mat, Side::Lower) {
            Ok(f) => {
                let mut x = b.to_vec();
                f.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, a.n(), 1));
                check_finite(x)
            }
            Err(_) => {
                log::debug!("cholesky breakdown; retrying with LU");
                self.solve_general(a, b)
            }
        }
    }

    pub fn solve_general(&mut self, a: &CscMatrix, b: &[f64]) -> Result<Vec<f64>> {
        let sym = Self::symbolic(&a.pattern);
        let cached = matches!(&self.lu, Some((p, _)) if Arc::ptr_eq(p, &a.pattern));
        if !cached {
            let s = SymbolicLu::try_new(sym).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
            self.lu = Some((a.pattern.clone(), s));
        }
        let s = self.lu.as_ref().unwrap().1.clone();
        let mat = SparseColMatRef::new(sym, &a.values);
        let f = Lu::try_new_with_symbolic(s, mat).map_err(|e| Error::LinearSolve(format!("{e:?}")))?;
        let mut x = b.to_vec();
        f.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, a.n(), 1));
        check_finite(x)
    }

    fn cg(&self, a: &CscMatrix, b: &[f64]) -> Result<Vec<f64>> {
        let n = a.n();
        let d: Vec<f64> = a.diagonal().into_iter().map(|v| if v != 0.0 { 1.0 / v } else { 1.0 }).collect();
        let mut x = vec![0.0; n];
        let mut r = b.to_vec();
        let bnorm = super::norm(b).max(f64::MIN_POSITIVE);
        let mut z: Vec<f64> = r.iter().zip(&d).map(|(r, d)| r * d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        for _ in 0..self.cg_max_iter {
            if super::norm(&r) <= self.cg_tol * bnorm {
                return Ok(x);
            }
            let ap = a.matvec(&p);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                return Err(Error::LinearSolve("CG met a non-positive curvature direction".into()));
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            for i in 0..n {
                z[i] = r[i] * d[i];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::LinearSolve(format!("CG did not converge in {} iterations", self.cg_max_iter)))
    }
}

fn check_finite(x: Vec<f64>) -> Result<Vec<f64>> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::LinearSolve("solution contains non-finite values".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CscMatrix {
        let mut entries = Vec::new();
        for i in 0..n - 1 {
            entries.push((i, i + 1));
            entries.push((i + 1, i));
        }
        let mut a = CscMatrix::zeros(Pattern::from_triplets(n, &entries));
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn direct_and_cg_agree() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let mut s = LinearSolver::new(SolverKind::Direct);
        let x1 = s.solve_spd(&a, &b).unwrap();
        let x2 = LinearSolver::new(SolverKind::Cg).solve_spd(&a, &b).unwrap();
        let x3 = s.solve_general(&a, &b).unwrap();
        let r = a.matvec(&x1);
        for i in 0..50 {
            assert!((r[i] - b[i]).abs() < 1e-10);
            assert!((x1[i] - x2[i]).abs() < 1e-8);
            assert!((x1[i] - x3[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn nonsymmetric_lu() {
        let p = Pattern::from_triplets(2, &[(0, 1), (1, 0)]);
        let mut a = CscMatrix::zeros(p);
        a.add(0, 0, 2.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, -3.0);
        a.add(1, 1, 4.0);
        let x = LinearSolver::default().solve_general(&a, &[5.0, 5.0]).unwrap();
        assert!((x[0] - 15.0 / 11.0).abs() < 1e-14 && (x[1] - 25.0 / 11.0).abs() < 1e-14);
    }
}
