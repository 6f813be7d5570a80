//! Compressed-column sparse matrices with a pattern fixed by mesh
//! connectivity.

use std::sync::Arc;

use crate::mesh::Mesh2D;
use crate::{Error, Result};

/// Sorted CSC pattern. Built over all elements, active or not, so that
/// activation never changes it.
#[derive(Debug, PartialEq)]
pub struct Pattern {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
}

impl Pattern {
    pub fn from_mesh(mesh: &Mesh2D, nd: usize) -> Arc<Self> {
        let nn = mesh.node_count();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nn];
        for el in &mesh.elements {
            for &a in el.nodes() {
                adj[a].extend_from_slice(el.nodes());
            }
        }
        for (a, v) in adj.iter_mut().enumerate() {
            v.push(a);
            v.sort_unstable();
            v.dedup();
        }
        let n = nn * nd;
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for a in 0..nn {
            for _ca in 0..nd {
                for &b in &adj[a] {
                    for cb in 0..nd {
                        row_idx.push(b * nd + cb);
                    }
                }
                col_ptr.push(row_idx.len());
            }
        }
        Arc::new(Self { n, col_ptr, row_idx })
    }

    /// Pattern from explicit (row, col) entries plus the full diagonal.
    pub fn from_triplets(n: usize, entries: &[(usize, usize)]) -> Arc<Self> {
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(i, j) in entries {
            cols[j].push(i);
        }
        for (j, c) in cols.iter_mut().enumerate() {
            c.push(j);
            c.sort_unstable();
            c.dedup();
        }
        let mut col_ptr = vec![0];
        let mut row_idx = Vec::new();
        for c in cols {
            row_idx.extend(c);
            col_ptr.push(row_idx.len());
        }
        Arc::new(Self { n, col_ptr, row_idx })
    }

    pub fn nnz(&self) -> usize {
        self.row_idx.len()
    }

    /// Storage index of entry (i, j). Panics if outside the pattern.
    #[inline]
    pub fn find(&self, i: usize, j: usize) -> usize {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        match self.row_idx[s..e].binary_search(&i) {
            Ok(k) => s + k,
            Err(_) => panic!("entry ({i}, {j}) outside sparsity pattern"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CscMatrix {
    pub pattern: Arc<Pattern>,
    pub values: Vec<f64>,
}

impl CscMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = 0.0);
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.pattern.find(i, j);
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (s, e) = (self.pattern.col_ptr[j], self.pattern.col_ptr[j + 1]);
        match self.pattern.row_idx[s..e].binary_search(&i) {
            Ok(k) => self.values[s + k],
            Err(_) => 0.0,
        }
    }

    /// Scatters a dense row-major block `ke` (dofs.len() squared) from
    /// element `e`. Non-finite entries abort with the element id.
    pub fn add_block(&mut self, e: usize, dofs: &[usize], ke: &[f64]) -> Result<()> {
        let m = dofs.len();
        debug_assert_eq!(ke.len(), m * m);
        if ke.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(e));
        }
        for (c, &j) in dofs.iter().enumerate() {
            let (s, end) = (self.pattern.col_ptr[j], self.pattern.col_ptr[j + 1]);
            let rows = &self.pattern.row_idx[s..end];
            for (r, &i) in dofs.iter().enumerate() {
                let k = rows.binary_search(&i).expect("element entry in pattern");
                self.values[s + k] += ke[r * m + c];
            }
        }
        Ok(())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        for j in 0..self.n() {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for k in self.pattern.col_ptr[j]..self.pattern.col_ptr[j + 1] {
                y[self.pattern.row_idx[k]] += self.values[k] * xj;
            }
        }
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.get(i, i)).collect()
    }

    /// Sum of each row.
    pub fn row_sums(&self) -> Vec<f64> {
        self.matvec(&vec![1.0; self.n()])
    }
}

/// Imposes x_j = g_j by symmetric elimination: known columns move to the
/// right-hand side, rows and columns of fixed DOFs are zeroed, the diagonal
/// set to one and the rhs to g_j. Valid for non-symmetric matrices too.
pub fn apply_dirichlet(mat: &mut CscMatrix, rhs: &mut [f64], fixed: &[(usize, f64)]) {
    let n = mat.n();
    let mut is_fixed = vec![false; n];
    let mut value = vec![0.0; n];
    for &(j, g) in fixed {
        is_fixed[j] = true;
        value[j] = g;
    }
    let p = mat.pattern.clone();
    for j in 0..n {
        for k in p.col_ptr[j]..p.col_ptr[j + 1] {
            let i = p.row_idx[k];
            if is_fixed[j] && !is_fixed[i] {
                rhs[i] -= mat.values[k] * value[j];
            }
            if is_fixed[i] || is_fixed[j] {
                mat.values[k] = if i == j { 1.0 } else { 0.0 };
            }
        }
    }
    for j in 0..n {
        if is_fixed[j] {
            rhs[j] = value[j];
        }
    }
}

/// DOFs not touched by any active element: identity rows with rhs = value.
pub fn pin_inactive(mat: &mut CscMatrix, rhs: &mut [f64], inactive: &[bool], values: &[f64]) {
    let fixed: Vec<(usize, f64)> = inactive
        .iter()
        .enumerate()
        .filter(|(_, &f)| f)
        .map(|(i, _)| (i, values[i]))
        .collect();
    apply_dirichlet(mat, rhs, &fixed);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::grid;

    #[test]
    fn pattern_is_symmetric_and_sorted() {
        let m = grid::rectangle(0.0, 2.0, 0.0, 1.0, 2, 1);
        let p = Pattern::from_mesh(&m, 2);
        assert_eq!(p.n, 12);
        for j in 0..p.n {
            let rows = &p.row_idx[p.col_ptr[j]..p.col_ptr[j + 1]];
            assert!(rows.windows(2).all(|w| w[0] < w[1]));
            for &i in rows {
                let back = &p.row_idx[p.col_ptr[i]..p.col_ptr[i + 1]];
                assert!(back.binary_search(&j).is_ok());
            }
        }
    }

    #[test]
    fn dirichlet_elimination_solves_known_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [0, 0, 0] with x0 = 1, x2 = 3 -> x1 = 2
        let p = Pattern::from_triplets(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]);
        let mut a = CscMatrix::zeros(p);
        for (i, j, v) in [(0, 0, 2.0), (1, 1, 2.0), (2, 2, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 2, -1.0), (2, 1, -1.0)] {
            a.add(i, j, v);
        }
        let mut b = vec![0.0; 3];
        apply_dirichlet(&mut a, &mut b, &[(0, 1.0), (2, 3.0)]);
        assert_eq!(b, vec![1.0, 4.0, 3.0]);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.get(0, 0), 1.0);
    }

    #[test]
    fn non_finite_block_reports_element() {
        let m = grid::rectangle(0.0, 1.0, 0.0, 1.0, 1, 1);
        let mut a = CscMatrix::zeros(Pattern::from_mesh(&m, 1));
        let mut ke = vec![0.0; 16];
        ke[5] = f64::NAN;
        assert!(matches!(a.add_block(7, &[0, 1, 2, 3], &ke), Err(Error::NonFinite(7))));
    }
}
