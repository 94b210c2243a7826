use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{Error, Result};

/// Coordinate-format matrix; duplicate entries are summed.
#[derive(Clone, Debug, Default)]
pub struct Coo {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Coo {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        if v != 0.0 {
            self.entries.push((i, j, v));
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n_cols]; self.n_rows];
        for &(i, j, v) in &self.entries {
            a[i][j] += v;
        }
        a
    }

    /// Solves `A x = b` by sparse LU after row and column equilibration.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_rows;
        if n != self.n_cols || b.len() != n {
            return Err(Error::SingularSystem(format!(
                "shape mismatch {}x{} with rhs {}",
                self.n_rows,
                self.n_cols,
                b.len()
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut r = vec![0.0f64; n];
        for &(i, _, v) in &self.entries {
            r[i] = r[i].max(v.abs());
        }
        if let Some(i) = r.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::SingularSystem(format!("row {i} is empty or non-finite")));
        }
        let mut c = vec![0.0f64; n];
        for &(i, j, v) in &self.entries {
            c[j] = c[j].max(v.abs() / r[i]);
        }
        if let Some(j) = c.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::SingularSystem(format!("column {j} is empty")));
        }
        let trips: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .map(|&(i, j, v)| Triplet::new(i, j, v / (r[i] * c[j])))
            .collect();
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::SingularSystem(format!("assembly failed: {e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::SingularSystem(format!("factorization failed: {e:?}")))?;
        let rhs = Mat::from_fn(n, 1, |i, _| b[i] / r[i]);
        let y = faer::prelude::Solve::solve(&lu, &rhs);
        let x: Vec<f64> = (0..n).map(|j| y[(j, 0)] / c[j]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularSystem("non-finite solution".into()));
        }
        Ok(x)
    }
}
