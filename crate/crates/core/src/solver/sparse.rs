use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::lu::{factorize_symbolic_lu, LuRef, LuSymbolicParams, NumericLu, SymbolicLu};
use faer::sparse::linalg::SupernodalThreshold;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Conj, Mat, Par};

use crate::error::SolverError;

/// Coordinate-format accumulator; duplicates are summed on compression.
#[derive(Debug, Clone, Default)]
pub struct TripletMatrix {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn to_csc(&self) -> CscMatrix {
        CscMatrix::from_triplets(self.n, &self.entries)
    }
}

/// Square compressed sparse column matrix. Explicit zeros are kept so the
/// pattern depends only on which entries were pushed.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    n: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CscMatrix {
    pub fn from_triplets(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..entries.len()).collect();
        // the index tie-break keeps the summation order of duplicates deterministic
        order.sort_unstable_by_key(|&e| (entries[e].1, entries[e].0, e));
        let mut col_ptr = vec![0usize; n + 1];
        let mut row_idx = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &e in &order {
            let (i, j, v) = entries[e];
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(i);
                values.push(v);
                col_ptr[j + 1] += 1;
                last = Some((i, j));
            }
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        Self {
            n,
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn identity(n: usize) -> Self {
        let e: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, &e)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut e = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    e.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n, &e)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates `(row, col, value)` column by column.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.col_ptr[j]..self.col_ptr[j + 1]).map(move |p| (self.row_idx[p], j, self.values[p]))
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.row_idx[self.col_ptr[j]..self.col_ptr[j + 1]];
        match r.binary_search(&i) {
            Ok(p) => self.values[self.col_ptr[j] + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, j, v) in self.iter() {
            y[i] += v * x[j];
        }
        y
    }

    /// `‖A‖∞` (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let mut s = vec![0.0; self.n];
        for (i, _, v) in self.iter() {
            s[i] += v.abs();
        }
        s.into_iter().fold(0.0, f64::max)
    }

    pub fn row_max_abs(&self) -> Vec<f64> {
        let mut s = vec![0.0_f64; self.n];
        for (i, _, v) in self.iter() {
            s[i] = s[i].max(v.abs());
        }
        s
    }

    fn scale_rows(&mut self, d: &[f64]) {
        for (p, &i) in self.row_idx.iter().enumerate() {
            self.values[p] *= d[i];
        }
    }

    pub fn same_pattern(&self, other: &Self) -> bool {
        self.n == other.n && self.col_ptr == other.col_ptr && self.row_idx == other.row_idx
    }

    fn faer_ref(&self) -> SparseColMatRef<'_, usize, f64> {
        let sym = SymbolicSparseColMatRef::new_checked(self.n, self.n, &self.col_ptr, None, &self.row_idx);
        SparseColMatRef::new(sym, &self.values)
    }
}

/// Sparse direct solver (faer LU) with row equilibration and one step of
/// iterative refinement. The symbolic factorization is cached and reused
/// while the sparsity pattern stays the same.
#[derive(Default)]
pub struct LinearSolver {
    cached: Option<Cached>,
}

struct Cached {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    symbolic: SymbolicLu<usize>,
    numeric: NumericLu<usize, f64>,
    buffer: MemBuffer,
}

impl std::fmt::Debug for LinearSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSolver")
            .field("cached", &self.cached.is_some())
            .finish()
    }
}

impl LinearSolver {
    pub fn new() -> Self {
        Self::default()
    }

    fn prepare(&mut self, s: &CscMatrix) -> Result<&mut Cached, SolverError> {
        let reuse = matches!(&self.cached, Some(c) if c.col_ptr == s.col_ptr && c.row_idx == s.row_idx);
        if !reuse {
            let params = LuSymbolicParams {
                supernodal_flop_ratio_threshold: SupernodalThreshold::FORCE_SUPERNODAL,
                ..Default::default()
            };
            let symbolic = factorize_symbolic_lu(s.faer_ref().symbolic(), params)
                .map_err(|e| SolverError::LinearSolveFailure(format!("{e:?}")))?;
            let req = symbolic
                .factorize_numeric_lu_scratch::<f64>(Par::Seq, Default::default())
                .or(symbolic.solve_in_place_scratch::<f64>(1, Par::Seq));
            self.cached = Some(Cached {
                col_ptr: s.col_ptr.clone(),
                row_idx: s.row_idx.clone(),
                symbolic,
                numeric: NumericLu::new(),
                buffer: MemBuffer::new(req),
            });
        }
        Ok(self.cached.as_mut().unwrap())
    }

    pub fn solve(&mut self, a: &CscMatrix, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let n = a.dim();
        if b.len() != n {
            return Err(SolverError::LinearSolveFailure(format!(
                "right-hand side has length {} for a {n}×{n} system",
                b.len()
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        if !a.values.iter().all(|v| v.is_finite()) || !b.iter().all(|v| v.is_finite()) {
            return Err(SolverError::LinearSolveFailure("non-finite entries".into()));
        }
        let rmax = a.row_max_abs();
        if let Some(i) = rmax.iter().position(|&r| r == 0.0) {
            return Err(SolverError::SingularMatrix(format!("row {i} is zero")));
        }
        let d: Vec<f64> = rmax.iter().map(|r| 1.0 / r).collect();
        let mut s = a.clone();
        s.scale_rows(&d);
        let sb: Vec<f64> = b.iter().zip(&d).map(|(b, d)| b * d).collect();

        let c = self.prepare(&s)?;
        let stack = MemStack::new(&mut c.buffer);
        c.symbolic
            .factorize_numeric_lu(&mut c.numeric, s.faer_ref(), Par::Seq, stack, Default::default())
            .map_err(|e| SolverError::SingularMatrix(format!("{e:?}")))?;
        let lu = LuRef::new_unchecked(&c.symbolic, &c.numeric);
        let mut solve = |rhs: &[f64]| -> Vec<f64> {
            let mut m = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
            lu.solve_in_place_with_conj(Conj::No, m.as_mut(), Par::Seq, MemStack::new(&mut c.buffer));
            (0..n).map(|i| m[(i, 0)]).collect()
        };
        let mut x = solve(&sb);
        let ax = s.mul_vec(&x);
        let r: Vec<f64> = sb.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let dx = solve(&r);
        for (x, d) in x.iter_mut().zip(&dx) {
            *x += d;
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SolverError::SingularMatrix("factorization produced non-finite values".into()));
        }
        Ok(x)
    }
}

/// One-shot solve of `A x = b`.
pub fn linear_solve(a: &CscMatrix, b: &[f64]) -> Result<Vec<f64>, SolverError> {
    LinearSolver::new().solve(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual_ok(a: &CscMatrix, x: &[f64], b: &[f64]) -> bool {
        let ax = a.mul_vec(x);
        let r = ax.iter().zip(b).map(|(y, b)| (y - b).abs()).fold(0.0, f64::max);
        let xn = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let bn = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        r <= 1e-12 * (a.norm_inf() * xn + bn)
    }

    #[test]
    fn identity_system() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(linear_solve(&CscMatrix::identity(3), &b).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        // 2x + y = 3, x + 3y = 5  ⇒  x = 4/5, y = 7/5
        let a = CscMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = linear_solve(&a, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }

    #[test]
    fn random_spd_residual_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..n).map(|k| m[i][k] * m[j][k]).sum::<f64>();
            }
            a[i][i] += 1.0;
        }
        let a = CscMatrix::from_dense(&a);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = linear_solve(&a, &b).unwrap();
        assert!(residual_ok(&a, &x, &b));
    }

    #[test]
    fn duplicates_summed_and_pattern_reused() {
        let mut t = TripletMatrix::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 1.0);
        t.push(1, 1, 4.0);
        t.push(1, 0, 0.0);
        let a = t.to_csc();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.get(0, 0), 2.0);
        let mut s = LinearSolver::new();
        let x1 = s.solve(&a, &[2.0, 4.0]).unwrap();
        let x2 = s.solve(&a, &[2.0, 4.0]).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(x1, vec![1.0, 1.0]);
    }

    #[test]
    fn singular_detected() {
        let a = CscMatrix::from_triplets(2, &[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 0.0), (1, 1, 0.0)]);
        assert!(linear_solve(&a, &[1.0, 1.0]).is_err());
        let z = CscMatrix::from_triplets(2, &[(0, 0, 1.0), (0, 1, 1.0)]);
        assert!(matches!(linear_solve(&z, &[1.0, 0.0]), Err(SolverError::SingularMatrix(_))));
    }
}
