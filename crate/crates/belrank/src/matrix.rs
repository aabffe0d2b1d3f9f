//! Exact dense linear algebra over `F_{q^n}`: rank, solve, kernel bases and
//! rank factorizations. Matrices here are tiny (at most a few dozen rows), so
//! plain Gaussian elimination with eager pivot normalization is used
//! throughout.

use crate::gf::{FFElem, FieldCtx};
use crate::{check_same_ctx, Ctx, Error};

/// A rows × cols matrix over `F_{q^n}`, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixQN {
    ctx: Ctx,
    rows: usize,
    cols: usize,
    data: Vec<FFElem>,
}

impl MatrixQN {
    pub fn new(ctx: &Ctx, rows: usize, cols: usize, data: Vec<FFElem>) -> MatrixQN {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(rows * cols, data.len());
        MatrixQN {
            ctx: ctx.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn zeros(ctx: &Ctx, rows: usize, cols: usize) -> MatrixQN {
        MatrixQN::new(ctx, rows, cols, vec![FFElem::ZERO; rows * cols])
    }

    pub fn identity(ctx: &Ctx, n: usize) -> MatrixQN {
        let mut m = MatrixQN::zeros(ctx, n, n);
        for i in 0..n {
            m[(i, i)] = FFElem::ONE;
        }
        m
    }

    pub fn from_fn(ctx: &Ctx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FFElem) -> MatrixQN {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        MatrixQN::new(ctx, rows, cols, data)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[FFElem] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[FFElem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatrixQN {
        MatrixQN::from_fn(&self.ctx, self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &MatrixQN) -> MatrixQN {
        check_same_ctx(&self.ctx, &other.ctx);
        assert_eq!(self.cols, other.rows);
        let c = &*self.ctx;
        MatrixQN::from_fn(&self.ctx, self.rows, other.cols, |i, j| {
            let mut acc = FFElem::ZERO;
            for k in 0..self.cols {
                acc = c.add(acc, c.mul(self[(i, k)], other[(k, j)]));
            }
            acc
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Row-echelon rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        echelon_rank(&self.ctx, &mut work, self.rows, self.cols)
    }

    /// Rank factorization `A = Σ uᵢᵀ vᵢ` with exactly `rank(A)` terms, by
    /// repeated rank-one peeling at the first nonzero entry.
    pub fn rank_factor(&self) -> (Vec<Vec<FFElem>>, Vec<Vec<FFElem>>) {
        let c = &*self.ctx;
        let mut res = self.data.clone();
        let mut us = Vec::new();
        let mut vs = Vec::new();
        while let Some(pos) = res.iter().position(|x| !x.is_zero()) {
            let (pi, pj) = (pos / self.cols, pos % self.cols);
            let pinv = c.inv(res[pi * self.cols + pj]);
            let u: Vec<FFElem> = (0..self.rows).map(|i| res[i * self.cols + pj]).collect();
            let v: Vec<FFElem> = (0..self.cols)
                .map(|j| c.mul(pinv, res[pi * self.cols + j]))
                .collect();
            for i in 0..self.rows {
                for j in 0..self.cols {
                    let sub = c.mul(u[i], v[j]);
                    res[i * self.cols + j] = c.sub(res[i * self.cols + j], sub);
                }
            }
            us.push(u);
            vs.push(v);
        }
        (us, vs)
    }

    /// Solves `A x = b`, returning one solution (free variables zero).
    pub fn solve(&self, b: &[FFElem]) -> Result<Vec<FFElem>, Error> {
        assert_eq!(b.len(), self.rows);
        let rhs = MatrixQN::from_fn(&self.ctx, self.rows, 1, |i, _| b[i]);
        let x = self.solve_matrix(&rhs)?;
        Ok((0..self.cols).map(|i| x[(i, 0)]).collect())
    }

    /// Solves `A X = B` column-wise with a single elimination pass.
    pub fn solve_matrix(&self, b: &MatrixQN) -> Result<MatrixQN, Error> {
        check_same_ctx(&self.ctx, &b.ctx);
        assert_eq!(b.rows, self.rows);
        let c = &*self.ctx;
        let (rows, cols, bc) = (self.rows, self.cols, b.cols);
        let width = cols + bc;
        let mut aug = vec![FFElem::ZERO; rows * width];
        for i in 0..rows {
            aug[i * width..i * width + cols].copy_from_slice(self.row(i));
            aug[i * width + cols..(i + 1) * width].copy_from_slice(b.row(i));
        }
        let mut pivot_col_of_row = Vec::new();
        let mut r = 0usize;
        for col in 0..cols {
            let Some(pr) = (r..rows).find(|&i| !aug[i * width + col].is_zero()) else {
                continue;
            };
            for j in 0..width {
                aug.swap(pr * width + j, r * width + j);
            }
            let pinv = c.inv(aug[r * width + col]);
            for j in col..width {
                aug[r * width + j] = c.mul(pinv, aug[r * width + j]);
            }
            for i in 0..rows {
                if i == r || aug[i * width + col].is_zero() {
                    continue;
                }
                let f = aug[i * width + col];
                for j in col..width {
                    let sub = c.mul(f, aug[r * width + j]);
                    aug[i * width + j] = c.sub(aug[i * width + j], sub);
                }
            }
            pivot_col_of_row.push(col);
            r += 1;
            if r == rows {
                break;
            }
        }
        // Inconsistent rows: zero coefficients with a nonzero right-hand side.
        for i in r..rows {
            if aug[i * width + cols..(i + 1) * width].iter().any(|x| !x.is_zero()) {
                return Err(Error::NoSolution {
                    rank: r,
                    augmented: r + 1,
                });
            }
        }
        let mut x = MatrixQN::zeros(&self.ctx, cols, bc);
        for (row, &col) in pivot_col_of_row.iter().enumerate() {
            for j in 0..bc {
                x[(col, j)] = aug[row * width + cols + j];
            }
        }
        Ok(x)
    }

    /// A basis of `{x : A x = 0}`, deterministic (free columns in order).
    pub fn kernel_basis(&self) -> Vec<Vec<FFElem>> {
        let c = &*self.ctx;
        let (rows, cols) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut r = 0usize;
        for col in 0..cols {
            let Some(pr) = (r..rows).find(|&i| !a[i * cols + col].is_zero()) else {
                continue;
            };
            for j in 0..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
            let pinv = c.inv(a[r * cols + col]);
            for j in col..cols {
                a[r * cols + j] = c.mul(pinv, a[r * cols + j]);
            }
            for i in 0..rows {
                if i == r || a[i * cols + col].is_zero() {
                    continue;
                }
                let f = a[i * cols + col];
                for j in col..cols {
                    let sub = c.mul(f, a[r * cols + j]);
                    a[i * cols + j] = c.sub(a[i * cols + j], sub);
                }
            }
            pivots.push((r, col));
            r += 1;
            if r == rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !pivot_cols.contains(c)) {
            let mut v = vec![FFElem::ZERO; cols];
            v[free] = FFElem::ONE;
            for &(row, col) in &pivots {
                v[col] = c.neg(a[row * cols + free]);
            }
            basis.push(v);
        }
        basis
    }
}

impl std::ops::Index<(usize, usize)> for MatrixQN {
    type Output = FFElem;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FFElem {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatrixQN {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FFElem {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// In-place row-echelon rank; the workhorse shared with the search kernel.
pub(crate) fn echelon_rank(ctx: &FieldCtx, a: &mut [FFElem], rows: usize, cols: usize) -> usize {
    let mut r = 0usize;
    for col in 0..cols {
        let mut pr = r;
        while pr < rows && a[pr * cols + col].is_zero() {
            pr += 1;
        }
        if pr == rows {
            continue;
        }
        if pr != r {
            for j in col..cols {
                a.swap(pr * cols + j, r * cols + j);
            }
        }
        let pinv = ctx.inv(a[r * cols + col]);
        for j in col..cols {
            a[r * cols + j] = ctx.mul(pinv, a[r * cols + j]);
        }
        for i in (r + 1)..rows {
            let f = a[i * cols + col];
            if f.is_zero() {
                continue;
            }
            for j in col..cols {
                let sub = ctx.mul(f, a[r * cols + j]);
                a[i * cols + j] = ctx.sub(a[i * cols + j], sub);
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}
