//! Algebras over `F_q` in q-polynomial coefficient form:
//! `𝕊(x, y) = Σ_{i,j} c_{ij} x^{q^i} y^{q^j}`, the unique such presentation
//! of any `F_q`-bilinear product on `F_{q^n}`.
//!
//! Presemifields are accepted everywhere: every computed quantity is an
//! isotopy invariant and every presemifield is isotopic to a semifield, so no
//! unit-element normalization is performed on inputs.
//!
//! Convention: `transpose` replaces each right-multiplication map by its
//! adjoint under `(x, y) ↦ Tr(xy)`. Conventions differ across the
//! literature; this one makes `dual ∘ transpose ∘ dual` carry the closed
//! form implemented in [`SemifieldCoeffs::dtd`].

use crate::gf::FFElem;
use crate::linmap::LinMap;
use crate::matrix::MatrixQN;
use crate::search::theta_shift;
use crate::{check_same_ctx, Ctx, Error};

/// An algebra as its n×n coefficient matrix `C`, entry `C[i][j] = c_{ij}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemifieldCoeffs {
    ctx: Ctx,
    c: MatrixQN,
}

/// Sizes of the nuclei and centre of the isotopy class, with the derived
/// dimensions of the algebra over each nucleus.
///
/// Computed on the canonical unital isotope (the Kaplansky isotope at the
/// element of code 1), so the reported sizes are invariants of the class
/// even when the input is a presemifield without identity.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NucleiReport {
    pub left: u32,
    pub middle: u32,
    pub right: u32,
    pub centre: u32,
    /// Dimension of the algebra over its left nucleus.
    pub dim_left: u32,
    /// Dimension over the middle nucleus (`m` in the nuclei bound).
    pub dim_middle: u32,
    /// Dimension over the right nucleus (`r` in the nuclei bound).
    pub dim_right: u32,
}

impl NucleiReport {
    /// True when every nucleus is the whole field — equivalently, the
    /// algebra is isotopic to the finite field.
    pub fn all_full(&self, order: u32) -> bool {
        self.left == order && self.middle == order && self.right == order
    }
}

impl SemifieldCoeffs {
    pub fn from_matrix(ctx: &Ctx, c: MatrixQN) -> SemifieldCoeffs {
        let n = ctx.n() as usize;
        assert_eq!(c.rows(), n);
        assert_eq!(c.cols(), n);
        check_same_ctx(ctx, c.ctx());
        SemifieldCoeffs { ctx: ctx.clone(), c }
    }

    pub fn from_rows(ctx: &Ctx, rows: &[Vec<FFElem>]) -> SemifieldCoeffs {
        let n = ctx.n() as usize;
        assert_eq!(rows.len(), n);
        let m = MatrixQN::from_fn(ctx, n, n, |i, j| rows[i][j]);
        SemifieldCoeffs::from_matrix(ctx, m)
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    /// The coefficient matrix `M(𝕊)`.
    pub fn matrix(&self) -> &MatrixQN {
        &self.c
    }

    fn n(&self) -> usize {
        self.ctx.n() as usize
    }

    /// `x̲ = (x, x^q, …, x^{q^{n−1}})`.
    pub fn power_row(&self, x: FFElem) -> Vec<FFElem> {
        let c = &*self.ctx;
        let mut out = Vec::with_capacity(self.n());
        let mut xp = x;
        for _ in 0..self.n() {
            out.push(xp);
            xp = c.frob(xp);
        }
        out
    }

    /// `𝕊(x, y) = Σ c_{ij} x^{q^i} y^{q^j}`.
    pub fn multiply(&self, x: FFElem, y: FFElem) -> FFElem {
        let c = &*self.ctx;
        let n = self.n();
        let xs = self.power_row(x);
        let ys = self.power_row(y);
        let mut acc = FFElem::ZERO;
        for i in 0..n {
            if xs[i].is_zero() {
                continue;
            }
            let mut inner = FFElem::ZERO;
            for j in 0..n {
                inner = c.add(inner, c.mul(self.c[(i, j)], ys[j]));
            }
            acc = c.add(acc, c.mul(xs[i], inner));
        }
        acc
    }

    /// `R_y : x ↦ 𝕊(x, y)`; coefficient `i` is `Σ_j c_{ij} y^{q^j}`.
    pub fn right_mult_map(&self, y: FFElem) -> LinMap {
        let c = &*self.ctx;
        let n = self.n();
        let ys = self.power_row(y);
        let coeffs = (0..n)
            .map(|i| {
                let mut acc = FFElem::ZERO;
                for j in 0..n {
                    acc = c.add(acc, c.mul(self.c[(i, j)], ys[j]));
                }
                acc
            })
            .collect();
        LinMap::new(&self.ctx, coeffs)
    }

    /// `L_y : x ↦ 𝕊(y, x)`; coefficient `j` is `Σ_i c_{ij} y^{q^i}`.
    pub fn left_mult_map(&self, y: FFElem) -> LinMap {
        let c = &*self.ctx;
        let n = self.n();
        let ys = self.power_row(y);
        let coeffs = (0..n)
            .map(|j| {
                let mut acc = FFElem::ZERO;
                for i in 0..n {
                    acc = c.add(acc, c.mul(self.c[(i, j)], ys[i]));
                }
                acc
            })
            .collect();
        LinMap::new(&self.ctx, coeffs)
    }

    /// First zero divisor `(x, y)` with `x, y ≠ 0` in code order of `y`,
    /// or `None` when the algebra is a presemifield.
    pub fn zero_divisor(&self) -> Option<(FFElem, FFElem)> {
        let n = self.n();
        for y in self.ctx.elems().skip(1) {
            let ry = self.right_mult_map(y);
            if ry.dickson_matrix().rank() < n {
                let x = self
                    .ctx
                    .elems()
                    .skip(1)
                    .find(|&x| ry.evaluate(x).is_zero())
                    .expect("singular right multiplication must have a kernel");
                return Some((x, y));
            }
        }
        None
    }

    /// True when the multiplication has no nontrivial zeros (presemifield
    /// test; no identity element is required).
    pub fn is_semifield(&self) -> bool {
        self.zero_divisor().is_none()
    }

    pub fn ensure_semifield(&self) -> Result<(), Error> {
        match self.zero_divisor() {
            None => Ok(()),
            Some((x, y)) => Err(Error::NotASemifield {
                x: x.code(),
                y: y.code(),
            }),
        }
    }

    /// The dual algebra `𝕊^d(x, y) = 𝕊(y, x)`: transposed coefficients.
    pub fn dual(&self) -> SemifieldCoeffs {
        SemifieldCoeffs {
            ctx: self.ctx.clone(),
            c: self.c.transpose(),
        }
    }

    /// The transpose algebra: right multiplication by `y` becomes the adjoint
    /// of `R_y`. Interpolated from the adjoint maps on a basis of `y` values.
    pub fn transpose(&self) -> SemifieldCoeffs {
        let n = self.n();
        let basis = self.ctx.basis().to_vec();
        // B[t][j] = b_t^{q^j}; C'·Bᵀ = W with column t the adjoint coefficients.
        let moore = MatrixQN::from_fn(&self.ctx, n, n, |t, j| {
            self.ctx.frobenius(basis[t], j as u32)
        });
        let mut w = MatrixQN::zeros(&self.ctx, n, n);
        for (t, &b) in basis.iter().enumerate() {
            let adj = self.right_mult_map(b).adjoint();
            for i in 0..n {
                w[(i, t)] = adj.coeffs()[i];
            }
        }
        let ct = moore
            .solve_matrix(&w.transpose())
            .expect("basis Moore matrix is invertible");
        SemifieldCoeffs {
            ctx: self.ctx.clone(),
            c: ct.transpose(),
        }
    }

    /// Dual–transpose–dual by the closed form
    /// `C'[a][b] = C[(a−b) mod n][(n−b) mod n]^{q^b}`.
    ///
    /// Must agree with `dual().transpose().dual()`; the composed path is the
    /// oracle in the test suite.
    pub fn dtd(&self) -> SemifieldCoeffs {
        let n = self.n();
        let c = &*self.ctx;
        let m = MatrixQN::from_fn(&self.ctx, n, n, |a, b| {
            let src = self.c[((a + n - b) % n, (n - b) % n)];
            c.frobenius(src, b as u32)
        });
        SemifieldCoeffs {
            ctx: self.ctx.clone(),
            c: m,
        }
    }

    /// The isotope `𝕊'(x, y) = H(𝕊(F(x), G(y)))`.
    ///
    /// Coefficients via `C' = Σ_k h_k · θ_k(A_Fᵀ · C · A_G)`.
    pub fn apply_isotopy(
        &self,
        f: &LinMap,
        g: &LinMap,
        h: &LinMap,
    ) -> Result<SemifieldCoeffs, Error> {
        if !f.is_invertible() || !g.is_invertible() || !h.is_invertible() {
            return Err(Error::SingularMap);
        }
        Ok(self.apply_isotopy_unchecked(f, g, h))
    }

    /// Same transform without the invertibility gate; used by the θ-transform
    /// oracle where singular `H` is legitimate input.
    pub fn apply_isotopy_unchecked(&self, f: &LinMap, g: &LinMap, h: &LinMap) -> SemifieldCoeffs {
        let c = &*self.ctx;
        let n = self.n();
        let m1 = f
            .dickson_matrix()
            .transpose()
            .mul(&self.c)
            .mul(&g.dickson_matrix());
        let mut out = MatrixQN::zeros(&self.ctx, n, n);
        for (k, &hk) in h.coeffs().iter().enumerate() {
            if hk.is_zero() {
                continue;
            }
            let shifted = theta_shift(&m1, k as u32);
            for i in 0..n {
                for j in 0..n {
                    let t = c.mul(hk, shifted[(i, j)]);
                    out[(i, j)] = c.add(out[(i, j)], t);
                }
            }
        }
        SemifieldCoeffs {
            ctx: self.ctx.clone(),
            c: out,
        }
    }

    /// The canonical unital isotope: with `u` the element of code 1,
    /// `x * y = 𝕊(R_u^{-1}(x), L_u^{-1}(y))`, which has identity `𝕊(u, u)`.
    pub(crate) fn unital_isotope(&self) -> Result<SemifieldCoeffs, Error> {
        let u = self.ctx.one();
        let r_inv = self.right_mult_map(u).inverse()?;
        let l_inv = self.left_mult_map(u).inverse()?;
        let id = LinMap::identity(&self.ctx);
        Ok(self.apply_isotopy_unchecked(&r_inv, &l_inv, &id))
    }

    /// Nuclei and centre sizes of the isotopy class.
    ///
    /// Membership is tested on all basis pairs, which suffices: for fixed
    /// candidate the associator is bilinear in the remaining two slots.
    pub fn nuclei(&self) -> Result<NucleiReport, Error> {
        self.ensure_semifield()?;
        let s = self.unital_isotope()?;
        let c = &*self.ctx;
        let n = self.n();
        let basis = c.basis().to_vec();
        let mut prod = vec![vec![FFElem::ZERO; n]; n];
        for i in 0..n {
            for j in 0..n {
                prod[i][j] = s.multiply(basis[i], basis[j]);
            }
        }
        let (mut nl, mut nm, mut nr, mut nz) = (0u32, 0u32, 0u32, 0u32);
        for a in c.elems() {
            let mut in_l = true;
            let mut in_m = true;
            let mut in_r = true;
            'pairs: for i in 0..n {
                let abi = s.multiply(a, basis[i]);
                let bia = s.multiply(basis[i], a);
                for j in 0..n {
                    if in_l && s.multiply(abi, basis[j]) != s.multiply(a, prod[i][j]) {
                        in_l = false;
                    }
                    if in_m && s.multiply(bia, basis[j]) != s.multiply(basis[i], s.multiply(a, basis[j])) {
                        in_m = false;
                    }
                    if in_r && s.multiply(prod[i][j], a) != s.multiply(basis[i], s.multiply(basis[j], a)) {
                        in_r = false;
                    }
                    if !in_l && !in_m && !in_r {
                        break 'pairs;
                    }
                }
            }
            nl += in_l as u32;
            nm += in_m as u32;
            nr += in_r as u32;
            if in_l && in_m && in_r {
                let commutes = (0..n).all(|i| s.multiply(a, basis[i]) == s.multiply(basis[i], a));
                nz += commutes as u32;
            }
        }
        let d = c.ext_degree();
        let dim_over = |size: u32| -> u32 {
            let mut k = 0u32;
            let mut pw = 1u32;
            while pw < size {
                pw *= c.p();
                k += 1;
            }
            debug_assert_eq!(pw, size, "nucleus size must be a power of p");
            d.checked_div(k).unwrap_or(0)
        };
        Ok(NucleiReport {
            left: nl,
            middle: nm,
            right: nr,
            centre: nz,
            dim_left: dim_over(nl),
            dim_middle: dim_over(nm),
            dim_right: dim_over(nr),
        })
    }

    /// The unique coefficient matrix of an `F_q`-bilinear product given as a
    /// black box, by Moore-system interpolation on basis pairs.
    pub fn from_bilinear(
        ctx: &Ctx,
        mut f: impl FnMut(FFElem, FFElem) -> FFElem,
    ) -> Result<SemifieldCoeffs, Error> {
        let n = ctx.n() as usize;
        let basis = ctx.basis().to_vec();
        let moore = MatrixQN::from_fn(ctx, n, n, |i, j| ctx.frobenius(basis[i], j as u32));
        // Stage 1: right-multiplication coefficients for each basis y.
        let vals = MatrixQN::from_fn(ctx, n, n, |i, t| f(basis[i], basis[t]));
        let w = moore.solve_matrix(&vals).map_err(|_| Error::NotABasis)?;
        // Stage 2: C·Bᵀ = W  ⇔  B·Cᵀ = Wᵀ.
        let ct = moore
            .solve_matrix(&w.transpose())
            .map_err(|_| Error::NotABasis)?;
        Ok(SemifieldCoeffs {
            ctx: ctx.clone(),
            c: ct.transpose(),
        })
    }

    /// Ingests a full multiplication table (entry `[x][y] = 𝕊(x, y)` with
    /// indices equal to element codes). Verifies exact `F_q`-bilinearity:
    /// structured additivity/homogeneity checks first for early diagnostics,
    /// then the authoritative full round-trip against the interpolated
    /// coefficients.
    pub fn from_table(ctx: &Ctx, table: &[Vec<FFElem>]) -> Result<SemifieldCoeffs, Error> {
        let order = ctx.order() as usize;
        if table.len() != order || table.iter().any(|r| r.len() != order) {
            return Err(Error::SizeMismatch(format!(
                "expected {order}×{order} entries"
            )));
        }
        let c = &**ctx;
        let basis = ctx.basis().to_vec();
        let idx = |a: FFElem| a.code() as usize;

        // Additivity in each slot against basis values in the other;
        // exhaustive over element pairs at desk scale, sampled above it.
        let additive = |x1: FFElem, x2: FFElem, y: FFElem| -> Result<(), Error> {
            let lhs = table[idx(c.add(x1, x2))][idx(y)];
            let rhs = c.add(table[idx(x1)][idx(y)], table[idx(x2)][idx(y)]);
            if lhs != rhs {
                return Err(Error::NotBilinear(format!(
                    "additivity fails at ({}, {}; y={})",
                    x1, x2, y
                )));
            }
            let lhs = table[idx(y)][idx(c.add(x1, x2))];
            let rhs = c.add(table[idx(y)][idx(x1)], table[idx(y)][idx(x2)]);
            if lhs != rhs {
                return Err(Error::NotBilinear(format!(
                    "additivity fails at (y={}; {}, {})",
                    y, x1, x2
                )));
            }
            Ok(())
        };
        if order <= 256 {
            for x1 in ctx.elems() {
                for x2 in ctx.elems() {
                    for &b in &basis {
                        additive(x1, x2, b)?;
                    }
                }
            }
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ab1e);
            for _ in 0..10_000 {
                let x1 = FFElem(rng.random_range(0..ctx.order()));
                let x2 = FFElem(rng.random_range(0..ctx.order()));
                let y = FFElem(rng.random_range(0..ctx.order()));
                additive(x1, x2, y)?;
            }
        }
        for &s in ctx.subfield_elems() {
            for &bx in &basis {
                for &by in &basis {
                    let o = table[idx(bx)][idx(by)];
                    if table[idx(c.mul(s, bx))][idx(by)] != c.mul(s, o)
                        || table[idx(bx)][idx(c.mul(s, by))] != c.mul(s, o)
                    {
                        return Err(Error::NotBilinear(format!(
                            "F_q-homogeneity fails at basis pair ({bx}, {by}), scalar {s}"
                        )));
                    }
                }
            }
        }

        let s = SemifieldCoeffs::from_bilinear(ctx, |x, y| table[idx(x)][idx(y)])?;
        for x in ctx.elems() {
            for y in ctx.elems() {
                if s.multiply(x, y) != table[idx(x)][idx(y)] {
                    return Err(Error::NotBilinear(format!(
                        "round-trip mismatch at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(s)
    }

    /// The full multiplication table, indexed by element codes.
    pub fn to_table(&self) -> Vec<Vec<FFElem>> {
        self.ctx
            .elems()
            .map(|x| self.ctx.elems().map(|y| self.multiply(x, y)).collect())
            .collect()
    }

    /// Re-expresses the same multiplication over the subfield `F_{q'}` with
    /// `q = q'^t`, i.e. on the context `(p, e/t, n·t)`. Element codes are
    /// unchanged (the modulus depends only on `p` and `e·n`).
    pub fn rebase(&self, t: u32) -> Result<SemifieldCoeffs, Error> {
        let ctx = &self.ctx;
        if t == 0 || !ctx.e().is_multiple_of(t) {
            return Err(Error::NotASubfield(t, ctx.q()));
        }
        if t == 1 {
            return Ok(self.clone());
        }
        let fine: Ctx = std::sync::Arc::new(crate::gf::FieldCtx::new(
            ctx.p(),
            ctx.e() / t,
            ctx.n() * t,
        )?);
        debug_assert_eq!(fine.modulus(), ctx.modulus());
        SemifieldCoeffs::from_bilinear(&fine, |x, y| {
            FFElem(self.multiply(FFElem(x.code()), FFElem(y.code())).code())
        })
    }
}
