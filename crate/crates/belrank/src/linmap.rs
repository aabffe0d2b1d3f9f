//! `F_q`-linear endomorphisms of `F_{q^n}` as linearized polynomials
//! `x ↦ Σ_j w_j x^{q^j}`, the canonical representation throughout this crate.
//!
//! The Dickson (autocirculant) matrix `A_w` satisfies `A_w·x̲ᵀ = (w(x))̲ᵀ`
//! where `x̲ = (x, x^q, …, x^{q^{n−1}})`; it is nonsingular exactly when the
//! map is bijective.

use crate::gf::FFElem;
use crate::matrix::MatrixQN;
use crate::{check_same_ctx, Ctx, Error};

/// A linearized polynomial, by its length-`n` coefficient vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinMap {
    ctx: Ctx,
    coeffs: Vec<FFElem>,
}

impl LinMap {
    pub fn new(ctx: &Ctx, coeffs: Vec<FFElem>) -> LinMap {
        assert_eq!(coeffs.len(), ctx.n() as usize);
        LinMap {
            ctx: ctx.clone(),
            coeffs,
        }
    }

    pub fn zero(ctx: &Ctx) -> LinMap {
        LinMap::new(ctx, vec![FFElem::ZERO; ctx.n() as usize])
    }

    pub fn identity(ctx: &Ctx) -> LinMap {
        let mut coeffs = vec![FFElem::ZERO; ctx.n() as usize];
        coeffs[0] = FFElem::ONE;
        LinMap::new(ctx, coeffs)
    }

    /// `x ↦ x^{q^k}`.
    pub fn frobenius_map(ctx: &Ctx, k: u32) -> LinMap {
        let mut coeffs = vec![FFElem::ZERO; ctx.n() as usize];
        coeffs[(k % ctx.n()) as usize] = FFElem::ONE;
        LinMap::new(ctx, coeffs)
    }

    /// `x ↦ a·x`.
    pub fn scalar(ctx: &Ctx, a: FFElem) -> LinMap {
        let mut coeffs = vec![FFElem::ZERO; ctx.n() as usize];
        coeffs[0] = a;
        LinMap::new(ctx, coeffs)
    }

    pub fn random(ctx: &Ctx, rng: &mut impl rand::Rng) -> LinMap {
        let order = ctx.order();
        let coeffs = (0..ctx.n())
            .map(|_| FFElem(rng.random_range(0..order)))
            .collect();
        LinMap::new(ctx, coeffs)
    }

    pub fn random_invertible(ctx: &Ctx, rng: &mut impl rand::Rng) -> LinMap {
        loop {
            let f = LinMap::random(ctx, rng);
            if f.is_invertible() {
                return f;
            }
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn evaluate(&self, x: FFElem) -> FFElem {
        let c = &*self.ctx;
        let mut acc = FFElem::ZERO;
        let mut xp = x;
        for &w in &self.coeffs {
            acc = c.add(acc, c.mul(w, xp));
            xp = c.frob(xp);
        }
        acc
    }

    /// The autocirculant matrix: entry `(i, j)` is `w_{(j−i) mod n}^{q^i}`.
    pub fn dickson_matrix(&self) -> MatrixQN {
        let c = &*self.ctx;
        let n = self.coeffs.len();
        let mut row = self.coeffs.clone();
        let mut m = MatrixQN::zeros(&self.ctx, n, n);
        for i in 0..n {
            if i > 0 {
                for x in row.iter_mut() {
                    *x = c.frob(*x);
                }
            }
            for j in 0..n {
                m[(i, j)] = row[(j + n - i) % n];
            }
        }
        m
    }

    /// True exactly when the map is a bijection of `F_{q^n}`.
    pub fn is_invertible(&self) -> bool {
        self.dickson_matrix().rank() == self.coeffs.len()
    }

    /// The adjoint `ĝ` with respect to `(x, y) ↦ Tr(xy)`:
    /// `Tr(g(x)·y) = Tr(x·ĝ(y))` for all `x, y`.
    pub fn adjoint(&self) -> LinMap {
        let c = &*self.ctx;
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|j| c.frobenius(self.coeffs[(n - j) % n], j as u32))
            .collect();
        LinMap::new(&self.ctx, coeffs)
    }

    /// `(f ∘ g)(x) = f(g(x))`; coefficients by twisted convolution
    /// `(f∘g)_k = Σ_{i+j ≡ k} f_i · g_j^{q^i}`.
    pub fn compose(&self, g: &LinMap) -> LinMap {
        check_same_ctx(&self.ctx, &g.ctx);
        let c = &*self.ctx;
        let n = self.coeffs.len();
        let mut out = vec![FFElem::ZERO; n];
        let mut gf = g.coeffs.clone();
        for i in 0..n {
            if i > 0 {
                for x in gf.iter_mut() {
                    *x = c.frob(*x);
                }
            }
            let fi = self.coeffs[i];
            if fi.is_zero() {
                continue;
            }
            for j in 0..n {
                let k = (i + j) % n;
                out[k] = c.add(out[k], c.mul(fi, gf[j]));
            }
        }
        LinMap::new(&self.ctx, out)
    }

    /// The compositional inverse; errors on singular maps.
    pub fn inverse(&self) -> Result<LinMap, Error> {
        let basis = self.ctx.basis().to_vec();
        let pairs: Vec<(FFElem, FFElem)> =
            basis.iter().map(|&b| (self.evaluate(b), b)).collect();
        interpolate(&self.ctx, &pairs).map_err(|_| Error::SingularMap)
    }

    /// Textual form: `n` element codes, constant term first.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| c.code().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The unique linearized polynomial with `f(bᵢ) = vᵢ` on an `F_q`-basis,
/// via the Moore system of the basis.
pub fn interpolate(ctx: &Ctx, pairs: &[(FFElem, FFElem)]) -> Result<LinMap, Error> {
    let n = ctx.n() as usize;
    assert_eq!(pairs.len(), n);
    let moore = MatrixQN::from_fn(ctx, n, n, |i, j| ctx.frobenius(pairs[i].0, j as u32));
    let rhs: Vec<FFElem> = pairs.iter().map(|&(_, v)| v).collect();
    let w = moore.solve(&rhs).map_err(|_| Error::NotABasis)?;
    // A consistent underdetermined system still means the points were
    // dependent; demand the Moore matrix be nonsingular.
    if moore.rank() < n {
        return Err(Error::NotABasis);
    }
    Ok(LinMap::new(ctx, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn ctx(p: u32, e: u32, n: u32) -> Ctx {
        Arc::new(FieldCtx::new(p, e, n).unwrap())
    }

    fn rnd(ctx: &Ctx, rng: &mut impl Rng) -> FFElem {
        FFElem(rng.random_range(0..ctx.order()))
    }

    #[test]
    fn evaluate_basics() {
        let c = ctx(2, 1, 4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let id = LinMap::identity(&c);
        let fr = LinMap::frobenius_map(&c, 1);
        for _ in 0..100 {
            let x = rnd(&c, &mut rng);
            let y = rnd(&c, &mut rng);
            assert_eq!(id.evaluate(x), x);
            assert_eq!(fr.evaluate(x), c.pow(x, c.q() as u64));
            let f = LinMap::random(&c, &mut rng);
            assert_eq!(
                f.evaluate(c.add(x, y)),
                c.add(f.evaluate(x), f.evaluate(y))
            );
            // F_q-homogeneity
            for &s in c.subfield_elems() {
                assert_eq!(f.evaluate(c.mul(s, x)), c.mul(s, f.evaluate(x)));
            }
        }
    }

    #[test]
    fn linmap_coefficients_are_unique() {
        // Distinct coefficient vectors give distinct maps.
        let c = ctx(2, 1, 3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for _ in 0..50 {
            let f = LinMap::random(&c, &mut rng);
            let g = LinMap::random(&c, &mut rng);
            if f == g {
                continue;
            }
            assert!(
                c.elems().any(|x| f.evaluate(x) != g.evaluate(x)),
                "distinct coeffs {f:?} {g:?} defined the same map"
            );
        }
    }

    #[test]
    fn dickson_identity_and_zero() {
        let c = ctx(3, 1, 4);
        let id = LinMap::identity(&c).dickson_matrix();
        assert_eq!(id, MatrixQN::identity(&c, 4));
        assert!(LinMap::zero(&c).dickson_matrix().is_zero());
    }

    #[test]
    fn dickson_matrix_realizes_evaluation() {
        // A_f·x̲ᵀ = (f(x))̲ᵀ, both sides computed independently.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3), ctx(2, 2, 2)] {
            for _ in 0..50 {
                let f = LinMap::random(&c, &mut rng);
                let x = rnd(&c, &mut rng);
                let a = f.dickson_matrix();
                let n = c.n() as usize;
                let xrow: Vec<FFElem> = (0..n).map(|i| c.frobenius(x, i as u32)).collect();
                let fx = f.evaluate(x);
                for i in 0..n {
                    let mut acc = FFElem::ZERO;
                    for j in 0..n {
                        acc = c.add(acc, c.mul(a[(i, j)], xrow[j]));
                    }
                    assert_eq!(acc, c.frobenius(fx, i as u32));
                }
            }
        }
    }

    #[test]
    fn invertibility_examples() {
        let c = ctx(2, 1, 4);
        assert!(LinMap::identity(&c).is_invertible());
        assert!(!LinMap::zero(&c).is_invertible());
        // f = x + x^q over F_{2^4}: kernel is F_2, found by enumeration.
        let f = LinMap::new(
            &c,
            vec![FFElem::ONE, FFElem::ONE, FFElem::ZERO, FFElem::ZERO],
        );
        let kernel: Vec<FFElem> = c.elems().filter(|&x| f.evaluate(x).is_zero()).collect();
        assert_eq!(kernel.len(), 2);
        assert!(!f.is_invertible());
    }

    #[test]
    fn invertible_iff_injective() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(34);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3), ctx(2, 2, 2)] {
            for _ in 0..100 {
                let f = LinMap::random(&c, &mut rng);
                let injective = {
                    let mut seen = vec![false; c.order() as usize];
                    let mut ok = true;
                    for x in c.elems() {
                        let y = f.evaluate(x).code() as usize;
                        if seen[y] {
                            ok = false;
                            break;
                        }
                        seen[y] = true;
                    }
                    ok
                };
                assert_eq!(f.is_invertible(), injective);
            }
        }
    }

    #[test]
    fn invertibility_matches_prime_field_matrix() {
        // Cross-check against the (e·n)×(e·n) matrix of the map over F_p.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(35);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3), ctx(2, 2, 2)] {
            let d = c.ext_degree() as usize;
            let p = c.p();
            for _ in 0..60 {
                let f = LinMap::random(&c, &mut rng);
                // Column k = digits of f(t^k) over F_p.
                let mut m = vec![0u32; d * d];
                for k in 0..d {
                    let tk = c.pow(c.generator(), k as u64);
                    let digits = c.digits(f.evaluate(tk));
                    for r in 0..d {
                        m[r * d + k] = digits[r];
                    }
                }
                // Rank over F_p by elimination.
                let mut rank = 0usize;
                let mut rows: Vec<Vec<u32>> = (0..d).map(|r| m[r * d..(r + 1) * d].to_vec()).collect();
                for col in 0..d {
                    if let Some(pr) = (rank..d).find(|&r| rows[r][col] != 0) {
                        rows.swap(pr, rank);
                        let inv = (1..p).find(|&x| x * rows[rank][col] % p == 1).unwrap();
                        for x in rows[rank].iter_mut() {
                            *x = *x * inv % p;
                        }
                        for r in 0..d {
                            if r != rank && rows[r][col] != 0 {
                                let fcr = rows[r][col];
                                for j in 0..d {
                                    rows[r][j] = (rows[r][j] + p * p - fcr * rows[rank][j] % p) % p;
                                }
                            }
                        }
                        rank += 1;
                    }
                }
                assert_eq!(f.is_invertible(), rank == d);
            }
        }
    }

    #[test]
    fn adjoint_contract_and_examples() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(36);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3), ctx(2, 2, 2)] {
            let n = c.n();
            assert_eq!(LinMap::identity(&c).adjoint(), LinMap::identity(&c));
            assert_eq!(
                LinMap::frobenius_map(&c, 1).adjoint(),
                LinMap::frobenius_map(&c, n - 1)
            );
            for _ in 0..100 {
                let g = LinMap::random(&c, &mut rng);
                let gh = g.adjoint();
                assert_eq!(gh.adjoint(), g);
                for &bx in c.basis() {
                    for &by in c.basis() {
                        assert_eq!(
                            c.trace_to_q(c.mul(g.evaluate(bx), by)),
                            c.trace_to_q(c.mul(bx, gh.evaluate(by)))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn compose_pointwise_and_structure() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3)] {
            let id = LinMap::identity(&c);
            let fr = LinMap::frobenius_map(&c, 1);
            assert_eq!(fr.compose(&fr), LinMap::frobenius_map(&c, 2));
            for _ in 0..100 {
                let f = LinMap::random(&c, &mut rng);
                let g = LinMap::random(&c, &mut rng);
                assert_eq!(id.compose(&g), g);
                let fg = f.compose(&g);
                let x = rnd(&c, &mut rng);
                assert_eq!(fg.evaluate(x), f.evaluate(g.evaluate(x)));
                // adjoint is an anti-homomorphism
                assert_eq!(fg.adjoint(), g.adjoint().compose(&f.adjoint()));
                // Dickson matrices multiply
                assert_eq!(
                    fg.dickson_matrix(),
                    f.dickson_matrix().mul(&g.dickson_matrix())
                );
            }
        }
    }

    #[test]
    fn interpolate_roundtrip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(38);
        for c in [ctx(2, 1, 4), ctx(3, 1, 3), ctx(2, 2, 3)] {
            let basis = c.basis().to_vec();
            // identity and Frobenius targets
            let pairs: Vec<_> = basis.iter().map(|&b| (b, b)).collect();
            assert_eq!(interpolate(&c, &pairs).unwrap(), LinMap::identity(&c));
            let pairs: Vec<_> = basis.iter().map(|&b| (b, c.frob(b))).collect();
            assert_eq!(
                interpolate(&c, &pairs).unwrap(),
                LinMap::frobenius_map(&c, 1)
            );
            for _ in 0..50 {
                let f = LinMap::random(&c, &mut rng);
                let pairs: Vec<_> = basis.iter().map(|&b| (b, f.evaluate(b))).collect();
                assert_eq!(interpolate(&c, &pairs).unwrap(), f);
            }
            // Dependent points are rejected.
            let mut pairs: Vec<_> = basis.iter().map(|&b| (b, b)).collect();
            pairs[1] = pairs[0];
            assert!(matches!(
                interpolate(&c, &pairs),
                Err(Error::NotABasis)
            ));
        }
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(39);
        let c = ctx(2, 1, 4);
        for _ in 0..30 {
            let f = LinMap::random_invertible(&c, &mut rng);
            let fi = f.inverse().unwrap();
            assert_eq!(f.compose(&fi), LinMap::identity(&c));
            assert_eq!(fi.compose(&f), LinMap::identity(&c));
        }
        assert!(LinMap::zero(&c).inverse().is_err());
    }
}
