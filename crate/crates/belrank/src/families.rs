//! Built-in algebra constructions: the finite field itself and Albert's
//! generalized twisted fields `x∘y = xy − c·x^{q^k}·y^{q^m}`.
//!
//! Everything else (classified semifields of a given order) enters through
//! TABLE or COEFF files.

use crate::gf::FFElem;
use crate::matrix::MatrixQN;
use crate::semifield::SemifieldCoeffs;
use crate::{Ctx, Error};

/// The field `F_{q^n}` itself: `c₀₀ = 1`, all other coefficients zero.
pub fn field_semifield(ctx: &Ctx) -> SemifieldCoeffs {
    let n = ctx.n() as usize;
    let mut m = MatrixQN::zeros(ctx, n, n);
    m[(0, 0)] = FFElem::ONE;
    SemifieldCoeffs::from_matrix(ctx, m)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Log-stride of the product set `{x^{q^k−1}·y^{q^m−1}}`: the nonzero part is
/// the subgroup of index `gcd` generated by combining the two power images.
fn product_set_stride(ctx: &Ctx, k: u32, m: u32) -> Result<u64, Error> {
    let n = ctx.n();
    if k == 0 || m == 0 || k >= n || m >= n {
        return Err(Error::InvalidParameter(format!(
            "twist exponents must satisfy 0 < k, m < n (got k={k}, m={m}, n={n})"
        )));
    }
    let group = (ctx.order() - 1) as u64;
    let q = ctx.q() as u64;
    let a = gcd(q.pow(k) - 1, group);
    let b = gcd(q.pow(m) - 1, group);
    Ok(gcd(a, b))
}

/// Membership in the forbidden set `{x^{q^k−1}·y^{q^m−1} : x, y}` (which
/// contains 0). Nonzero product-set elements are exactly the powers `t^s`
/// with `stride | s`.
fn c_is_forbidden(ctx: &Ctx, k: u32, m: u32, c: FFElem) -> Result<bool, Error> {
    let stride = product_set_stride(ctx, k, m)?;
    if c.is_zero() {
        return Ok(true);
    }
    Ok((ctx.log_code(c) as u64).is_multiple_of(stride))
}

/// Smallest element code outside the product set
/// `{x^{q^k−1}·y^{q^m−1} : x, y ∈ F_{q^n}}`, or `NoValidC` when that set is
/// the whole field (no twisted field exists for these exponents).
pub fn gtf_find_c(ctx: &Ctx, k: u32, m: u32) -> Result<FFElem, Error> {
    let stride = product_set_stride(ctx, k, m)?;
    if stride == 1 {
        return Err(Error::NoValidC);
    }
    let group = (ctx.order() - 1) as u64;
    let mut forbidden = vec![false; ctx.order() as usize];
    forbidden[0] = true;
    let mut s = 0u64;
    while s < group {
        forbidden[ctx.pow(ctx.generator(), s).code() as usize] = true;
        s += stride;
    }
    ctx.elems()
        .find(|&c| !forbidden[c.code() as usize])
        .ok_or(Error::NoValidC)
}

/// The generalized twisted field `x∘y = xy − c·x^{q^k}·y^{q^m}`:
/// coefficients `c₀₀ = 1`, `c_{km} = −c`, zero elsewhere.
///
/// The twist constant is re-verified against the product-set condition.
pub fn gtf(ctx: &Ctx, k: u32, m: u32, c: FFElem) -> Result<SemifieldCoeffs, Error> {
    if c_is_forbidden(ctx, k, m, c)? {
        return Err(Error::InvalidC(c.code()));
    }
    let n = ctx.n() as usize;
    let mut mat = MatrixQN::zeros(ctx, n, n);
    mat[(0, 0)] = FFElem::ONE;
    mat[(k as usize, m as usize)] = ctx.neg(c);
    Ok(SemifieldCoeffs::from_matrix(ctx, mat))
}
