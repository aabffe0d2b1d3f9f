//! Shared fixtures and independent oracles for the integration suites.
//! Each suite uses a different subset.
#![allow(dead_code)]

use belrank::families::{field_semifield, gtf, gtf_find_c};
use belrank::gf::{FFElem, FieldCtx};
use belrank::matrix::MatrixQN;
use belrank::semifield::SemifieldCoeffs;
use belrank::Ctx;
use std::sync::Arc;

pub fn ctx(p: u32, e: u32, n: u32) -> Ctx {
    Arc::new(FieldCtx::new(p, e, n).unwrap())
}

pub fn elem(ctx: &Ctx, code: u32) -> FFElem {
    ctx.elem(code).unwrap()
}

/// A proper semifield of order 16 (brk 2), found by exhaustive search over
/// sparse coefficient matrices and frozen here; properness is re-verified on
/// construction.
pub fn order16_semifield() -> SemifieldCoeffs {
    let c = ctx(2, 1, 4);
    let rows: [[u32; 4]; 4] = [[1, 1, 0, 0], [0, 0, 0, 0], [0, 2, 0, 14], [0, 0, 0, 0]];
    let m = MatrixQN::from_fn(&c, 4, 4, |i, j| elem(&c, rows[i][j]));
    let s = SemifieldCoeffs::from_matrix(&c, m);
    assert!(s.is_semifield());
    assert!(!s.nuclei().unwrap().all_full(16));
    s
}

/// Knuth's binary presemifield of order 32:
/// `x∘y = xy + Tr(x)·y² + Tr(y)·x²` with the absolute trace. It has no zero
/// divisors because `u² + u + 1 = 0` has no root when `F_4 ⊄ F_{2^n}` (n odd).
pub fn knuth32_semifield() -> SemifieldCoeffs {
    let c = ctx(2, 1, 5);
    let s = SemifieldCoeffs::from_bilinear(&c, |x, y| {
        let t1 = c.mul(c.trace_to_q(x), c.mul(y, y));
        let t2 = c.mul(c.trace_to_q(y), c.mul(x, x));
        c.add(c.mul(x, y), c.add(t1, t2))
    })
    .unwrap();
    assert!(s.is_semifield());
    assert!(!s.nuclei().unwrap().all_full(32));
    s
}

/// Semifields whose BEL-rank is certifiable exhaustively at desk scale.
pub fn certified_examples() -> Vec<(&'static str, SemifieldCoeffs)> {
    let c16 = ctx(2, 1, 4);
    let c81 = ctx(3, 1, 4);
    let c44 = ctx(2, 2, 2);
    let tc = gtf_find_c(&c81, 1, 2).unwrap();
    vec![
        ("field16", field_semifield(&c16)),
        ("field81", field_semifield(&c81)),
        ("field16-over-f4", field_semifield(&c44)),
        ("gtf-3-1-4", gtf(&c81, 1, 2, tc).unwrap()),
        ("order16-proper", order16_semifield()),
        ("knuth32", knuth32_semifield()),
    ]
}

/// Determinant by Laplace expansion — kept independent of the elimination
/// path it checks.
pub fn det(ctx: &Ctx, m: &[Vec<FFElem>]) -> FFElem {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut acc = FFElem::ZERO;
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<FFElem>> = (1..n)
            .map(|i| (0..n).filter(|&c| c != j).map(|c| m[i][c]).collect())
            .collect();
        let mut term = ctx.mul(m[0][j], det(ctx, &minor));
        if j % 2 == 1 {
            term = ctx.neg(term);
        }
        acc = ctx.add(acc, term);
    }
    acc
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Largest size of a nonzero minor — the determinant-based rank oracle.
pub fn minor_rank(ctx: &Ctx, m: &MatrixQN) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    for k in (1..=rows.min(cols)).rev() {
        for rsel in combinations(rows, k) {
            for csel in combinations(cols, k) {
                let sub: Vec<Vec<FFElem>> = rsel
                    .iter()
                    .map(|&i| csel.iter().map(|&j| m[(i, j)]).collect())
                    .collect();
                if !det(ctx, &sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

pub fn random_algebra(c: &Ctx, rng: &mut impl rand::Rng) -> SemifieldCoeffs {
    let n = c.n() as usize;
    let m = MatrixQN::from_fn(c, n, n, |_, _| elem(c, rng.random_range(0..c.order())));
    SemifieldCoeffs::from_matrix(c, m)
}
