//! Exact arithmetic in the field tower `F_p ⊆ F_q ⊆ F_{q^n}`.
//!
//! The extension `F_{q^n}` is realized once as `F_p[t]/(m)` where `m` is the
//! smallest primitive polynomial of degree `e·n` over `F_p` under the integer
//! coefficient encoding, so element codes are reproducible across runs and
//! machines. `F_q` is located inside it as the fixed field of `x ↦ x^q`.
//!
//! Elements are encoded as the integer `Σ aᵢ·pⁱ` where `Σ aᵢtⁱ` is the
//! polynomial representative. Multiplication goes through log/antilog tables
//! (every context is capped at `2^20` elements); a direct polynomial-mod-m
//! multiplication is kept as a verification path.

use crate::Error;

/// Table-backed contexts are capped at this many elements.
pub const MAX_ORDER: u128 = 1 << 20;

/// An element of `F_{q^n}`, stored as its canonical integer code.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
#[repr(transparent)]
pub struct FFElem(pub(crate) u32);

impl FFElem {
    pub const ZERO: FFElem = FFElem(0);
    pub const ONE: FFElem = FFElem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FFElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

const LOG_ZERO: u32 = u32::MAX;

/// The field tower `F_p ⊆ F_q ⊆ F_{q^n}` with fixed modulus and lookup tables.
///
/// Immutable after construction; safe to share between threads.
pub struct FieldCtx {
    p: u32,
    e: u32,
    n: u32,
    q: u32,
    order: u32,
    /// Modulus coefficients, ascending, length `e·n + 1`, monic.
    modulus: Vec<u32>,
    /// `log[code]` = discrete log base `t`; `LOG_ZERO` for code 0.
    log: Vec<u32>,
    /// `antilog[k]` = code of `t^k`, `k ∈ [0, order−1)`.
    antilog: Vec<u32>,
    /// `frob_q[code]` = code of `x^q`.
    frob_q: Vec<u32>,
    /// The `q` elements of `F_q` in increasing code order.
    subfield: Vec<FFElem>,
    /// `t^0, …, t^{n−1}`: an `F_q`-basis of `F_{q^n}`.
    basis: Vec<FFElem>,
    /// An `F_p`-basis of `F_q` (`e` elements).
    fq_basis: Vec<FFElem>,
    /// Inverse of the `F_p`-change-of-basis matrix from `(s_j·tⁱ)` to digits.
    coords_inv: Vec<u32>,
    /// Chunked digit-wise addition tables; empty when `p = 2` (XOR path).
    add: AddTables,
}

struct AddTables {
    /// Chunk modulus `P = p^k`; 0 marks the XOR fast path.
    chunk: u32,
    add: Vec<u32>,
    neg: Vec<u32>,
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.n == other.n
    }
}
impl Eq for FieldCtx {}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldCtx(p={}, e={}, n={})", self.p, self.e, self.n)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    /// Builds the context for `F_{p^{e·n}}` viewed as an `n`-dimensional
    /// algebra ambient over `F_q`, `q = p^e`.
    ///
    /// Deterministic: the same `(p, e, n)` always selects the same modulus
    /// (smallest primitive polynomial in code order) and element codes.
    pub fn new(p: u32, e: u32, n: u32) -> Result<FieldCtx, Error> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if e == 0 || n == 0 {
            return Err(Error::InvalidParameter(
                "extension degrees must be positive".into(),
            ));
        }
        let d = e
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidParameter("degree overflow".into()))?;
        let mut order: u128 = 1;
        for _ in 0..d {
            order *= p as u128;
            if order > MAX_ORDER {
                return Err(Error::TooLarge(order));
            }
        }
        let order = order as u32;
        let q = p.pow(e);

        let (modulus, log, antilog) =
            find_primitive_modulus(p, d, order).ok_or(Error::NoPrimitivePolynomial(d, p))?;

        let group = order - 1;
        let mut frob_q = vec![0u32; order as usize];
        for a in 1..order {
            let l = log[a as usize] as u64;
            frob_q[a as usize] = antilog[((l * q as u64) % group as u64) as usize];
        }

        let subfield: Vec<FFElem> = (0..order)
            .filter(|&a| frob_q[a as usize] == a)
            .map(FFElem)
            .collect();
        debug_assert_eq!(subfield.len(), q as usize);

        // t^i for i < n ≤ e·n < order−1 (with equality impossible), except the
        // trivial field F_2 where t = 1.
        let basis: Vec<FFElem> = (0..n)
            .map(|i| FFElem(antilog[i as usize % group.max(1) as usize]))
            .collect();

        let add = AddTables::new(p, d);

        let mut ctx = FieldCtx {
            p,
            e,
            n,
            q,
            order,
            modulus,
            log,
            antilog,
            frob_q,
            subfield,
            basis,
            fq_basis: Vec::new(),
            coords_inv: Vec::new(),
            add,
        };
        ctx.fq_basis = ctx.pick_fq_basis();
        ctx.coords_inv = ctx.build_coords_inverse()?;
        Ok(ctx)
    }

    fn pick_fq_basis(&self) -> Vec<FFElem> {
        // Greedy F_p-independent selection over the subfield, code order.
        let d = (self.e * self.n) as usize;
        let mut pivots: Vec<Vec<u32>> = Vec::new();
        let mut picked = Vec::new();
        for &a in &self.subfield {
            if a.is_zero() {
                continue;
            }
            let mut v = self.digits(a);
            for pv in &pivots {
                let lead = pv.iter().position(|&c| c != 0).unwrap();
                if v[lead] != 0 {
                    let f = v[lead] * modinv(pv[lead], self.p) % self.p;
                    for i in 0..d {
                        v[i] = (v[i] + self.p * self.p - f * pv[i] % self.p) % self.p;
                    }
                }
            }
            if v.iter().any(|&c| c != 0) {
                pivots.push(v);
                picked.push(a);
                if picked.len() == self.e as usize {
                    break;
                }
            }
        }
        debug_assert_eq!(picked.len(), self.e as usize);
        picked
    }

    fn build_coords_inverse(&self) -> Result<Vec<u32>, Error> {
        let d = (self.e * self.n) as usize;
        // Column i*e + j holds the digits of s_j · tⁱ.
        let mut m = vec![0u32; d * d];
        for i in 0..self.n as usize {
            for j in 0..self.e as usize {
                let prod = self.mul(self.fq_basis[j], self.basis[i]);
                let dg = self.digits(prod);
                for (r, &c) in dg.iter().enumerate() {
                    m[r * d + i * self.e as usize + j] = c;
                }
            }
        }
        invert_mod_p(&m, d, self.p)
            .ok_or_else(|| Error::InvalidParameter("coordinate basis is singular".into()))
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }
    /// `q^n`, the number of elements.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }
    /// Degree of the extension over the prime field (`e·n`).
    #[inline]
    pub fn ext_degree(&self) -> u32 {
        self.e * self.n
    }
    /// Modulus coefficients, ascending, monic, length `e·n + 1`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn zero(&self) -> FFElem {
        FFElem(0)
    }
    #[inline]
    pub fn one(&self) -> FFElem {
        FFElem(1)
    }
    /// The primitive root `t` of the modulus.
    #[inline]
    pub fn generator(&self) -> FFElem {
        FFElem(self.antilog[1 % self.antilog.len().max(1)])
    }

    /// Checked element construction from a wire code.
    pub fn elem(&self, code: u32) -> Result<FFElem, Error> {
        if code < self.order {
            Ok(FFElem(code))
        } else {
            Err(Error::InvalidParameter(format!(
                "element code {code} out of range for field of order {}",
                self.order
            )))
        }
    }

    /// All elements in code order.
    pub fn elems(&self) -> impl Iterator<Item = FFElem> {
        (0..self.order).map(FFElem)
    }

    /// The elements of `F_q` (fixed points of `x ↦ x^q`) in code order.
    pub fn subfield_elems(&self) -> &[FFElem] {
        &self.subfield
    }

    #[inline]
    pub fn is_in_subfield(&self, a: FFElem) -> bool {
        self.frob_q[a.0 as usize] == a.0
    }

    /// `t^0, …, t^{n−1}`: the canonical `F_q`-basis of `F_{q^n}`.
    pub fn basis(&self) -> &[FFElem] {
        &self.basis
    }

    #[inline]
    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        if self.p == 2 {
            FFElem(a.0 ^ b.0)
        } else {
            FFElem(self.add.add(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FFElem) -> FFElem {
        if self.p == 2 {
            a
        } else {
            FFElem(self.add.neg(a.0))
        }
    }

    #[inline]
    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        if self.p == 2 {
            FFElem(a.0 ^ b.0)
        } else {
            FFElem(self.add.add(a.0, self.add.neg(b.0)))
        }
    }

    #[inline]
    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        if a.0 == 0 || b.0 == 0 {
            return FFElem(0);
        }
        let group = self.order - 1;
        let mut s = self.log[a.0 as usize] + self.log[b.0 as usize];
        if s >= group {
            s -= group;
        }
        FFElem(self.antilog[s as usize])
    }

    /// Multiplicative inverse. Panics on zero; see [`FieldCtx::try_inv`].
    #[inline]
    pub fn inv(&self, a: FFElem) -> FFElem {
        assert!(a.0 != 0, "inverse of zero");
        let group = self.order - 1;
        let l = self.log[a.0 as usize];
        FFElem(self.antilog[((group - l) % group) as usize])
    }

    pub fn try_inv(&self, a: FFElem) -> Result<FFElem, Error> {
        if a.0 == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv(a))
        }
    }

    /// `a^k` with `a^0 = 1` for every `a`.
    pub fn pow(&self, a: FFElem, k: u64) -> FFElem {
        if k == 0 {
            return FFElem(1);
        }
        if a.0 == 0 {
            return FFElem(0);
        }
        let group = (self.order - 1) as u64;
        let l = self.log[a.0 as usize] as u64;
        let s = (l * (k % group)) % group;
        FFElem(self.antilog[s as usize])
    }

    /// `x ↦ x^q`, via the precomputed table.
    #[inline]
    pub fn frob(&self, a: FFElem) -> FFElem {
        FFElem(self.frob_q[a.0 as usize])
    }

    /// `a^{q^k}`; `k` is taken mod `n`.
    #[inline]
    pub fn frobenius(&self, a: FFElem, k: u32) -> FFElem {
        let k = k % self.n;
        let mut x = a;
        for _ in 0..k {
            x = self.frob(x);
        }
        x
    }

    /// Field trace `Tr_{q^n : q}(a) = Σ_{k<n} a^{q^k}`; lands in `F_q`.
    pub fn trace_to_q(&self, a: FFElem) -> FFElem {
        let mut acc = a;
        let mut x = a;
        for _ in 1..self.n {
            x = self.frob(x);
            acc = self.add(acc, x);
        }
        acc
    }

    /// Base-`p` digits of the polynomial representative, ascending, length `e·n`.
    pub fn digits(&self, a: FFElem) -> Vec<u32> {
        let d = (self.e * self.n) as usize;
        let mut v = vec![0u32; d];
        let mut c = a.0;
        for slot in v.iter_mut() {
            *slot = c % self.p;
            c /= self.p;
        }
        v
    }

    pub fn from_digits(&self, digits: &[u32]) -> FFElem {
        let mut c = 0u32;
        for &dg in digits.iter().rev() {
            c = c * self.p + dg % self.p;
        }
        FFElem(c)
    }

    /// Coordinates of `a` over `F_q` along the basis `t^0, …, t^{n−1}`.
    pub fn coords_q(&self, a: FFElem) -> Vec<FFElem> {
        let d = (self.e * self.n) as usize;
        let dg = self.digits(a);
        let mut flat = vec![0u32; d];
        for (r, slot) in flat.iter_mut().enumerate() {
            let mut acc = 0u64;
            for c in 0..d {
                acc += (self.coords_inv[r * d + c] as u64) * (dg[c] as u64);
            }
            *slot = (acc % self.p as u64) as u32;
        }
        (0..self.n as usize)
            .map(|i| {
                let mut x = FFElem(0);
                for j in 0..self.e as usize {
                    let scalar = FFElem(flat[i * self.e as usize + j]);
                    x = self.add(x, self.mul(self.fq_basis[j], scalar));
                }
                x
            })
            .collect()
    }

    /// Inverse of [`FieldCtx::coords_q`]: `Σ coords[i] · tⁱ`.
    pub fn from_coords_q(&self, coords: &[FFElem]) -> FFElem {
        debug_assert_eq!(coords.len(), self.n as usize);
        let mut x = FFElem(0);
        for (i, &c) in coords.iter().enumerate() {
            x = self.add(x, self.mul(c, self.basis[i]));
        }
        x
    }

    /// Direct polynomial multiplication mod the modulus — the verification
    /// path for the table-backed [`FieldCtx::mul`].
    pub fn mul_poly(&self, a: FFElem, b: FFElem) -> FFElem {
        let d = (self.e * self.n) as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; 2 * d];
        for i in 0..d {
            if da[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        // Reduce from the top: t^{d+k} ≡ −Σ m_i t^{i+k}.
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..d {
                let sub = c * self.modulus[i] % self.p;
                prod[k - d + i] = (prod[k - d + i] + self.p - sub) % self.p;
            }
        }
        self.from_digits(&prod[..d])
    }

    /// Discrete log base `t`; meaningful only for nonzero elements.
    #[inline]
    pub(crate) fn log_code(&self, a: FFElem) -> u32 {
        if a.0 == 0 {
            LOG_ZERO
        } else {
            self.log[a.0 as usize]
        }
    }
}

fn modinv(a: u32, p: u32) -> u32 {
    // p prime, 0 < a < p.
    let mut r = 1u32;
    let mut base = a % p;
    let mut k = p - 2;
    while k > 0 {
        if k & 1 == 1 {
            r = r * base % p;
        }
        base = base * base % p;
        k >>= 1;
    }
    r
}

fn invert_mod_p(m: &[u32], d: usize, p: u32) -> Option<Vec<u32>> {
    let mut a = m.to_vec();
    let mut inv = vec![0u32; d * d];
    for i in 0..d {
        inv[i * d + i] = 1;
    }
    for col in 0..d {
        let piv = (col..d).find(|&r| a[r * d + col] != 0)?;
        if piv != col {
            for c in 0..d {
                a.swap(piv * d + c, col * d + c);
                inv.swap(piv * d + c, col * d + c);
            }
        }
        let f = modinv(a[col * d + col], p);
        for c in 0..d {
            a[col * d + c] = a[col * d + c] * f % p;
            inv[col * d + c] = inv[col * d + c] * f % p;
        }
        for r in 0..d {
            if r == col || a[r * d + col] == 0 {
                continue;
            }
            let f = a[r * d + col];
            for c in 0..d {
                a[r * d + c] = (a[r * d + c] + p * p - f * a[col * d + c] % p) % p;
                inv[r * d + c] = (inv[r * d + c] + p * p - f * inv[col * d + c] % p) % p;
            }
        }
    }
    Some(inv)
}

impl AddTables {
    fn new(p: u32, d: u32) -> AddTables {
        if p == 2 {
            return AddTables {
                chunk: 0,
                add: Vec::new(),
                neg: Vec::new(),
            };
        }
        // Largest chunk p^k ≤ 1024 keeps the pair table within a few MB.
        let mut k = 1u32;
        while k < d && p.pow(k + 1) <= 1024 {
            k += 1;
        }
        let pk = p.pow(k.min(d));
        let digit_add = |a: u32, b: u32| -> u32 {
            let (mut a, mut b) = (a, b);
            let mut out = 0u32;
            let mut mult = 1u32;
            while a > 0 || b > 0 {
                out += (a % p + b % p) % p * mult;
                a /= p;
                b /= p;
                mult *= p;
            }
            out
        };
        let mut add = vec![0u32; (pk * pk) as usize];
        for a in 0..pk {
            for b in a..pk {
                let s = digit_add(a, b);
                add[(a * pk + b) as usize] = s;
                add[(b * pk + a) as usize] = s;
            }
        }
        let mut neg = vec![0u32; pk as usize];
        for a in 0..pk {
            let mut x = a;
            let mut out = 0u32;
            let mut mult = 1u32;
            while x > 0 {
                out += (p - x % p) % p * mult;
                x /= p;
                mult *= p;
            }
            neg[a as usize] = out;
        }
        AddTables { chunk: pk, add, neg }
    }

    #[inline]
    fn add(&self, mut a: u32, mut b: u32) -> u32 {
        let pk = self.chunk;
        if a < pk && b < pk {
            return self.add[(a * pk + b) as usize];
        }
        let mut out = 0u32;
        let mut mult = 1u64;
        while a > 0 || b > 0 {
            out += self.add[((a % pk) * pk + b % pk) as usize] * mult as u32;
            a /= pk;
            b /= pk;
            mult *= pk as u64;
        }
        out
    }

    #[inline]
    fn neg(&self, mut a: u32) -> u32 {
        let pk = self.chunk;
        if a < pk {
            return self.neg[a as usize];
        }
        let mut out = 0u32;
        let mut mult = 1u32;
        while a > 0 {
            out += self.neg[(a % pk) as usize] * mult;
            a /= pk;
            mult *= pk;
        }
        out
    }
}

/// Scans monic degree-`d` polynomials over `F_p` in code order and returns the
/// first primitive one together with its log/antilog tables.
///
/// A candidate passes exactly when the powers of `t` first return to 1 at
/// exponent `order − 1`; that simultaneously forces irreducibility (a ring
/// with zero divisors has a smaller unit group).
fn find_primitive_modulus(p: u32, d: u32, order: u32) -> Option<(Vec<u32>, Vec<u32>, Vec<u32>)> {
    let pd: u32 = p.pow(d);
    for low in 0..pd {
        if low % p == 0 {
            continue; // t divides the candidate
        }
        let mut modulus: Vec<u32> = Vec::with_capacity(d as usize + 1);
        let mut c = low;
        for _ in 0..d {
            modulus.push(c % p);
            c /= p;
        }
        modulus.push(1);

        if let Some((log, antilog)) = build_tables(p, d, order, &modulus) {
            return Some((modulus, log, antilog));
        }
    }
    None
}

fn build_tables(p: u32, d: u32, order: u32, modulus: &[u32]) -> Option<(Vec<u32>, Vec<u32>)> {
    let group = order - 1;
    let mut antilog = vec![0u32; group.max(1) as usize];
    let mut log = vec![LOG_ZERO; order as usize];
    antilog[0] = 1;
    log[1] = 0;

    if p == 2 {
        let mcode: u32 = modulus
            .iter()
            .enumerate()
            .map(|(i, &c)| c << i)
            .sum::<u32>();
        let top = 1u32 << d;
        let mut cur = 1u32;
        for s in 1..group {
            cur <<= 1;
            if cur & top != 0 {
                cur ^= mcode;
            }
            if cur == 1 {
                return None;
            }
            antilog[s as usize] = cur;
            log[cur as usize] = s;
        }
        cur <<= 1;
        if cur & top != 0 {
            cur ^= mcode;
        }
        if cur != 1 {
            return None;
        }
    } else {
        let du = d as usize;
        let mut cur = vec![0u32; du];
        cur[0] = 1;
        let code_of = |v: &[u32]| -> u32 {
            let mut c = 0u32;
            for &dg in v.iter().rev() {
                c = c * p + dg;
            }
            c
        };
        for s in 1..=group {
            let carry = cur[du - 1];
            for i in (1..du).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if carry != 0 {
                for i in 0..du {
                    cur[i] = (cur[i] + p * p - carry * modulus[i] % p) % p;
                }
            }
            let code = code_of(&cur);
            if s == group {
                if code != 1 {
                    return None;
                }
            } else {
                if code == 1 {
                    return None;
                }
                antilog[s as usize] = code;
                log[code as usize] = s;
            }
        }
    }
    Some((log, antilog))
}
