//! Arithmetic in GF(2^e) and in its quadratic extension.
//!
//! Elements are bit vectors of polynomial coefficients; the integer encoding
//! of the bit vector is the canonical encoding used everywhere else in the
//! crate (tables are indexed by it, files print it in hex).

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// Conway polynomials over GF(2) for e = 1..=16, as bit vectors.
const CONWAY: [u32; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x5b, 0x83, 0x11d, 0x211, 0x46f, 0x805, 0x10eb, 0x201b, 0x40a9,
    0x8035, 0x1002d,
];

/// Largest extension degree with a full multiplication table.
const MUL_TABLE_MAX_E: u32 = 8;

/// An element of GF(2^e), identified by its integer encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Fe(pub u16);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl Add for Fe {
    type Output = Fe;

    #[inline]
    fn add(self, rhs: Fe) -> Fe {
        Fe(self.0 ^ rhs.0)
    }
}

impl AddAssign for Fe {
    #[inline]
    fn add_assign(&mut self, rhs: Fe) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:x}", self.0)
    }
}

impl fmt::LowerHex for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

/// Carry-less product of two bit vectors reduced modulo `poly` of degree `e`.
fn slow_mul(mut a: u32, mut b: u32, poly: u32, e: u32) -> u32 {
    let mut acc = 0u32;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & (1 << e) != 0 {
            a ^= poly;
        }
    }
    acc
}

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(poly: u32) -> bool {
    let deg = poly_degree(poly);
    if deg < 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        for divisor in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, divisor) == 0 {
                return false;
            }
        }
    }
    true
}

/// The field GF(2^e) with precomputed tables.
///
/// Immutable after construction and freely shareable between threads.
#[derive(Clone)]
pub struct FieldCtx {
    e: u32,
    q: usize,
    poly: u32,
    generator: Fe,
    // exp has length 2(q-1) so that exp[log a + log b] needs no reduction.
    exp: Vec<u16>,
    log: Vec<u16>,
    mul_tab: Vec<u16>,
    inv: Vec<u16>,
    sqrt: Vec<u16>,
    trace: Vec<u8>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("e", &self.e)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.e == other.e && self.poly == other.poly
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// GF(2^e) reduced by the Conway polynomial of degree `e`.
    pub fn new(e: u32) -> Result<Self> {
        if !(1..=16).contains(&e) {
            return Err(Error::Degree(e));
        }
        Self::with_poly(e, CONWAY[e as usize])
    }

    pub fn with_poly(e: u32, poly: u32) -> Result<Self> {
        if !(1..=16).contains(&e) {
            return Err(Error::Degree(e));
        }
        if poly_degree(poly) != e as i32 || !is_irreducible(poly) {
            return Err(Error::Reducible { degree: e, poly });
        }
        let q = 1usize << e;
        let order = q - 1;

        let slow_pow = |mut a: u32, mut k: usize| {
            let mut acc = 1u32;
            while k != 0 {
                if k & 1 == 1 {
                    acc = slow_mul(acc, a, poly, e);
                }
                a = slow_mul(a, a, poly, e);
                k >>= 1;
            }
            acc
        };
        let prime_factors: Vec<usize> = (2..=order)
            .filter(|&p| order % p == 0 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
            .collect();
        let generator = (1..q as u32)
            .find(|&g| prime_factors.iter().all(|&p| slow_pow(g, order / p) != 1))
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; q];
        let mut x = 1u32;
        for k in 0..order {
            exp[k] = x as u16;
            exp[k + order] = x as u16;
            log[x as usize] = k as u16;
            x = slow_mul(x, generator, poly, e);
        }

        let mut ctx = FieldCtx {
            e,
            q,
            poly,
            generator: Fe(generator as u16),
            exp,
            log,
            mul_tab: Vec::new(),
            inv: vec![0; q],
            sqrt: vec![0; q],
            trace: vec![0; q],
        };

        for a in 1..q {
            let l = ctx.log[a] as usize;
            ctx.inv[a] = ctx.exp[(order - l) % order];
        }
        for a in 0..q {
            let sq = ctx.mul_slow(Fe(a as u16), Fe(a as u16));
            ctx.sqrt[sq.index()] = a as u16;
        }
        for a in 0..q {
            let mut t = Fe(a as u16);
            let mut x = t;
            for _ in 1..e {
                x = ctx.mul_slow(x, x);
                t += x;
            }
            debug_assert!(t.0 <= 1);
            ctx.trace[a] = t.0 as u8;
        }
        if e <= MUL_TABLE_MAX_E {
            let mut tab = vec![0u16; q * q];
            for a in 0..q {
                for b in 0..q {
                    tab[(a << e) | b] = ctx.mul_slow(Fe(a as u16), Fe(b as u16)).0;
                }
            }
            ctx.mul_tab = tab;
        }
        Ok(ctx)
    }

    #[inline]
    fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        if a.is_zero() || b.is_zero() {
            return Fe::ZERO;
        }
        Fe(self.exp[self.log[a.index()] as usize + self.log[b.index()] as usize])
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn reduction_poly(&self) -> u32 {
        self.poly
    }

    /// Smallest element of multiplicative order q-1.
    pub fn generator(&self) -> Fe {
        self.generator
    }

    /// All elements in increasing encoding.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.q).map(|x| Fe(x as u16))
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.q).map(|x| Fe(x as u16))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        a + b
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if self.mul_tab.is_empty() {
            self.mul_slow(a, b)
        } else {
            Fe(self.mul_tab[(a.index() << self.e) | b.index()])
        }
    }

    /// Row of the multiplication table for `a`, when tables are in use.
    #[inline]
    pub(crate) fn mul_row(&self, a: Fe) -> Option<&[u16]> {
        if self.mul_tab.is_empty() {
            None
        } else {
            let start = a.index() << self.e;
            Some(&self.mul_tab[start..start + self.q])
        }
    }

    /// Multiplicative inverse; panics on zero. See [`FieldCtx::try_inv`].
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        assert!(!a.is_zero(), "inverse of zero in GF(2^{})", self.e);
        Fe(self.inv[a.index()])
    }

    pub fn try_inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(Fe(self.inv[a.index()]))
        }
    }

    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b))
    }

    /// a^k by square-and-multiply. 0^0 = 1.
    pub fn pow(&self, a: Fe, mut k: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while k != 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    #[inline]
    pub fn square(&self, a: Fe) -> Fe {
        self.mul(a, a)
    }

    /// x^(q/2), the inverse of squaring.
    #[inline]
    pub fn sqrt(&self, a: Fe) -> Fe {
        Fe(self.sqrt[a.index()])
    }

    /// x^(2^i) for 0 <= i < e.
    pub fn frobenius(&self, a: Fe, i: u32) -> Fe {
        debug_assert!(i < self.e);
        if a.is_zero() {
            return a;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[a.index()] as u64;
        Fe(self.exp[((l << i) % order) as usize])
    }

    /// Inverse automorphism of `frobenius(_, i)`.
    pub fn frobenius_inv(&self, a: Fe, i: u32) -> Fe {
        self.frobenius(a, (self.e - i % self.e) % self.e)
    }

    /// Absolute trace x + x^2 + ... + x^(q/2), as 0 or 1.
    #[inline]
    pub fn trace(&self, a: Fe) -> u8 {
        self.trace[a.index()]
    }

    /// The trace-1 element with the smallest encoding.
    pub fn trace_one_smallest(&self) -> Fe {
        self.elements()
            .find(|&x| self.trace(x) == 1)
            .expect("exactly q/2 elements have trace 1")
    }

    /// Discrete logarithm to the base of [`FieldCtx::generator`].
    #[inline]
    pub fn log(&self, a: Fe) -> usize {
        debug_assert!(!a.is_zero());
        self.log[a.index()] as usize
    }

    /// generator^k, k taken modulo q-1.
    #[inline]
    pub fn exp(&self, k: usize) -> Fe {
        Fe(self.exp[k % (self.q - 1)])
    }

    /// Parses a lowercase or uppercase hex encoding and range-checks it.
    pub fn parse(&self, s: &str) -> Result<Fe> {
        let v = u32::from_str_radix(s.trim(), 16)
            .map_err(|_| Error::Format(format!("not a hex field element: {s:?}")))?;
        if v as usize >= self.q {
            return Err(Error::Format(format!(
                "element {v:#x} out of range for GF({})",
                self.q
            )));
        }
        Ok(Fe(v as u16))
    }

    /// `(e, reduction polynomial)` as `"<e> <poly hex>"`.
    pub fn describe(&self) -> String {
        format!("{} {:x}", self.e, self.poly)
    }
}

/// An element u + v·ω of GF(q²), where ω² = ω + c.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtElem {
    pub u: Fe,
    pub v: Fe,
}

impl ExtElem {
    pub const ONE: ExtElem = ExtElem { u: Fe::ONE, v: Fe::ZERO };

    pub fn base(u: Fe) -> Self {
        ExtElem { u, v: Fe::ZERO }
    }

    /// Integer encoding u | v << e.
    pub fn encode(self, e: u32) -> u32 {
        self.u.0 as u32 | ((self.v.0 as u32) << e)
    }
}

/// GF(q²) as the degree-2 extension GF(q)[ω]/(ω² + ω + c).
#[derive(Clone, Copy, Debug)]
pub struct QuadExt<'a> {
    base: &'a FieldCtx,
    c: Fe,
}

impl<'a> QuadExt<'a> {
    /// Uses the smallest c for which x² + x + c has no root in GF(q), which is
    /// the smallest trace-1 element.
    pub fn new(base: &'a FieldCtx) -> Self {
        let c = base.trace_one_smallest();
        debug_assert!(base
            .elements()
            .all(|x| base.mul(x, x) + x + c != Fe::ZERO));
        QuadExt { base, c }
    }

    pub fn base_field(&self) -> &'a FieldCtx {
        self.base
    }

    pub fn omega_constant(&self) -> Fe {
        self.c
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElem> + '_ {
        let q = self.base.q() as u32;
        (0..q * q).map(move |k| ExtElem {
            u: Fe((k % q) as u16),
            v: Fe((k / q) as u16),
        })
    }

    pub fn add(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        ExtElem { u: x.u + y.u, v: x.v + y.v }
    }

    pub fn mul(&self, x: ExtElem, y: ExtElem) -> ExtElem {
        let f = self.base;
        let vv = f.mul(x.v, y.v);
        ExtElem {
            u: f.mul(x.u, y.u) + f.mul(self.c, vv),
            v: f.mul(x.u, y.v) + f.mul(x.v, y.u) + vv,
        }
    }

    pub fn pow(&self, x: ExtElem, mut k: u64) -> ExtElem {
        let mut base = x;
        let mut acc = ExtElem::ONE;
        while k != 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    /// x^q. Since ω^q = ω + 1, (u + vω)^q = (u + v) + vω.
    pub fn conj(&self, x: ExtElem) -> ExtElem {
        ExtElem { u: x.u + x.v, v: x.v }
    }

    /// x + x^q, which lies in GF(q).
    pub fn rel_trace(&self, x: ExtElem) -> Fe {
        let s = self.add(x, self.conj(x));
        debug_assert!(s.v.is_zero());
        s.u
    }

    /// x^(q+1).
    pub fn norm(&self, x: ExtElem) -> Fe {
        let n = self.mul(x, self.conj(x));
        debug_assert!(n.v.is_zero());
        n.u
    }

    pub fn inv(&self, x: ExtElem) -> ExtElem {
        let n = self.norm(x);
        let ni = self.base.inv(n);
        let c = self.conj(x);
        ExtElem {
            u: self.base.mul(c.u, ni),
            v: self.base.mul(c.v, ni),
        }
    }

    /// The order-(q+1) subgroup {β : β^(q+1) = 1}, in increasing encoding.
    pub fn norm_one(&self) -> Vec<ExtElem> {
        let e = self.base.e();
        let mut out: Vec<ExtElem> = self
            .elements()
            .filter(|&x| x != ExtElem::default() && self.norm(x) == Fe::ONE)
            .collect();
        out.sort_by_key(|x| x.encode(e));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_defining_relation() {
        let f = FieldCtx::new(2).unwrap();
        let w = Fe(2);
        assert_eq!(f.mul(w, w), w + Fe::ONE);
        assert_eq!(f.trace(w), 1);
        assert_eq!(f.sqrt(w), f.mul(w, w));
        assert_eq!(f.trace_one_smallest(), w);
    }

    #[test]
    fn basic_laws_all_small_fields() {
        for e in 1..=8 {
            let f = FieldCtx::new(e).unwrap();
            for x in f.elements() {
                assert_eq!(x + x, Fe::ZERO);
                assert_eq!(f.mul(Fe::ONE, x), x);
                assert_eq!(f.mul_slow(x, x), f.mul(x, x));
                assert_eq!(f.mul(f.sqrt(x), f.sqrt(x)), x);
                assert_eq!(f.frobenius(x, 0), x);
                if e > 1 {
                    assert_eq!(f.frobenius(f.frobenius(x, 1), e - 1), x);
                    assert_eq!(f.frobenius(x, e - 1), f.sqrt(x));
                }
                if !x.is_zero() {
                    assert_eq!(f.mul(x, f.inv(x)), Fe::ONE);
                    assert_eq!(f.pow(x, (f.q() - 1) as u64), Fe::ONE);
                }
            }
        }
    }

    #[test]
    fn trace_facts() {
        let f = FieldCtx::new(6).unwrap();
        assert_eq!(f.trace(Fe::ZERO), 0);
        assert_eq!(f.trace(Fe::ONE), 0);
        assert_eq!(f.elements().filter(|&x| f.trace(x) == 1).count(), 32);
        assert_eq!(f.trace(f.trace_one_smallest()), 1);
    }

    #[test]
    fn inverse_of_zero_is_domain_error() {
        let f = FieldCtx::new(3).unwrap();
        assert!(matches!(f.try_inv(Fe::ZERO), Err(Error::ZeroInverse)));
    }

    #[test]
    fn reducible_poly_rejected() {
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2
        assert!(matches!(
            FieldCtx::with_poly(4, 0x15),
            Err(Error::Reducible { .. })
        ));
        // x^6 + x + 1 is irreducible (and primitive)
        let f = FieldCtx::with_poly(6, 0x43).unwrap();
        assert_eq!(f.q(), 64);
    }

    #[test]
    fn conway_polys_are_irreducible() {
        for e in 1..=16 {
            assert!(is_irreducible(CONWAY[e]), "e = {e}");
        }
    }

    #[test]
    fn generator_is_primitive() {
        for e in 1..=10 {
            let f = FieldCtx::new(e).unwrap();
            let g = f.generator();
            let mut seen = std::collections::HashSet::new();
            let mut x = Fe::ONE;
            for _ in 0..f.q() - 1 {
                seen.insert(x);
                x = f.mul(x, g);
            }
            assert_eq!(seen.len(), f.q() - 1);
        }
    }

    #[test]
    fn extension_field_basics() {
        for e in 1..=6 {
            let f = FieldCtx::new(e).unwrap();
            let k = QuadExt::new(&f);
            for y in f.elements() {
                assert_eq!(k.rel_trace(ExtElem::base(y)), Fe::ZERO);
            }
            let w = ExtElem { u: Fe::ZERO, v: Fe::ONE };
            assert_eq!(k.rel_trace(w) + k.rel_trace(k.conj(w)), Fe::ZERO);
            let q = f.q() as u64;
            assert_eq!(k.pow(w, q), k.conj(w));
            let units = k.norm_one();
            assert_eq!(units.len(), f.q() + 1);
            for &b in &units {
                if b != ExtElem::ONE {
                    assert_ne!(k.rel_trace(b), Fe::ZERO);
                }
            }
            for x in f.elements() {
                for y in f.elements() {
                    let p = k.mul(ExtElem::base(x), ExtElem::base(y));
                    assert_eq!(p, ExtElem::base(f.mul(x, y)));
                }
            }
        }
    }
}
