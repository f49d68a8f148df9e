//! O-permutations and o-polynomials.
//!
//! The search works on [`EvalTable`]s (one value per field element) and only
//! converts to coefficient form when storing or deduplicating. Coefficients
//! are recovered with the closed form of Lagrange interpolation over GF(q):
//! for 1 <= i <= q-1, the coefficient of t^i is the sum over nonzero a of
//! f(a)·a^(-i), which runs over discrete logarithms with no divisions.

use std::fmt;

use crate::error::{contract, Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::plane::{PointSet, ProjPoint, SetRole};

/// A function GF(q) -> GF(q) with f(0) = 0, stored pointwise.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvalTable {
    values: Vec<Fe>,
}

impl EvalTable {
    pub fn new(values: Vec<Fe>) -> Result<Self> {
        if values.first() != Some(&Fe::ZERO) {
            return Err(contract("table must map 0 to 0"));
        }
        Ok(EvalTable { values })
    }

    pub fn from_fn(ctx: &FieldCtx, f: impl Fn(Fe) -> Fe) -> Result<Self> {
        Self::new(ctx.elements().map(f).collect())
    }

    /// Caller guarantees values[0] = 0.
    pub(crate) fn from_vec_unchecked(values: Vec<Fe>) -> Self {
        debug_assert_eq!(values[0], Fe::ZERO);
        EvalTable { values }
    }

    /// t ↦ t^k.
    pub fn monomial(ctx: &FieldCtx, k: u64) -> Self {
        let values = ctx
            .elements()
            .map(|t| if t.is_zero() { Fe::ZERO } else { ctx.pow(t, k) })
            .collect();
        EvalTable { values }
    }

    #[inline]
    pub fn get(&self, t: Fe) -> Fe {
        self.values[t.index()]
    }

    #[inline]
    pub fn values(&self) -> &[Fe] {
        &self.values
    }

    pub fn q(&self) -> usize {
        self.values.len()
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> EvalTable {
        EvalTable {
            values: self.values.iter().map(|&v| ctx.mul(c, v)).collect(),
        }
    }

    /// Scales so that f(1) = 1; fails if f(1) = 0.
    pub fn normalized(&self, ctx: &FieldCtx) -> Result<EvalTable> {
        let f1 = self.get(Fe::ONE);
        if f1.is_zero() {
            return Err(contract("f(1) = 0, not an o-permutation"));
        }
        Ok(self.scale(ctx, ctx.inv(f1)))
    }
}

/// A polynomial with zero constant term; `coeffs[i-1]` is the coefficient of t^i
/// for i = 1..q-1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OPoly {
    coeffs: Vec<Fe>,
}

impl OPoly {
    pub fn from_coeffs(ctx: &FieldCtx, coeffs: Vec<Fe>) -> Result<Self> {
        if coeffs.len() != ctx.q() - 1 {
            return Err(Error::Format(format!(
                "expected {} coefficients, got {}",
                ctx.q() - 1,
                coeffs.len()
            )));
        }
        Ok(OPoly { coeffs })
    }

    pub fn monomial(ctx: &FieldCtx, k: usize) -> Self {
        assert!((1..ctx.q()).contains(&k));
        let mut coeffs = vec![Fe::ZERO; ctx.q() - 1];
        coeffs[k - 1] = Fe::ONE;
        OPoly { coeffs }
    }

    /// Coefficient of t^i, 1 <= i <= q-1.
    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs[i - 1]
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1)
    }

    pub fn evaluate(&self, ctx: &FieldCtx, t: Fe) -> Fe {
        let mut acc = Fe::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = ctx.mul(acc, t) + c;
        }
        ctx.mul(acc, t)
    }

    pub fn tabulate(&self, ctx: &FieldCtx) -> EvalTable {
        EvalTable {
            values: ctx.elements().map(|t| self.evaluate(ctx, t)).collect(),
        }
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Fe) -> OPoly {
        OPoly {
            coeffs: self.coeffs.iter().map(|&a| ctx.mul(a, c)).collect(),
        }
    }

    pub fn has_only_even_terms(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|c| c.is_zero())
    }

    /// Comma-separated hex coefficients for degrees 1..q-1.
    pub fn to_text(&self) -> String {
        self.coeffs
            .iter()
            .map(|c| format!("{c:x}"))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn from_text(ctx: &FieldCtx, s: &str) -> Result<Self> {
        let coeffs = s
            .trim()
            .split(',')
            .map(|c| ctx.parse(c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(ctx, coeffs)
    }
}

impl fmt::Display for OPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if *c != Fe::ONE {
                write!(f, "{c:x}*")?;
            }
            write!(f, "t^{}", i + 1)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Lagrange interpolation of a table with f(0) = 0 to the unique polynomial of
/// degree <= q-1.
pub fn interpolate(ctx: &FieldCtx, table: &EvalTable) -> Result<OPoly> {
    if table.q() != ctx.q() || table.get(Fe::ZERO) != Fe::ZERO {
        return Err(contract("interpolation needs a full table with f(0) = 0"));
    }
    let n = ctx.q() - 1;
    // log f(g^k), or None where f(g^k) = 0
    let logs: Vec<Option<usize>> = (0..n)
        .map(|k| {
            let v = table.get(ctx.exp(k));
            (!v.is_zero()).then(|| ctx.log(v))
        })
        .collect();
    let mut coeffs = vec![Fe::ZERO; n];
    for (i, slot) in coeffs.iter_mut().enumerate() {
        let i = i + 1;
        // a^(-i) = g^(k·(n-i)) for a = g^k
        let step = (n - i) % n;
        let mut off = 0usize;
        let mut acc = Fe::ZERO;
        for lf in &logs {
            if let Some(l) = lf {
                acc += ctx.exp(l + off);
            }
            off += step;
            if off >= n {
                off -= n;
            }
        }
        *slot = acc;
    }
    Ok(OPoly { coeffs })
}

/// Bitset of seen encodings reused across passes.
struct Seen {
    words: Vec<u64>,
}

impl Seen {
    fn new(q: usize) -> Self {
        Seen {
            words: vec![0; q.div_ceil(64)],
        }
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Marks `v` and reports whether it was already marked.
    #[inline]
    fn insert(&mut self, v: Fe) -> bool {
        let (w, b) = (v.index() >> 6, v.index() & 63);
        let bit = 1u64 << b;
        let was = self.words[w] & bit != 0;
        self.words[w] |= bit;
        was
    }
}

pub fn is_permutation(table: &EvalTable) -> bool {
    let mut seen = Seen::new(table.q());
    table.values.iter().all(|&v| !seen.insert(v))
}

/// True iff f is a permutation and every difference quotient
/// Δ_{f,s}(x) = (f(x+s) + f(s))/x, Δ_{f,s}(0) = 0, is a permutation.
///
/// This is the innermost loop of the herd search; it exits on the first
/// repeated value.
pub fn is_opermutation(ctx: &FieldCtx, table: &EvalTable) -> bool {
    let q = ctx.q();
    if table.q() != q || table.get(Fe::ZERO) != Fe::ZERO {
        return false;
    }
    if !is_permutation(table) {
        return false;
    }
    let vals = &table.values;
    let mut seen = Seen::new(q);
    // With tables, multiply by x^{-1} through the row of x^{-1}.
    let inv_rows: Option<Vec<&[u16]>> = (1..q)
        .map(|x| ctx.mul_row(ctx.inv(Fe(x as u16))))
        .collect();
    for s in 0..q {
        seen.clear();
        let fs = vals[s];
        let ok = match &inv_rows {
            Some(rows) => (1..q).all(|x| {
                let num = vals[x ^ s] + fs;
                !seen.insert(Fe(rows[x - 1][num.index()]))
            }),
            None => (1..q).all(|x| {
                let num = vals[x ^ s] + fs;
                !seen.insert(ctx.div(num, Fe(x as u16)))
            }),
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Scales an o-permutation to the o-polynomial (1/f(1))·f.
pub fn to_opolynomial(ctx: &FieldCtx, f: &OPoly) -> Result<OPoly> {
    let f1 = f.evaluate(ctx, Fe::ONE);
    if f1.is_zero() {
        return Err(contract("f(1) = 0, not an o-permutation"));
    }
    Ok(f.scale(ctx, ctx.inv(f1)))
}

/// D(f) = {(1, t, f(t))} ∪ {(0, 1, 0)}.
pub fn oval_points(ctx: &FieldCtx, f: &EvalTable) -> PointSet {
    let mut pts: Vec<ProjPoint> = ctx
        .elements()
        .map(|t| ProjPoint::new_normalized([Fe::ONE, t, f.get(t)]))
        .collect();
    pts.push(ProjPoint::new_normalized([Fe::ZERO, Fe::ONE, Fe::ZERO]));
    PointSet::new(pts, SetRole::Oval)
}

/// Bit-exact packed storage of o-polynomials with only even-degree terms.
///
/// Coefficients of t^2, t^4, ..., t^(q-2) are written in order, e bits each,
/// least significant bit first; global bit b lives in byte b/8 at bit b%8.
/// Unused high bits of the last byte are zero. For q = 64 this is 31·6 = 186
/// bits in 24 bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PackedCodec {
    e: u32,
    q: usize,
}

impl PackedCodec {
    pub fn new(ctx: &FieldCtx) -> Self {
        assert!(ctx.q() >= 4, "packed form needs q >= 4");
        PackedCodec {
            e: ctx.e(),
            q: ctx.q(),
        }
    }

    pub fn coeff_count(&self) -> usize {
        self.q / 2 - 1
    }

    pub fn record_len(&self) -> usize {
        (self.coeff_count() * self.e as usize).div_ceil(8)
    }

    /// Fails if f has an odd-degree term or degree above q-2.
    pub fn pack_into(&self, f: &OPoly, out: &mut [u8]) -> Result<()> {
        debug_assert_eq!(out.len(), self.record_len());
        if !f.has_only_even_terms() || f.coeff(self.q - 1) != Fe::ZERO {
            return Err(contract(format!(
                "o-polynomial with odd-degree terms cannot be packed: {f}"
            )));
        }
        out.iter_mut().for_each(|b| *b = 0);
        let e = self.e as usize;
        for j in 1..=self.coeff_count() {
            let c = f.coeff(2 * j).0 as u32;
            for k in 0..e {
                if c >> k & 1 == 1 {
                    let bit = (j - 1) * e + k;
                    out[bit / 8] |= 1 << (bit % 8);
                }
            }
        }
        Ok(())
    }

    pub fn pack(&self, f: &OPoly) -> Result<Vec<u8>> {
        let mut out = vec![0; self.record_len()];
        self.pack_into(f, &mut out)?;
        Ok(out)
    }

    pub fn unpack(&self, rec: &[u8]) -> OPoly {
        debug_assert_eq!(rec.len(), self.record_len());
        let e = self.e as usize;
        let mut coeffs = vec![Fe::ZERO; self.q - 1];
        for j in 1..=self.coeff_count() {
            let mut c = 0u16;
            for k in 0..e {
                let bit = (j - 1) * e + k;
                if rec[bit / 8] >> (bit % 8) & 1 == 1 {
                    c |= 1 << k;
                }
            }
            coeffs[2 * j - 1] = Fe(c);
        }
        OPoly { coeffs }
    }
}
