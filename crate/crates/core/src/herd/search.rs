//! The two-stage search for herds over a class store.
//!
//! With f0 fixed among the class representatives and f∞ running over every
//! stored o-polynomial, stage 1 keeps the pairs whose member at s = κ^-2 is an
//! o-permutation, and stage 2 keeps those where every member is.
//!
//! At s = κ^-2 the member is f0 + κ^-1·(f∞ + t^(1/2)), which is GF(2)-linear
//! in the bits of the packed record. The scanner therefore precomputes, for
//! each record byte position and byte value, the table contributed by those
//! bits, and evaluates a record with one XOR per byte.

use std::ops::Range;

use rayon::prelude::*;

use super::is_herd;
use crate::error::{Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::magic::ClassStore;
use crate::opoly::{EvalTable, PackedCodec};

/// A pair (f0 = reps[f0], f∞ = store record `record`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScanHit {
    pub f0: usize,
    pub record: usize,
}

pub struct StoreScanner {
    q: usize,
    words: usize,
    record_len: usize,
    /// [byte position][byte value] -> packed table, `words` u64 each
    tabs: Vec<u64>,
    base: Vec<u64>,
    reps: Vec<Vec<u64>>,
    /// mul_inv[x][y] = y / x for x ≠ 0
    div: Vec<u8>,
}

fn pack_bytes(vals: impl Iterator<Item = u8>, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (i, v) in vals.enumerate() {
        out[i / 8] |= (v as u64) << (8 * (i % 8));
    }
    out
}

impl StoreScanner {
    pub fn new(ctx: &FieldCtx, codec: PackedCodec, kappa: Fe, reps: &[EvalTable]) -> Result<Self> {
        let q = ctx.q();
        if !(4..=256).contains(&q) {
            return Err(Error::Refused(format!("store scanning needs 4 <= q <= 256, got {q}")));
        }
        let words = q.div_ceil(8);
        let ki = ctx.inv(kappa);
        let e = ctx.e() as usize;
        let record_len = codec.record_len();
        // basis[b] = table of κ^-1 · 2^k · t^(2j) for global bit b = (j-1)e + k
        let basis: Vec<Vec<u64>> = (0..record_len * 8)
            .map(|b| {
                let (j, k) = (b / e + 1, b % e);
                if j > codec.coeff_count() {
                    return vec![0; words];
                }
                let c = ctx.mul(ki, Fe(1 << k));
                pack_bytes(
                    ctx.elements().map(|t| ctx.mul(c, ctx.pow(t, 2 * j as u64)).0 as u8),
                    words,
                )
            })
            .collect();
        let mut tabs = vec![0u64; record_len * 256 * words];
        for p in 0..record_len {
            for v in 1..256usize {
                let low = v.trailing_zeros() as usize;
                let prev = v & (v - 1);
                for w in 0..words {
                    tabs[(p * 256 + v) * words + w] =
                        tabs[(p * 256 + prev) * words + w] ^ basis[p * 8 + low][w];
                }
            }
        }
        let base = pack_bytes(ctx.elements().map(|t| ctx.mul(ki, ctx.sqrt(t)).0 as u8), words);
        let reps = reps
            .iter()
            .map(|r| pack_bytes(r.values().iter().map(|v| v.0 as u8), words))
            .collect();
        let mut div = vec![0u8; q * q];
        for x in 1..q {
            let xi = ctx.inv(Fe(x as u16));
            for y in 0..q {
                div[x * q + y] = ctx.mul(Fe(y as u16), xi).0 as u8;
            }
        }
        Ok(StoreScanner { q, words, record_len, tabs, base, reps, div })
    }

    /// κ^-1·(f∞ + t^(1/2)) for the packed f∞.
    #[inline]
    fn shifted(&self, rec: &[u8], out: &mut [u64]) {
        out.copy_from_slice(&self.base);
        for (p, &v) in rec.iter().enumerate() {
            let t = &self.tabs[(p * 256 + v as usize) * self.words..][..self.words];
            for (o, x) in out.iter_mut().zip(t) {
                *o ^= x;
            }
        }
    }

    /// Indices of representatives f0 for which the s = κ^-2 member of
    /// (f0, f∞) is an o-permutation.
    pub fn passing(&self, rec: &[u8], hits: &mut Vec<usize>) {
        debug_assert_eq!(rec.len(), self.record_len);
        let mut h = vec![0u64; self.words];
        self.shifted(rec, &mut h);
        let mut g = vec![0u64; self.words];
        let mut bytes = vec![0u8; self.words * 8];
        for (i, r) in self.reps.iter().enumerate() {
            for w in 0..self.words {
                g[w] = h[w] ^ r[w];
                bytes[w * 8..w * 8 + 8].copy_from_slice(&g[w].to_le_bytes());
            }
            if self.is_opermutation(&bytes[..self.q]) {
                hits.push(i);
            }
        }
    }

    fn is_opermutation(&self, f: &[u8]) -> bool {
        let q = self.q;
        let mut seen = [0u64; 4];
        let mark = |seen: &mut [u64; 4], v: u8| {
            let (w, b) = ((v >> 6) as usize, v & 63);
            let was = seen[w] >> b & 1;
            seen[w] |= 1 << b;
            was == 1
        };
        for &v in f {
            if mark(&mut seen, v) {
                return false;
            }
        }
        for s in 0..q {
            seen = [0; 4];
            let fs = f[s];
            for x in 1..q {
                let num = f[x ^ s] ^ fs;
                if mark(&mut seen, self.div[x * q + num as usize]) {
                    return false;
                }
            }
        }
        true
    }
}

/// Stage 1 over store records in `range`, in (record, f0) order.
pub fn quick_filter_scan(scanner: &StoreScanner, store: &ClassStore, range: Range<usize>) -> Vec<ScanHit> {
    let block = 4096;
    let start = range.start;
    let blocks = range.len().div_ceil(block);
    let per_block: Vec<Vec<ScanHit>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut out = Vec::new();
            let mut hits = Vec::new();
            let lo = start + b * block;
            let hi = range.end.min(lo + block);
            for r in lo..hi {
                hits.clear();
                scanner.passing(store.record(r), &mut hits);
                out.extend(hits.iter().map(|&f0| ScanHit { f0, record: r }));
            }
            out
        })
        .collect();
    per_block.into_iter().flatten().collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchReport {
    pub kappa: Fe,
    /// Pairs passing the quick filter, sorted by (f0, record).
    pub stage1: Vec<ScanHit>,
    /// Pairs whose every member is an o-permutation.
    pub stage2: Vec<ScanHit>,
}

impl SearchReport {
    /// (stage-1 count, stage-2 count) for each representative.
    pub fn per_f0(&self, reps: usize) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); reps];
        for h in &self.stage1 {
            out[h.f0].0 += 1;
        }
        for h in &self.stage2 {
            out[h.f0].1 += 1;
        }
        out
    }
}

/// Stage 2 on a list of stage-1 hits.
pub fn full_filter(
    ctx: &FieldCtx,
    reps: &[EvalTable],
    store: &ClassStore,
    kappa: Fe,
    stage1: &[ScanHit],
) -> Result<Vec<ScanHit>> {
    let mut out = Vec::new();
    for &h in stage1 {
        let finf = store.poly(h.record).tabulate(ctx);
        if is_herd(ctx, &reps[h.f0], &finf, kappa)? {
            out.push(h);
        }
    }
    Ok(out)
}

/// Both stages over the whole store.
pub fn herd_search(ctx: &FieldCtx, reps: &[EvalTable], store: &ClassStore, kappa: Fe) -> Result<SearchReport> {
    let scanner = StoreScanner::new(ctx, store.codec(), kappa, reps)?;
    let mut stage1 = quick_filter_scan(&scanner, store, 0..store.len());
    stage1.sort();
    let stage2 = full_filter(ctx, reps, store, kappa, &stage1)?;
    Ok(SearchReport { kappa, stage1, stage2 })
}
