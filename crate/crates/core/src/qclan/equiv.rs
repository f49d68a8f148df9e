//! Exhaustive q-clan equivalence for tiny q.
//!
//! C and C' are equivalent when A'_{π(t)} ≡ λ·B·A_t^σ·Bᵀ + M for all t.
//! After moving both clans to A_0 = A'_0 = 0, the zero class of C' must be
//! hit by some t0, which forces M ≡ λ·B·A_{t0}^σ·Bᵀ; so M only ranges over
//! the q images instead of all q^3 classes.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{ClanEntry, Mat2, QClan};
use crate::error::{Error, Result};
use crate::gf2e::{Fe, FieldCtx};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivWitness {
    pub lambda: Fe,
    pub b: Mat2,
    pub sigma: u32,
    pub m: ClanEntry,
    /// π[t] = t'.
    pub pi: Vec<Fe>,
}

fn mul2(ctx: &FieldCtx, x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| ctx.mul(x[i][0], y[0][j]) + ctx.mul(x[i][1], y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// λ·B·A_t^σ·Bᵀ + M for every t, in canonical form.
pub fn apply_transform(
    ctx: &FieldCtx,
    clan: &QClan,
    lambda: Fe,
    b: &Mat2,
    sigma: u32,
    m: ClanEntry,
) -> Vec<ClanEntry> {
    let bt = [[b[0][0], b[1][0]], [b[0][1], b[1][1]]];
    clan.entries()
        .iter()
        .map(|e| {
            let a = e.matrix().map(|r| r.map(|x| ctx.frobenius(x, sigma)));
            let p = mul2(ctx, &mul2(ctx, b, &a), &bt);
            let p = p.map(|r| r.map(|x| ctx.mul(lambda, x)));
            ClanEntry::from_matrix(&p) + m
        })
        .collect()
}

fn gl2(ctx: &FieldCtx) -> Vec<Mat2> {
    let q = ctx.q() as u32;
    (0..q.pow(4))
        .map(|k| {
            let d = |i: u32| Fe(((k / q.pow(i)) % q) as u16);
            [[d(3), d(2)], [d(1), d(0)]]
        })
        .filter(|m| !(ctx.mul(m[0][0], m[1][1]) + ctx.mul(m[0][1], m[1][0])).is_zero())
        .collect()
}

/// A witness that `c2` is the image of `c1`, or None. Refuses q > 8.
///
/// The scan order is λ, then B in lexicographic entry order, then σ, then t0,
/// and the first hit in that order is returned.
pub fn qclan_equiv_bruteforce(ctx: &FieldCtx, c1: &QClan, c2: &QClan) -> Result<Option<EquivWitness>> {
    if ctx.q() > 8 {
        return Err(Error::Refused(format!(
            "brute-force clan equivalence is limited to q <= 8, got {}",
            ctx.q()
        )));
    }
    let a = c1.with_zero_origin();
    let b = c2.with_zero_origin();
    let target: HashMap<ClanEntry, Fe> = b
        .entries()
        .iter()
        .enumerate()
        .map(|(t, &e)| (e, Fe(t as u16)))
        .collect();
    if target.len() != ctx.q() {
        return Ok(None);
    }
    let mats = gl2(ctx);
    let lambdas: Vec<Fe> = ctx.nonzero().collect();
    let grid: Vec<(Fe, usize)> = lambdas
        .iter()
        .flat_map(|&l| (0..mats.len()).map(move |i| (l, i)))
        .collect();
    let found = grid.par_iter().find_map_first(|&(lambda, bi)| {
        let bm = &mats[bi];
        for sigma in 0..ctx.e() {
            let img = apply_transform(ctx, &a, lambda, bm, sigma, ClanEntry::default());
            for &m in &img {
                let pi: Option<Vec<Fe>> = img.iter().map(|&x| target.get(&(x + m)).copied()).collect();
                if let Some(pi) = pi {
                    let mut seen = pi.clone();
                    seen.sort();
                    seen.dedup();
                    if seen.len() == pi.len() {
                        return Some(EquivWitness { lambda, b: *bm, sigma, m, pi });
                    }
                }
            }
        }
        None
    });
    Ok(found)
}
