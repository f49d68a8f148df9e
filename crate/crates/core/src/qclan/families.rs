//! The classical, Subiaco and Adelaide q-clans in normalized form.

use super::{is_qclan, QClan};
use crate::error::{Error, Result};
use crate::gf2e::{ExtElem, Fe, FieldCtx, QuadExt};
use crate::opoly::EvalTable;

fn table(ctx: &FieldCtx, f: impl Fn(Fe) -> Fe) -> Result<EvalTable> {
    EvalTable::from_fn(ctx, f)
}

/// (t^(1/2), t^(1/2); 0, κ·t^(1/2)); κ defaults to the smallest trace-1 element.
pub fn classical_qclan(ctx: &FieldCtx, kappa: Option<Fe>) -> Result<QClan> {
    let kappa = kappa.unwrap_or_else(|| ctx.trace_one_smallest());
    let half = table(ctx, |t| ctx.sqrt(t))?;
    QClan::normalized(ctx, &half, &half, kappa)
}

/// δ² + δ + 1 ≠ 0 and Tr(1/δ) = 1.
pub fn subiaco_delta_valid(ctx: &FieldCtx, delta: Fe) -> bool {
    !delta.is_zero()
        && ctx.square(delta) + delta + Fe::ONE != Fe::ZERO
        && ctx.trace(ctx.inv(delta)) == 1
}

pub fn subiaco_qclan(ctx: &FieldCtx, delta: Fe) -> Result<QClan> {
    if !subiaco_delta_valid(ctx, delta) {
        return Err(Error::Parameter(format!("delta {delta:x} is not a Subiaco parameter")));
    }
    let f = ctx;
    let d = delta;
    let d2 = f.square(d);
    let p = |k: u64| f.pow(d, k);
    let w = d2 + d + Fe::ONE;
    // δ² + δ⁵ + δ^(1/2)
    let n = d2 + p(5) + f.sqrt(d);
    if n.is_zero() {
        return Err(Error::Parameter(format!("delta {delta:x} makes kappa vanish")));
    }
    let kappa = f.div(n, f.mul(d, w));
    let den = |t: Fe| f.square(f.square(t) + f.mul(d, t) + Fe::ONE);
    let f0 = table(f, |t| {
        let t2 = f.square(t);
        let t3 = f.mul(t2, t);
        let t4 = f.square(t2);
        let num = f.mul(d2, t4 + t) + f.mul(f.mul(d2, w), t3 + t2);
        f.div(num, den(t)) + f.sqrt(t)
    })?;
    let finf = table(f, |t| {
        let t2 = f.square(t);
        let t3 = f.mul(t2, t);
        let t4 = f.square(t2);
        let num = f.mul(p(4), t4)
            + f.mul(f.mul(p(3), Fe::ONE + d2 + p(4)), t3)
            + f.mul(f.mul(p(3), Fe::ONE + d2), t);
        f.div(num, f.mul(n, den(t))) + f.mul(f.div(f.sqrt(d), n), f.sqrt(t))
    })?;
    QClan::normalized(f, &f0, &finf, kappa)
}

/// The first δ, by encoding, for which the Subiaco clan is a q-clan.
pub fn subiaco_auto(ctx: &FieldCtx) -> Result<(Fe, QClan)> {
    for delta in ctx.nonzero() {
        if !subiaco_delta_valid(ctx, delta) {
            continue;
        }
        if let Ok(c) = subiaco_qclan(ctx, delta) {
            if is_qclan(ctx, &c) {
                return Ok((delta, c));
            }
        }
    }
    Err(Error::Parameter(format!("no Subiaco parameter gives a q-clan for q = {}", ctx.q())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdelaideParams {
    pub beta: ExtElem,
    pub m: u64,
}

/// The Adelaide clan for q = 2^e, e > 2 even, β^(q+1) = 1, β ≠ 1 and
/// m ≡ ±(q-1)/3 (mod q+1), with T(x) = x + x^q.
///
/// The κ·f∞ term is read with denominator T(β)·T(β^m)·(t + T(β)t^(1/2) + 1)^(m-1).
pub fn adelaide_qclan(ctx: &FieldCtx, params: AdelaideParams) -> Result<QClan> {
    let e = ctx.e();
    let q = ctx.q() as u64;
    if e <= 2 || e % 2 != 0 {
        return Err(Error::Parameter(format!("Adelaide clans need e > 2 even, got e = {e}")));
    }
    let ext = QuadExt::new(ctx);
    let AdelaideParams { beta, m } = params;
    if beta == ExtElem::ONE || ext.norm(beta) != Fe::ONE {
        return Err(Error::Parameter("beta must satisfy beta^(q+1) = 1, beta != 1".into()));
    }
    let third = (q - 1) / 3;
    let mm = m % (q + 1);
    if mm != third && mm != q + 1 - third {
        return Err(Error::Parameter(format!("m = {m} is not ±(q-1)/3 mod q+1")));
    }
    let f = ctx;
    let tr = |x: ExtElem| ext.rel_trace(x);
    let tb = tr(beta);
    let tbm = tr(ext.pow(beta, m));
    if tb.is_zero() || tbm.is_zero() {
        return Err(Error::Parameter("T(beta) or T(beta^m) vanishes".into()));
    }
    let base = |t: Fe| t + f.mul(tb, f.sqrt(t)) + Fe::ONE;
    if f.elements().any(|t| base(t).is_zero()) {
        return Err(Error::Parameter("t + T(beta)t^(1/2) + 1 has a root".into()));
    }
    let kappa = f.div(tbm, tb) + f.inv(tbm) + Fe::ONE;
    if kappa.is_zero() {
        return Err(Error::Parameter("kappa vanishes".into()));
    }
    let beta_q = ext.conj(beta);
    let beta2 = ext.mul(beta, beta);
    let f0 = table(f, |t| {
        let bt = ext.add(ext.mul(beta, ExtElem::base(t)), beta_q);
        let den = f.mul(tb, f.pow(base(t), m - 1));
        f.div(f.mul(tbm, t + Fe::ONE), tb) + f.div(tr(ext.pow(bt, m)), den) + f.sqrt(t)
    })?;
    let kinv = f.inv(kappa);
    let finf = table(f, |t| {
        let bt = ext.add(ext.mul(beta2, ExtElem::base(t)), ExtElem::ONE);
        let den = f.mul(f.mul(tb, tbm), f.pow(base(t), m - 1));
        let kf = f.mul(f.div(tbm, tb), t) + f.div(tr(ext.pow(bt, m)), den) + f.div(f.sqrt(t), tbm);
        f.mul(kinv, kf)
    })?;
    QClan::normalized(f, &f0, &finf, kappa)
}

/// m = (q-1)/3 and the first β of norm 1, by encoding, giving a q-clan.
pub fn adelaide_auto(ctx: &FieldCtx) -> Result<(AdelaideParams, QClan)> {
    let ext = QuadExt::new(ctx);
    let m = (ctx.q() as u64 - 1) / 3;
    for beta in ext.norm_one() {
        if beta == ExtElem::ONE {
            continue;
        }
        let params = AdelaideParams { beta, m };
        match adelaide_qclan(ctx, params) {
            Ok(c) if is_qclan(ctx, &c) => return Ok((params, c)),
            Err(Error::Parameter(msg)) if msg.starts_with("Adelaide clans need") => {
                return Err(Error::Parameter(msg))
            }
            _ => {}
        }
    }
    Err(Error::Parameter(format!("no Adelaide parameter gives a q-clan for q = {}", ctx.q())))
}
