//! The magic action of PΓL(2, q) on functions with f(0) = 0.
//!
//! For ψ = (A, γ) with A = (a b; c d),
//!
//! ψf(x) = |A|^(-1/2) [ (bx+d)·f^γ((ax+c)/(bx+d)) + b·x·f^γ(a/b) + d·f^γ(c/d) ]
//!
//! where f^γ(y) = f(y^(γ^-1))^γ. A term whose multiplier (bx+d, bx or d)
//! vanishes is dropped before its quotient is formed, which makes the formula
//! total. The action maps o-permutations to o-permutations, and two ovals
//! D(f), D(g) are projectively equivalent exactly when some ψf is a multiple
//! of g.

mod store;

use std::fmt;

use rayon::prelude::*;

use crate::error::{contract, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::opoly::{interpolate, EvalTable, OPoly};

pub use store::{magic_orbit_union, ClassStore, StoreBuilder};

pub type Mat2 = [[Fe; 2]; 2];

/// An element of PΓL(2, q): the matrix (a b; c d) and a Frobenius exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MagicMap {
    pub m: Mat2,
    pub gamma: u32,
}

impl fmt::Display for MagicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.m;
        write!(f, "[{a:x} {b:x}; {c:x} {d:x}]^{}", self.gamma)
    }
}

fn det2(ctx: &FieldCtx, m: &Mat2) -> Fe {
    ctx.mul(m[0][0], m[1][1]) + ctx.mul(m[0][1], m[1][0])
}

fn mul2(ctx: &FieldCtx, x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| ctx.mul(x[i][0], y[0][j]) + ctx.mul(x[i][1], y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn normalize2(ctx: &FieldCtx, m: Mat2) -> Mat2 {
    let lead = m.iter().flatten().copied().find(|x| !x.is_zero()).expect("nonzero matrix");
    let s = ctx.inv(lead);
    m.map(|r| r.map(|x| ctx.mul(x, s)))
}

impl MagicMap {
    pub fn identity() -> Self {
        MagicMap {
            m: [[Fe::ONE, Fe::ZERO], [Fe::ZERO, Fe::ONE]],
            gamma: 0,
        }
    }

    /// Normalizes the first nonzero entry to 1; rejects singular matrices.
    pub fn new(ctx: &FieldCtx, m: Mat2, gamma: u32) -> Result<Self> {
        if det2(ctx, &m).is_zero() {
            return Err(contract("singular matrix in magic map"));
        }
        Ok(MagicMap {
            m: normalize2(ctx, m),
            gamma: gamma % ctx.e(),
        })
    }

    /// The map with ψ(φ f) = (ψ.compose(φ)) f.
    ///
    /// (A, γ)(B, δ) = (A·B^γ, γ+δ): the inner matrix picks up the outer
    /// automorphism.
    pub fn compose(&self, ctx: &FieldCtx, inner: &MagicMap) -> MagicMap {
        let bg = inner.m.map(|r| r.map(|x| ctx.frobenius(x, self.gamma)));
        MagicMap {
            m: normalize2(ctx, mul2(ctx, &self.m, &bg)),
            gamma: (self.gamma + inner.gamma) % ctx.e(),
        }
    }

    pub fn apply(&self, ctx: &FieldCtx, f: &EvalTable) -> EvalTable {
        MagicPlan::new(ctx, self).apply(f)
    }
}

/// Number of elements of PΓL(2, q).
pub fn pgaml2_order(ctx: &FieldCtx) -> usize {
    let q = ctx.q();
    q * (q * q - 1) * ctx.e() as usize
}

/// The k-th element of PΓL(2, q) in the fixed enumeration order: Frobenius
/// exponent outermost, then normalized matrices in lexicographic order of
/// their entries (a, b, c, d).
pub fn pgaml2_element(ctx: &FieldCtx, k: usize) -> MagicMap {
    let q = ctx.q();
    let per_gamma = q * (q * q - 1);
    let gamma = (k / per_gamma) as u32;
    let m = pgl2_matrix(ctx, k % per_gamma);
    MagicMap { m, gamma }
}

/// Normalized matrices of PGL(2, q): (1 b; c d) with d ≠ bc (q^3 - q^2 of
/// them) followed by (0 1; c d) with c ≠ 0 (q^2 - q of them).
fn pgl2_matrix(ctx: &FieldCtx, k: usize) -> Mat2 {
    let q = ctx.q();
    let first = q * q * (q - 1);
    let f = |v: usize| Fe(v as u16);
    if k < first {
        let b = k / (q * (q - 1));
        let r = k % (q * (q - 1));
        let c = r / (q - 1);
        let bc = ctx.mul(f(b), f(c));
        // d ranges over GF(q) minus {bc}, in increasing order
        let mut d = r % (q - 1);
        if d >= bc.index() {
            d += 1;
        }
        [[Fe::ONE, f(b)], [f(c), f(d)]]
    } else {
        let r = k - first;
        let c = 1 + r / q;
        let d = r % q;
        [[Fe::ZERO, Fe::ONE], [f(c), f(d)]]
    }
}

/// Every element of PΓL(2, q), in enumeration order.
pub fn pgaml2_elements(ctx: &FieldCtx) -> impl Iterator<Item = MagicMap> + '_ {
    (0..pgaml2_order(ctx)).map(move |k| pgaml2_element(ctx, k))
}

/// Precomputed data for applying one map to many tables.
pub struct MagicPlan<'a> {
    ctx: &'a FieldCtx,
    /// f is read at `arg[x]` (already pulled back through γ^-1), or not at all.
    arg: Vec<Option<u16>>,
    mult: Vec<Fe>,
    /// Where f is read for the b·x term, or None when b = 0.
    bx_arg: Option<u16>,
    b: Fe,
    d_arg: Option<u16>,
    d: Fe,
    frob: Vec<u16>,
    scale: Fe,
}

impl<'a> MagicPlan<'a> {
    pub fn new(ctx: &'a FieldCtx, psi: &MagicMap) -> Self {
        let q = ctx.q();
        let [[a, b], [c, d]] = psi.m;
        let g = psi.gamma;
        let pull = |y: Fe| ctx.frobenius_inv(y, g).0;
        let mut arg = Vec::with_capacity(q);
        let mut mult = Vec::with_capacity(q);
        for x in ctx.elements() {
            let den = ctx.mul(b, x) + d;
            mult.push(den);
            arg.push((!den.is_zero()).then(|| pull(ctx.div(ctx.mul(a, x) + c, den))));
        }
        let bx_arg = (!b.is_zero()).then(|| pull(ctx.div(a, b)));
        let d_arg = (!d.is_zero()).then(|| pull(ctx.div(c, d)));
        let scale = ctx.sqrt(ctx.inv(det2(ctx, &psi.m)));
        let frob = if g == 0 {
            Vec::new()
        } else {
            ctx.elements().map(|y| ctx.frobenius(y, g).0).collect()
        };
        MagicPlan { ctx, arg, mult, bx_arg, b, d_arg, d, frob, scale }
    }

    /// Writes ψf into `out` (length q).
    pub fn apply_into(&self, f: &[Fe], out: &mut [Fe]) {
        let ctx = self.ctx;
        debug_assert_eq!(f.len(), ctx.q());
        let fg = |i: u16| {
            let v = f[i as usize];
            if self.frob.is_empty() {
                v
            } else {
                Fe(self.frob[v.index()])
            }
        };
        let bterm = self.bx_arg.map_or(Fe::ZERO, |i| ctx.mul(self.b, fg(i)));
        let dterm = self.d_arg.map_or(Fe::ZERO, |i| ctx.mul(self.d, fg(i)));
        for (x, o) in out.iter_mut().enumerate() {
            let mut v = dterm + ctx.mul(bterm, Fe(x as u16));
            if let Some(i) = self.arg[x] {
                v += ctx.mul(self.mult[x], fg(i));
            }
            *o = ctx.mul(self.scale, v);
        }
    }

    pub fn apply(&self, f: &EvalTable) -> EvalTable {
        let mut out = vec![Fe::ZERO; self.ctx.q()];
        self.apply_into(f.values(), &mut out);
        EvalTable::from_vec_unchecked(out)
    }
}

/// The projective class ⟨f⟩, represented by its unique o-polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjClass(pub OPoly);

/// Scales f to f(1) = 1 and interpolates.
pub fn canonical_class(ctx: &FieldCtx, f: &EvalTable) -> Result<ProjClass> {
    Ok(ProjClass(interpolate(ctx, &f.normalized(ctx)?)?))
}

/// Looks for ψ with ψf ∈ ⟨g⟩ by scanning all of PΓL(2, q).
pub fn projective_equiv_via_magic(
    ctx: &FieldCtx,
    f: &EvalTable,
    g: &EvalTable,
) -> Result<Option<MagicMap>> {
    let target = g.normalized(ctx)?;
    let found = (0..pgaml2_order(ctx)).into_par_iter().find_map_first(|k| {
        let psi = pgaml2_element(ctx, k);
        let img = psi.apply(ctx, f);
        match img.normalized(ctx) {
            Ok(t) if t == target => Some(psi),
            _ => None,
        }
    });
    Ok(found)
}

/// Whether ψ₁(ψ₂ f) equals (ψ₁ ∘ ψ₂) f pointwise.
pub fn magic_compose_check(ctx: &FieldCtx, p1: &MagicMap, p2: &MagicMap, f: &EvalTable) -> bool {
    let lhs = p1.apply(ctx, &p2.apply(ctx, f));
    let rhs = p1.compose(ctx, p2).apply(ctx, f);
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opoly::is_opermutation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_map(ctx: &FieldCtx, rng: &mut ChaCha8Rng) -> MagicMap {
        pgaml2_element(ctx, rng.gen_range(0..pgaml2_order(ctx)))
    }

    #[test]
    fn enumeration_is_a_bijection_onto_pgaml2() {
        let f = FieldCtx::new(3).unwrap();
        let all: Vec<MagicMap> = pgaml2_elements(&f).collect();
        assert_eq!(all.len(), 8 * 63 * 3);
        let mut seen = std::collections::HashSet::new();
        for p in &all {
            assert_eq!(MagicMap::new(&f, p.m, p.gamma).unwrap(), *p);
            assert!(seen.insert(*p));
        }
    }

    #[test]
    fn identity_fixes_everything() {
        let f = FieldCtx::new(4).unwrap();
        let t = EvalTable::monomial(&f, 6);
        assert_eq!(MagicMap::identity().apply(&f, &t), t);
    }

    #[test]
    fn action_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for e in [2, 3, 4] {
            let f = FieldCtx::new(e).unwrap();
            for _ in 0..200 {
                let vals = f
                    .elements()
                    .map(|t| if t.is_zero() { t } else { Fe(rng.gen_range(0..f.q()) as u16) })
                    .collect();
                let table = EvalTable::new(vals).unwrap();
                let (a, b) = (random_map(&f, &mut rng), random_map(&f, &mut rng));
                assert!(magic_compose_check(&f, &a, &b, &table), "q={} {a} {b}", f.q());
            }
        }
    }

    #[test]
    fn preserves_opermutations_at_q8() {
        let f = FieldCtx::new(3).unwrap();
        let conic = EvalTable::monomial(&f, 2);
        for psi in pgaml2_elements(&f) {
            let img = psi.apply(&f, &conic);
            assert_eq!(img.get(Fe::ZERO), Fe::ZERO);
            assert!(is_opermutation(&f, &img), "{psi}");
        }
    }

    #[test]
    fn canonical_class_of_scaled_monomial() {
        let f = FieldCtx::new(3).unwrap();
        let c = canonical_class(&f, &EvalTable::monomial(&f, 2).scale(&f, Fe(5))).unwrap();
        assert_eq!(c.0, OPoly::monomial(&f, 2));
    }
}
