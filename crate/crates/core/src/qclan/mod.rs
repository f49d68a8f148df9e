//! q-clans, the flocks of the quadratic cone they describe, and the named
//! families.
//!
//! A 2×2 matrix (x y; w z) only matters up to the relation that keeps x, z
//! and y+w, so every class is stored as the triple (a, b, c) of its
//! upper-triangular representative (a b; 0 c).

mod equiv;
mod families;

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::opoly::EvalTable;

pub use equiv::{apply_transform, qclan_equiv_bruteforce, EquivWitness};
pub use families::{
    adelaide_auto, adelaide_qclan, classical_qclan, subiaco_auto, subiaco_delta_valid,
    subiaco_qclan, AdelaideParams,
};

pub type Mat2 = [[Fe; 2]; 2];

/// The class of (a b; 0 c).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClanEntry {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
}

impl ClanEntry {
    pub fn from_matrix(m: &Mat2) -> Self {
        ClanEntry {
            a: m[0][0],
            b: m[0][1] + m[1][0],
            c: m[1][1],
        }
    }

    pub fn matrix(&self) -> Mat2 {
        [[self.a, self.b], [Fe::ZERO, self.c]]
    }
}

impl std::ops::Add for ClanEntry {
    type Output = ClanEntry;
    fn add(self, o: ClanEntry) -> ClanEntry {
        ClanEntry {
            a: self.a + o.a,
            b: self.b + o.b,
            c: self.c + o.c,
        }
    }
}

/// A ≡ B iff x = x', z = z' and y + w = y' + w'.
pub fn matrix_equiv(a: &Mat2, b: &Mat2) -> bool {
    ClanEntry::from_matrix(a) == ClanEntry::from_matrix(b)
}

/// u·A·uᵀ for u = (u0, u1).
pub fn quad_form(ctx: &FieldCtx, m: &Mat2, u: [Fe; 2]) -> Fe {
    let e = ClanEntry::from_matrix(m);
    ctx.mul(e.a, ctx.square(u[0])) + ctx.mul(e.b, ctx.mul(u[0], u[1])) + ctx.mul(e.c, ctx.square(u[1]))
}

/// Anisotropy by evaluating the form on every nonzero vector.
pub fn is_anisotropic_bruteforce(ctx: &FieldCtx, m: &Mat2) -> bool {
    ctx.elements()
        .flat_map(|x| ctx.elements().map(move |y| [x, y]))
        .filter(|u| !(u[0].is_zero() && u[1].is_zero()))
        .all(|u| !quad_form(ctx, m, u).is_zero())
}

/// Anisotropy of a·x² + b·xz + c·z²: for b ≠ 0 it holds iff Tr(ac/b²) = 1;
/// for b = 0 the form is a square and always has a nontrivial zero.
pub fn is_anisotropic(ctx: &FieldCtx, m: &Mat2) -> bool {
    let e = ClanEntry::from_matrix(m);
    if e.b.is_zero() {
        return false;
    }
    ctx.trace(ctx.div(ctx.mul(e.a, e.c), ctx.square(e.b))) == 1
}

/// A set of q matrix classes indexed by t ∈ GF(q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QClan {
    entries: Vec<ClanEntry>,
    /// κ when the clan is in normalized form (f0(t), t^(1/2); 0, κ·f∞(t)).
    kappa: Option<Fe>,
}

impl QClan {
    pub fn new(ctx: &FieldCtx, entries: Vec<ClanEntry>) -> Result<Self> {
        if entries.len() != ctx.q() {
            return Err(Error::Format(format!("a q-clan needs {} entries", ctx.q())));
        }
        Ok(QClan { entries, kappa: None })
    }

    /// (f0(t), t^(1/2); 0, κ·f∞(t)).
    pub fn normalized(ctx: &FieldCtx, f0: &EvalTable, finf: &EvalTable, kappa: Fe) -> Result<Self> {
        if ctx.trace(kappa) != 1 {
            return Err(Error::Parameter(format!("kappa {kappa:x} has trace 0")));
        }
        let entries = ctx
            .elements()
            .map(|t| ClanEntry {
                a: f0.get(t),
                b: ctx.sqrt(t),
                c: ctx.mul(kappa, finf.get(t)),
            })
            .collect();
        Ok(QClan { entries, kappa: Some(kappa) })
    }

    pub fn entries(&self) -> &[ClanEntry] {
        &self.entries
    }

    pub fn entry(&self, t: Fe) -> ClanEntry {
        self.entries[t.index()]
    }

    pub fn kappa(&self) -> Option<Fe> {
        self.kappa
    }

    pub fn q(&self) -> usize {
        self.entries.len()
    }

    /// f0 and f∞ of a normalized clan.
    pub fn herd_generators(&self, ctx: &FieldCtx) -> Option<(EvalTable, EvalTable, Fe)> {
        let kappa = self.kappa?;
        let ki = ctx.inv(kappa);
        let f0 = EvalTable::new(self.entries.iter().map(|e| e.a).collect()).ok()?;
        let finf = EvalTable::new(self.entries.iter().map(|e| ctx.mul(ki, e.c)).collect()).ok()?;
        Some((f0, finf, kappa))
    }

    /// Translates so that A_0 = 0; the result is no longer marked normalized
    /// unless it already was.
    pub fn with_zero_origin(&self) -> QClan {
        let o = self.entries[0];
        if o == ClanEntry::default() {
            return self.clone();
        }
        QClan {
            entries: self.entries.iter().map(|&e| e + o).collect(),
            kappa: None,
        }
    }

    /// Header `q <q> normalized <0|1> kappa <hex>`, then one `t a b c` line per t.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        let (flag, k) = match self.kappa {
            Some(k) => (1, k),
            None => (0, Fe::ZERO),
        };
        writeln!(w, "q {} normalized {flag} kappa {k:x}", self.q())?;
        for (t, e) in self.entries.iter().enumerate() {
            writeln!(w, "{t:x} {:x} {:x} {:x}", e.a, e.b, e.c)?;
        }
        Ok(())
    }

    pub fn read_from(ctx: &FieldCtx, r: impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty q-clan file".into()))??;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 6 || h[0] != "q" || h[2] != "normalized" || h[4] != "kappa" {
            return Err(Error::Format(format!("bad q-clan header: {header}")));
        }
        if h[1].parse::<usize>().ok() != Some(ctx.q()) {
            return Err(Error::Format(format!("q-clan is for q = {}, field has q = {}", h[1], ctx.q())));
        }
        let kappa = ctx.parse(h[5])?;
        let mut entries = vec![None; ctx.q()];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let v: Vec<Fe> = line.split_whitespace().map(|s| ctx.parse(s)).collect::<Result<_>>()?;
            if v.len() != 4 {
                return Err(Error::Format(format!("bad q-clan line: {line}")));
            }
            let slot = &mut entries[v[0].index()];
            if slot.is_some() {
                return Err(Error::Format(format!("t = {:x} listed twice", v[0])));
            }
            *slot = Some(ClanEntry { a: v[1], b: v[2], c: v[3] });
        }
        let entries: Option<Vec<ClanEntry>> = entries.into_iter().collect();
        let entries = entries.ok_or_else(|| Error::Format("q-clan file misses some t".into()))?;
        let mut clan = QClan::new(ctx, entries)?;
        if h[3] == "1" {
            clan.kappa = Some(kappa);
        }
        Ok(clan)
    }
}

/// Every pairwise difference A_s - A_t is anisotropic.
pub fn is_qclan(ctx: &FieldCtx, clan: &QClan) -> bool {
    let e = clan.entries();
    (0..e.len()).all(|s| {
        (s + 1..e.len()).all(|t| is_anisotropic(ctx, &(e[s] + e[t]).matrix()))
    })
}

/// Tr(κ(f0(s)+f0(t))(f∞(s)+f∞(t))/(s+t)) = 1 for all s ≠ t.
pub fn normalized_trace_condition(ctx: &FieldCtx, f0: &EvalTable, finf: &EvalTable, kappa: Fe) -> bool {
    let q = ctx.q();
    (0..q).all(|s| {
        (s + 1..q).all(|t| {
            let (fs, ft) = (Fe(s as u16), Fe(t as u16));
            let num = ctx.mul(kappa, ctx.mul(f0.get(fs) + f0.get(ft), finf.get(fs) + finf.get(ft)));
            ctx.trace(ctx.div(num, fs + ft)) == 1
        })
    })
}

/// A point or plane of PG(3, q) as a homogeneous 4-vector.
pub type Vec4 = [Fe; 4];

/// The planes [a_t, b_t, c_t, 1]: a·x + b·y + c·z + w = 0.
pub fn flock_planes(clan: &QClan) -> Vec<Vec4> {
    clan.entries().iter().map(|e| [e.a, e.b, e.c, Fe::ONE]).collect()
}

fn normalize4(ctx: &FieldCtx, v: Vec4) -> Option<Vec4> {
    let lead = v.iter().copied().find(|x| !x.is_zero())?;
    let s = ctx.inv(lead);
    Some(v.map(|x| ctx.mul(x, s)))
}

/// The points of the cone y² = xz in PG(3, q), found by scanning PG(3, q);
/// the vertex (0,0,0,1) comes first.
pub fn cone_points(ctx: &FieldCtx) -> Vec<Vec4> {
    let q = ctx.q() as u32;
    let mut out = vec![[Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE]];
    for k in 0..q * q * q * q {
        let v = [0, 1, 2, 3].map(|i| Fe(((k / q.pow(3 - i)) % q) as u16));
        if normalize4(ctx, v) != Some(v) || v == out[0] {
            continue;
        }
        if ctx.square(v[1]) == ctx.mul(v[0], v[2]) {
            out.push(v);
        }
    }
    out
}

/// Geometric flock test: each plane avoids the vertex and meets the cone in
/// q+1 points, and the sections partition the q(q+1) non-vertex points.
pub fn is_flock(ctx: &FieldCtx, planes: &[Vec4]) -> bool {
    let q = ctx.q();
    if planes.len() != q {
        return false;
    }
    let cone = cone_points(ctx);
    let on = |p: &Vec4, x: &Vec4| {
        (0..4).fold(Fe::ZERO, |acc, i| acc + ctx.mul(p[i], x[i])).is_zero()
    };
    let mut covered = vec![false; cone.len()];
    for p in planes {
        if on(p, &cone[0]) {
            return false;
        }
        let mut n = 0;
        for (i, x) in cone.iter().enumerate().skip(1) {
            if on(p, x) {
                if covered[i] {
                    return false;
                }
                covered[i] = true;
                n += 1;
            }
        }
        if n != q + 1 {
            return false;
        }
    }
    covered.iter().skip(1).all(|&c| c)
}
