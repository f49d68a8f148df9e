//! Herds of ovals.
//!
//! A herd is generated by o-polynomials f0, f∞ and κ with Tr(κ) = 1:
//!
//! f_s(t) = (f0(t) + κ·s·f∞(t) + s^(1/2)·t^(1/2)) / (1 + κ·s + s^(1/2)),  s ≠ 0.
//!
//! The denominator never vanishes: 1 + κs + s^(1/2) = 0 would force
//! κ = s^-1 + s^(-1/2), which has trace 0.

mod search;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use crate::error::{contract, Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::magic::{pgaml2_element, pgaml2_order, MagicMap, MagicPlan};
use crate::opoly::{is_opermutation, oval_points, EvalTable};
use crate::plane::{equivalent_ovals, oval_stabilizer, PointSet, ProjPoint, SetRole};
use crate::qclan::{adelaide_auto, subiaco_auto, QClan};

pub use search::{full_filter, herd_search, quick_filter_scan, ScanHit, SearchReport, StoreScanner};

/// An index s ∈ GF(q) ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Param {
    At(Fe),
    Infinity,
}

impl Param {
    /// 0..q-1 for field elements, q for ∞.
    pub fn index(self, q: usize) -> usize {
        match self {
            Param::At(s) => s.index(),
            Param::Infinity => q,
        }
    }

    pub fn from_index(q: usize, i: usize) -> Self {
        if i == q {
            Param::Infinity
        } else {
            Param::At(Fe(i as u16))
        }
    }

    pub fn all(q: usize) -> impl Iterator<Item = Param> {
        (0..=q).map(move |i| Param::from_index(q, i))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::At(s) => write!(f, "{s:x}"),
            Param::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Herd {
    pub f0: EvalTable,
    pub finf: EvalTable,
    pub kappa: Fe,
}

impl Herd {
    pub fn new(ctx: &FieldCtx, f0: EvalTable, finf: EvalTable, kappa: Fe) -> Result<Self> {
        if ctx.trace(kappa) != 1 {
            return Err(Error::Parameter(format!("kappa {kappa:x} has trace 0")));
        }
        if f0.q() != ctx.q() || finf.q() != ctx.q() {
            return Err(contract("generator tables have the wrong size"));
        }
        Ok(Herd { f0, finf, kappa })
    }

    pub fn from_qclan(ctx: &FieldCtx, clan: &QClan) -> Result<Self> {
        let (f0, finf, kappa) = clan
            .herd_generators(ctx)
            .ok_or_else(|| contract("q-clan is not in normalized form"))?;
        Herd::new(ctx, f0, finf, kappa)
    }

    pub fn to_qclan(&self, ctx: &FieldCtx) -> Result<QClan> {
        QClan::normalized(ctx, &self.f0, &self.finf, self.kappa)
    }

    pub fn member(&self, ctx: &FieldCtx, s: Param) -> EvalTable {
        match s {
            Param::Infinity => self.finf.clone(),
            Param::At(s) if s.is_zero() => self.f0.clone(),
            Param::At(s) => {
                let ks = ctx.mul(self.kappa, s);
                let rs = ctx.sqrt(s);
                let den = ctx.inv(Fe::ONE + ks + rs);
                let vals = ctx
                    .elements()
                    .map(|t| {
                        let num = self.f0.get(t) + ctx.mul(ks, self.finf.get(t)) + ctx.mul(rs, ctx.sqrt(t));
                        ctx.mul(num, den)
                    })
                    .collect();
                EvalTable::new(vals).expect("members vanish at 0")
            }
        }
    }

    /// All q+1 members, indexed by [`Param::index`].
    pub fn members(&self, ctx: &FieldCtx) -> Vec<EvalTable> {
        Param::all(ctx.q()).map(|s| self.member(ctx, s)).collect()
    }
}

/// Every member passes the o-permutation test; members are tried in
/// increasing s, then ∞, and the first failure ends the check.
pub fn is_herd(ctx: &FieldCtx, f0: &EvalTable, finf: &EvalTable, kappa: Fe) -> Result<bool> {
    let h = Herd::new(ctx, f0.clone(), finf.clone(), kappa)?;
    Ok(Param::all(ctx.q()).all(|s| is_opermutation(ctx, &h.member(ctx, s))))
}

/// The parameter s = κ^-2, where the denominator of f_s is 1.
pub fn quick_filter_param(ctx: &FieldCtx, kappa: Fe) -> Fe {
    ctx.square(ctx.inv(kappa))
}

/// Whether f_s with s = κ^-2 is an o-permutation.
pub fn quick_filter(ctx: &FieldCtx, f0: &EvalTable, finf: &EvalTable, kappa: Fe) -> Result<bool> {
    let h = Herd::new(ctx, f0.clone(), finf.clone(), kappa)?;
    Ok(is_opermutation(ctx, &h.member(ctx, Param::At(quick_filter_param(ctx, kappa)))))
}

/// The same herd with f∞ replaced by f_s: κ' = κ + s^-1 + s^(-1/2).
pub fn reindex_kappa(ctx: &FieldCtx, h: &Herd, s: Fe) -> Result<Herd> {
    if s.is_zero() {
        return Err(Error::Parameter("reindexing needs s != 0".into()));
    }
    let si = ctx.inv(s);
    let kappa = h.kappa + si + ctx.sqrt(si);
    Herd::new(ctx, h.f0.clone(), h.member(ctx, Param::At(s)), kappa)
}

/// Per-member data: oval stabilizer order and the index of the matching
/// class representative, if one matched.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdFingerprint {
    pub members: Vec<(u64, Option<usize>)>,
}

impl HerdFingerprint {
    /// The multiset as sorted (order, class) → multiplicity.
    pub fn multiset(&self) -> BTreeMap<(u64, Option<usize>), usize> {
        let mut m = BTreeMap::new();
        for &k in &self.members {
            *m.entry(k).or_insert(0) += 1;
        }
        m
    }

    pub fn classes(&self) -> Vec<Option<usize>> {
        let mut c: Vec<Option<usize>> = self.members.iter().map(|m| m.1).collect();
        c.sort();
        c.dedup();
        c
    }
}

impl fmt::Display for HerdFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .multiset()
            .into_iter()
            .map(|((order, class), n)| match class {
                Some(c) => format!("{n}x(class {c}, stab {order})"),
                None => format!("{n}x(unmatched, stab {order})"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Known oval classes with their stabilizer orders, used to name herd members.
pub struct ClassCatalog {
    pub reps: Vec<EvalTable>,
    pub orders: Vec<u64>,
    ovals: Vec<PointSet>,
    memo: HashMap<EvalTable, (u64, Option<usize>)>,
}

impl ClassCatalog {
    pub fn new(ctx: &FieldCtx, reps: Vec<EvalTable>) -> Result<Self> {
        let ovals: Vec<PointSet> = reps.iter().map(|r| oval_points(ctx, r)).collect();
        let orders = ovals
            .par_iter()
            .map(|o| oval_stabilizer(ctx, o).map(|s| s.order() as u64))
            .collect::<Result<_>>()?;
        Ok(ClassCatalog { reps, orders, ovals, memo: HashMap::new() })
    }

    pub fn with_orders(ctx: &FieldCtx, reps: Vec<EvalTable>, orders: Vec<u64>) -> Self {
        let ovals = reps.iter().map(|r| oval_points(ctx, r)).collect();
        ClassCatalog { reps, orders, ovals, memo: HashMap::new() }
    }

    /// Stabilizer order of D(f) and the first catalog class it is equivalent to.
    pub fn identify(&mut self, ctx: &FieldCtx, f: &EvalTable) -> Result<(u64, Option<usize>)> {
        let f = f.normalized(ctx)?;
        if let Some(&hit) = self.memo.get(&f) {
            return Ok(hit);
        }
        let oval = oval_points(ctx, &f);
        let order = oval_stabilizer(ctx, &oval)?.order() as u64;
        let mut class = None;
        for (i, o) in self.ovals.iter().enumerate() {
            if self.orders[i] == order && equivalent_ovals(ctx, &oval, o)? {
                class = Some(i);
                break;
            }
        }
        self.memo.insert(f, (order, class));
        Ok((order, class))
    }
}

pub fn herd_fingerprint(ctx: &FieldCtx, h: &Herd, catalog: &mut ClassCatalog) -> Result<HerdFingerprint> {
    let members = h
        .members(ctx)
        .iter()
        .map(|m| catalog.identify(ctx, m))
        .collect::<Result<_>>()?;
    Ok(HerdFingerprint { members })
}

/// ψ and the induced index permutation with ψf_s ∈ ⟨f'_{perm[s]}⟩.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerdIsomorphism {
    pub psi: MagicMap,
    /// perm[i] = j for members indexed by [`Param::index`].
    pub perm: Vec<usize>,
}

/// Scans PΓL(2, q) for a map carrying every member of `h1` onto a multiple of
/// a distinct member of `h2`.
pub fn herds_isomorphic(ctx: &FieldCtx, h1: &Herd, h2: &Herd) -> Result<Option<HerdIsomorphism>> {
    let q = ctx.q();
    let m1 = h1.members(ctx);
    let m2: Vec<EvalTable> = h2.members(ctx).iter().map(|m| m.normalized(ctx)).collect::<Result<_>>()?;
    let mut target: HashMap<&EvalTable, Vec<usize>> = HashMap::new();
    for (j, m) in m2.iter().enumerate() {
        target.entry(m).or_default().push(j);
    }
    let found = (0..pgaml2_order(ctx)).into_par_iter().find_map_first(|k| {
        let psi = pgaml2_element(ctx, k);
        let plan = MagicPlan::new(ctx, &psi);
        let mut perm = Vec::with_capacity(q + 1);
        let mut used = vec![false; q + 1];
        for m in &m1 {
            let img = plan.apply(m).normalized(ctx).ok()?;
            let js = target.get(&img)?;
            // equal members may repeat; take the first unused slot
            let j = *js.iter().find(|&&j| !used[j])?;
            used[j] = true;
            perm.push(j);
        }
        Some(HerdIsomorphism { psi, perm })
    });
    Ok(found)
}

/// Compares fingerprints before scanning.
pub fn herds_isomorphic_with(
    ctx: &FieldCtx,
    h1: &Herd,
    fp1: &HerdFingerprint,
    h2: &Herd,
    fp2: &HerdFingerprint,
) -> Result<Option<HerdIsomorphism>> {
    if fp1.multiset() != fp2.multiset() {
        return Ok(None);
    }
    herds_isomorphic(ctx, h1, h2)
}

/// A named hyperoval: the o-polynomial f with D(f) ∪ {(0,0,1)}.
#[derive(Clone, Debug)]
pub struct KnownHyperoval {
    pub name: &'static str,
    pub f: EvalTable,
}

impl KnownHyperoval {
    pub fn points(&self, ctx: &FieldCtx) -> PointSet {
        oval_points(ctx, &self.f).with(ProjPoint::new_normalized([Fe::ZERO, Fe::ZERO, Fe::ONE]), SetRole::Hyperoval)
    }
}

/// The regular, Subiaco I, Subiaco II and Adelaide hyperovals, read off from
/// the classical, Subiaco and Adelaide q-clans. Needs e >= 4 even.
pub fn known_hyperovals(ctx: &FieldCtx) -> Result<Vec<KnownHyperoval>> {
    let e = ctx.e();
    if e < 4 || e % 2 != 0 {
        return Err(Error::Parameter(format!("the four named hyperovals need e >= 4 even, got {e}")));
    }
    let regular = EvalTable::from_fn(ctx, |t| ctx.sqrt(t))?;
    let (_, sub) = subiaco_auto(ctx)?;
    let sub_herd = Herd::from_qclan(ctx, &sub)?;
    // a² + a + 1 = 0 has roots in GF(q) exactly when e is even
    let a = ctx
        .nonzero()
        .find(|&a| ctx.square(a) + a + Fe::ONE == Fe::ZERO)
        .expect("GF(4) lies in GF(q) for even e");
    let sub2 = sub_herd.member(ctx, Param::At(a));
    let (_, ade) = adelaide_auto(ctx)?;
    let (ade_f0, _, _) = ade.herd_generators(ctx).expect("normalized");
    Ok(vec![
        KnownHyperoval { name: "regular", f: regular },
        KnownHyperoval { name: "subiaco-1", f: sub_herd.f0 },
        KnownHyperoval { name: "subiaco-2", f: sub2 },
        KnownHyperoval { name: "adelaide", f: ade_f0 },
    ])
}
