//! Hyperovals up to equivalence at tiny q, and oval classes from hyperovals.

use super::{
    all_points, equivalent_hyperovals, fundamental_quadrangle, join, map_quadrangle, num_points,
    on_line, set_stabilizer, PointSet, ProjPoint, SetRole, StabGroup,
};
use crate::error::{contract, Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::opoly::{interpolate, is_opermutation, EvalTable, OPoly};

/// Every hyperoval of PG(2, q), q ∈ {2, 4, 8}, up to PΓL(3, q).
///
/// Any hyperoval can be moved onto the fundamental quadrangle, so arcs are
/// grown from it by adding points in increasing index order, and completed
/// hyperovals are kept only if inequivalent to those already found.
pub fn hyperoval_census(ctx: &FieldCtx) -> Result<Vec<PointSet>> {
    let q = ctx.q();
    if ![2, 4, 8].contains(&q) {
        return Err(Error::Refused(format!("hyperoval census is limited to q <= 8, got {q}")));
    }
    let n = num_points(q);
    let pts: Vec<ProjPoint> = all_points(q).collect();
    // lines share the point indexing through duality
    let line_pts: Vec<Vec<usize>> = (0..n)
        .map(|l| {
            let lc = pts[l].coords();
            (0..n).filter(|&k| on_line(ctx, &lc, &pts[k])).collect()
        })
        .collect();
    let mut line_of = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let l = join(ctx, &pts[i], &pts[j]);
                line_of[i * n + j] = ProjPoint::normalize(ctx, l).expect("distinct points").index(q);
            }
        }
    }

    struct Grow<'a> {
        n: usize,
        target: usize,
        line_of: &'a [usize],
        line_pts: &'a [Vec<usize>],
        blocked: Vec<u32>,
        arc: Vec<usize>,
        complete: Vec<Vec<usize>>,
    }
    impl Grow<'_> {
        fn push(&mut self, p: usize) {
            for &a in &self.arc {
                for &k in &self.line_pts[self.line_of[a * self.n + p]] {
                    self.blocked[k] += 1;
                }
            }
            self.arc.push(p);
        }
        fn pop(&mut self) {
            let p = self.arc.pop().expect("nonempty arc");
            for &a in &self.arc {
                for &k in &self.line_pts[self.line_of[a * self.n + p]] {
                    self.blocked[k] -= 1;
                }
            }
        }
        fn extend(&mut self, start: usize) {
            if self.arc.len() == self.target {
                self.complete.push(self.arc.clone());
                return;
            }
            for p in start..self.n {
                if self.blocked[p] != 0 || self.arc.contains(&p) {
                    continue;
                }
                self.push(p);
                self.extend(p + 1);
                self.pop();
            }
        }
    }

    let mut grow = Grow {
        n,
        target: q + 2,
        line_of: &line_of,
        line_pts: &line_pts,
        blocked: vec![0; n],
        arc: Vec::new(),
        complete: Vec::new(),
    };
    for p in fundamental_quadrangle() {
        grow.push(p.index(q));
    }
    grow.extend(0);

    let found = grow
        .complete
        .into_iter()
        .map(|idxs| PointSet::new(idxs.iter().map(|&i| pts[i]).collect(), SetRole::Hyperoval));
    let mut reps: Vec<PointSet> = Vec::new();
    for h in found {
        let mut new = true;
        for r in &reps {
            if equivalent_hyperovals(ctx, r, &h)?.is_some() {
                new = false;
                break;
            }
        }
        if new {
            reps.push(h);
        }
    }
    Ok(reps)
}

/// One oval class: a hyperoval with one point-orbit representative removed,
/// moved onto the fundamental quadrangle.
#[derive(Clone, Debug)]
pub struct OvalClassRep {
    pub hyperoval: usize,
    pub orbit: usize,
    pub orbit_size: usize,
    pub removed: ProjPoint,
    pub poly: OPoly,
    pub table: EvalTable,
}

/// The o-polynomial of an oval with the given nucleus, after mapping
/// nucleus -> (0,0,1) and its three smallest points -> (0,1,0), (1,0,0), (1,1,1).
pub fn normalize_oval(ctx: &FieldCtx, oval: &PointSet, nucleus: ProjPoint) -> Result<EvalTable> {
    let p = oval.points();
    if p.len() != ctx.q() + 1 {
        return Err(contract("not an oval"));
    }
    let src = [nucleus, p[0], p[1], p[2]];
    let g = map_quadrangle(ctx, &src, &fundamental_quadrangle())?;
    let mut values = vec![None; ctx.q()];
    let mut saw_infinity = false;
    for x in p {
        let [a, b, c] = g.apply(ctx, x).coords();
        if a.is_zero() {
            if b == Fe::ONE && c.is_zero() {
                saw_infinity = true;
                continue;
            }
            return Err(contract("oval meets the tangent through (0,1,0) twice"));
        }
        if values[b.index()].replace(c).is_some() {
            return Err(contract("two oval points on one line through the nucleus"));
        }
    }
    if !saw_infinity {
        return Err(contract("normalized oval misses (0,1,0)"));
    }
    let values: Option<Vec<Fe>> = values.into_iter().collect();
    EvalTable::new(values.ok_or_else(|| contract("oval does not cover every t"))?)
}

/// Removes one representative of every point orbit of each hyperoval's
/// stabilizer and returns the resulting oval classes as o-polynomials.
pub fn oval_class_reps(
    ctx: &FieldCtx,
    hyperovals: &[PointSet],
) -> Result<(Vec<OvalClassRep>, Vec<StabGroup>)> {
    let mut reps: Vec<OvalClassRep> = Vec::new();
    let mut stabs = Vec::new();
    for (hi, h) in hyperovals.iter().enumerate() {
        if h.len() != ctx.q() + 2 {
            return Err(contract(format!("input {hi} is not a hyperoval")));
        }
        let stab = set_stabilizer(ctx, h)?;
        for (oi, orbit) in stab.orbits.iter().enumerate() {
            let removed = orbit[0];
            let oval = h.without(&removed, SetRole::Oval);
            let table = normalize_oval(ctx, &oval, removed)?;
            debug_assert_eq!(table.get(Fe::ONE), Fe::ONE);
            if !is_opermutation(ctx, &table) {
                return Err(contract(format!("class from hyperoval {hi} orbit {oi} is not an oval")));
            }
            let poly = interpolate(ctx, &table)?;
            if reps.iter().any(|r| r.poly == poly) {
                continue;
            }
            reps.push(OvalClassRep {
                hyperoval: hi,
                orbit: oi,
                orbit_size: orbit.len(),
                removed,
                poly,
                table,
            });
        }
        stabs.push(stab);
    }
    Ok((reps, stabs))
}
