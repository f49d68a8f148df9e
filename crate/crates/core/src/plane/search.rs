//! Collineation search by frame enumeration.
//!
//! A collineation is fixed by its Frobenius part and the images of four
//! points in general position. To find every collineation carrying a source
//! set into a target set we fix a base quadruple in the source and try every
//! ordered quadruple of target points, for every Frobenius exponent, rejecting
//! a candidate as soon as one further source point leaves the target.

use rayon::prelude::*;

use super::{
    frame_matrix, inv3, mat_mul, nucleus, normalized_index, vec_mat, Collineation, Mat3,
    PointSet, ProjPoint, StabGroup, Vec3,
};
use crate::error::{contract, Result};
use crate::gf2e::{Fe, FieldCtx};

struct FrameSearch<'a> {
    ctx: &'a FieldCtx,
    base: [ProjPoint; 4],
    /// Source points other than the base; all must land in the target.
    checks: Vec<ProjPoint>,
    target: Vec<ProjPoint>,
    member: Vec<bool>,
    /// Forced image of base[0].
    pin: Option<ProjPoint>,
}

/// Per-Frobenius data: the inverse base frame and the frame coordinates of
/// every check point.
struct Prepared {
    gamma: u32,
    frame_inv: Mat3,
    coeffs: Vec<Vec3>,
}

impl<'a> FrameSearch<'a> {
    fn prepare(&self, gamma: u32) -> Option<Prepared> {
        let ctx = self.ctx;
        let bg = self.base.map(|p| p.frobenius(ctx, gamma));
        let frame = frame_matrix(ctx, &bg)?;
        let frame_inv = inv3(ctx, &frame)?;
        let coeffs = self
            .checks
            .iter()
            .map(|p| vec_mat(ctx, p.frobenius(ctx, gamma).coords(), &frame_inv))
            .collect();
        Some(Prepared { gamma, frame_inv, coeffs })
    }

    fn first_choices(&self) -> Vec<ProjPoint> {
        match self.pin {
            Some(p) => vec![p],
            None => self.target.clone(),
        }
    }

    /// All hits with base[0] ↦ t1, in enumeration order.
    fn scan_from(&self, prep: &Prepared, t1: ProjPoint, first_only: bool) -> Vec<Collineation> {
        let ctx = self.ctx;
        let mut hits = Vec::new();
        let tgt = &self.target;
        for (i2, t2) in tgt.iter().enumerate() {
            if *t2 == t1 {
                continue;
            }
            for (i3, t3) in tgt.iter().enumerate() {
                if i3 == i2 || *t3 == t1 {
                    continue;
                }
                let rows = [t1.coords(), t2.coords(), t3.coords()];
                let Some(rows_inv) = inv3(ctx, &rows) else {
                    continue;
                };
                for (i4, t4) in tgt.iter().enumerate() {
                    if i4 == i2 || i4 == i3 || *t4 == t1 {
                        continue;
                    }
                    let lambda = vec_mat(ctx, t4.coords(), &rows_inv);
                    if lambda.iter().any(|x| x.is_zero()) {
                        continue;
                    }
                    if self.all_land(prep, &rows, &lambda) {
                        let ft = [0, 1, 2].map(|i| rows[i].map(|x| ctx.mul(lambda[i], x)));
                        let m = mat_mul(ctx, &prep.frame_inv, &ft);
                        hits.push(
                            Collineation::new(ctx, m, prep.gamma).expect("frame maps are invertible"),
                        );
                        if first_only {
                            return hits;
                        }
                    }
                }
            }
        }
        hits
    }

    #[inline]
    fn all_land(&self, prep: &Prepared, rows: &Mat3, lambda: &Vec3) -> bool {
        let ctx = self.ctx;
        prep.coeffs.iter().all(|c| {
            let w = [
                ctx.mul(c[0], lambda[0]),
                ctx.mul(c[1], lambda[1]),
                ctx.mul(c[2], lambda[2]),
            ];
            let v = vec_mat(ctx, w, rows);
            match normalized_index(ctx, v) {
                Some(idx) => self.member[idx],
                None => false,
            }
        })
    }

    fn run(&self, first_only: bool) -> Vec<Collineation> {
        let firsts = self.first_choices();
        let mut out = Vec::new();
        for gamma in 0..self.ctx.e() {
            let Some(prep) = self.prepare(gamma) else {
                continue;
            };
            if first_only {
                let found = firsts
                    .par_iter()
                    .find_map_first(|&t1| self.scan_from(&prep, t1, true).into_iter().next());
                if let Some(g) = found {
                    return vec![g];
                }
            } else {
                let per_t1: Vec<Vec<Collineation>> = firsts
                    .par_iter()
                    .map(|&t1| self.scan_from(&prep, t1, false))
                    .collect();
                out.extend(per_t1.into_iter().flatten());
            }
        }
        out
    }
}

/// The greedy lexicographically smallest quadruple of `s` in general position.
fn base_quadruple(ctx: &FieldCtx, pts: &[ProjPoint]) -> Option<[ProjPoint; 4]> {
    let p1 = *pts.first()?;
    let p2 = *pts.get(1)?;
    let p3 = *pts
        .iter()
        .find(|x| !super::collinear(ctx, &p1, &p2, x))?;
    let p4 = *pts.iter().find(|x| {
        !super::collinear(ctx, &p1, &p2, x)
            && !super::collinear(ctx, &p1, &p3, x)
            && !super::collinear(ctx, &p2, &p3, x)
    })?;
    Some([p1, p2, p3, p4])
}

/// The stabilizer of `s` in PΓL(3, q).
pub fn set_stabilizer(ctx: &FieldCtx, s: &PointSet) -> Result<StabGroup> {
    let base = base_quadruple(ctx, s.points())
        .ok_or_else(|| contract("set has no four points in general position"))?;
    let search = FrameSearch {
        ctx,
        base,
        checks: s.points().iter().filter(|p| !base.contains(p)).copied().collect(),
        target: s.points().to_vec(),
        member: s.membership(ctx.q()),
        pin: None,
    };
    let elements = search.run(false);
    Ok(StabGroup::from_elements(ctx, elements, s))
}

/// Search for collineations carrying an oval onto another, with nucleus
/// pinned to nucleus.
fn oval_search<'a>(ctx: &'a FieldCtx, src: &PointSet, dst: &PointSet) -> Result<FrameSearch<'a>> {
    let n_src = nucleus(ctx, src)?;
    let n_dst = nucleus(ctx, dst)?;
    let pts = src.points();
    let base = [n_src, pts[0], pts[1], pts[2]];
    Ok(FrameSearch {
        ctx,
        base,
        checks: pts[3..].to_vec(),
        target: dst.points().to_vec(),
        member: dst.membership(ctx.q()),
        pin: Some(n_dst),
    })
}

/// The stabilizer of an oval. Every such collineation fixes the nucleus, so
/// the search pins it, which leaves about (q+1)^3·e candidates.
pub fn oval_stabilizer(ctx: &FieldCtx, oval: &PointSet) -> Result<StabGroup> {
    let elements = oval_search(ctx, oval, oval)?.run(false);
    Ok(StabGroup::from_elements(ctx, elements, oval))
}

pub fn find_oval_equivalence(
    ctx: &FieldCtx,
    a: &PointSet,
    b: &PointSet,
) -> Result<Option<Collineation>> {
    if a.len() != b.len() {
        return Ok(None);
    }
    Ok(oval_search(ctx, a, b)?.run(true).into_iter().next())
}

/// True iff some collineation maps oval `a` onto oval `b`.
pub fn equivalent_ovals(ctx: &FieldCtx, a: &PointSet, b: &PointSet) -> Result<bool> {
    Ok(find_oval_equivalence(ctx, a, b)?.is_some())
}

pub fn equivalent_hyperovals(
    ctx: &FieldCtx,
    a: &PointSet,
    b: &PointSet,
) -> Result<Option<Collineation>> {
    if a.len() != b.len() {
        return Ok(None);
    }
    let base = base_quadruple(ctx, a.points())
        .ok_or_else(|| contract("set has no four points in general position"))?;
    let search = FrameSearch {
        ctx,
        base,
        checks: a.points().iter().filter(|p| !base.contains(p)).copied().collect(),
        target: b.points().to_vec(),
        member: b.membership(ctx.q()),
        pin: None,
    };
    Ok(search.run(true).into_iter().next())
}

/// Every element of PΓL(3, q), with matrices normalized to a leading 1.
/// Only sensible for very small q (|PΓL(3,4)| = 120960).
pub fn full_group(ctx: &FieldCtx) -> Vec<Collineation> {
    let q = ctx.q();
    let mut out = Vec::new();
    let total = q.pow(9);
    for code in 0..total {
        let mut c = code;
        let mut m = [[Fe::ZERO; 3]; 3];
        for x in m.iter_mut().flatten() {
            *x = Fe((c % q) as u16);
            c /= q;
        }
        if m.iter().flatten().find(|x| !x.is_zero()) != Some(&Fe::ONE) {
            continue;
        }
        if super::det3(ctx, &m).is_zero() {
            continue;
        }
        for gamma in 0..ctx.e() {
            out.push(Collineation { m, gamma });
        }
    }
    out
}

/// Set stabilizer by scanning the whole group; the oracle for
/// [`set_stabilizer`] at tiny q.
pub fn full_group_stabilizer(ctx: &FieldCtx, s: &PointSet) -> Vec<Collineation> {
    let member = s.membership(ctx.q());
    let mut out: Vec<Collineation> = full_group(ctx)
        .into_iter()
        .filter(|g| s.points().iter().all(|p| member[g.apply(ctx, p).index(ctx.q())]))
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opoly::{oval_points, EvalTable};
    use crate::plane::{all_points, arc_check, SetRole};

    fn hyperoval_t2(ctx: &FieldCtx) -> PointSet {
        oval_points(ctx, &EvalTable::monomial(ctx, 2))
            .with(ProjPoint::from_index(ctx.q(), 0), SetRole::Hyperoval)
    }

    #[test]
    fn full_group_order_q2_q4() {
        let f2 = FieldCtx::new(1).unwrap();
        assert_eq!(full_group(&f2).len(), 168);
        let f4 = FieldCtx::new(2).unwrap();
        assert_eq!(full_group(&f4).len(), 120960);
    }

    #[test]
    fn regular_hyperoval_q4_matches_full_scan() {
        let f = FieldCtx::new(2).unwrap();
        let h = hyperoval_t2(&f);
        let stab = set_stabilizer(&f, &h).unwrap();
        let mut fast = stab.elements.clone();
        fast.sort_unstable();
        let slow = full_group_stabilizer(&f, &h);
        assert_eq!(fast, slow);
        // PΓL(3,4) has 168 hyperovals, all equivalent
        assert_eq!(stab.order(), 120960 / 168);
        assert_eq!(stab.orbit_sizes(), vec![6]);
    }

    #[test]
    fn regular_hyperoval_q8_orbits() {
        let f = FieldCtx::new(3).unwrap();
        let h = hyperoval_t2(&f);
        let stab = set_stabilizer(&f, &h).unwrap();
        // PΓL(2,8) acting on the conic, fixing the nucleus
        assert_eq!(stab.order(), 9 * 8 * 7 * 3);
        let mut sizes = stab.orbit_sizes();
        sizes.sort();
        assert_eq!(sizes, vec![1, 9]);
        // D(t^2) ∪ {(0,0,1)} is the conic x1² = x0·x2 plus its nucleus (0,1,0)
        let nuc = ProjPoint::from_index(8, 1);
        assert!(stab.orbits.contains(&vec![nuc]));
        for g in &stab.elements {
            for p in h.points() {
                assert!(h.contains(&g.apply(&f, p)));
            }
        }
    }

    #[test]
    fn oval_stabilizer_is_hyperoval_stabilizer_fixing_nucleus() {
        let f = FieldCtx::new(3).unwrap();
        // D(t^(q/2)) is a conic; D(t^2) is a pointed conic for q >= 8
        let conic = oval_points(&f, &EvalTable::monomial(&f, 4));
        assert_eq!(oval_stabilizer(&f, &conic).unwrap().order(), 1512);
        let pointed = oval_points(&f, &EvalTable::monomial(&f, 2));
        assert_eq!(oval_stabilizer(&f, &pointed).unwrap().order(), 168);
        let removed = ProjPoint::from_index(8, 0);
        let regular = pointed.with(removed, SetRole::Hyperoval);
        let n = nucleus(&f, &pointed).unwrap();
        assert_eq!(n, removed);
        let st = oval_stabilizer(&f, &pointed).unwrap();
        let full = set_stabilizer(&f, &regular).unwrap();
        let fixing = full.elements.iter().filter(|g| g.apply(&f, &n) == n).count();
        assert_eq!(st.order(), fixing);
        assert!(!equivalent_ovals(&f, &conic, &pointed).unwrap());
    }

    #[test]
    fn equivalence_under_random_image() {
        let f = FieldCtx::new(3).unwrap();
        let conic = oval_points(&f, &EvalTable::monomial(&f, 2));
        let g = Collineation::new(
            &f,
            [[Fe(3), Fe(1), Fe(0)], [Fe(0), Fe(5), Fe(2)], [Fe(7), Fe(0), Fe(1)]],
            2,
        )
        .unwrap();
        let img = g.apply_set(&f, &conic);
        assert!(arc_check(&f, &img));
        let w = find_oval_equivalence(&f, &conic, &img).unwrap().unwrap();
        assert_eq!(w.apply_set(&f, &conic), img);
        assert!(equivalent_ovals(&f, &img, &conic).unwrap());
    }

    #[test]
    fn stabilizer_of_quadrangle_q2() {
        let f = FieldCtx::new(1).unwrap();
        let all: Vec<_> = all_points(2).collect();
        let quad = PointSet::new(all[..4].to_vec(), SetRole::Arc);
        if arc_check(&f, &quad) {
            let st = set_stabilizer(&f, &quad).unwrap();
            let mut a = st.elements.clone();
            a.sort_unstable();
            assert_eq!(a, full_group_stabilizer(&f, &quad));
        }
    }
}
