//! Generalized quadrangles at toy scale: the elation quadrangle of a q-clan
//! built from its 4-gonal family, the Tits quadrangle T2(O) of an oval, and
//! a direct checker for the GQ axioms.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::herd::Param;
use crate::plane::{tangent, PointSet, ProjPoint};
use crate::qclan::QClan;

/// (α, c, β) with α, β ∈ GF(q)² and c ∈ GF(q).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElem {
    pub alpha: [Fe; 2],
    pub c: Fe,
    pub beta: [Fe; 2],
}

impl GroupElem {
    pub const IDENTITY: GroupElem = GroupElem {
        alpha: [Fe::ZERO; 2],
        c: Fe::ZERO,
        beta: [Fe::ZERO; 2],
    };

    /// (α, c, β)·(α', c', β') = (α + α', c + c' + β·α'ᵀ, β + β').
    pub fn mul(&self, ctx: &FieldCtx, o: &GroupElem) -> GroupElem {
        let dot = ctx.mul(self.beta[0], o.alpha[0]) + ctx.mul(self.beta[1], o.alpha[1]);
        GroupElem {
            alpha: [self.alpha[0] + o.alpha[0], self.alpha[1] + o.alpha[1]],
            c: self.c + o.c + dot,
            beta: [self.beta[0] + o.beta[0], self.beta[1] + o.beta[1]],
        }
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> GroupElem {
        let dot = ctx.mul(self.beta[0], self.alpha[0]) + ctx.mul(self.beta[1], self.alpha[1]);
        GroupElem { c: self.c + dot, ..*self }
    }

    /// Base-q digits (α0, α1, c, β0, β1), least significant first.
    pub fn index(&self, q: usize) -> usize {
        let d = [self.alpha[0], self.alpha[1], self.c, self.beta[0], self.beta[1]];
        d.iter().rev().fold(0, |acc, x| acc * q + x.index())
    }

    pub fn from_index(q: usize, mut i: usize) -> GroupElem {
        let mut d = [Fe::ZERO; 5];
        for x in d.iter_mut() {
            *x = Fe((i % q) as u16);
            i /= q;
        }
        GroupElem {
            alpha: [d[0], d[1]],
            c: d[2],
            beta: [d[3], d[4]],
        }
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:x},{:x};{:x};{:x},{:x})",
            self.alpha[0], self.alpha[1], self.c, self.beta[0], self.beta[1]
        )
    }
}

/// A(t) and A*(t) for t ∈ GF(q) ∪ {∞}, indexed by `Param::index`.
#[derive(Clone, Debug)]
pub struct FourGonalFamily {
    pub a: Vec<Vec<GroupElem>>,
    pub a_star: Vec<Vec<GroupElem>>,
}

pub fn four_gonal_family(ctx: &FieldCtx, clan: &QClan) -> FourGonalFamily {
    let q = ctx.q();
    let pairs: Vec<[Fe; 2]> = ctx
        .elements()
        .flat_map(|x| ctx.elements().map(move |y| [x, y]))
        .collect();
    let mut a = Vec::with_capacity(q + 1);
    let mut a_star = Vec::with_capacity(q + 1);
    for p in Param::all(q) {
        match p {
            Param::At(t) => {
                let e = clan.entry(t);
                let (a_sub, a_st) = pairs
                    .iter()
                    .map(|&al| {
                        // α·A·αᵀ and α·(A + Aᵀ) for A = (a b; 0 c)
                        let quad = ctx.mul(e.a, ctx.square(al[0]))
                            + ctx.mul(e.b, ctx.mul(al[0], al[1]))
                            + ctx.mul(e.c, ctx.square(al[1]));
                        let beta = [ctx.mul(e.b, al[1]), ctx.mul(e.b, al[0])];
                        let g = GroupElem { alpha: al, c: quad, beta };
                        let star: Vec<GroupElem> = ctx.elements().map(|c| GroupElem { c, ..g }).collect();
                        (g, star)
                    })
                    .unzip::<_, _, Vec<_>, Vec<_>>();
                a.push(a_sub);
                a_star.push(a_st.into_iter().flatten().collect());
            }
            Param::Infinity => {
                let zero = [Fe::ZERO; 2];
                a.push(pairs.iter().map(|&beta| GroupElem { alpha: zero, c: Fe::ZERO, beta }).collect());
                a_star.push(
                    pairs
                        .iter()
                        .flat_map(|&beta| ctx.elements().map(move |c| GroupElem { alpha: zero, c, beta }))
                        .collect(),
                );
            }
        }
    }
    FourGonalFamily { a, a_star }
}

/// Closure under multiplication and inversion, with the identity present.
pub fn is_subgroup(ctx: &FieldCtx, h: &[GroupElem]) -> bool {
    let set: std::collections::HashSet<GroupElem> = h.iter().copied().collect();
    set.contains(&GroupElem::IDENTITY)
        && h.iter().all(|x| set.contains(&x.inverse(ctx)))
        && h.iter().all(|x| h.iter().all(|y| set.contains(&x.mul(ctx, y))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    I,
    II,
    III,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineKind {
    A,
    B,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::I => "i",
            PointKind::II => "ii",
            PointKind::III => "iii",
        })
    }
}

impl fmt::Display for LineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LineKind::A => "a",
            LineKind::B => "b",
        })
    }
}

/// Points and lines by id; each line stores its points, sorted.
#[derive(Clone, Debug, Default)]
pub struct IncidenceStructure {
    points: Vec<(PointKind, String)>,
    lines: Vec<(LineKind, String)>,
    line_points: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn point_kind(&self, p: usize) -> PointKind {
        self.points[p].0
    }

    pub fn line_kind(&self, l: usize) -> LineKind {
        self.lines[l].0
    }

    pub fn line(&self, l: usize) -> &[usize] {
        &self.line_points[l]
    }

    pub fn num_incidences(&self) -> usize {
        self.line_points.iter().map(Vec::len).sum()
    }

    /// Lines through each point.
    pub fn point_lines(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.points.len()];
        for (l, pts) in self.line_points.iter().enumerate() {
            for &p in pts {
                out[p].push(l);
            }
        }
        out
    }

    /// Drops one incidence; returns whether it was present.
    pub fn remove_incidence(&mut self, point: usize, line: usize) -> bool {
        let pts = &mut self.line_points[line];
        match pts.binary_search(&point) {
            Ok(i) => {
                pts.remove(i);
                true
            }
            Err(_) => false,
        }
    }

    fn add_point(&mut self, kind: PointKind, label: String) -> usize {
        self.points.push((kind, label));
        self.points.len() - 1
    }

    fn add_line(&mut self, kind: LineKind, label: String, mut pts: Vec<usize>) -> usize {
        pts.sort_unstable();
        self.lines.push((kind, label));
        self.line_points.push(pts);
        self.lines.len() - 1
    }

    /// Text export:
    ///
    /// ```text
    /// points <n>
    /// <id> <type> <label>
    /// lines <m>
    /// <id> <type> <label>
    /// incidences <k>
    /// <point id> <line id>
    /// ```
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "points {}", self.points.len())?;
        for (i, (k, s)) in self.points.iter().enumerate() {
            writeln!(w, "{i} {k} {s}")?;
        }
        writeln!(w, "lines {}", self.lines.len())?;
        for (i, (k, s)) in self.lines.iter().enumerate() {
            writeln!(w, "{i} {k} {s}")?;
        }
        writeln!(w, "incidences {}", self.num_incidences())?;
        for (l, pts) in self.line_points.iter().enumerate() {
            for p in pts {
                writeln!(w, "{p} {l}")?;
            }
        }
        Ok(())
    }
}

/// Ids of the distinct right cosets Hg, keyed by their smallest element index,
/// and the coset id of every group element.
fn right_cosets(ctx: &FieldCtx, h: &[GroupElem]) -> (Vec<usize>, Vec<usize>) {
    let q = ctx.q();
    let n = q.pow(5);
    let mut of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for gi in 0..n {
        if of[gi] != usize::MAX {
            continue;
        }
        let g = GroupElem::from_index(q, gi);
        let id = reps.len();
        reps.push(gi);
        for x in h {
            of[x.mul(ctx, &g).index(q)] = id;
        }
    }
    (reps, of)
}

/// GQ(C) of order (q², q), refused for q > 4.
pub fn build_gq(ctx: &FieldCtx, clan: &QClan) -> Result<IncidenceStructure> {
    build_gq_capped(ctx, clan, 4)
}

/// GQ(C) with an explicit cap on q (q⁵ group elements are enumerated).
pub fn build_gq_capped(ctx: &FieldCtx, clan: &QClan, max_q: usize) -> Result<IncidenceStructure> {
    let q = ctx.q();
    if q > max_q {
        return Err(Error::Refused(format!("GQ(C) construction is capped at q = {max_q}, got {q}")));
    }
    if clan.q() != q {
        return Err(Error::Parameter(format!("clan has q = {}, field has q = {q}", clan.q())));
    }
    let fam = four_gonal_family(ctx, clan);
    let n = q.pow(5);
    let mut s = IncidenceStructure::default();
    for gi in 0..n {
        s.add_point(PointKind::I, GroupElem::from_index(q, gi).to_string());
    }
    let inf = n + (q + 1) * q.pow(2);
    let mut b_lines = vec![vec![inf]; q + 1];
    for (ti, p) in Param::all(q).enumerate() {
        let (star_reps, star_of) = right_cosets(ctx, &fam.a_star[ti]);
        let base = s.num_points();
        for &r in &star_reps {
            s.add_point(PointKind::II, format!("A*({p}){}", GroupElem::from_index(q, r)));
        }
        b_lines[ti].extend((0..star_reps.len()).map(|i| base + i));
        let (reps, _) = right_cosets(ctx, &fam.a[ti]);
        for &r in &reps {
            let g = GroupElem::from_index(q, r);
            let mut pts: Vec<usize> = fam.a[ti].iter().map(|x| x.mul(ctx, &g).index(q)).collect();
            pts.push(base + star_of[r]);
            s.add_line(LineKind::A, format!("A({p}){g}"), pts);
        }
    }
    let inf_id = s.add_point(PointKind::III, "(inf)".into());
    debug_assert_eq!(inf_id, inf);
    for (p, pts) in Param::all(q).zip(b_lines) {
        s.add_line(LineKind::B, format!("[A({p})]"), pts);
    }
    Ok(s)
}

type Vec4 = [Fe; 4];

fn dot3(ctx: &FieldCtx, u: &[Fe; 3], v: &[Fe]) -> Fe {
    ctx.mul(u[0], v[0]) + ctx.mul(u[1], v[1]) + ctx.mul(u[2], v[2])
}

/// T2(O) of order (q, q) with PG(2, q) embedded as x3 = 0. Refused for q > 8.
pub fn build_t2(ctx: &FieldCtx, oval: &PointSet) -> Result<IncidenceStructure> {
    let q = ctx.q();
    if q > 8 {
        return Err(Error::Refused(format!("T2(O) construction is limited to q <= 8, got {q}")));
    }
    if oval.len() != q + 1 {
        return Err(Error::Parameter(format!("an oval has {} points, got {}", q + 1, oval.len())));
    }
    let mut s = IncidenceStructure::default();
    let affine = |v: Vec4| v[0].index() * q * q + v[1].index() * q + v[2].index();
    for x in ctx.elements() {
        for y in ctx.elements() {
            for z in ctx.elements() {
                s.add_point(PointKind::I, format!("({x:x},{y:x},{z:x},1)"));
            }
        }
    }
    let pts: Vec<ProjPoint> = oval.points().to_vec();
    // the planes through the tangent line ℓ_P other than x3 = 0 are ℓ_P·x + w·x3 = 0
    let mut tangents = Vec::with_capacity(pts.len());
    for p in &pts {
        let l = tangent(ctx, oval, p)?;
        let base = s.num_points();
        for w in ctx.elements() {
            s.add_point(
                PointKind::II,
                format!("[{:x},{:x},{:x},{w:x}]", l[0], l[1], l[2]),
            );
        }
        tangents.push((l, base));
    }
    let inf = s.add_point(PointKind::III, "(inf)".into());
    for (p, &(l, base)) in pts.iter().zip(&tangents) {
        let pc = p.coords();
        let lead = pc.iter().position(|x| !x.is_zero()).unwrap_or(0);
        let free: Vec<usize> = (0..3).filter(|&i| i != lead).collect();
        // each line through P meets the affine part in a coset A + ⟨P⟩; take A_lead = 0
        for u in ctx.elements() {
            for v in ctx.elements() {
                let mut a = [Fe::ZERO, Fe::ZERO, Fe::ZERO, Fe::ONE];
                a[free[0]] = u;
                a[free[1]] = v;
                let mut on: Vec<usize> = ctx
                    .elements()
                    .map(|lam| {
                        affine([
                            a[0] + ctx.mul(lam, pc[0]),
                            a[1] + ctx.mul(lam, pc[1]),
                            a[2] + ctx.mul(lam, pc[2]),
                            Fe::ONE,
                        ])
                    })
                    .collect();
                let w = dot3(ctx, &l, &a[..3]);
                on.push(base + w.index());
                s.add_line(LineKind::A, format!("{p}+({:x},{:x},{:x},1)", a[0], a[1], a[2]), on);
            }
        }
    }
    for (p, &(_, base)) in pts.iter().zip(&tangents) {
        let mut on: Vec<usize> = (0..q).map(|w| base + w).collect();
        on.push(inf);
        s.add_line(LineKind::B, p.to_string(), on);
    }
    Ok(s)
}

/// The first GQ axiom that fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GqViolation {
    LineSize { line: usize, size: usize, expected: usize },
    PointDegree { point: usize, degree: usize, expected: usize },
    TwoCommonLines { p1: usize, p2: usize },
    Projection { point: usize, line: usize, collinear: usize },
}

impl fmt::Display for GqViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GqViolation::LineSize { line, size, expected } => {
                write!(f, "line {line} has {size} points, expected {expected}")
            }
            GqViolation::PointDegree { point, degree, expected } => {
                write!(f, "point {point} is on {degree} lines, expected {expected}")
            }
            GqViolation::TwoCommonLines { p1, p2 } => {
                write!(f, "points {p1} and {p2} share more than one line")
            }
            GqViolation::Projection { point, line, collinear } => write!(
                f,
                "point {point} off line {line} is collinear with {collinear} of its points, expected 1"
            ),
        }
    }
}

/// Checks the GQ(s, t) axioms in order: line sizes, point degrees, at most
/// one line through two points, and the unique projection of a point onto
/// a line not through it.
pub fn verify_gq(s: &IncidenceStructure, order_s: usize, order_t: usize) -> std::result::Result<(), GqViolation> {
    for (l, pts) in s.line_points.iter().enumerate() {
        let mut d = pts.clone();
        d.dedup();
        if d.len() != order_s + 1 {
            return Err(GqViolation::LineSize { line: l, size: d.len(), expected: order_s + 1 });
        }
    }
    let through = s.point_lines();
    for (p, ls) in through.iter().enumerate() {
        if ls.len() != order_t + 1 {
            return Err(GqViolation::PointDegree { point: p, degree: ls.len(), expected: order_t + 1 });
        }
    }
    let np = s.num_points();
    let first = (0..np).into_par_iter().find_map_first(|p| {
        let mut mark = vec![false; np];
        for &l in &through[p] {
            for &x in &s.line_points[l] {
                if x == p {
                    continue;
                }
                if mark[x] {
                    return Some(GqViolation::TwoCommonLines { p1: p.min(x), p2: p.max(x) });
                }
                mark[x] = true;
            }
        }
        for (l, pts) in s.line_points.iter().enumerate() {
            if pts.binary_search(&p).is_ok() {
                continue;
            }
            let c = pts.iter().filter(|&&x| mark[x]).count();
            if c != 1 {
                return Some(GqViolation::Projection { point: p, line: l, collinear: c });
            }
        }
        None
    });
    match first {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

pub fn is_gq(s: &IncidenceStructure, order_s: usize, order_t: usize) -> bool {
    verify_gq(s, order_s, order_t).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::conic;
    use crate::qclan::classical_qclan;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_elem(q: usize, rng: &mut impl Rng) -> GroupElem {
        GroupElem::from_index(q, rng.gen_range(0..q.pow(5)))
    }

    #[test]
    fn group_laws() {
        let f = FieldCtx::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let (g, h, k) = (random_elem(8, &mut rng), random_elem(8, &mut rng), random_elem(8, &mut rng));
            assert_eq!(g.mul(&f, &GroupElem::IDENTITY), g);
            assert_eq!(g.mul(&f, &h).mul(&f, &k), g.mul(&f, &h.mul(&f, &k)));
            assert_eq!(g.mul(&f, &g.inverse(&f)), GroupElem::IDENTITY);
            assert_eq!(GroupElem::from_index(8, g.index(8)), g);
        }
    }

    #[test]
    fn family_subgroups_and_intersections() {
        for e in [1, 2] {
            let f = FieldCtx::new(e).unwrap();
            let q = f.q();
            let fam = four_gonal_family(&f, &classical_qclan(&f, None).unwrap());
            for t in 0..=q {
                assert_eq!(fam.a[t].len(), q * q);
                assert_eq!(fam.a_star[t].len(), q * q * q);
                assert!(is_subgroup(&f, &fam.a[t]));
                assert!(is_subgroup(&f, &fam.a_star[t]));
                assert!(fam.a[t].iter().all(|x| fam.a_star[t].contains(x)));
                for u in 0..t {
                    let common: Vec<_> = fam.a[t].iter().filter(|x| fam.a[u].contains(x)).collect();
                    assert_eq!(common, vec![&GroupElem::IDENTITY]);
                }
            }
        }
    }

    #[test]
    fn gq_of_classical_clan_q2() {
        let f = FieldCtx::new(1).unwrap();
        let s = build_gq(&f, &classical_qclan(&f, None).unwrap()).unwrap();
        assert_eq!((s.num_points(), s.num_lines()), (45, 27));
        assert_eq!(verify_gq(&s, 4, 2), Ok(()));
    }

    #[test]
    fn t2_counts_and_axioms() {
        let f = FieldCtx::new(1).unwrap();
        let s = build_t2(&f, &conic(&f)).unwrap();
        assert_eq!((s.num_points(), s.num_lines()), (15, 15));
        assert_eq!(verify_gq(&s, 2, 2), Ok(()));
        let inf = s.num_points() - 1;
        assert!(s.point_lines()[inf].iter().all(|&l| s.line_kind(l) == LineKind::B));
        let f = FieldCtx::new(2).unwrap();
        assert!(is_gq(&build_t2(&f, &conic(&f)).unwrap(), 4, 4));
    }

    #[test]
    fn mutation_is_pinpointed() {
        let f = FieldCtx::new(1).unwrap();
        let mut s = build_t2(&f, &conic(&f)).unwrap();
        let p = s.line(3)[0];
        assert!(s.remove_incidence(p, 3));
        assert_eq!(verify_gq(&s, 2, 2), Err(GqViolation::LineSize { line: 3, size: 2, expected: 3 }));
    }

    #[test]
    fn not_an_oval_fails() {
        // a line's q+1 points is not an arc, so some tangent is missing
        let f = FieldCtx::new(2).unwrap();
        let line: Vec<ProjPoint> = crate::plane::points_on_line(&f, &[Fe::ZERO, Fe::ZERO, Fe::ONE]);
        let set = PointSet::new(line, crate::plane::SetRole::Oval);
        assert!(build_t2(&f, &set).is_err());
    }
}
