//! The projective plane PG(2, q): points, semilinear collineations, arcs,
//! ovals, hyperovals and their stabilizers.

mod census;
mod search;

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{contract, Error, Result};
use crate::gf2e::{Fe, FieldCtx};

pub use census::{hyperoval_census, oval_class_reps, OvalClassRep};
pub use search::{
    equivalent_hyperovals, equivalent_ovals, find_oval_equivalence, full_group_stabilizer,
    oval_stabilizer, set_stabilizer,
};

pub type Vec3 = [Fe; 3];
pub type Mat3 = [[Fe; 3]; 3];

pub const IDENTITY: Mat3 = [
    [Fe::ONE, Fe::ZERO, Fe::ZERO],
    [Fe::ZERO, Fe::ONE, Fe::ZERO],
    [Fe::ZERO, Fe::ZERO, Fe::ONE],
];

/// A point of PG(2, q) with its first nonzero coordinate equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint([Fe; 3]);

impl ProjPoint {
    /// Wraps coordinates that are already normalized.
    pub fn new_normalized(c: Vec3) -> Self {
        debug_assert!(c.iter().find(|x| !x.is_zero()) == Some(&Fe::ONE));
        ProjPoint(c)
    }

    pub fn normalize(ctx: &FieldCtx, v: Vec3) -> Option<Self> {
        let lead = v.iter().copied().find(|x| !x.is_zero())?;
        let s = ctx.inv(lead);
        Some(ProjPoint(v.map(|x| ctx.mul(x, s))))
    }

    pub fn coords(&self) -> Vec3 {
        self.0
    }

    /// Dense index in coordinate order: (0,0,1) -> 0, (0,1,b) -> 1+b,
    /// (1,a,b) -> 1+q+a·q+b.
    pub fn index(&self, q: usize) -> usize {
        let [x, y, z] = self.0;
        if !x.is_zero() {
            1 + q + y.index() * q + z.index()
        } else if !y.is_zero() {
            1 + z.index()
        } else {
            0
        }
    }

    pub fn from_index(q: usize, idx: usize) -> Self {
        let f = |v: usize| Fe(v as u16);
        if idx == 0 {
            ProjPoint([Fe::ZERO, Fe::ZERO, Fe::ONE])
        } else if idx <= q {
            ProjPoint([Fe::ZERO, Fe::ONE, f(idx - 1)])
        } else {
            let r = idx - 1 - q;
            ProjPoint([Fe::ONE, f(r / q), f(r % q)])
        }
    }

    pub fn frobenius(&self, ctx: &FieldCtx, gamma: u32) -> Self {
        ProjPoint(self.0.map(|x| ctx.frobenius(x, gamma)))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:x},{:x},{:x})", self.0[0], self.0[1], self.0[2])
    }
}

pub fn num_points(q: usize) -> usize {
    q * q + q + 1
}

pub fn all_points(q: usize) -> impl Iterator<Item = ProjPoint> {
    (0..num_points(q)).map(move |i| ProjPoint::from_index(q, i))
}

/// Index of the normalized form of a nonzero vector.
#[inline]
pub(crate) fn normalized_index(ctx: &FieldCtx, v: Vec3) -> Option<usize> {
    let q = ctx.q();
    if !v[0].is_zero() {
        let s = ctx.inv(v[0]);
        Some(1 + q + ctx.mul(v[1], s).index() * q + ctx.mul(v[2], s).index())
    } else if !v[1].is_zero() {
        Some(1 + ctx.div(v[2], v[1]).index())
    } else if !v[2].is_zero() {
        Some(0)
    } else {
        None
    }
}

pub fn fundamental_quadrangle() -> [ProjPoint; 4] {
    let (o, l) = (Fe::ZERO, Fe::ONE);
    [
        ProjPoint([o, o, l]),
        ProjPoint([o, l, o]),
        ProjPoint([l, o, o]),
        ProjPoint([l, l, l]),
    ]
}

/// The conic y² = xz: {(1, t, t²)} ∪ {(0, 0, 1)}.
pub fn conic(ctx: &FieldCtx) -> PointSet {
    let mut pts: Vec<ProjPoint> = ctx
        .elements()
        .map(|t| ProjPoint([Fe::ONE, t, ctx.square(t)]))
        .collect();
    pts.push(ProjPoint([Fe::ZERO, Fe::ZERO, Fe::ONE]));
    PointSet::new(pts, SetRole::Oval)
}

pub(crate) fn vec_mat(ctx: &FieldCtx, v: Vec3, m: &Mat3) -> Vec3 {
    let mut out = [Fe::ZERO; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = ctx.mul(v[0], m[0][j]) + ctx.mul(v[1], m[1][j]) + ctx.mul(v[2], m[2][j]);
    }
    out
}

pub(crate) fn mat_mul(ctx: &FieldCtx, a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[Fe::ZERO; 3]; 3];
    for i in 0..3 {
        out[i] = vec_mat(ctx, a[i], b);
    }
    out
}

pub(crate) fn det3(ctx: &FieldCtx, m: &Mat3) -> Fe {
    let c0 = ctx.mul(m[1][1], m[2][2]) + ctx.mul(m[1][2], m[2][1]);
    let c1 = ctx.mul(m[1][0], m[2][2]) + ctx.mul(m[1][2], m[2][0]);
    let c2 = ctx.mul(m[1][0], m[2][1]) + ctx.mul(m[1][1], m[2][0]);
    ctx.mul(m[0][0], c0) + ctx.mul(m[0][1], c1) + ctx.mul(m[0][2], c2)
}

pub(crate) fn inv3(ctx: &FieldCtx, m: &Mat3) -> Option<Mat3> {
    let d = det3(ctx, m);
    if d.is_zero() {
        return None;
    }
    let di = ctx.inv(d);
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
        ctx.mul(m[r0][c0], m[r1][c1]) + ctx.mul(m[r0][c1], m[r1][c0])
    };
    // inverse[i][j] = cofactor(j, i) / det; characteristic 2 drops the signs
    let mut out = [[Fe::ZERO; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let (r0, r1) = others(j);
            let (c0, c1) = others(i);
            *x = ctx.mul(cof(r0, r1, c0, c1), di);
        }
    }
    Some(out)
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// The line through two points, as dual coordinates (the cross product).
pub fn join(ctx: &FieldCtx, a: &ProjPoint, b: &ProjPoint) -> Vec3 {
    let (a, b) = (a.0, b.0);
    [
        ctx.mul(a[1], b[2]) + ctx.mul(a[2], b[1]),
        ctx.mul(a[0], b[2]) + ctx.mul(a[2], b[0]),
        ctx.mul(a[0], b[1]) + ctx.mul(a[1], b[0]),
    ]
}

pub fn on_line(ctx: &FieldCtx, line: &Vec3, p: &ProjPoint) -> bool {
    let c = p.0;
    (ctx.mul(line[0], c[0]) + ctx.mul(line[1], c[1]) + ctx.mul(line[2], c[2])).is_zero()
}

pub fn collinear(ctx: &FieldCtx, a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> bool {
    det3(ctx, &[a.0, b.0, c.0]).is_zero()
}

/// The q+1 points on a line.
pub fn points_on_line(ctx: &FieldCtx, line: &Vec3) -> Vec<ProjPoint> {
    all_points(ctx.q()).filter(|p| on_line(ctx, line, p)).collect()
}

/// An element of PΓL(3, q): x ↦ (x^γ)·M on row vectors, with γ = 2^gamma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Collineation {
    pub m: Mat3,
    pub gamma: u32,
}

impl Collineation {
    pub fn identity() -> Self {
        Collineation { m: IDENTITY, gamma: 0 }
    }

    /// Scales M so its first nonzero entry is 1; fails on a singular matrix.
    pub fn new(ctx: &FieldCtx, m: Mat3, gamma: u32) -> Result<Self> {
        if det3(ctx, &m).is_zero() {
            return Err(contract("singular collineation matrix"));
        }
        Ok(Collineation { m: normalize_mat(ctx, m), gamma: gamma % ctx.e() })
    }

    pub fn apply_vec(&self, ctx: &FieldCtx, v: Vec3) -> Vec3 {
        let vg = v.map(|x| ctx.frobenius(x, self.gamma));
        vec_mat(ctx, vg, &self.m)
    }

    pub fn apply(&self, ctx: &FieldCtx, p: &ProjPoint) -> ProjPoint {
        ProjPoint::normalize(ctx, self.apply_vec(ctx, p.0)).expect("collineations are injective")
    }

    /// `self` followed by `next`.
    pub fn then(&self, ctx: &FieldCtx, next: &Collineation) -> Collineation {
        let mg = self.m.map(|row| row.map(|x| ctx.frobenius(x, next.gamma)));
        Collineation {
            m: normalize_mat(ctx, mat_mul(ctx, &mg, &next.m)),
            gamma: (self.gamma + next.gamma) % ctx.e(),
        }
    }

    pub fn apply_set(&self, ctx: &FieldCtx, s: &PointSet) -> PointSet {
        PointSet::new(s.points.iter().map(|p| self.apply(ctx, p)).collect(), s.role)
    }
}

pub(crate) fn normalize_mat(ctx: &FieldCtx, m: Mat3) -> Mat3 {
    let lead = m
        .iter()
        .flatten()
        .copied()
        .find(|x| !x.is_zero())
        .expect("nonzero matrix");
    let s = ctx.inv(lead);
    m.map(|row| row.map(|x| ctx.mul(x, s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SetRole {
    Arc,
    Oval,
    Hyperoval,
}

impl SetRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            SetRole::Arc => "arc",
            SetRole::Oval => "oval",
            SetRole::Hyperoval => "hyperoval",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "arc" => Ok(SetRole::Arc),
            "oval" => Ok(SetRole::Oval),
            "hyperoval" => Ok(SetRole::Hyperoval),
            other => Err(Error::Format(format!("unknown role tag {other:?}"))),
        }
    }
}

/// A sorted, duplicate-free set of points with a role tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointSet {
    points: Vec<ProjPoint>,
    pub role: SetRole,
}

impl PointSet {
    pub fn new(mut points: Vec<ProjPoint>, role: SetRole) -> Self {
        points.sort_unstable();
        points.dedup();
        PointSet { points, role }
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn with(&self, p: ProjPoint, role: SetRole) -> PointSet {
        let mut pts = self.points.clone();
        pts.push(p);
        PointSet::new(pts, role)
    }

    pub fn without(&self, p: &ProjPoint, role: SetRole) -> PointSet {
        PointSet::new(self.points.iter().filter(|x| *x != p).copied().collect(), role)
    }

    pub fn membership(&self, q: usize) -> Vec<bool> {
        let mut m = vec![false; num_points(q)];
        for p in &self.points {
            m[p.index(q)] = true;
        }
        m
    }

    /// Checks the size and arc conditions implied by the role tag.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        let q = ctx.q();
        let want = match self.role {
            SetRole::Arc => None,
            SetRole::Oval => Some(q + 1),
            SetRole::Hyperoval => Some(q + 2),
        };
        if let Some(n) = want {
            if self.len() != n {
                return Err(contract(format!(
                    "{} must have {n} points, has {}",
                    self.role.as_str(),
                    self.len()
                )));
            }
        }
        if !arc_check(ctx, self) {
            return Err(contract(format!("{} has three collinear points", self.role.as_str())));
        }
        Ok(())
    }

    /// Header `q <q> <role>`, then one point per line as three hex coordinates.
    pub fn write_to(&self, q: usize, mut w: impl Write) -> Result<()> {
        writeln!(w, "q {q} {}", self.role.as_str())?;
        for p in &self.points {
            let [a, b, c] = p.0;
            writeln!(w, "{a:x} {b:x} {c:x}")?;
        }
        Ok(())
    }

    pub fn read_from(ctx: &FieldCtx, r: impl BufRead) -> Result<PointSet> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Format("empty point-set file".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "q" {
            return Err(Error::Format(format!("bad point-set header {header:?}")));
        }
        let q: usize = fields[1]
            .parse()
            .map_err(|_| Error::Format(format!("bad q in {header:?}")))?;
        if q != ctx.q() {
            return Err(Error::Format(format!("file is for q={q}, field has q={}", ctx.q())));
        }
        let role = SetRole::parse(fields[2])?;
        let mut pts = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let c: Vec<Fe> = line
                .split_whitespace()
                .map(|s| ctx.parse(s))
                .collect::<Result<_>>()?;
            if c.len() != 3 {
                return Err(Error::Format(format!("bad point line {line:?}")));
            }
            let p = ProjPoint::normalize(ctx, [c[0], c[1], c[2]])
                .ok_or_else(|| Error::Format("zero vector is not a point".into()))?;
            if p.0 != [c[0], c[1], c[2]] {
                return Err(Error::Format(format!("point {line:?} is not normalized")));
            }
            pts.push(p);
        }
        let n = pts.len();
        let set = PointSet::new(pts, role);
        if set.len() != n {
            return Err(Error::Format("duplicate points".into()));
        }
        Ok(set)
    }
}

/// True iff no three points of `s` are collinear.
pub fn arc_check(ctx: &FieldCtx, s: &PointSet) -> bool {
    let p = &s.points;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let l = join(ctx, &p[i], &p[j]);
            if p[j + 1..].iter().any(|x| on_line(ctx, &l, x)) {
                return false;
            }
        }
    }
    true
}

/// The tangent line of an arc `s` at its point `p`, if exactly one exists.
pub fn tangent(ctx: &FieldCtx, s: &PointSet, p: &ProjPoint) -> Result<Vec3> {
    // Lines through p are the joins of p with the points of a line avoiding p.
    let avoid = [
        [Fe::ONE, Fe::ZERO, Fe::ZERO],
        [Fe::ZERO, Fe::ONE, Fe::ZERO],
        [Fe::ZERO, Fe::ZERO, Fe::ONE],
    ]
    .into_iter()
    .find(|l| !on_line(ctx, l, p))
    .expect("some coordinate line avoids p");
    let mut tangent = None;
    for x in points_on_line(ctx, &avoid) {
        let l = join(ctx, p, &x);
        let hits = s.points.iter().filter(|y| on_line(ctx, &l, y)).count();
        if hits == 1 {
            if tangent.is_some() {
                return Err(contract(format!("more than one tangent at {p}")));
            }
            tangent = Some(l);
        }
    }
    tangent.ok_or_else(|| contract(format!("no tangent at {p}")))
}

/// The common point of all tangent lines of an oval (q even).
pub fn nucleus(ctx: &FieldCtx, oval: &PointSet) -> Result<ProjPoint> {
    if oval.len() != ctx.q() + 1 || ctx.q() % 2 != 0 {
        return Err(contract("nucleus needs an oval in even characteristic"));
    }
    let pts = &oval.points;
    let t0 = tangent(ctx, oval, &pts[0])?;
    let t1 = tangent(ctx, oval, &pts[1])?;
    // the intersection of two lines is the cross product of their coordinates
    let n = ProjPoint::normalize(
        ctx,
        [
            ctx.mul(t0[1], t1[2]) + ctx.mul(t0[2], t1[1]),
            ctx.mul(t0[0], t1[2]) + ctx.mul(t0[2], t1[0]),
            ctx.mul(t0[0], t1[1]) + ctx.mul(t0[1], t1[0]),
        ],
    )
    .ok_or_else(|| contract("coincident tangents"))?;
    for p in &pts[2..] {
        let l = join(ctx, p, &n);
        if oval.points.iter().filter(|y| on_line(ctx, &l, y)).count() != 1 {
            return Err(contract("tangents are not concurrent"));
        }
    }
    Ok(n)
}

/// Rows λ_i·P_i with Σ λ_i P_i = P_4, so that the standard frame maps to `p`.
fn frame_matrix(ctx: &FieldCtx, p: &[ProjPoint; 4]) -> Option<Mat3> {
    let base = [p[0].0, p[1].0, p[2].0];
    let inv = inv3(ctx, &base)?;
    let lambda = vec_mat(ctx, p[3].0, &inv);
    if lambda.iter().any(|x| x.is_zero()) {
        return None;
    }
    Some([0, 1, 2].map(|i| base[i].map(|x| ctx.mul(lambda[i], x))))
}

pub fn in_general_position(ctx: &FieldCtx, p: &[ProjPoint; 4]) -> bool {
    frame_matrix(ctx, p).is_some()
}

/// The unique projectivity sending `src[i]` to `dst[i]`.
pub fn map_quadrangle(
    ctx: &FieldCtx,
    src: &[ProjPoint; 4],
    dst: &[ProjPoint; 4],
) -> Result<Collineation> {
    let fs = frame_matrix(ctx, src).ok_or_else(|| contract("source quadrangle is degenerate"))?;
    let fd = frame_matrix(ctx, dst).ok_or_else(|| contract("target quadrangle is degenerate"))?;
    let m = mat_mul(ctx, &inv3(ctx, &fs).expect("frame is invertible"), &fd);
    Collineation::new(ctx, m, 0)
}

/// The exact set stabilizer with its point orbits on the stabilized set.
#[derive(Clone, Debug)]
pub struct StabGroup {
    /// Every element of the stabilizer, in search order.
    pub elements: Vec<Collineation>,
    pub orbits: Vec<Vec<ProjPoint>>,
}

impl StabGroup {
    /// `elements` must be the whole group, not just generators.
    pub fn from_elements(ctx: &FieldCtx, elements: Vec<Collineation>, set: &PointSet) -> Self {
        let q = ctx.q();
        let mut assigned = vec![false; num_points(q)];
        let mut orbits = Vec::new();
        for p in set.points() {
            if assigned[p.index(q)] {
                continue;
            }
            let mut orbit: Vec<ProjPoint> = elements.iter().map(|g| g.apply(ctx, p)).collect();
            orbit.push(*p);
            orbit.sort_unstable();
            orbit.dedup();
            for x in &orbit {
                assigned[x.index(q)] = true;
            }
            orbits.push(orbit);
        }
        StabGroup { elements, orbits }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

/// Orbits of the group generated by `gens` on `set`, by union-find over
/// generator images. Orbits are sorted and listed by smallest point.
pub fn point_orbits(ctx: &FieldCtx, gens: &[Collineation], set: &PointSet) -> Vec<Vec<ProjPoint>> {
    let pts = set.points();
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for (i, p) in pts.iter().enumerate() {
            let img = g.apply(ctx, p);
            let j = pts
                .binary_search(&img)
                .expect("generator must stabilize the set");
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<ProjPoint>> = Default::default();
    for (i, p) in pts.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(*p);
    }
    groups.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opoly::{oval_points, EvalTable};

    fn pt(c: [u16; 3]) -> ProjPoint {
        ProjPoint(c.map(Fe))
    }

    #[test]
    fn index_roundtrip_and_order() {
        let q = 8;
        let pts: Vec<_> = all_points(q).collect();
        assert_eq!(pts.len(), 73);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.index(q), i);
        }
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn arcs() {
        let f = FieldCtx::new(3).unwrap();
        let quad = PointSet::new(fundamental_quadrangle().to_vec(), SetRole::Arc);
        assert!(arc_check(&f, &quad));
        let line = PointSet::new(vec![pt([1, 0, 0]), pt([0, 1, 0]), pt([1, 1, 0])], SetRole::Arc);
        assert!(!arc_check(&f, &line));
        let conic = oval_points(&f, &EvalTable::monomial(&f, 2));
        let hyper = conic.with(pt([0, 0, 1]), SetRole::Hyperoval);
        assert!(arc_check(&f, &hyper));
        hyper.validate(&f).unwrap();
    }

    #[test]
    fn nucleus_of_conic() {
        for e in 1..=5 {
            let f = FieldCtx::new(e).unwrap();
            let conic = oval_points(&f, &EvalTable::monomial(&f, 2));
            assert_eq!(nucleus(&f, &conic).unwrap(), pt([0, 0, 1]));
        }
    }

    #[test]
    fn quadrangle_maps() {
        let f = FieldCtx::new(3).unwrap();
        let fq = fundamental_quadrangle();
        assert_eq!(map_quadrangle(&f, &fq, &fq).unwrap(), Collineation::identity());

        let conic = oval_points(&f, &EvalTable::monomial(&f, 2));
        let a = [conic.points()[1], conic.points()[3], conic.points()[4], conic.points()[7]];
        let b = [conic.points()[0], conic.points()[2], conic.points()[5], conic.points()[6]];
        let g = map_quadrangle(&f, &a, &fq).unwrap();
        for i in 0..4 {
            assert_eq!(g.apply(&f, &a[i]), fq[i]);
        }
        assert!(arc_check(&f, &g.apply_set(&f, &conic)));

        let ab = map_quadrangle(&f, &a, &b).unwrap();
        let bc = map_quadrangle(&f, &b, &fq).unwrap();
        assert_eq!(ab.then(&f, &bc), g);

        let degenerate = [pt([1, 0, 0]), pt([0, 1, 0]), pt([1, 1, 0]), pt([0, 0, 1])];
        assert!(map_quadrangle(&f, &degenerate, &fq).is_err());
    }

    #[test]
    fn semilinear_composition() {
        let f = FieldCtx::new(4).unwrap();
        let g = Collineation::new(
            &f,
            [[Fe(3), Fe(1), Fe(0)], [Fe(0), Fe(5), Fe(2)], [Fe(0), Fe(0), Fe(9)]],
            1,
        )
        .unwrap();
        let h = Collineation::new(
            &f,
            [[Fe(0), Fe(2), Fe(0)], [Fe(1), Fe(9), Fe(4)], [Fe(6), Fe(0), Fe(0)]],
            3,
        )
        .unwrap();
        let gh = g.then(&f, &h);
        for p in all_points(16) {
            assert_eq!(gh.apply(&f, &p), h.apply(&f, &g.apply(&f, &p)));
        }
    }

    #[test]
    fn identity_group_orbits_are_singletons() {
        let f = FieldCtx::new(2).unwrap();
        let conic = oval_points(&f, &EvalTable::monomial(&f, 2));
        let orbits = point_orbits(&f, &[Collineation::identity()], &conic);
        assert_eq!(orbits.len(), conic.len());
        assert!(orbits.iter().all(|o| o.len() == 1));
    }

    #[test]
    fn pointset_file_format() {
        let f = FieldCtx::new(2).unwrap();
        let quad = PointSet::new(fundamental_quadrangle().to_vec(), SetRole::Arc);
        let mut buf = Vec::new();
        quad.write_to(4, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "q 4 arc\n0 0 1\n0 1 0\n1 0 0\n1 1 1\n");
        assert_eq!(PointSet::read_from(&f, &buf[..]).unwrap(), quad);
        assert!(PointSet::read_from(&f, &b"q 8 arc\n"[..]).is_err());
        assert!(PointSet::read_from(&f, &b"q 4 arc\n2 1 0\n"[..]).is_err());
    }
}
