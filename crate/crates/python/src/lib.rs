//! Python bindings. Field elements cross the boundary as ints, o-polynomials
//! and evaluation tables as lists of ints indexed by degree or by t.

use std::sync::Arc;

use ovalherd::gq::{build_gq_capped, build_t2, verify_gq};
use ovalherd::herd::{herd_fingerprint, herds_isomorphic, is_herd, ClassCatalog, Herd};
use ovalherd::opoly::{interpolate, is_opermutation, oval_points, EvalTable, OPoly};
use ovalherd::plane::{conic, hyperoval_census, oval_class_reps, oval_stabilizer, PointSet};
use ovalherd::qclan::{
    classical_qclan, flock_planes, is_flock, is_qclan, subiaco_auto, subiaco_qclan, adelaide_auto,
    ClanEntry, QClan,
};
use ovalherd::{Fe, FieldCtx};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: ovalherd::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// GF(2^e) with log/exp tables.
#[pyclass(frozen, module = "pyovalherd")]
#[derive(Clone)]
struct Field {
    ctx: Arc<FieldCtx>,
}

impl Field {
    fn fe(&self, x: u32) -> PyResult<Fe> {
        if (x as usize) < self.ctx.q() {
            Ok(Fe(x as u16))
        } else {
            Err(PyValueError::new_err(format!("{x} is not an element of GF({})", self.ctx.q())))
        }
    }

    fn table(&self, values: Vec<u32>) -> PyResult<EvalTable> {
        let v = values.into_iter().map(|x| self.fe(x)).collect::<PyResult<Vec<_>>>()?;
        if v.len() != self.ctx.q() {
            return Err(PyValueError::new_err(format!("expected {} values", self.ctx.q())));
        }
        EvalTable::new(v).map_err(err)
    }
}

fn ints(v: &[Fe]) -> Vec<u32> {
    v.iter().map(|x| x.0 as u32).collect()
}

#[pymethods]
impl Field {
    /// `q` must be a power of two; `poly` overrides the default reduction polynomial.
    #[new]
    #[pyo3(signature = (q, poly = None))]
    fn new(q: usize, poly: Option<u32>) -> PyResult<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(PyValueError::new_err(format!("q must be a power of 2, got {q}")));
        }
        let e = q.trailing_zeros();
        let ctx = match poly {
            Some(p) => FieldCtx::with_poly(e, p),
            None => FieldCtx::new(e),
        }
        .map_err(err)?;
        Ok(Field { ctx: Arc::new(ctx) })
    }

    #[getter]
    fn q(&self) -> usize {
        self.ctx.q()
    }

    #[getter]
    fn e(&self) -> u32 {
        self.ctx.e()
    }

    #[getter]
    fn reduction_poly(&self) -> u32 {
        self.ctx.reduction_poly()
    }

    fn add(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.ctx.add(self.fe(a)?, self.fe(b)?).0 as u32)
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.ctx.mul(self.fe(a)?, self.fe(b)?).0 as u32)
    }

    fn inv(&self, a: u32) -> PyResult<u32> {
        Ok(self.ctx.try_inv(self.fe(a)?).map_err(err)?.0 as u32)
    }

    fn sqrt(&self, a: u32) -> PyResult<u32> {
        Ok(self.ctx.sqrt(self.fe(a)?).0 as u32)
    }

    fn trace(&self, a: u32) -> PyResult<u8> {
        Ok(self.ctx.trace(self.fe(a)?))
    }

    fn trace_one_smallest(&self) -> u32 {
        self.ctx.trace_one_smallest().0 as u32
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.ctx.describe())
    }
}

/// Evaluation table of a polynomial written as coefficients of degrees 1..q-1.
#[pyfunction]
fn tabulate(field: &Field, coeffs: Vec<u32>) -> PyResult<Vec<u32>> {
    let c = coeffs.into_iter().map(|x| field.fe(x)).collect::<PyResult<Vec<_>>>()?;
    let p = OPoly::from_coeffs(&field.ctx, c).map_err(err)?;
    Ok(ints(p.tabulate(&field.ctx).values()))
}

/// Coefficients of degrees 1..q-1 of the polynomial with the given table.
#[pyfunction]
fn interpolate_table(field: &Field, table: Vec<u32>) -> PyResult<Vec<u32>> {
    let t = field.table(table)?;
    Ok(ints(interpolate(&field.ctx, &t).map_err(err)?.coeffs()))
}

#[pyfunction]
fn is_o_permutation(field: &Field, table: Vec<u32>) -> PyResult<bool> {
    Ok(is_opermutation(&field.ctx, &field.table(table)?))
}

/// Order of the stabilizer of the oval D(f) in PΓL(3, q).
#[pyfunction]
fn oval_stabilizer_order(py: Python<'_>, field: &Field, table: Vec<u32>) -> PyResult<usize> {
    let t = field.table(table)?;
    let ctx = field.ctx.clone();
    py.allow_threads(|| oval_stabilizer(&ctx, &oval_points(&ctx, &t)).map(|g| g.order()))
        .map_err(err)
}

/// Every hyperoval of PG(2, q) up to equivalence (q <= 8), as lists of point indices.
#[pyfunction]
fn census(py: Python<'_>, field: &Field) -> PyResult<Vec<Vec<usize>>> {
    let ctx = field.ctx.clone();
    let q = ctx.q();
    let hs = py.allow_threads(|| hyperoval_census(&ctx)).map_err(err)?;
    Ok(hs.iter().map(|h| h.points().iter().map(|p| p.index(q)).collect()).collect())
}

/// Oval classes of hyperovals given as point-index lists: (hyperoval, orbit size,
/// stabilizer order, o-polynomial coefficients) per class.
#[pyfunction]
fn oval_classes(py: Python<'_>, field: &Field, hyperovals: Vec<Vec<usize>>) -> PyResult<Vec<(usize, usize, usize, Vec<u32>)>> {
    let ctx = field.ctx.clone();
    let q = ctx.q();
    let n = ovalherd::plane::num_points(q);
    let mut sets = Vec::new();
    for h in hyperovals {
        if let Some(&bad) = h.iter().find(|&&i| i >= n) {
            return Err(PyValueError::new_err(format!("point index {bad} out of range")));
        }
        let pts = h.into_iter().map(|i| ovalherd::plane::ProjPoint::from_index(q, i)).collect();
        let s = PointSet::new(pts, ovalherd::plane::SetRole::Hyperoval);
        s.validate(&ctx).map_err(err)?;
        sets.push(s);
    }
    let (reps, stabs) = py.allow_threads(|| oval_class_reps(&ctx, &sets)).map_err(err)?;
    Ok(reps
        .into_iter()
        .map(|r| {
            let order = stabs[r.hyperoval].order() / r.orbit_size;
            (r.hyperoval, r.orbit_size, order, ints(r.poly.coeffs()))
        })
        .collect())
}

/// A q-clan as (a, b, c) triples indexed by t, possibly with its normalizing κ.
#[pyclass(module = "pyovalherd")]
struct Clan {
    field: Field,
    clan: QClan,
}

#[pymethods]
impl Clan {
    #[staticmethod]
    #[pyo3(signature = (field, kappa = None))]
    fn classical(field: &Field, kappa: Option<u32>) -> PyResult<Self> {
        let k = kappa.map(|k| field.fe(k)).transpose()?;
        let clan = classical_qclan(&field.ctx, k).map_err(err)?;
        Ok(Clan { field: field.clone(), clan })
    }

    #[staticmethod]
    #[pyo3(signature = (field, delta = None))]
    fn subiaco(field: &Field, delta: Option<u32>) -> PyResult<Self> {
        let clan = match delta {
            Some(d) => subiaco_qclan(&field.ctx, field.fe(d)?),
            None => subiaco_auto(&field.ctx).map(|(_, c)| c),
        }
        .map_err(err)?;
        Ok(Clan { field: field.clone(), clan })
    }

    /// The first valid parameters for q = 2^e with e even.
    #[staticmethod]
    fn adelaide(field: &Field) -> PyResult<Self> {
        let (_, clan) = adelaide_auto(&field.ctx).map_err(err)?;
        Ok(Clan { field: field.clone(), clan })
    }

    #[staticmethod]
    fn from_entries(field: &Field, entries: Vec<(u32, u32, u32)>) -> PyResult<Self> {
        let e = entries
            .into_iter()
            .map(|(a, b, c)| Ok(ClanEntry { a: field.fe(a)?, b: field.fe(b)?, c: field.fe(c)? }))
            .collect::<PyResult<Vec<_>>>()?;
        let clan = QClan::new(&field.ctx, e).map_err(err)?;
        Ok(Clan { field: field.clone(), clan })
    }

    fn entries(&self) -> Vec<(u32, u32, u32)> {
        self.clan
            .entries()
            .iter()
            .map(|e| (e.a.0 as u32, e.b.0 as u32, e.c.0 as u32))
            .collect()
    }

    #[getter]
    fn kappa(&self) -> Option<u32> {
        self.clan.kappa().map(|k| k.0 as u32)
    }

    fn is_qclan(&self) -> bool {
        is_qclan(&self.field.ctx, &self.clan)
    }

    fn is_flock(&self) -> bool {
        is_flock(&self.field.ctx, &flock_planes(&self.clan))
    }

    /// Builds GQ(C) of order (q², q) and checks the axioms; q <= 8.
    fn gq_check(&self, py: Python<'_>) -> PyResult<bool> {
        let ctx = self.field.ctx.clone();
        let q = ctx.q();
        let clan = self.clan.clone();
        py.allow_threads(|| build_gq_capped(&ctx, &clan, 8).map(|s| verify_gq(&s, q * q, q).is_ok()))
            .map_err(err)
    }

    fn herd(&self) -> PyResult<PyHerd> {
        let h = Herd::from_qclan(&self.field.ctx, &self.clan).map_err(err)?;
        Ok(PyHerd { field: self.field.clone(), herd: h })
    }

    fn __len__(&self) -> usize {
        self.clan.entries().len()
    }
}

/// A herd of ovals generated by f0, f∞ and κ.
#[pyclass(name = "Herd", module = "pyovalherd")]
struct PyHerd {
    field: Field,
    herd: Herd,
}

#[pymethods]
impl PyHerd {
    #[new]
    fn new(field: &Field, f0: Vec<u32>, finf: Vec<u32>, kappa: u32) -> PyResult<Self> {
        let herd = Herd::new(&field.ctx, field.table(f0)?, field.table(finf)?, field.fe(kappa)?).map_err(err)?;
        Ok(PyHerd { field: field.clone(), herd })
    }

    #[getter]
    fn kappa(&self) -> u32 {
        self.herd.kappa.0 as u32
    }

    /// The q + 1 member tables in parameter order ∞, 0, 1, ...
    fn members(&self) -> Vec<Vec<u32>> {
        self.herd.members(&self.field.ctx).iter().map(|m| ints(m.values())).collect()
    }

    fn is_herd(&self) -> PyResult<bool> {
        is_herd(&self.field.ctx, &self.herd.f0, &self.herd.finf, self.herd.kappa).map_err(err)
    }

    fn clan(&self) -> PyResult<Clan> {
        let clan = self.herd.to_qclan(&self.field.ctx).map_err(err)?;
        Ok(Clan { field: self.field.clone(), clan })
    }

    /// (stabilizer order, class index or None) per member, against the given class tables.
    fn fingerprint(&self, py: Python<'_>, classes: Vec<Vec<u32>>) -> PyResult<Vec<(u64, Option<usize>)>> {
        let reps = classes.into_iter().map(|c| self.field.table(c)).collect::<PyResult<Vec<_>>>()?;
        let ctx = self.field.ctx.clone();
        let herd = self.herd.clone();
        py.allow_threads(|| {
            let mut cat = ClassCatalog::new(&ctx, reps)?;
            herd_fingerprint(&ctx, &herd, &mut cat)
        })
        .map(|fp| fp.members)
        .map_err(err)
    }

    /// The isomorphism as (map description, member permutation), or None.
    fn isomorphic(&self, py: Python<'_>, other: &PyHerd) -> PyResult<Option<(String, Vec<usize>)>> {
        let ctx = self.field.ctx.clone();
        let (a, b) = (self.herd.clone(), other.herd.clone());
        let iso = py.allow_threads(|| herds_isomorphic(&ctx, &a, &b)).map_err(err)?;
        Ok(iso.map(|i| (i.psi.to_string(), i.perm)))
    }
}

/// Builds T2(O) from an oval given as point indices (default: the conic) and checks the axioms; q <= 8.
#[pyfunction]
#[pyo3(signature = (field, oval = None))]
fn t2_check(py: Python<'_>, field: &Field, oval: Option<Vec<usize>>) -> PyResult<bool> {
    let ctx = field.ctx.clone();
    let q = ctx.q();
    let o = match oval {
        Some(idx) => {
            let n = ovalherd::plane::num_points(q);
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(PyValueError::new_err(format!("point index {bad} out of range")));
            }
            let pts = idx.into_iter().map(|i| ovalherd::plane::ProjPoint::from_index(q, i)).collect();
            PointSet::new(pts, ovalherd::plane::SetRole::Oval)
        }
        None => conic(&ctx),
    };
    py.allow_threads(|| build_t2(&ctx, &o).map(|s| verify_gq(&s, q, q).is_ok())).map_err(err)
}

#[pymodule]
fn pyovalherd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Clan>()?;
    m.add_class::<PyHerd>()?;
    m.add_function(wrap_pyfunction!(tabulate, m)?)?;
    m.add_function(wrap_pyfunction!(interpolate_table, m)?)?;
    m.add_function(wrap_pyfunction!(is_o_permutation, m)?)?;
    m.add_function(wrap_pyfunction!(oval_stabilizer_order, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(oval_classes, m)?)?;
    m.add_function(wrap_pyfunction!(t2_check, m)?)?;
    Ok(())
}
