//! The set of all o-polynomials in a union of magic orbits, as sorted packed
//! records.
//!
//! File layout (little endian):
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | `b"OHCS"`                     |
//! | 4      | 4    | format version (1)            |
//! | 8      | 4    | e                             |
//! | 12     | 4    | reduction polynomial          |
//! | 16     | 8    | record count                  |
//! | 24     | ...  | records, strictly increasing  |
//!
//! Records use [`PackedCodec`]. Orbits are built one representative at a
//! time into sorted chunk files, which are then merged with deduplication.

use std::cmp::Ordering;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::{pgaml2_element, pgaml2_order, MagicPlan};
use crate::error::{contract, Error, Result};
use crate::gf2e::{Fe, FieldCtx};
use crate::opoly::{interpolate, EvalTable, OPoly, PackedCodec};

const MAGIC: &[u8; 4] = b"OHCS";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;

/// Sorted, deduplicated packed o-polynomials.
#[derive(Clone, Debug)]
pub struct ClassStore {
    e: u32,
    poly: u32,
    codec: PackedCodec,
    data: Vec<u8>,
}

struct Header {
    e: u32,
    poly: u32,
    count: u64,
}

fn write_header(w: &mut impl Write, h: &Header) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&h.e.to_le_bytes())?;
    w.write_all(&h.poly.to_le_bytes())?;
    w.write_all(&h.count.to_le_bytes())?;
    Ok(())
}

fn read_header(r: &mut impl Read) -> Result<Header> {
    let mut buf = [0u8; HEADER_LEN];
    r.read_exact(&mut buf)?;
    if &buf[0..4] != MAGIC {
        return Err(Error::Format("not a class store file".into()));
    }
    let word = |i: usize| u32::from_le_bytes(buf[i..i + 4].try_into().expect("4 bytes"));
    if word(4) != VERSION {
        return Err(Error::Format(format!("unsupported store version {}", word(4))));
    }
    Ok(Header {
        e: word(8),
        poly: word(12),
        count: u64::from_le_bytes(buf[16..24].try_into().expect("8 bytes")),
    })
}

impl ClassStore {
    fn check_field(ctx: &FieldCtx, e: u32, poly: u32) -> Result<()> {
        if e != ctx.e() || poly != ctx.reduction_poly() {
            return Err(Error::Format(format!(
                "store is over GF(2^{e}) mod {poly:#x}, context is {}",
                ctx.describe()
            )));
        }
        Ok(())
    }

    /// Builds a store from arbitrary records (sorted and deduplicated here).
    pub fn from_polys(ctx: &FieldCtx, polys: impl IntoIterator<Item = OPoly>) -> Result<Self> {
        let codec = PackedCodec::new(ctx);
        let mut recs = Vec::new();
        for f in polys {
            recs.push(codec.pack(&f)?);
        }
        recs.sort_unstable();
        recs.dedup();
        Ok(ClassStore {
            e: ctx.e(),
            poly: ctx.reduction_poly(),
            codec,
            data: recs.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.codec.record_len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn codec(&self) -> PackedCodec {
        self.codec
    }

    pub fn record(&self, i: usize) -> &[u8] {
        let n = self.codec.record_len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn records(&self) -> impl ExactSizeIterator<Item = &[u8]> + '_ {
        self.data.chunks_exact(self.codec.record_len())
    }

    pub fn poly(&self, i: usize) -> OPoly {
        self.codec.unpack(self.record(i))
    }

    /// Position of the record for `f`, if stored.
    pub fn find(&self, f: &OPoly) -> Option<usize> {
        let key = self.codec.pack(f).ok()?;
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.record(mid).cmp(&key[..]) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, f: &OPoly) -> bool {
        self.find(f).is_some()
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        write_header(&mut w, &Header { e: self.e, poly: self.poly, count: self.len() as u64 })?;
        w.write_all(&self.data)?;
        w.flush()?;
        Ok(())
    }

    pub fn read_from(ctx: &FieldCtx, path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let h = read_header(&mut r)?;
        Self::check_field(ctx, h.e, h.poly)?;
        let codec = PackedCodec::new(ctx);
        let mut data = vec![0u8; h.count as usize * codec.record_len()];
        r.read_exact(&mut data)?;
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(Error::Format("trailing bytes after store records".into()));
        }
        if data
            .chunks_exact(codec.record_len())
            .zip(data.chunks_exact(codec.record_len()).skip(1))
            .any(|(a, b)| a >= b)
        {
            return Err(Error::Format("store records are not strictly increasing".into()));
        }
        Ok(ClassStore { e: h.e, poly: h.poly, codec, data })
    }
}

/// Writes sorted chunk files into a work directory and merges them.
///
/// Chunk `i` is `chunk-{i:04}.bin` in the store format; an existing chunk with
/// a valid header is reused, which is what makes an interrupted build
/// resumable.
pub struct StoreBuilder<'a> {
    ctx: &'a FieldCtx,
    dir: PathBuf,
    codec: PackedCodec,
}

impl<'a> StoreBuilder<'a> {
    pub fn new(ctx: &'a FieldCtx, dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(StoreBuilder {
            ctx,
            dir: dir.to_path_buf(),
            codec: PackedCodec::new(ctx),
        })
    }

    pub fn chunk_path(&self, i: usize) -> PathBuf {
        self.dir.join(format!("chunk-{i:04}.bin"))
    }

    /// Record count of a finished chunk, or None if it is missing or damaged.
    pub fn chunk_len(&self, i: usize) -> Option<u64> {
        let path = self.chunk_path(i);
        let mut f = File::open(&path).ok()?;
        let h = read_header(&mut f).ok()?;
        let size = fs::metadata(&path).ok()?.len();
        let expect = HEADER_LEN as u64 + h.count * self.codec.record_len() as u64;
        (h.e == self.ctx.e() && h.poly == self.ctx.reduction_poly() && size == expect)
            .then_some(h.count)
    }

    /// Writes sorted distinct records as chunk `i`, atomically.
    pub fn write_chunk(&self, i: usize, sorted: &[u8]) -> Result<u64> {
        let n = self.codec.record_len();
        let count = (sorted.len() / n) as u64;
        let tmp = self.dir.join(format!("chunk-{i:04}.tmp"));
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            write_header(
                &mut w,
                &Header { e: self.ctx.e(), poly: self.ctx.reduction_poly(), count },
            )?;
            w.write_all(sorted)?;
            w.flush()?;
        }
        fs::rename(&tmp, self.chunk_path(i))?;
        Ok(count)
    }

    /// Merges chunks 0..n into `out`, dropping duplicates, and loads the result.
    pub fn merge(&self, n: usize, out: &Path) -> Result<ClassStore> {
        let len = self.codec.record_len();
        let mut readers = Vec::with_capacity(n);
        for i in 0..n {
            let mut r = BufReader::new(File::open(self.chunk_path(i))?);
            let h = read_header(&mut r)?;
            readers.push((r, h.count));
        }
        let mut heads: Vec<Option<Vec<u8>>> = Vec::with_capacity(n);
        for (r, left) in readers.iter_mut() {
            heads.push(next_record(r, left, len)?);
        }
        let tmp = out.with_extension("tmp");
        let mut w = BufWriter::new(File::create(&tmp)?);
        write_header(&mut w, &Header { e: self.ctx.e(), poly: self.ctx.reduction_poly(), count: 0 })?;
        let mut count = 0u64;
        let mut last: Option<Vec<u8>> = None;
        loop {
            let Some(best) = (0..n)
                .filter(|&i| heads[i].is_some())
                .min_by(|&a, &b| heads[a].cmp(&heads[b]))
            else {
                break;
            };
            let rec = heads[best].take().expect("selected head is present");
            let (r, left) = &mut readers[best];
            heads[best] = next_record(r, left, len)?;
            if last.as_ref() != Some(&rec) {
                w.write_all(&rec)?;
                count += 1;
                last = Some(rec);
            }
        }
        w.flush()?;
        drop(w);
        // patch the record count
        {
            use std::io::{Seek, SeekFrom};
            let mut f = fs::OpenOptions::new().write(true).open(&tmp)?;
            f.seek(SeekFrom::Start(16))?;
            f.write_all(&count.to_le_bytes())?;
        }
        fs::rename(&tmp, out)?;
        ClassStore::read_from(self.ctx, out)
    }
}

fn next_record(r: &mut impl Read, left: &mut u64, len: usize) -> Result<Option<Vec<u8>>> {
    if *left == 0 {
        return Ok(None);
    }
    let mut rec = vec![0u8; len];
    r.read_exact(&mut rec)?;
    *left -= 1;
    Ok(Some(rec))
}

/// All distinct normalized images ψf, ψ ∈ PΓL(2, q), as sorted packed records.
fn orbit_records(ctx: &FieldCtx, rep: &EvalTable) -> Result<Vec<u8>> {
    let q = ctx.q();
    let total = pgaml2_order(ctx);
    // images as byte tables (q <= 256), deduplicated before interpolation
    let block = 1 << 14;
    let tables: Vec<u8> = (0..total.div_ceil(block))
        .into_par_iter()
        .map(|blk| {
            let mut out = Vec::with_capacity(block * q);
            let mut buf = vec![Fe::ZERO; q];
            for k in blk * block..total.min((blk + 1) * block) {
                let psi = pgaml2_element(ctx, k);
                MagicPlan::new(ctx, &psi).apply_into(rep.values(), &mut buf);
                let s = ctx.inv(buf[1]);
                out.extend(buf.iter().map(|&v| ctx.mul(v, s).0 as u8));
            }
            out
        })
        .flatten_iter()
        .collect();
    let mut idx: Vec<u32> = (0..total as u32).collect();
    let row = |i: u32| &tables[i as usize * q..(i as usize + 1) * q];
    idx.par_sort_unstable_by(|&a, &b| row(a).cmp(row(b)));
    idx.dedup_by(|a, b| row(*a) == row(*b));
    let codec = PackedCodec::new(ctx);
    let n = codec.record_len();
    let mut recs: Vec<Vec<u8>> = idx
        .par_iter()
        .map(|&i| {
            let vals = row(i).iter().map(|&v| Fe(v as u16)).collect();
            let f = interpolate(ctx, &EvalTable::new(vals)?)?;
            codec.pack(&f)
        })
        .collect::<Result<_>>()?;
    drop(idx);
    drop(tables);
    recs.par_sort_unstable();
    let mut flat = Vec::with_capacity(recs.len() * n);
    for r in recs {
        flat.extend_from_slice(&r);
    }
    Ok(flat)
}

/// The union of the magic orbits of `reps`, built through chunk files in
/// `work_dir` and merged into `work_dir/store.bin`.
///
/// Each representative must be an o-permutation with f(1) ≠ 0. Chunks left by
/// an earlier interrupted run are reused. `progress` is called with
/// (representative index, orbit size) as chunks complete.
pub fn magic_orbit_union(
    ctx: &FieldCtx,
    reps: &[EvalTable],
    work_dir: &Path,
    mut progress: impl FnMut(usize, u64),
) -> Result<ClassStore> {
    let q = ctx.q();
    if !(4..=256).contains(&q) {
        return Err(Error::Refused(format!("class stores need 4 <= q <= 256, got {q}")));
    }
    let b = StoreBuilder::new(ctx, work_dir)?;
    for (i, rep) in reps.iter().enumerate() {
        if rep.q() != q || rep.get(Fe::ONE).is_zero() {
            return Err(contract(format!("representative {i} is not an o-permutation")));
        }
        let count = match b.chunk_len(i) {
            Some(c) => c,
            None => b.write_chunk(i, &orbit_records(ctx, rep)?)?,
        };
        progress(i, count);
    }
    b.merge(reps.len(), &work_dir.join("store.bin"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opoly::is_opermutation;

    #[test]
    fn q8_store_matches_exhaustive_count() {
        let f = FieldCtx::new(3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        // the conic and the pointed conic are the only oval classes at q = 8
        let reps = [EvalTable::monomial(&f, 4), EvalTable::monomial(&f, 2)];
        let store = magic_orbit_union(&f, &reps, dir.path(), |_, _| {}).unwrap();
        // o-polynomials over GF(8): permutations with f(0)=0, f(1)=1 passing the test
        let mut count = 0;
        let mut perm: Vec<u16> = (2..8).collect();
        permute(&mut perm, 0, &mut |p| {
            let mut vals = vec![Fe(0), Fe(1)];
            vals.extend(p.iter().map(|&v| Fe(v)));
            let t = EvalTable::new(vals).unwrap();
            if is_opermutation(&f, &t) {
                count += 1;
                assert!(store.contains(&interpolate(&f, &t).unwrap()));
            }
        });
        assert_eq!(store.len(), count);
        let again = ClassStore::read_from(&f, &dir.path().join("store.bin")).unwrap();
        assert_eq!(again.len(), store.len());
    }

    fn permute(v: &mut Vec<u16>, k: usize, visit: &mut impl FnMut(&[u16])) {
        if k == v.len() {
            visit(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, visit);
            v.swap(k, i);
        }
    }
}
