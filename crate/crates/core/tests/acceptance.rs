//! One pass/fail line per acceptance criterion, with pinned tolerances.
//! Runs the full q = 64 pipeline (store build and herd search included).

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use ovalherd::gq::{build_gq, build_t2, verify_gq};
use ovalherd::herd::{
    herd_fingerprint, herd_search, herds_isomorphic_with, is_herd, known_hyperovals, ClassCatalog,
    Herd, HerdFingerprint, SearchReport,
};
use ovalherd::magic::{magic_orbit_union, ClassStore};
use ovalherd::opoly::EvalTable;
use ovalherd::plane::{conic, hyperoval_census, oval_class_reps, PointSet};
use ovalherd::qclan::{
    adelaide_auto, classical_qclan, is_qclan, qclan_equiv_bruteforce, subiaco_auto, QClan,
};
use ovalherd::FieldCtx;

const MINUTE: Duration = Duration::from_secs(60);
const HOUR: Duration = Duration::from_secs(3600);

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn report(out: &mut Vec<Outcome>, id: u32, pass: bool, detail: String, elapsed: Duration) {
    println!(
        "criterion {id}: {} ({:.1}s) {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    out.push(Outcome { id, pass, detail, elapsed });
}

fn peak_rss_kib() -> Option<u64> {
    let s = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = s.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Oval class representatives with their stabilizer orders.
struct Classes {
    tables: Vec<EvalTable>,
    orders: Vec<u64>,
}

fn oval_classes(f: &FieldCtx, hyperovals: &[PointSet]) -> Classes {
    let (reps, stabs) = oval_class_reps(f, hyperovals).unwrap();
    let orders = reps
        .iter()
        .map(|r| (stabs[r.hyperoval].order() / r.orbit_size) as u64)
        .collect();
    Classes { tables: reps.into_iter().map(|r| r.table).collect(), orders }
}

fn survivors(f: &FieldCtx, reps: &[EvalTable], store: &ClassStore, rep: &SearchReport) -> Vec<Herd> {
    rep.stage2
        .iter()
        .map(|h| Herd::new(f, reps[h.f0].clone(), store.poly(h.record).tabulate(f), rep.kappa).unwrap())
        .collect()
}

/// Greedy isomorphism classes, fingerprints compared first.
fn herd_classes(f: &FieldCtx, herds: &[Herd], fps: &[HerdFingerprint]) -> Vec<usize> {
    let mut cls: Vec<usize> = Vec::new();
    for i in 0..herds.len() {
        let c = (0..i)
            .filter(|&j| cls[j] == j)
            .find(|&j| {
                herds_isomorphic_with(f, &herds[i], &fps[i], &herds[j], &fps[j])
                    .unwrap()
                    .is_some()
            })
            .unwrap_or(i);
        cls.push(c);
    }
    cls
}

/// Index into `types` of the family whose fingerprint multiset matches.
fn family_of(fp: &HerdFingerprint, types: &[HerdFingerprint]) -> Option<usize> {
    types.iter().position(|t| t.multiset() == fp.multiset())
}

fn criterion_1(out: &mut Vec<Outcome>) {
    let t = Instant::now();
    let mut bad = Vec::new();
    for e in 1..=6 {
        let f = FieldCtx::new(e).unwrap();
        let mut check = |name: &str, c: QClan| {
            if !is_qclan(&f, &c) {
                bad.push(format!("{name}@{}", f.q()));
            }
        };
        check("classical", classical_qclan(&f, None).unwrap());
        if e >= 3 {
            check("subiaco", subiaco_auto(&f).unwrap().1);
        }
        if e == 4 || e == 6 {
            check("adelaide", adelaide_auto(&f).unwrap().1);
        }
    }
    let el = t.elapsed();
    report(out, 1, bad.is_empty() && el < MINUTE, format!("failures: {bad:?}"), el);
}

fn criterion_2(out: &mut Vec<Outcome>, f: &FieldCtx, fams: &[QClan]) {
    let t = Instant::now();
    let ok: Vec<bool> = fams
        .iter()
        .map(|c| {
            let h = Herd::from_qclan(f, c).unwrap();
            is_herd(f, &h.f0, &h.finf, h.kappa).unwrap()
        })
        .collect();
    let el = t.elapsed();
    report(
        out,
        2,
        ok.iter().all(|&x| x) && el < MINUTE,
        format!("classical/subiaco/adelaide herds at q=64: {ok:?}"),
        el,
    );
}

fn criterion_4(out: &mut Vec<Outcome>, f: &FieldCtx) -> Classes {
    let t = Instant::now();
    let hs: Vec<PointSet> = known_hyperovals(f).unwrap().iter().map(|h| h.points(f)).collect();
    let classes = oval_classes(f, &hs);
    let el = t.elapsed();
    let n = classes.tables.len();
    report(
        out,
        4,
        n == 19 && el < 4 * HOUR,
        format!("{n} oval classes, stabilizer orders {:?}", classes.orders),
        el,
    );
    classes
}

fn criterion_3(out: &mut Vec<Outcome>, f: &FieldCtx, fams: &[QClan], cat: &mut ClassCatalog) -> Vec<HerdFingerprint> {
    let t = Instant::now();
    let fps: Vec<HerdFingerprint> = fams
        .iter()
        .map(|c| herd_fingerprint(f, &Herd::from_qclan(f, c).unwrap(), cat).unwrap())
        .collect();
    let el = t.elapsed();
    let orders = |fp: &HerdFingerprint| {
        let mut o: Vec<u64> = fp.multiset().keys().map(|k| k.0).collect();
        o.dedup();
        o
    };
    let classical_ok = fp_single_class(&fps[0]) && orders(&fps[0]) == vec![1_572_480];
    let subiaco_ok = fps[1].multiset().len() == 2 && orders(&fps[1]) == vec![15, 60];
    let adelaide_ok = fp_single_class(&fps[2]) && orders(&fps[2]) == vec![12];
    report(
        out,
        3,
        classical_ok && subiaco_ok && adelaide_ok && el < 2 * HOUR,
        format!("classical: {}; subiaco: {}; adelaide: {}", fps[0], fps[1], fps[2]),
        el,
    );
    fps
}

fn fp_single_class(fp: &HerdFingerprint) -> bool {
    fp.multiset().len() == 1 && fp.classes().iter().all(Option::is_some)
}

fn criterion_5(out: &mut Vec<Outcome>, f: &FieldCtx, classes: &Classes, dir: &std::path::Path) -> ClassStore {
    let t = Instant::now();
    let store = magic_orbit_union(f, &classes.tables, dir, |_, _| {}).unwrap();
    let el = t.elapsed();
    let rss = peak_rss_kib();
    let mem_ok = rss.is_some_and(|k| k <= 2 * 1024 * 1024);
    report(
        out,
        5,
        store.len() == 17_297_346 && mem_ok && el < 12 * HOUR,
        format!(
            "{} classes, peak resident {} MiB over the whole run so far",
            store.len(),
            rss.map_or("unknown".into(), |k| (k / 1024).to_string())
        ),
        el,
    );
    store
}

fn criterion_6(
    out: &mut Vec<Outcome>,
    f: &FieldCtx,
    classes: &Classes,
    store: &ClassStore,
    fam_fps: &[HerdFingerprint],
    cat: &mut ClassCatalog,
) {
    let t = Instant::now();
    let rep = herd_search(f, &classes.tables, store, f.trace_one_smallest()).unwrap();
    let per_f0: Vec<String> = rep
        .per_f0(classes.tables.len())
        .iter()
        .enumerate()
        .filter(|(_, c)| c.0 > 0)
        .map(|(i, c)| format!("f0#{i}:{}/{}", c.0, c.1))
        .collect();
    let herds = survivors(f, &classes.tables, store, &rep);
    let fps: Vec<HerdFingerprint> = herds.iter().map(|h| herd_fingerprint(f, h, cat).unwrap()).collect();
    let mut types = [0usize; 4];
    for fp in &fps {
        types[family_of(fp, fam_fps).unwrap_or(3)] += 1;
    }
    let cls = herd_classes(f, &herds, &fps);
    let n_classes = cls.iter().enumerate().filter(|&(i, &c)| i == c).count();
    let el = t.elapsed();
    let cpu_bound = el * std::thread::available_parallelism().map_or(1, |n| n.get() as u32);
    report(
        out,
        6,
        rep.stage1.len() == 25
            && rep.stage2.len() == 7
            && types == [1, 4, 2, 0]
            && n_classes == 3
            && cpu_bound < 56 * HOUR,
        format!(
            "stage-1 {}, stage-2 {}, classical/subiaco/adelaide/other {:?}, {n_classes} isomorphism classes; per f0 (stage-1/stage-2): {}",
            rep.stage1.len(),
            rep.stage2.len(),
            types,
            per_f0.join(" ")
        ),
        el,
    );
}

/// Frozen on the first verified run.
const Q8_STORE: usize = 10;
const Q8_STAGE1: usize = 14;
const Q8_STAGE2: usize = 3;

fn criterion_7(out: &mut Vec<Outcome>) {
    let t = Instant::now();
    let f = FieldCtx::new(3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let hs = hyperoval_census(&f).unwrap();
    let classes = oval_classes(&f, &hs);
    let store = magic_orbit_union(&f, &classes.tables, dir.path(), |_, _| {}).unwrap();
    let rep = herd_search(&f, &classes.tables, &store, f.trace_one_smallest()).unwrap();
    let herds = survivors(&f, &classes.tables, &store, &rep);
    let mut cat = ClassCatalog::with_orders(&f, classes.tables.clone(), classes.orders.clone());
    let fams = [classical_qclan(&f, None).unwrap(), subiaco_auto(&f).unwrap().1];
    let fam_fps: Vec<HerdFingerprint> = fams
        .iter()
        .map(|c| herd_fingerprint(&f, &Herd::from_qclan(&f, c).unwrap(), &mut cat).unwrap())
        .collect();
    let fps: Vec<HerdFingerprint> = herds.iter().map(|h| herd_fingerprint(&f, h, &mut cat).unwrap()).collect();
    let kinds: Vec<Option<usize>> = fps.iter().map(|fp| family_of(fp, &fam_fps)).collect();
    let all_typed = kinds.iter().all(Option::is_some);
    let both = (0..2).all(|k| kinds.contains(&Some(k)));
    // one survivor of each type, as clans, compared by exhaustive search
    let pick = |k: usize| {
        let i = kinds.iter().position(|&x| x == Some(k)).unwrap();
        herds[i].to_qclan(&f).unwrap()
    };
    let (inequivalent, matches_family) = if both {
        let (c0, c1) = (pick(0), pick(1));
        let ineq = qclan_equiv_bruteforce(&f, &c0, &c1).unwrap().is_none();
        let m0 = qclan_equiv_bruteforce(&f, &fams[0], &c0).unwrap().is_some();
        let m1 = qclan_equiv_bruteforce(&f, &fams[1], &c1).unwrap().is_some();
        (ineq, m0 && m1)
    } else {
        (false, false)
    };
    let el = t.elapsed();
    let counts = (store.len(), rep.stage1.len(), rep.stage2.len());
    report(
        out,
        7,
        hs.len() == 1
            && all_typed
            && both
            && inequivalent
            && matches_family
            && counts == (Q8_STORE, Q8_STAGE1, Q8_STAGE2)
            && el < 30 * MINUTE,
        format!(
            "{} hyperovals, {} oval classes, store {}, stage-1 {}, stage-2 {}, survivor types {kinds:?}, flocks inequivalent: {inequivalent}, survivors match families: {matches_family}",
            hs.len(),
            classes.tables.len(),
            counts.0,
            counts.1,
            counts.2
        ),
        el,
    );
}

fn criterion_8(out: &mut Vec<Outcome>) {
    let t = Instant::now();
    let mut failed = Vec::new();
    for (name, suite) in common::SUITES {
        if catch_unwind(AssertUnwindSafe(suite)).is_err() {
            failed.push(*name);
        }
    }
    report(out, 8, failed.is_empty(), format!("{} suites, failed: {failed:?}", common::SUITES.len()), t.elapsed());
}

fn criterion_9(out: &mut Vec<Outcome>) {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (e, expect) in [(1, (45, 27)), (2, (1105, 325))] {
        let f = FieldCtx::new(e).unwrap();
        let q = f.q();
        let s = build_gq(&f, &classical_qclan(&f, None).unwrap()).unwrap();
        let counts = (s.num_points(), s.num_lines());
        let v = verify_gq(&s, q * q, q);
        ok &= counts == expect && v.is_ok();
        notes.push(format!("GQ(C) q={q}: {counts:?} {v:?}"));
    }
    for e in 1..=3 {
        let f = FieldCtx::new(e).unwrap();
        let q = f.q();
        let s = build_t2(&f, &conic(&f)).unwrap();
        let v = verify_gq(&s, q, q);
        ok &= v.is_ok();
        notes.push(format!("T2(conic) q={q}: {v:?}"));
    }
    let el = t.elapsed();
    report(out, 9, ok && el < 5 * MINUTE, notes.join("; "), el);
}

fn main() {
    let mut out = Vec::new();
    criterion_1(&mut out);
    criterion_9(&mut out);
    criterion_8(&mut out);
    criterion_7(&mut out);

    let f = FieldCtx::new(6).unwrap();
    let fams = [
        classical_qclan(&f, None).unwrap(),
        subiaco_auto(&f).unwrap().1,
        adelaide_auto(&f).unwrap().1,
    ];
    criterion_2(&mut out, &f, &fams);
    let classes = criterion_4(&mut out, &f);
    let mut cat = ClassCatalog::with_orders(&f, classes.tables.clone(), classes.orders.clone());
    let fam_fps = criterion_3(&mut out, &f, &fams, &mut cat);
    let dir = tempfile::tempdir().unwrap();
    let store = criterion_5(&mut out, &f, &classes, dir.path());
    criterion_6(&mut out, &f, &classes, &store, &fam_fps, &mut cat);

    out.sort_by_key(|o| o.id);
    println!("\nsummary");
    for o in &out {
        println!(
            "{} criterion {} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.id,
            o.elapsed.as_secs_f64(),
            o.detail
        );
    }
    if out.iter().any(|o| !o.pass) {
        std::process::exit(1);
    }
}
