#![allow(dead_code)]

use std::collections::BTreeSet;

use ovalherd::herd::{
    herd_fingerprint, is_herd, known_hyperovals, reindex_kappa, ClassCatalog, Herd,
};
use ovalherd::magic::{magic_compose_check, magic_orbit_union, pgaml2_element, pgaml2_elements, pgaml2_order};
use ovalherd::opoly::{is_opermutation, EvalTable};
use ovalherd::plane::oval_class_reps;
use ovalherd::qclan::{
    adelaide_auto, apply_transform, classical_qclan, flock_planes, is_anisotropic,
    is_anisotropic_bruteforce, is_flock, is_qclan, subiaco_auto, ClanEntry, Mat2, QClan,
};
use ovalherd::{Fe, FieldCtx};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fields() -> Vec<FieldCtx> {
    (1..=6).map(|e| FieldCtx::new(e).unwrap()).collect()
}

pub fn trace_sqrt_frobenius_identities() {
    for f in fields() {
        let e = f.e();
        for x in f.elements() {
            assert_eq!(f.square(f.sqrt(x)), x);
            assert_eq!(f.sqrt(f.square(x)), x);
            // the trace is the sum of the Galois conjugates
            let conj_sum = (0..e).fold(Fe::ZERO, |acc, i| acc + f.pow(x, 1 << i));
            assert_eq!(conj_sum, Fe(f.trace(x) as u16));
            assert_eq!(f.trace(f.square(x)), f.trace(x));
            assert_eq!(f.square(f.frobenius(x, e - 1)), x);
            for i in 0..e {
                assert_eq!(f.frobenius(x, i), f.pow(x, 1 << i));
                assert_eq!(f.frobenius_inv(f.frobenius(x, i), i), x);
                for y in f.elements() {
                    if i == 1 {
                        assert_eq!(f.trace(x + y), f.trace(x) ^ f.trace(y));
                        assert_eq!(f.sqrt(f.mul(x, y)), f.mul(f.sqrt(x), f.sqrt(y)));
                    }
                    assert_eq!(f.frobenius(f.mul(x, y), i), f.mul(f.frobenius(x, i), f.frobenius(y, i)));
                }
            }
        }
        assert_eq!(f.elements().filter(|&x| f.trace(x) == 1).count(), f.q() / 2);
    }
}

pub fn herd_denominators_never_vanish() {
    for f in fields() {
        for kappa in f.elements().filter(|&k| f.trace(k) == 1) {
            for s in f.nonzero() {
                assert!(!(Fe::ONE + f.mul(kappa, s) + f.sqrt(s)).is_zero(), "q={} k={kappa:x} s={s:x}", f.q());
            }
        }
    }
}

/// o-permutations at q = 8, 16, 32: the monomials that pass, plus the
/// Subiaco herd members and, at q = 16, the Adelaide herd members.
fn opermutation_pool(f: &FieldCtx) -> Vec<EvalTable> {
    let mut pool: Vec<EvalTable> = (1..f.q() as u64 - 1)
        .map(|k| EvalTable::monomial(f, k))
        .filter(|t| is_opermutation(f, t))
        .collect();
    if f.e() >= 3 {
        let h = Herd::from_qclan(f, &subiaco_auto(f).unwrap().1).unwrap();
        pool.extend(h.members(f));
    }
    if f.e() == 4 {
        let h = Herd::from_qclan(f, &adelaide_auto(f).unwrap().1).unwrap();
        pool.extend(h.members(f));
    }
    pool
}

fn random_table(f: &FieldCtx, rng: &mut ChaCha8Rng) -> EvalTable {
    let vals = f
        .elements()
        .map(|t| if t.is_zero() { t } else { Fe(rng.gen_range(0..f.q()) as u16) })
        .collect();
    EvalTable::new(vals).unwrap()
}

pub fn magic_preserves_opermutations_exhaustively_at_q4() {
    let f = FieldCtx::new(2).unwrap();
    // every permutation of GF(4) fixing 0
    let mut perms = Vec::new();
    for a in 1..4u16 {
        for b in 1..4u16 {
            for c in 1..4u16 {
                if a != b && b != c && a != c {
                    perms.push(EvalTable::new(vec![Fe(0), Fe(a), Fe(b), Fe(c)]).unwrap());
                }
            }
        }
    }
    let opers: Vec<_> = perms.iter().filter(|p| is_opermutation(&f, p)).collect();
    assert!(!opers.is_empty());
    for psi in pgaml2_elements(&f) {
        for p in &opers {
            assert!(is_opermutation(&f, &psi.apply(&f, p)), "{psi}");
        }
    }
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

/// 10^4 random (ψ, f) pairs with f from the o-permutation pools.
pub fn magic_preserves_opermutations() {
    let pools: Vec<(FieldCtx, Vec<EvalTable>)> = (3..=5)
        .map(|e| {
            let f = FieldCtx::new(e).unwrap();
            let p = opermutation_pool(&f);
            (f, p)
        })
        .collect();
    runner(10_000)
        .run(&(0usize..3, any::<u32>(), any::<u64>()), |(i, pick, k)| {
            let (f, pool) = &pools[i];
            let t = &pool[pick as usize % pool.len()];
            let psi = pgaml2_element(f, (k % pgaml2_order(f) as u64) as usize);
            prop_assert!(is_opermutation(f, &psi.apply(f, t)), "q={} {psi}", f.q());
            Ok(())
        })
        .unwrap();
}

/// 10^3 random (ψ1, ψ2, f) triples.
pub fn magic_action_law() {
    let fields: Vec<FieldCtx> = (2..=5).map(|e| FieldCtx::new(e).unwrap()).collect();
    runner(1_000)
        .run(&(0usize..4, any::<u64>(), any::<u64>(), any::<u64>()), |(i, a, b, seed)| {
            let f = &fields[i];
            let n = pgaml2_order(f) as u64;
            let (p1, p2) = (pgaml2_element(f, (a % n) as usize), pgaml2_element(f, (b % n) as usize));
            let t = random_table(f, &mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert!(magic_compose_check(f, &p1, &p2, &t), "q={} {p1} {p2}", f.q());
            Ok(())
        })
        .unwrap();
}

/// Every suite, by name.
pub const SUITES: &[(&str, fn())] = &[
    ("trace/sqrt/Frobenius identities, q <= 64", trace_sqrt_frobenius_identities),
    ("herd denominators non-vanishing, q <= 64", herd_denominators_never_vanish),
    ("magic preservation, exhaustive at q = 4", magic_preserves_opermutations_exhaustively_at_q4),
    ("magic preservation, 10^4 samples", magic_preserves_opermutations),
    ("magic action law, 10^3 triples", magic_action_law),
    ("anisotropy criterion vs brute force, q <= 8", anisotropy_criterion_matches_bruteforce),
    ("flock <=> q-clan, random and named clans", flock_iff_qclan),
    ("herd <=> normalized clan, q <= 16", herd_iff_normalized_clan),
    ("kappa reindexing keeps member classes, q = 16", reindexing_keeps_member_classes),
];

pub fn anisotropy_criterion_matches_bruteforce() {
    for e in 1..=3 {
        let f = FieldCtx::new(e).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                for c in f.elements() {
                    let m: Mat2 = [[a, b], [Fe::ZERO, c]];
                    assert_eq!(is_anisotropic(&f, &m), is_anisotropic_bruteforce(&f, &m), "q={} {m:?}", f.q());
                }
            }
        }
    }
}

fn random_gl2(f: &FieldCtx, rng: &mut ChaCha8Rng) -> Mat2 {
    loop {
        let m = [[0; 2]; 2].map(|r| r.map(|_: u16| Fe(rng.gen_range(0..f.q()) as u16)));
        if !(f.mul(m[0][0], m[1][1]) + f.mul(m[0][1], m[1][0])).is_zero() {
            return m;
        }
    }
}

fn random_entry(f: &FieldCtx, rng: &mut ChaCha8Rng) -> ClanEntry {
    let mut r = || Fe(rng.gen_range(0..f.q()) as u16);
    ClanEntry { a: r(), b: r(), c: r() }
}

/// A random equivalent copy of `base`, reindexed, and with probability 1/2
/// one entry replaced at random; occasionally a fully random set.
fn random_clan(f: &FieldCtx, base: &QClan, rng: &mut ChaCha8Rng) -> QClan {
    if rng.gen_ratio(1, 10) {
        return QClan::new(f, (0..f.q()).map(|_| random_entry(f, rng)).collect()).unwrap();
    }
    let lambda = Fe(rng.gen_range(1..f.q()) as u16);
    let b = random_gl2(f, rng);
    let sigma = rng.gen_range(0..f.e());
    let m = random_entry(f, rng);
    let mut entries = apply_transform(f, base, lambda, &b, sigma, m);
    entries.shuffle(rng);
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..f.q());
        entries[i] = random_entry(f, rng);
    }
    QClan::new(f, entries).unwrap()
}

pub fn flock_iff_qclan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in [2, 3] {
        let f = FieldCtx::new(e).unwrap();
        let mut bases = vec![classical_qclan(&f, None).unwrap()];
        if e == 3 {
            bases.push(subiaco_auto(&f).unwrap().1);
        }
        for c in &bases {
            assert!(is_qclan(&f, c) && is_flock(&f, &flock_planes(c)));
        }
        let (mut yes, mut no) = (0, 0);
        for i in 0..1000 {
            let c = random_clan(&f, &bases[i % bases.len()], &mut rng);
            let clan = is_qclan(&f, &c);
            assert_eq!(clan, is_flock(&f, &flock_planes(&c)), "q={} {c:?}", f.q());
            if clan {
                yes += 1
            } else {
                no += 1
            }
        }
        assert!(yes > 100 && no > 100, "q={} yes={yes} no={no}", f.q());
    }
    for e in [4, 6] {
        let f = FieldCtx::new(e).unwrap();
        for c in [classical_qclan(&f, None).unwrap(), subiaco_auto(&f).unwrap().1, adelaide_auto(&f).unwrap().1] {
            assert!(is_qclan(&f, &c) && is_flock(&f, &flock_planes(&c)), "q={}", f.q());
        }
    }
    let f = FieldCtx::new(5).unwrap();
    for c in [classical_qclan(&f, None).unwrap(), subiaco_auto(&f).unwrap().1] {
        assert!(is_qclan(&f, &c) && is_flock(&f, &flock_planes(&c)));
    }
}

/// Every o-polynomial of PG(2, q), from the magic orbits of the oval classes
/// of the known hyperovals (q = 8: the conic and the pointed conic).
fn all_opolys(f: &FieldCtx) -> Vec<EvalTable> {
    let dir = tempfile::tempdir().unwrap();
    let reps: Vec<EvalTable> = if f.e() == 4 {
        let hs: Vec<_> = known_hyperovals(f).unwrap().iter().map(|h| h.points(f)).collect();
        oval_class_reps(f, &hs).unwrap().0.into_iter().map(|r| r.table).collect()
    } else {
        vec![EvalTable::monomial(f, f.q() as u64 / 2), EvalTable::monomial(f, 2)]
    };
    let store = magic_orbit_union(f, &reps, dir.path(), |_, _| {}).unwrap();
    (0..store.len()).map(|i| store.poly(i).tabulate(f)).collect()
}

pub fn herd_iff_normalized_clan() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for e in [2, 3, 4] {
        let f = FieldCtx::new(e).unwrap();
        let kappas: Vec<Fe> = f.elements().filter(|&k| f.trace(k) == 1).collect();
        let check = |f0: &EvalTable, finf: &EvalTable, k: Fe| {
            let herd = is_herd(&f, f0, finf, k).unwrap();
            let clan = is_qclan(&f, &QClan::normalized(&f, f0, finf, k).unwrap());
            assert_eq!(herd, clan, "q={}", f.q());
            herd
        };
        let mut positives = 0;
        let mut named = vec![classical_qclan(&f, None).unwrap()];
        if e >= 3 {
            named.push(subiaco_auto(&f).unwrap().1);
        }
        if e == 4 {
            named.push(adelaide_auto(&f).unwrap().1);
        }
        for c in &named {
            let h = Herd::from_qclan(&f, c).unwrap();
            for s in f.nonzero() {
                let r = reindex_kappa(&f, &h, s).unwrap();
                positives += check(&r.f0, &r.finf, r.kappa) as usize;
            }
        }
        assert_eq!(positives, named.len() * (f.q() - 1));
        let pool = all_opolys(&f);
        if pool.len() * pool.len() * kappas.len() <= 200_000 {
            for f0 in &pool {
                for finf in &pool {
                    for &k in &kappas {
                        check(f0, finf, k);
                    }
                }
            }
        } else {
            for _ in 0..5000 {
                let f0 = pool.choose(&mut rng).unwrap();
                let finf = pool.choose(&mut rng).unwrap();
                check(f0, finf, *kappas.choose(&mut rng).unwrap());
            }
        }
        for _ in 0..500 {
            let (a, b) = (random_table(&f, &mut rng), random_table(&f, &mut rng));
            check(&a, &b, *kappas.choose(&mut rng).unwrap());
        }
    }
}

pub fn reindexing_keeps_member_classes() {
    let f = FieldCtx::new(4).unwrap();
    let hs: Vec<_> = known_hyperovals(&f).unwrap().iter().map(|h| h.points(&f)).collect();
    let reps: Vec<EvalTable> = oval_class_reps(&f, &hs).unwrap().0.into_iter().map(|r| r.table).collect();
    let mut cat = ClassCatalog::new(&f, reps).unwrap();
    for c in [classical_qclan(&f, None).unwrap(), subiaco_auto(&f).unwrap().1, adelaide_auto(&f).unwrap().1] {
        let h = Herd::from_qclan(&f, &c).unwrap();
        let fp = herd_fingerprint(&f, &h, &mut cat).unwrap();
        assert!(fp.classes().iter().all(Option::is_some));
        let classes: BTreeSet<_> = fp.classes().into_iter().collect();
        for s in f.nonzero() {
            let r = reindex_kappa(&f, &h, s).unwrap();
            let fr = herd_fingerprint(&f, &r, &mut cat).unwrap();
            assert_eq!(fr.multiset(), fp.multiset(), "s={s:x}");
            assert_eq!(fr.classes().into_iter().collect::<BTreeSet<_>>(), classes);
        }
    }
}
