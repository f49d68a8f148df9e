mod artifacts;
mod files;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ovalherd::gq::{build_gq_capped, build_t2, verify_gq};
use ovalherd::herd::{
    full_filter, herd_fingerprint, herds_isomorphic, herds_isomorphic_with, known_hyperovals,
    quick_filter_scan, ClassCatalog, Herd, HerdFingerprint, ScanHit, StoreScanner,
};
use ovalherd::magic::{magic_orbit_union, ClassStore};
use ovalherd::opoly::OPoly;
use ovalherd::plane::{
    conic, hyperoval_census, oval_class_reps, oval_stabilizer, set_stabilizer, PointSet, SetRole,
};
use ovalherd::qclan::{
    adelaide_auto, adelaide_qclan, classical_qclan, flock_planes, is_flock, is_qclan,
    subiaco_auto, subiaco_qclan, AdelaideParams, QClan,
};
use ovalherd::{ExtElem, Fe, FieldCtx};

use artifacts::{manifest_output, sha256_bytes, sha256_file, Artifacts, RunManifest, ROOT_ENV};
use files::{class_tables, read_classes, read_report, write_classes, write_report, ClassLine, SurvivorLine};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ovalherd::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A certification that ran to completion and said no.
    #[error("{0}")]
    Failed(String),
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "ovalherd", version, about = "Herds of ovals, q-clans and flocks in PG(2, 2^e)")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Field size q = 2^e.
    #[arg(long, global = true)]
    q: Option<usize>,
    /// Reduction polynomial as hex bits (default: the Conway polynomial).
    #[arg(long, global = true, value_name = "HEX")]
    field_poly: Option<String>,
    /// κ for herds and normalized clans (default: the smallest trace-1 element).
    #[arg(long, global = true, value_name = "HEX")]
    kappa: Option<String>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    checkpoint_dir: Option<PathBuf>,
    /// Reuse checkpoints from an interrupted run instead of starting over.
    #[arg(long, global = true)]
    resume: bool,
    /// Artifact root; files go under <root>/q<q>/.
    #[arg(long, global = true, env = ROOT_ENV, default_value = "artifacts")]
    artifacts: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Classical,
    Subiaco,
    Adelaide,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GqKind {
    /// GQ(C) of order (q², q) from a q-clan.
    Gq,
    /// T2(O) of order (q, q) from an oval.
    T2,
}

#[derive(Subcommand)]
enum Cmd {
    /// Field parameters and a few distinguished elements.
    FieldInfo,
    /// Checks that every pairwise difference of a q-clan file is anisotropic.
    VerifyQclan { file: PathBuf },
    /// Writes a named q-clan in normalized form.
    MakeFamily {
        #[arg(long, value_enum)]
        family: Family,
        /// Take the first valid parameter.
        #[arg(long)]
        auto: bool,
        #[arg(long, value_name = "HEX")]
        delta: Option<String>,
        /// β ∈ GF(q²) as hex of u | v << e for u + vω.
        #[arg(long, value_name = "HEX")]
        beta: Option<String>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Geometric check that the planes of a q-clan file partition the cone.
    FlockCheck { file: PathBuf },
    /// Stabilizer order and orbits of a point-set file.
    Stabilizer { file: PathBuf },
    /// Oval class representatives of a list of hyperovals.
    OvalClasses {
        /// `known`, `census`, or point-set files.
        #[arg(long, num_args = 1.., default_value = "known")]
        hyperovals: Vec<String>,
    },
    /// Every hyperoval of PG(2, q) up to equivalence, q <= 8.
    Census,
    /// The union of the magic orbits of the oval class representatives.
    BuildStore {
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Cardinality of a store and membership of o-polynomials in it.
    StoreInfo {
        #[arg(long)]
        store: Option<PathBuf>,
        /// Comma-separated hex coefficients of degrees 1..q-1.
        #[arg(long)]
        contains: Vec<String>,
    },
    /// Two-stage herd search with f0 over the class representatives and f∞ over the store.
    HerdSearch {
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        store: Option<PathBuf>,
    },
    /// Member classes and stabilizer orders of herds from clan files or a search report.
    Fingerprint {
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        clans: Vec<PathBuf>,
    },
    /// Isomorphism of two herds given as clan files, or classes of a report's survivors.
    HerdIsomorphic {
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        clans: Vec<PathBuf>,
    },
    /// Builds a generalized quadrangle and checks the axioms.
    GqCheck {
        #[arg(long, value_enum, default_value = "gq")]
        kind: GqKind,
        /// q-clan file for `gq` (default: classical).
        #[arg(long)]
        clan: Option<PathBuf>,
        /// Oval file for `t2` (default: the conic).
        #[arg(long)]
        oval: Option<PathBuf>,
        /// Writes the incidence structure as text.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Allows GQ(C) at q = 8 (32768 group elements).
        #[arg(long)]
        allow_large: bool,
    },
}

struct Env {
    ctx: FieldCtx,
    art: Artifacts,
    workers: usize,
    kappa: Option<Fe>,
    checkpoint_dir: Option<PathBuf>,
    resume: bool,
}

impl Env {
    fn new(g: &Global) -> CliResult<Env> {
        let q = g.q.ok_or_else(|| CliError::Usage("--q is required".into()))?;
        if q < 2 || !q.is_power_of_two() {
            return Err(CliError::Usage(format!("q must be a power of 2, got {q}")));
        }
        let e = q.trailing_zeros();
        let ctx = match &g.field_poly {
            Some(p) => {
                let poly = u32::from_str_radix(p.trim_start_matches("0x"), 16)
                    .map_err(|_| CliError::Usage(format!("--field-poly {p:?} is not hex")))?;
                FieldCtx::with_poly(e, poly)?
            }
            None => FieldCtx::new(e)?,
        };
        let kappa = g.kappa.as_deref().map(|k| ctx.parse(k)).transpose()?;
        if let Some(k) = kappa {
            if ctx.trace(k) != 1 {
                return Err(CliError::Usage(format!("--kappa {k:x} has trace 0")));
            }
        }
        let workers = g
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        // a second call fails harmlessly if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
        Ok(Env {
            art: Artifacts::new(&g.artifacts, q)?,
            ctx,
            workers,
            kappa,
            checkpoint_dir: g.checkpoint_dir.clone(),
            resume: g.resume,
        })
    }

    fn kappa(&self) -> Fe {
        self.kappa.unwrap_or_else(|| self.ctx.trace_one_smallest())
    }

    fn manifest(&self, command: &str) -> RunManifest {
        RunManifest::new(command, &self.ctx, self.workers)
    }

    fn finish(&self, command: &str, m: &RunManifest) -> CliResult {
        m.write(&self.art.manifest_path(command))
    }

    fn checkpoint(&self, command: &str) -> CliResult<PathBuf> {
        let dir = self
            .checkpoint_dir
            .clone()
            .unwrap_or_else(|| self.art.checkpoint_dir(command));
        if !self.resume && dir.exists() {
            fs::remove_dir_all(&dir)?;
        }
        fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    /// Ties a checkpoint directory to its inputs so a resume never mixes runs.
    fn bind_checkpoint(&self, dir: &Path, key: &str) -> CliResult {
        let path = dir.join("inputs.sha256");
        if self.resume {
            if let Ok(old) = fs::read_to_string(&path) {
                if old.trim() != key {
                    return Err(CliError::Usage(format!(
                        "checkpoint {} belongs to different inputs; rerun without --resume",
                        dir.display()
                    )));
                }
            }
        }
        write_atomic(&path, format!("{key}\n").as_bytes())
    }

    fn classes_path(&self, given: &Option<PathBuf>) -> PathBuf {
        given.clone().unwrap_or_else(|| self.art.path("oval-classes.txt"))
    }

    fn store_path(&self, given: &Option<PathBuf>) -> CliResult<PathBuf> {
        match given {
            Some(p) => Ok(p.clone()),
            None => manifest_output(&self.art.manifest_path("build-store")),
        }
    }

    fn read_clan(&self, path: &Path) -> CliResult<QClan> {
        let f = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Ok(QClan::read_from(&self.ctx, BufReader::new(f))?)
    }

    fn read_points(&self, path: &Path) -> CliResult<PointSet> {
        let f = File::open(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Ok(PointSet::read_from(&self.ctx, BufReader::new(f))?)
    }

    fn catalog(&self, classes: &[ClassLine]) -> ClassCatalog {
        ClassCatalog::with_orders(
            &self.ctx,
            class_tables(&self.ctx, classes),
            classes.iter().map(|c| c.stab_order).collect(),
        )
    }
}

fn write_atomic(path: &Path, data: &[u8]) -> CliResult {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, data)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn verdict(ok: bool, what: &str) -> CliResult {
    if ok {
        println!("PASS {what}");
        Ok(())
    } else {
        println!("FAIL {what}");
        Err(CliError::Failed(format!("{what} failed")))
    }
}

fn field_info(env: &Env) -> CliResult {
    let f = &env.ctx;
    println!("q {}", f.q());
    println!("e {}", f.e());
    println!("reduction_poly {:x}", f.reduction_poly());
    println!("generator {:x}", f.generator());
    println!("smallest_trace_one {:x}", f.trace_one_smallest());
    let m = env.manifest("field-info");
    env.finish("field-info", &m)
}

fn make_family(
    env: &Env,
    family: Family,
    auto: bool,
    delta: Option<String>,
    beta: Option<String>,
    m: Option<u64>,
    out: Option<PathBuf>,
) -> CliResult {
    let f = &env.ctx;
    let (name, clan, note) = match family {
        Family::Classical => ("classical", classical_qclan(f, env.kappa)?, String::new()),
        Family::Subiaco => match (auto, delta) {
            (true, _) => {
                let (d, c) = subiaco_auto(f)?;
                ("subiaco", c, format!("delta {d:x}"))
            }
            (false, Some(d)) => {
                let d = f.parse(&d)?;
                ("subiaco", subiaco_qclan(f, d)?, format!("delta {d:x}"))
            }
            (false, None) => return Err(CliError::Usage("subiaco needs --auto or --delta".into())),
        },
        Family::Adelaide => match (auto, beta) {
            (true, _) => {
                let (p, c) = adelaide_auto(f)?;
                ("adelaide", c, format!("beta {:x} m {}", p.beta.encode(f.e()), p.m))
            }
            (false, Some(b)) => {
                let code = u32::from_str_radix(&b, 16)
                    .map_err(|_| CliError::Usage(format!("--beta {b:?} is not hex")))?;
                let q = f.q() as u32;
                if code >= q * q {
                    return Err(CliError::Usage(format!("--beta {b} is outside GF(q^2)")));
                }
                let beta = ExtElem {
                    u: Fe((code % q) as u16),
                    v: Fe((code / q) as u16),
                };
                let m = m.unwrap_or((q as u64 - 1) / 3);
                let c = adelaide_qclan(f, AdelaideParams { beta, m })?;
                ("adelaide", c, format!("beta {b} m {m}"))
            }
            (false, None) => return Err(CliError::Usage("adelaide needs --auto or --beta".into())),
        },
    };
    let path = out.unwrap_or_else(|| env.art.path(&format!("{name}.qclan")));
    let mut buf = Vec::new();
    clan.write_to(&mut buf)?;
    fs::write(&path, buf)?;
    let mut man = env.manifest("make-family");
    if let Some(k) = clan.kappa() {
        man.kappa(k);
    }
    man.output(&path)?;
    env.finish("make-family", &man)?;
    println!("wrote {} {note}", path.display());
    Ok(())
}

fn verify_qclan(env: &Env, file: &Path) -> CliResult {
    let clan = env.read_clan(file)?;
    let mut man = env.manifest("verify-qclan");
    man.input(file)?;
    let ok = is_qclan(&env.ctx, &clan);
    man.counter("pass", ok as u64);
    env.finish("verify-qclan", &man)?;
    verdict(ok, &format!("q-clan {}", file.display()))
}

fn flock_check(env: &Env, file: &Path) -> CliResult {
    let clan = env.read_clan(file)?;
    let mut man = env.manifest("flock-check");
    man.input(file)?;
    let ok = is_flock(&env.ctx, &flock_planes(&clan));
    man.counter("pass", ok as u64);
    env.finish("flock-check", &man)?;
    verdict(ok, &format!("flock {}", file.display()))
}

fn stabilizer(env: &Env, file: &Path) -> CliResult {
    let set = env.read_points(file)?;
    set.validate(&env.ctx)?;
    let g = match set.role {
        SetRole::Oval => oval_stabilizer(&env.ctx, &set)?,
        _ => set_stabilizer(&env.ctx, &set)?,
    };
    let mut man = env.manifest("stabilizer");
    man.input(file)?;
    man.counter("order", g.order() as u64);
    env.finish("stabilizer", &man)?;
    println!("order {}", g.order());
    println!("orbits {:?}", g.orbit_sizes());
    Ok(())
}

fn census(env: &Env) -> CliResult {
    let hs = hyperoval_census(&env.ctx)?;
    let mut man = env.manifest("census");
    for (i, h) in hs.iter().enumerate() {
        let path = env.art.path(&format!("hyperoval-{i}.txt"));
        let mut buf = Vec::new();
        h.write_to(env.ctx.q(), &mut buf)?;
        fs::write(&path, buf)?;
        man.output(&path)?;
    }
    man.counter("hyperovals", hs.len() as u64);
    env.finish("census", &man)?;
    println!("{} hyperovals", hs.len());
    Ok(())
}

fn oval_classes(env: &Env, sources: &[String]) -> CliResult {
    let f = &env.ctx;
    let mut man = env.manifest("oval-classes");
    let mut hs = Vec::new();
    for s in sources {
        match s.as_str() {
            "known" => hs.extend(known_hyperovals(f)?.iter().map(|h| h.points(f))),
            "census" => hs.extend(hyperoval_census(f)?),
            path => {
                let p = Path::new(path);
                let set = env.read_points(p)?;
                set.validate(f)?;
                man.input(p)?;
                hs.push(set);
            }
        }
    }
    let (reps, stabs) = oval_class_reps(f, &hs)?;
    let classes: Vec<ClassLine> = reps
        .into_iter()
        .map(|r| ClassLine {
            hyperoval: r.hyperoval,
            orbit: r.orbit,
            orbit_size: r.orbit_size,
            stab_order: (stabs[r.hyperoval].order() / r.orbit_size) as u64,
            poly: r.poly,
        })
        .collect();
    let path = env.art.path("oval-classes.txt");
    write_classes(&path, f.q(), &classes)?;
    man.output(&path)?;
    man.counter("hyperovals", hs.len() as u64);
    man.counter("classes", classes.len() as u64);
    env.finish("oval-classes", &man)?;
    println!("{} classes", classes.len());
    Ok(())
}

fn build_store(env: &Env, classes: &Option<PathBuf>) -> CliResult {
    let f = &env.ctx;
    let cpath = env.classes_path(classes);
    let classes = read_classes(f, &cpath)?;
    let mut man = env.manifest("build-store");
    man.input(&cpath)?;
    let dir = env.checkpoint("build-store")?;
    env.bind_checkpoint(&dir, &sha256_file(&cpath)?)?;
    let tables = class_tables(f, &classes);
    let store = magic_orbit_union(f, &tables, &dir, |i, n| {
        eprintln!("representative {i}: {n} o-polynomials");
    })?;
    let tmp = dir.join("store.bin");
    let digest = sha256_file(&tmp)?;
    let path = env.art.path(&format!("store-{}.bin", &digest[..16]));
    if fs::rename(&tmp, &path).is_err() {
        fs::copy(&tmp, &path)?;
        fs::remove_file(&tmp)?;
    }
    man.output(&path)?;
    man.counter("store_size", store.len() as u64);
    env.finish("build-store", &man)?;
    println!("{} o-polynomials in {}", store.len(), path.display());
    Ok(())
}

fn store_info(env: &Env, store: &Option<PathBuf>, contains: &[String]) -> CliResult {
    let path = env.store_path(store)?;
    let s = ClassStore::read_from(&env.ctx, &path)?;
    println!("{} o-polynomials in {}", s.len(), path.display());
    for c in contains {
        let p = OPoly::from_text(&env.ctx, c)?;
        println!("{c} {}", if s.contains(&p) { "present" } else { "absent" });
    }
    Ok(())
}

const SEGMENT: usize = 1 << 20;

fn read_segment(path: &Path) -> CliResult<Option<Vec<ScanHit>>> {
    let Ok(text) = fs::read_to_string(path) else {
        return Ok(None);
    };
    let mut hits = Vec::new();
    let mut lines = text.lines();
    if lines.next() != Some("segment") {
        return Ok(None);
    }
    for line in lines {
        if line == "end" {
            return Ok(Some(hits));
        }
        let (a, b) = line
            .split_once(' ')
            .ok_or_else(|| CliError::Usage(format!("bad checkpoint line {line:?}")))?;
        let parse = |s: &str| s.parse::<usize>().map_err(|_| CliError::Usage(format!("bad checkpoint line {line:?}")));
        hits.push(ScanHit { f0: parse(a)?, record: parse(b)? });
    }
    // truncated: recompute
    Ok(None)
}

fn herd_search_cmd(env: &Env, classes: &Option<PathBuf>, store: &Option<PathBuf>) -> CliResult {
    let f = &env.ctx;
    let kappa = env.kappa();
    let cpath = env.classes_path(classes);
    let spath = env.store_path(store)?;
    let classes = read_classes(f, &cpath)?;
    let reps = class_tables(f, &classes);
    let store = ClassStore::read_from(f, &spath)?;
    let mut man = env.manifest("herd-search");
    man.kappa(kappa);
    man.input(&cpath)?;
    man.input(&spath)?;
    let dir = env.checkpoint("herd-search")?;
    let key = sha256_bytes(
        format!("{} {} {kappa:x}", sha256_file(&cpath)?, sha256_file(&spath)?).as_bytes(),
    );
    env.bind_checkpoint(&dir, &key)?;

    let scanner = StoreScanner::new(f, store.codec(), kappa, &reps)?;
    let segments = store.len().div_ceil(SEGMENT);
    let mut stage1 = Vec::new();
    for s in 0..segments {
        let path = dir.join(format!("stage1-{s:05}.txt"));
        let hits = match read_segment(&path)? {
            Some(h) => h,
            None => {
                let range = s * SEGMENT..store.len().min((s + 1) * SEGMENT);
                let h = quick_filter_scan(&scanner, &store, range);
                let mut text = String::from("segment\n");
                for x in &h {
                    text.push_str(&format!("{} {}\n", x.f0, x.record));
                }
                text.push_str("end\n");
                write_atomic(&path, text.as_bytes())?;
                h
            }
        };
        stage1.extend(hits);
        eprintln!("segment {}/{segments}: {} stage-1 pairs so far", s + 1, stage1.len());
    }
    stage1.sort();
    let stage2 = full_filter(f, &reps, &store, kappa, &stage1)?;
    let mut cat = env.catalog(&classes);
    let mut lines = Vec::new();
    for h in &stage1 {
        let passed = stage2.contains(h);
        let fingerprint = if passed {
            let herd = Herd::new(f, reps[h.f0].clone(), store.poly(h.record).tabulate(f), kappa)?;
            herd_fingerprint(f, &herd, &mut cat)?.to_string()
        } else {
            "-".into()
        };
        lines.push(SurvivorLine {
            f0: h.f0,
            finf: store.record(h.record).to_vec(),
            kappa,
            stage: if passed { 2 } else { 1 },
            fingerprint,
        });
    }
    let path = env.art.path("herd-search.txt");
    write_report(&path, &lines)?;
    man.output(&path)?;
    man.counter("store_size", store.len() as u64);
    man.counter("stage1", stage1.len() as u64);
    man.counter("stage2", stage2.len() as u64);
    env.finish("herd-search", &man)?;
    println!("stage-1 {}, stage-2 {}", stage1.len(), stage2.len());
    Ok(())
}

/// Herds from stage-2 lines of a report or from normalized clan files, with labels.
fn load_herds(
    env: &Env,
    classes: Option<&[ClassLine]>,
    report: &Option<PathBuf>,
    clans: &[PathBuf],
    man: &mut RunManifest,
) -> CliResult<Vec<(String, Herd)>> {
    let f = &env.ctx;
    let mut out = Vec::new();
    if let Some(r) = report {
        let classes = classes.ok_or_else(|| CliError::Usage("--report needs the class file".into()))?;
        let codec = ovalherd::opoly::PackedCodec::new(f);
        man.input(r)?;
        for (i, l) in read_report(f, &codec, r)?.into_iter().enumerate() {
            if l.stage != 2 {
                continue;
            }
            let c = classes
                .get(l.f0)
                .ok_or_else(|| CliError::Usage(format!("report line {} names class {}", i + 1, l.f0)))?;
            let herd = Herd::new(f, c.poly.tabulate(f), codec.unpack(&l.finf).tabulate(f), l.kappa)?;
            out.push((format!("line {}", i + 1), herd));
        }
    }
    for p in clans {
        man.input(p)?;
        let clan = env.read_clan(p)?;
        out.push((p.display().to_string(), Herd::from_qclan(f, &clan)?));
    }
    Ok(out)
}

fn fingerprint_cmd(env: &Env, classes: &Option<PathBuf>, report: &Option<PathBuf>, clans: &[PathBuf]) -> CliResult {
    let cpath = env.classes_path(classes);
    let classes = read_classes(&env.ctx, &cpath)?;
    let mut man = env.manifest("fingerprint");
    man.input(&cpath)?;
    let herds = load_herds(env, Some(&classes), report, clans, &mut man)?;
    if herds.is_empty() {
        return Err(CliError::Usage("give clan files or --report".into()));
    }
    let mut cat = env.catalog(&classes);
    let mut text = String::new();
    for (label, h) in &herds {
        let fp = herd_fingerprint(&env.ctx, h, &mut cat)?;
        text.push_str(&format!("{label}\t{fp}\n"));
    }
    let path = env.art.path("fingerprints.txt");
    fs::write(&path, &text)?;
    man.output(&path)?;
    env.finish("fingerprint", &man)?;
    print!("{text}");
    Ok(())
}

fn herd_isomorphic_cmd(env: &Env, classes: &Option<PathBuf>, report: &Option<PathBuf>, clans: &[PathBuf]) -> CliResult {
    let f = &env.ctx;
    let mut man = env.manifest("herd-isomorphic");
    if report.is_none() {
        let [a, b] = clans else {
            return Err(CliError::Usage("give two clan files or --report".into()));
        };
        let herds = load_herds(env, None, &None, clans, &mut man)?;
        let iso = herds_isomorphic(f, &herds[0].1, &herds[1].1)?;
        man.counter("isomorphic", iso.is_some() as u64);
        env.finish("herd-isomorphic", &man)?;
        match iso {
            Some(i) => println!("isomorphic via {} with member permutation {:?}", i.psi, i.perm),
            None => println!("{} and {} are not isomorphic", a.display(), b.display()),
        }
        return Ok(());
    }
    let cpath = env.classes_path(classes);
    let classes = read_classes(f, &cpath)?;
    man.input(&cpath)?;
    let herds = load_herds(env, Some(&classes), report, clans, &mut man)?;
    let mut cat = env.catalog(&classes);
    let fps: Vec<HerdFingerprint> = herds
        .iter()
        .map(|(_, h)| herd_fingerprint(f, h, &mut cat))
        .collect::<Result<_, _>>()?;
    let mut cls: Vec<usize> = Vec::new();
    for i in 0..herds.len() {
        let mut c = i;
        for j in (0..i).filter(|&j| cls[j] == j) {
            if herds_isomorphic_with(f, &herds[i].1, &fps[i], &herds[j].1, &fps[j])?.is_some() {
                c = j;
                break;
            }
        }
        cls.push(c);
    }
    let reps: Vec<usize> = (0..cls.len()).filter(|&i| cls[i] == i).collect();
    let n = reps.len();
    let mut text = String::new();
    for (i, (label, _)) in herds.iter().enumerate() {
        let id = reps.binary_search(&cls[i]).expect("class representative");
        text.push_str(&format!("{label}\tclass {id}\n"));
    }
    let path = env.art.path("herd-classes.txt");
    fs::write(&path, &text)?;
    man.output(&path)?;
    man.counter("herds", herds.len() as u64);
    man.counter("classes", n as u64);
    env.finish("herd-isomorphic", &man)?;
    print!("{text}");
    println!("{n} classes");
    Ok(())
}

fn gq_check(
    env: &Env,
    kind: GqKind,
    clan: &Option<PathBuf>,
    oval: &Option<PathBuf>,
    export: &Option<PathBuf>,
    allow_large: bool,
) -> CliResult {
    let f = &env.ctx;
    let q = f.q();
    let mut man = env.manifest("gq-check");
    let (s, order) = match kind {
        GqKind::Gq => {
            let c = match clan {
                Some(p) => {
                    man.input(p)?;
                    env.read_clan(p)?
                }
                None => classical_qclan(f, env.kappa)?,
            };
            (build_gq_capped(f, &c, if allow_large { 8 } else { 4 })?, (q * q, q))
        }
        GqKind::T2 => {
            let o = match oval {
                Some(p) => {
                    man.input(p)?;
                    env.read_points(p)?
                }
                None => conic(f),
            };
            (build_t2(f, &o)?, (q, q))
        }
    };
    println!("{} points, {} lines", s.num_points(), s.num_lines());
    if let Some(p) = export {
        let mut w = BufWriter::new(File::create(p)?);
        s.write_to(&mut w)?;
        w.flush()?;
        drop(w);
        man.output(p)?;
    }
    let v = verify_gq(&s, order.0, order.1);
    man.counter("points", s.num_points() as u64);
    man.counter("lines", s.num_lines() as u64);
    man.counter("pass", v.is_ok() as u64);
    env.finish("gq-check", &man)?;
    if let Err(e) = &v {
        println!("first violated axiom: {e}");
    }
    verdict(v.is_ok(), &format!("GQ({}, {})", order.0, order.1))
}

fn run(cli: Cli) -> CliResult {
    let env = Env::new(&cli.global)?;
    match cli.cmd {
        Cmd::FieldInfo => field_info(&env),
        Cmd::VerifyQclan { file } => verify_qclan(&env, &file),
        Cmd::MakeFamily { family, auto, delta, beta, m, out } => make_family(&env, family, auto, delta, beta, m, out),
        Cmd::FlockCheck { file } => flock_check(&env, &file),
        Cmd::Stabilizer { file } => stabilizer(&env, &file),
        Cmd::OvalClasses { hyperovals } => oval_classes(&env, &hyperovals),
        Cmd::Census => census(&env),
        Cmd::BuildStore { classes } => build_store(&env, &classes),
        Cmd::StoreInfo { store, contains } => store_info(&env, &store, &contains),
        Cmd::HerdSearch { classes, store } => herd_search_cmd(&env, &classes, &store),
        Cmd::Fingerprint { classes, report, clans } => fingerprint_cmd(&env, &classes, &report, &clans),
        Cmd::HerdIsomorphic { classes, report, clans } => herd_isomorphic_cmd(&env, &classes, &report, &clans),
        Cmd::GqCheck { kind, clan, oval, export, allow_large } => {
            gq_check(&env, kind, &clan, &oval, &export, allow_large)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(_)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
