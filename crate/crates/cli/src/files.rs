//! Text formats owned by the CLI: the oval class list and the survivor report.

use std::fs;
use std::io::Write;
use std::path::Path;

use ovalherd::opoly::{EvalTable, OPoly, PackedCodec};
use ovalherd::{Fe, FieldCtx};

use crate::CliError;

/// One oval class: where it came from, its stabilizer order and o-polynomial.
#[derive(Clone, Debug)]
pub struct ClassLine {
    pub hyperoval: usize,
    pub orbit: usize,
    pub orbit_size: usize,
    pub stab_order: u64,
    pub poly: OPoly,
}

/// `q <q> classes <n>`, then `<id> <hyperoval> <orbit> <orbit size> <stabilizer order> <poly>`
/// with the polynomial as comma-separated hex coefficients of degrees 1..q-1.
pub fn write_classes(path: &Path, q: usize, classes: &[ClassLine]) -> Result<(), CliError> {
    let mut out = Vec::new();
    writeln!(out, "q {q} classes {}", classes.len())?;
    for (i, c) in classes.iter().enumerate() {
        writeln!(
            out,
            "{i} {} {} {} {} {}",
            c.hyperoval,
            c.orbit,
            c.orbit_size,
            c.stab_order,
            c.poly.to_text()
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}

fn bad(path: &Path, line: usize, msg: &str) -> CliError {
    CliError::Usage(format!("{}:{}: {msg}", path.display(), line + 1))
}

pub fn read_classes(ctx: &FieldCtx, path: &Path) -> Result<Vec<ClassLine>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().unwrap_or("").split_whitespace().collect();
    let (q, n) = match head.as_slice() {
        ["q", q, "classes", n] => (
            q.parse::<usize>().map_err(|_| bad(path, 0, "bad q"))?,
            n.parse::<usize>().map_err(|_| bad(path, 0, "bad count"))?,
        ),
        _ => return Err(bad(path, 0, "expected `q <q> classes <n>`")),
    };
    if q != ctx.q() {
        return Err(bad(path, 0, &format!("file is for q = {q}, not {}", ctx.q())));
    }
    let mut out = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 || f[0] != out.len().to_string() {
            return Err(bad(path, i + 1, "expected `<id> <hyperoval> <orbit> <size> <order> <poly>`"));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad(path, i + 1, "bad number"));
        out.push(ClassLine {
            hyperoval: num(f[1])? as usize,
            orbit: num(f[2])? as usize,
            orbit_size: num(f[3])? as usize,
            stab_order: num(f[4])?,
            poly: OPoly::from_text(ctx, f[5])?,
        });
    }
    if out.len() != n {
        return Err(bad(path, 0, &format!("header promises {n} classes, found {}", out.len())));
    }
    Ok(out)
}

pub fn class_tables(ctx: &FieldCtx, classes: &[ClassLine]) -> Vec<EvalTable> {
    classes.iter().map(|c| c.poly.tabulate(ctx)).collect()
}

/// One (f0, f∞) pair of a herd search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurvivorLine {
    pub f0: usize,
    pub finf: Vec<u8>,
    pub kappa: Fe,
    pub stage: u8,
    pub fingerprint: String,
}

/// `f0 <class id> finf <packed hex> kappa <hex> stage <1|2> fingerprint <summary>`;
/// the summary runs to the end of the line and is `-` for stage-1 pairs.
pub fn write_report(path: &Path, lines: &[SurvivorLine]) -> Result<(), CliError> {
    let mut out = Vec::new();
    for l in lines {
        writeln!(
            out,
            "f0 {} finf {} kappa {:x} stage {} fingerprint {}",
            l.f0,
            hex::encode(&l.finf),
            l.kappa,
            l.stage,
            l.fingerprint
        )?;
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_report(ctx: &FieldCtx, codec: &PackedCodec, path: &Path) -> Result<Vec<SurvivorLine>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (head, fp) = line
            .split_once(" fingerprint ")
            .ok_or_else(|| bad(path, i, "missing fingerprint field"))?;
        let f: Vec<&str> = head.split_whitespace().collect();
        let [("f0", f0), ("finf", finf), ("kappa", kappa), ("stage", stage)] =
            [(f.first(), f.get(1)), (f.get(2), f.get(3)), (f.get(4), f.get(5)), (f.get(6), f.get(7))]
                .map(|(k, v)| (k.copied().unwrap_or(""), v.copied().unwrap_or("")))
        else {
            return Err(bad(path, i, "expected `f0 .. finf .. kappa .. stage ..`"));
        };
        let finf = hex::decode(finf).map_err(|_| bad(path, i, "finf is not hex"))?;
        if finf.len() != codec.record_len() {
            return Err(bad(path, i, "finf record has the wrong length"));
        }
        out.push(SurvivorLine {
            f0: f0.parse().map_err(|_| bad(path, i, "bad f0 id"))?,
            finf,
            kappa: ctx.parse(kappa)?,
            stage: stage.parse().map_err(|_| bad(path, i, "bad stage"))?,
            fingerprint: fp.to_string(),
        });
    }
    Ok(out)
}
