//! Line-oriented instance text format.
//!
//! ```text
//! MDRI 1
//! # comment
//! nrot <k>
//! atom <x> <y> <z> <weight> <torsion-index | ->
//! site <x> <y> <z> <depth> <d0>
//! ```
//!
//! The magic line must come first. `#` starts a comment anywhere on a line;
//! blank lines are ignored. `nrot` defaults to 0 and may appear at most once.

use std::fmt::Write as _;
use std::path::Path;

use crate::docking::{LigandAtom, LigandInstance, ReceptorSite};
use crate::error::{Error, Result};

pub const MAGIC: &str = "MDRI 1";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn numbers<const N: usize>(fields: &[&str], line: usize, what: &str) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| parse_err(line, format!("{what}: `{f}` is not a finite number")))?;
    }
    Ok(out)
}

pub fn parse_instance(text: &str) -> Result<LigandInstance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, first)) if first.trim() == MAGIC => {}
        Some((_, first)) => {
            return Err(parse_err(
                1,
                format!("expected `{MAGIC}` header, found `{}`", first.trim()),
            ));
        }
        None => return Err(parse_err(1, format!("empty file, expected `{MAGIC}` header"))),
    }

    let mut nrot: Option<usize> = None;
    let mut atoms = Vec::new();
    let mut atom_lines = Vec::new();
    let mut sites = Vec::new();
    for (no, raw) in lines {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "nrot" => {
                if fields.len() != 2 {
                    return Err(parse_err(no, "expected `nrot <k>`"));
                }
                if nrot.is_some() {
                    return Err(parse_err(no, "duplicate nrot line"));
                }
                let k = fields[1]
                    .parse::<usize>()
                    .map_err(|_| parse_err(no, format!("nrot: `{}` is not a count", fields[1])))?;
                nrot = Some(k);
            }
            "atom" => {
                if fields.len() != 6 {
                    return Err(parse_err(no, "expected `atom <x> <y> <z> <weight> <torsion|->`"));
                }
                let [x, y, z, w] = numbers::<4>(&fields[1..5], no, "atom")?;
                let torsion = match fields[5] {
                    "-" => None,
                    t => Some(
                        t.parse::<usize>()
                            .map_err(|_| parse_err(no, format!("atom: torsion index `{t}` is not `-` or a count")))?,
                    ),
                };
                atoms.push(LigandAtom {
                    position: [x, y, z],
                    weight: w,
                    torsion,
                });
                atom_lines.push(no);
            }
            "site" => {
                if fields.len() != 6 {
                    return Err(parse_err(no, "expected `site <x> <y> <z> <depth> <d0>`"));
                }
                let [x, y, z, depth, d0] = numbers::<5>(&fields[1..6], no, "site")?;
                if depth < 0.0 || d0 <= 0.0 {
                    return Err(parse_err(no, "site: depth must be >= 0 and d0 > 0"));
                }
                sites.push(ReceptorSite {
                    position: [x, y, z],
                    depth,
                    d0,
                });
            }
            other => return Err(parse_err(no, format!("unknown record `{other}`"))),
        }
    }

    let nrot = nrot.unwrap_or(0);
    for (atom, &no) in atoms.iter().zip(&atom_lines) {
        if let Some(t) = atom.torsion {
            if t >= nrot {
                return Err(parse_err(no, format!("atom references torsion {t} but nrot is {nrot}")));
            }
        }
    }
    let last = text.lines().count().max(1);
    if atoms.is_empty() {
        return Err(parse_err(last, "no atom lines"));
    }
    if sites.is_empty() {
        return Err(parse_err(last, "no site lines"));
    }
    LigandInstance::new(atoms, sites, nrot)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<LigandInstance> {
    parse_instance(&std::fs::read_to_string(path)?)
}

/// Writes an instance back out. Numbers use the shortest text that parses
/// back to the same `f64`.
pub fn serialize_instance(inst: &LigandInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "nrot {}", inst.nrot());
    for a in inst.atoms() {
        let t = a.torsion.map_or_else(|| "-".to_string(), |t| t.to_string());
        let [x, y, z] = a.position;
        let _ = writeln!(out, "atom {x} {y} {z} {} {t}", a.weight);
    }
    for s in inst.sites() {
        let [x, y, z] = s.position;
        let _ = writeln!(out, "site {x} {y} {z} {} {}", s.depth, s.d0);
    }
    out
}
