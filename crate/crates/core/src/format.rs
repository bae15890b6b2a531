//! The `wcircuit 1` text format.
//!
//! ```text
//! wcircuit 1
//! qubits 3
//! F 1 2 0.95531661812450930
//! CNOT 2 1
//! F 2 3 0.78539816339744831
//! CNOT 3 2
//! ```
//!
//! One gate per line in application order, 1-based indices, angles in
//! radians with 17 significant digits. `#` starts a comment. The file carries
//! no level line; the level is inferred from the gate kinds present.

use std::fmt::Write as _;

use crate::circuit::{Circuit, Gate, GateCounts, Level};
use crate::error::{Error, Result};
use crate::numfmt::format_sig;

pub const MAGIC: &str = "wcircuit";
pub const VERSION: &str = "1";

/// Digits used for angles in circuit files; enough to round-trip any `f64`.
pub const ANGLE_DIGITS: usize = 17;

pub fn to_text(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    writeln!(out, "qubits {}", circuit.n_qubits()).unwrap();
    for gate in circuit.gates() {
        match *gate {
            Gate::F {
                control,
                target,
                alpha,
            } => writeln!(
                out,
                "F {control} {target} {}",
                format_sig(alpha.radians(), ANGLE_DIGITS)
            ),
            Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
            Gate::Cz { control, target } => writeln!(out, "CZ {control} {target}"),
            Gate::Rot { qubit, alpha } => writeln!(
                out,
                "ROT {qubit} {} # plate {} deg",
                format_sig(alpha.radians(), ANGLE_DIGITS),
                format_sig(alpha.degrees() / 2.0, 12)
            ),
        }
        .unwrap();
    }
    out
}

/// Lowest-effort level that admits every gate: F means COMPOSITE, CZ means
/// CZ_LEVEL, ROT means ELEMENTARY, and CNOT-only circuits are COMPOSITE.
fn infer_level(counts: &GateCounts) -> Level {
    if counts.f > 0 {
        Level::Composite
    } else if counts.cz > 0 {
        Level::CzLevel
    } else if counts.rot > 0 {
        Level::Elementary
    } else {
        Level::Composite
    }
}

fn parse_index(tok: &str, n_qubits: usize, line: usize) -> Result<u32> {
    let v: u32 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad qubit index {tok:?}")))?;
    if v == 0 || v as usize > n_qubits {
        return Err(Error::parse(
            line,
            format!("qubit index {v} out of range 1..={n_qubits}"),
        ));
    }
    Ok(v)
}

fn parse_angle(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("bad angle {tok:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("angle {tok:?} is not finite")));
    }
    Ok(v)
}

fn expect_fields(fields: &[&str], count: usize, keyword: &str, line: usize) -> Result<()> {
    if fields.len() != count {
        return Err(Error::parse(
            line,
            format!(
                "{keyword} takes {} field(s), got {}",
                count - 1,
                fields.len() - 1
            ),
        ));
    }
    Ok(())
}

/// Strict parser: unknown keywords, missing or extra fields and bad indices
/// are errors.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let content = raw.split_once('#').map_or(raw, |(head, _)| head);
            (i + 1, content.split_whitespace().collect::<Vec<_>>())
        })
        .filter(|(_, fields)| !fields.is_empty());

    match lines.next() {
        Some((_, f)) if f == [MAGIC, VERSION] => {}
        Some((line, _)) => return Err(Error::parse(line, format!("expected `{MAGIC} {VERSION}`"))),
        None => return Err(Error::parse(0, "empty input")),
    }

    let n_qubits = match lines.next() {
        Some((line, f)) if f.first() == Some(&"qubits") => {
            expect_fields(&f, 2, "qubits", line)?;
            let n: usize = f[1]
                .parse()
                .map_err(|_| Error::parse(line, format!("bad qubit count {:?}", f[1])))?;
            if n < 2 {
                return Err(Error::parse(line, "qubit count must be at least 2"));
            }
            n
        }
        Some((line, _)) => return Err(Error::parse(line, "expected `qubits <n>`")),
        None => return Err(Error::parse(0, "missing `qubits` line")),
    };

    let mut gates = Vec::new();
    for (line, f) in lines {
        let gate = match f[0] {
            "F" => {
                expect_fields(&f, 4, "F", line)?;
                let c = parse_index(f[1], n_qubits, line)?;
                let t = parse_index(f[2], n_qubits, line)?;
                Gate::f(c, t, parse_angle(f[3], line)?)
            }
            "CNOT" | "CZ" => {
                expect_fields(&f, 3, f[0], line)?;
                let c = parse_index(f[1], n_qubits, line)?;
                let t = parse_index(f[2], n_qubits, line)?;
                if f[0] == "CNOT" {
                    Gate::cnot(c, t)
                } else {
                    Gate::cz(c, t)
                }
            }
            "ROT" => {
                expect_fields(&f, 3, "ROT", line)?;
                let q = parse_index(f[1], n_qubits, line)?;
                Gate::rot(q, parse_angle(f[2], line)?)
            }
            other => return Err(Error::parse(line, format!("unknown keyword {other:?}"))),
        }
        .map_err(|e| Error::parse(line, e.to_string()))?;
        gates.push(gate);
    }

    let counts: GateCounts = gates.iter().collect();
    let level = infer_level(&counts);
    Circuit::new(n_qubits, gates, level).map_err(|e| Error::parse(0, e.to_string()))
}
