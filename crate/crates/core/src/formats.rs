// SPDX-License-Identifier: Apache-2.0

//! Text formats for truth tables, signals, schedules and system bundles.
//!
//! Truth table:
//!
//! ```text
//! n=2 m=1
//! 00 0 -> 00
//! 10 0 -> 10
//! ...
//! ```
//!
//! Every row of `B^n x B^m` must appear exactly once, in any order.
//!
//! System bundle:
//!
//! ```text
//! [phi]
//! file = latch.tt          # or an inline table, or inline equations
//! [inputs]
//! rise: n=1 init=0 H=12 events=(0,1)
//! [phi0]
//! rise: 00, 11
//! [pi]
//! 00 @ rise: fast, slow
//! 11 @ rise: fast
//! [rho fast]
//! n=2 H=12 events=(1,11)
//! [rho slow]
//! n=2 H=12 events=(1,10);(2,01)
//! ```
//!
//! Blank lines and `#` comments are ignored everywhere.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::bits::BitVec;
use crate::boolfn::GeneratorFn;
use crate::dsl;
use crate::error::{Error, Result};
use crate::signals::{parse_schedule_line, parse_signal_line, ProgressiveFunction, Signal};
use crate::systems::{Input, RegularSystem, Schedule};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Non-blank lines with comments removed, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty())
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

// ---- truth tables -------------------------------------------------------

pub fn format_table(phi: &GeneratorFn) -> String {
    let mut out = format!("n={} m={}\n", phi.n(), phi.m());
    for row in 0..phi.rows() {
        let (mu, lambda) = phi.point(row);
        let nu = BitVec::new(phi.n(), phi.table()[row]).expect("table entries fit in n bits");
        writeln!(out, "{mu} {lambda} -> {nu}").expect("writing to a String");
    }
    out
}

fn header_err(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedHeader {
        line,
        message: message.into(),
    }
}

fn row_err(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedRow {
        line,
        message: message.into(),
    }
}

fn parse_header(line: usize, text: &str) -> Result<(usize, usize)> {
    let mut n = None;
    let mut m = None;
    for token in text.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| header_err(line, format!("expected key=value, found `{token}`")))?;
        let value: usize = value
            .parse()
            .map_err(|_| header_err(line, format!("`{value}` is not a count")))?;
        match key {
            "n" => n = Some(value),
            "m" => m = Some(value),
            other => return Err(header_err(line, format!("unknown field `{other}`"))),
        }
    }
    match (n, m) {
        (Some(n), Some(m)) => Ok((n, m)),
        _ => Err(header_err(line, "expected `n=<n> m=<m>`")),
    }
}

fn parse_bits(line: usize, text: &str, width: usize, what: &str) -> Result<BitVec> {
    let v: BitVec = text
        .parse()
        .map_err(|_| row_err(line, format!("{what} `{text}` is not a bit string")))?;
    if v.width() != width {
        return Err(row_err(
            line,
            format!("{what} `{text}` has {} bits, expected {width}", v.width()),
        ));
    }
    Ok(v)
}

fn parse_table_lines<'a>(mut lines: impl Iterator<Item = (usize, &'a str)>) -> Result<GeneratorFn> {
    let (hline, htext) = lines
        .next()
        .ok_or_else(|| header_err(1, "empty truth table"))?;
    let (n, m) = parse_header(hline, htext)?;
    if n == 0 {
        return Err(header_err(hline, "n must be at least 1"));
    }
    crate::boolfn::check_dimensions(n, m)?;
    let rows = 1usize << (n + m);
    let mut table: Vec<Option<u64>> = vec![None; rows];
    for (line, text) in lines {
        let (lhs, rhs) = text
            .split_once("->")
            .ok_or_else(|| row_err(line, "expected `<mu> <lambda> -> <nu>`"))?;
        let parts: Vec<&str> = lhs.split_whitespace().collect();
        let (mu_text, lambda_text) = match (parts.as_slice(), m) {
            ([mu], 0) => (*mu, ""),
            ([mu, lambda], _) => (*mu, *lambda),
            _ => return Err(row_err(line, "expected `<mu> <lambda> -> <nu>`")),
        };
        let mu = parse_bits(line, mu_text, n, "state")?;
        let lambda = parse_bits(line, lambda_text, m, "input")?;
        let nu = parse_bits(line, rhs.trim(), n, "next state")?;
        let index = (mu.bits() | lambda.bits() << n) as usize;
        if table[index].replace(nu.bits()).is_some() {
            return Err(Error::DuplicateRow {
                line,
                mu: mu.to_string(),
                lambda: lambda.to_string(),
            });
        }
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(row, v)| {
            v.ok_or_else(|| {
                let row = row as u64;
                Error::MissingRow {
                    mu: BitVec::new(n, row & ((1 << n) - 1)).unwrap().to_string(),
                    lambda: BitVec::new(m, row >> n).unwrap().to_string(),
                }
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    GeneratorFn::from_table(n, m, table)
}

pub fn parse_table(text: &str) -> Result<GeneratorFn> {
    parse_table_lines(content_lines(text))
}

pub fn load_truth_table(path: &Path) -> Result<GeneratorFn> {
    parse_table(&read(path)?)
}

pub fn save_truth_table(path: &Path, phi: &GeneratorFn) -> Result<()> {
    write(path, &format_table(phi))
}

/// A generator function from either a truth table (first line `n=.. m=..`) or
/// equations.
pub fn parse_phi(text: &str) -> Result<GeneratorFn> {
    match content_lines(text).next() {
        Some((_, first)) if first.starts_with("n=") => parse_table(text),
        _ => dsl::compile(&dsl::parse_dsl(text)?),
    }
}

fn parse_phi_lines(lines: &[(usize, &str)]) -> Result<GeneratorFn> {
    match lines.first() {
        Some((_, first)) if first.starts_with("n=") => parse_table_lines(lines.iter().copied()),
        _ => dsl::compile(&dsl::parse_numbered(lines.iter().copied())?),
    }
}

pub fn load_phi(path: &Path) -> Result<GeneratorFn> {
    parse_phi(&read(path)?)
}

// ---- signals and schedules ----------------------------------------------

fn single_record(text: &str) -> Result<(usize, &str)> {
    let mut lines = content_lines(text);
    let first = lines.next().ok_or_else(|| Error::Format {
        line: 1,
        message: "empty file".into(),
    })?;
    if let Some((line, _)) = lines.next() {
        return Err(Error::Format {
            line,
            message: "expected a single record".into(),
        });
    }
    Ok(first)
}

pub fn parse_signal(text: &str) -> Result<Signal> {
    let (line, rec) = single_record(text)?;
    parse_signal_line(rec, line)
}

pub fn parse_schedule(text: &str) -> Result<ProgressiveFunction> {
    let (line, rec) = single_record(text)?;
    parse_schedule_line(rec, line)
}

pub fn load_signal(path: &Path) -> Result<Signal> {
    parse_signal(&read(path)?)
}

pub fn load_schedule(path: &Path) -> Result<ProgressiveFunction> {
    parse_schedule(&read(path)?)
}

// ---- system bundles -----------------------------------------------------

fn fmt_err(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

/// Numbered lines of one section.
type Lines<'a> = Vec<(usize, &'a str)>;

#[derive(Default)]
struct Sections<'a> {
    phi: Lines<'a>,
    inputs: Lines<'a>,
    phi0: Lines<'a>,
    pi: Lines<'a>,
    rho: Vec<(usize, String, Lines<'a>)>,
}

fn split_sections(text: &str) -> Result<Sections<'_>> {
    enum Target {
        None,
        Phi,
        Inputs,
        Phi0,
        Pi,
        Rho(usize),
    }
    let mut s = Sections::default();
    let mut target = Target::None;
    let mut seen = BTreeSet::new();
    for (line, text) in content_lines(text) {
        if let Some(name) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = name.trim();
            if !seen.insert(name.to_string()) {
                return Err(fmt_err(line, format!("section [{name}] appears twice")));
            }
            target = match name {
                "phi" => Target::Phi,
                "inputs" => Target::Inputs,
                "phi0" => Target::Phi0,
                "pi" => Target::Pi,
                other => match other.strip_prefix("rho ") {
                    Some(rho) if !rho.trim().is_empty() => {
                        s.rho.push((line, rho.trim().to_string(), Vec::new()));
                        Target::Rho(s.rho.len() - 1)
                    }
                    _ => return Err(fmt_err(line, format!("unknown section [{other}]"))),
                },
            };
            continue;
        }
        match target {
            Target::None => return Err(fmt_err(line, "content before the first section")),
            Target::Phi => s.phi.push((line, text)),
            Target::Inputs => s.inputs.push((line, text)),
            Target::Phi0 => s.phi0.push((line, text)),
            Target::Pi => s.pi.push((line, text)),
            Target::Rho(k) => s.rho[k].2.push((line, text)),
        }
    }
    Ok(s)
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

/// Parses a bundle; `file =` references in `[phi]` are resolved against `base`.
pub fn parse_system(text: &str, base: &Path) -> Result<RegularSystem> {
    let s = split_sections(text)?;

    let phi = match s.phi.as_slice() {
        [] => return Err(fmt_err(1, "missing [phi] section")),
        [(line, first)] if first.starts_with("file") => {
            let path = first
                .split_once('=')
                .map(|(_, p)| p.trim())
                .filter(|p| !p.is_empty())
                .ok_or_else(|| fmt_err(*line, "expected `file = <path>`"))?;
            load_phi(&base.join(path))?
        }
        lines => parse_phi_lines(lines)?,
    };

    let mut inputs = Vec::new();
    for (line, text) in &s.inputs {
        let (name, rec) = text
            .split_once(':')
            .ok_or_else(|| fmt_err(*line, "expected `<name>: <signal>`"))?;
        inputs.push(Input {
            name: name.trim().to_string(),
            signal: parse_signal_line(rec, *line)?,
        });
    }
    let index_of = |line: usize, name: &str| {
        inputs
            .iter()
            .position(|i| i.name == name)
            .ok_or_else(|| fmt_err(line, format!("unknown input `{name}`")))
    };

    let mut phi0 = vec![BTreeSet::new(); inputs.len()];
    for (line, text) in &s.phi0 {
        let (name, list) = text
            .split_once(':')
            .ok_or_else(|| fmt_err(*line, "expected `<input>: <bits>, ...`"))?;
        let k = index_of(*line, name.trim())?;
        for bits in split_list(list) {
            phi0[k].insert(bits.parse().map_err(|e: Error| fmt_err(*line, e.to_string()))?);
        }
    }

    let mut schedules = BTreeMap::new();
    for (line, name, body) in &s.rho {
        let [(rline, rec)] = body.as_slice() else {
            return Err(fmt_err(*line, format!("[rho {name}] needs exactly one record")));
        };
        if schedules
            .insert(name.clone(), parse_schedule_line(rec, *rline)?)
            .is_some()
        {
            return Err(fmt_err(*line, format!("schedule `{name}` defined twice")));
        }
    }

    let mut pi: BTreeMap<(usize, BitVec), Vec<Schedule>> = BTreeMap::new();
    for (line, text) in &s.pi {
        let (key, list) = text
            .split_once(':')
            .ok_or_else(|| fmt_err(*line, "expected `<bits> @ <input>: <rho>, ...`"))?;
        let (bits, name) = key
            .split_once('@')
            .ok_or_else(|| fmt_err(*line, "expected `<bits> @ <input>`"))?;
        let mu: BitVec = bits
            .trim()
            .parse()
            .map_err(|e: Error| fmt_err(*line, e.to_string()))?;
        let k = index_of(*line, name.trim())?;
        let entry = pi.entry((k, mu)).or_default();
        for rho in split_list(list) {
            let r = schedules
                .get(rho)
                .ok_or_else(|| fmt_err(*line, format!("unknown schedule `{rho}`")))?;
            entry.push(Schedule::Single(r.clone()));
        }
    }

    RegularSystem::new(phi, inputs, phi0, pi)
}

pub fn load_system(path: &Path) -> Result<RegularSystem> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_system(&read(path)?, &base)
}

/// Writes a self-contained bundle with the table inline. Product schedules are
/// stored materialized, and identical schedules share one `[rho]` section.
pub fn format_system(sys: &RegularSystem) -> Result<String> {
    let mut out = String::from("[phi]\n");
    out.push_str(&format_table(sys.phi()));
    out.push_str("\n[inputs]\n");
    for inp in sys.inputs() {
        writeln!(out, "{}: {}", inp.name, inp.signal).expect("writing to a String");
    }
    out.push_str("\n[phi0]\n");
    for (k, inp) in sys.inputs().iter().enumerate() {
        let list: Vec<String> = sys.phi0(k).iter().map(BitVec::to_string).collect();
        writeln!(out, "{}: {}", inp.name, list.join(", ")).expect("writing to a String");
    }
    let mut names: BTreeMap<ProgressiveFunction, String> = BTreeMap::new();
    let mut order = Vec::new();
    out.push_str("\n[pi]\n");
    for ((k, mu), schedules) in sys.pi_entries() {
        let mut refs = Vec::new();
        for s in schedules {
            let rho = s.materialize()?;
            let next = names.len() + 1;
            let name = names.entry(rho.clone()).or_insert_with(|| {
                order.push(rho);
                format!("r{next}")
            });
            refs.push(name.clone());
        }
        writeln!(out, "{mu} @ {}: {}", sys.inputs()[*k].name, refs.join(", "))
            .expect("writing to a String");
    }
    for rho in order {
        write!(out, "\n[rho {}]\n{rho}\n", names[&rho]).expect("writing to a String");
    }
    Ok(out)
}

pub fn save_system(path: &Path, sys: &RegularSystem) -> Result<()> {
    write(path, &format_system(sys)?)
}
