//! Text formats for tensors, low-rank tensors, measurement sets and syndromes.
//! Every file opens with a field header line.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::field::{Fel, FieldCtx};
use crate::hitting::{Family, MeasurementMeta, MeasurementSet};
use crate::tensor::{DenseTensor, LowRankTensor, Rank1Tensor};

pub fn format_dims(dims: &[usize]) -> String {
    dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let dims: std::result::Result<Vec<usize>, _> = s.split('x').map(str::parse).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.iter().all(|&x| x > 0) => Ok(d),
        _ => Err(Error::param(format!("bad dims {s:?}, expected e.g. 4x4"))),
    }
}

/// Line cursor that skips blank lines and reports 1-based line numbers.
struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(s: &'a str) -> Self {
        Lines { inner: s.lines().enumerate().peekable(), last: 0 }
    }

    fn next_line(&mut self) -> Option<&'a str> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some(t);
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<&'a str> {
        self.next_line().ok_or_else(|| self.err(format!("unexpected end of input, wanted {what}")))
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.last, msg: msg.into() }
    }

    /// Reads `count` whitespace-separated elements, spanning lines as needed.
    fn elements(&mut self, f: &FieldCtx, count: usize) -> Result<Vec<Fel>> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let line = self.expect("tensor entries")?;
            for w in line.split_whitespace() {
                if out.len() == count {
                    return Err(self.err("too many entries"));
                }
                out.push(f.parse_elem(w).map_err(|e| self.err(e.to_string()))?);
            }
        }
        Ok(out)
    }

    fn fields(&mut self, keyword: &str) -> Result<Vec<(&'a str, &'a str)>> {
        let line = self.expect(keyword)?;
        let mut words = line.split_whitespace();
        if words.next() != Some(keyword) {
            return Err(self.err(format!("expected a `{keyword}` line")));
        }
        words
            .map(|w| w.split_once('=').ok_or_else(|| self.err(format!("expected key=value, got {w:?}"))))
            .collect()
    }

    fn header(&mut self) -> Result<FieldCtx> {
        let line = self.expect("field header")?;
        FieldCtx::parse_header(line).map_err(|e| match e {
            Error::Parse { msg, .. } => self.err(msg),
            other => other,
        })
    }
}

fn lookup<'a>(kv: &[(&str, &'a str)], key: &str, lines: &Lines<'_>) -> Result<&'a str> {
    kv.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| lines.err(format!("missing {key}=")))
}

fn parse_num<T: std::str::FromStr>(s: &str, lines: &Lines<'_>) -> Result<T> {
    s.parse().map_err(|_| lines.err(format!("bad number {s:?}")))
}

fn push_tensor_body(out: &mut String, t: &DenseTensor) {
    let f = t.ctx();
    let _ = writeln!(out, "tensor dims={}", format_dims(t.dims()));
    let last = *t.dims().last().unwrap_or(&1);
    for row in t.data().chunks(last.max(1)) {
        let words: Vec<String> = row.iter().map(|&x| f.format_elem(x)).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
}

fn read_tensor_body(lines: &mut Lines<'_>, f: &FieldCtx) -> Result<DenseTensor> {
    let kv = lines.fields("tensor")?;
    let dims = parse_dims(lookup(&kv, "dims", lines)?).map_err(|e| lines.err(e.to_string()))?;
    let data = lines.elements(f, dims.iter().product())?;
    DenseTensor::from_vec(f, &dims, data)
}

pub fn write_tensor(t: &DenseTensor) -> String {
    let mut out = t.ctx().header();
    out.push('\n');
    push_tensor_body(&mut out, t);
    out
}

pub fn read_tensor(s: &str) -> Result<DenseTensor> {
    let mut lines = Lines::new(s);
    let f = lines.header()?;
    let t = read_tensor_body(&mut lines, &f)?;
    if lines.next_line().is_some() {
        return Err(lines.err("trailing data after tensor"));
    }
    Ok(t)
}

pub fn write_lowrank(t: &LowRankTensor) -> String {
    let f = t.ctx();
    let mut out = f.header();
    let _ = writeln!(out, "\nlowrank dims={} terms={}", format_dims(t.dims()), t.terms().len());
    for term in t.terms() {
        for v in term.factors() {
            let words: Vec<String> = v.iter().map(|&x| f.format_elem(x)).collect();
            out.push_str(&words.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn read_lowrank(s: &str) -> Result<LowRankTensor> {
    let mut lines = Lines::new(s);
    let f = lines.header()?;
    let kv = lines.fields("lowrank")?;
    let dims = parse_dims(lookup(&kv, "dims", &lines)?)?;
    let terms: usize = parse_num(lookup(&kv, "terms", &lines)?, &lines)?;
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut factors = Vec::with_capacity(dims.len());
        for &n in &dims {
            let line = lines.expect("factor vector")?;
            let v: Result<Vec<Fel>> = line.split_whitespace().map(|w| f.parse_elem(w)).collect();
            let v = v.map_err(|e| lines.err(e.to_string()))?;
            if v.len() != n {
                return Err(lines.err(format!("factor has {} entries, expected {n}", v.len())));
            }
            factors.push(v);
        }
        if factors.iter().all(|v| v.iter().any(|x| !x.is_zero())) {
            out.push(Rank1Tensor::new(&f, factors)?);
        }
    }
    LowRankTensor::new(&f, &dims, out)
}

/// Reads either a dense or a low-rank tensor file, expanding the latter.
pub fn read_any_tensor(s: &str) -> Result<DenseTensor> {
    let second = s.lines().map(str::trim).filter(|l| !l.is_empty()).nth(1).unwrap_or("");
    if second.starts_with("lowrank") {
        Ok(read_lowrank(s)?.expand())
    } else {
        read_tensor(s)
    }
}

fn join_usizes(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

pub fn write_measurements(h: &MeasurementSet) -> String {
    let mut out = h.ctx().header();
    let _ = writeln!(
        out,
        "\nmeasurements family={} count={} dims={}",
        h.family(),
        h.len(),
        format_dims(h.dims())
    );
    for (item, meta) in h.items().iter().zip(h.meta()) {
        let _ = write!(out, "meta k={} l={}", meta.k, join_usizes(&meta.l));
        if !meta.sim.is_empty() {
            let _ = write!(out, " sim={}", join_usizes(&meta.sim));
        }
        out.push('\n');
        push_tensor_body(&mut out, &item.to_dense());
    }
    out
}

/// Parsed measurement-set file.
#[derive(Clone, Debug)]
pub struct MeasurementFile {
    pub ctx: FieldCtx,
    pub family: Family,
    pub dims: Vec<usize>,
    pub items: Vec<(MeasurementMeta, DenseTensor)>,
}

pub fn read_measurements(s: &str) -> Result<MeasurementFile> {
    let mut lines = Lines::new(s);
    let f = lines.header()?;
    let kv = lines.fields("measurements")?;
    let family: Family = lookup(&kv, "family", &lines)?.parse()?;
    let count: usize = parse_num(lookup(&kv, "count", &lines)?, &lines)?;
    let dims = parse_dims(lookup(&kv, "dims", &lines)?)?;
    let list = |v: &str, lines: &Lines<'_>| -> Result<Vec<usize>> {
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',').map(|x| parse_num(x, lines)).collect()
    };
    let mut items = Vec::with_capacity(count);
    for _ in 0..count {
        let kv = lines.fields("meta")?;
        let meta = MeasurementMeta {
            k: parse_num(lookup(&kv, "k", &lines)?, &lines)?,
            l: list(lookup(&kv, "l", &lines)?, &lines)?,
            sim: match kv.iter().find(|(k, _)| *k == "sim") {
                Some((_, v)) => list(v, &lines)?,
                None => Vec::new(),
            },
        };
        let t = read_tensor_body(&mut lines, &f)?;
        if t.dims() != dims.as_slice() {
            return Err(lines.err("measurement dims disagree with the set"));
        }
        items.push((meta, t));
    }
    Ok(MeasurementFile { ctx: f, family, dims, items })
}

/// Parsed syndrome file.
#[derive(Clone, Debug, PartialEq)]
pub struct SyndromeFile {
    pub ctx: FieldCtx,
    pub family: Family,
    pub r: usize,
    pub dims: Vec<usize>,
    pub values: Vec<Fel>,
}

pub fn write_syndromes(s: &SyndromeFile) -> String {
    let f = &s.ctx;
    let mut out = f.header();
    let _ = writeln!(out, "\nsyndromes family={} r={} dims={}", s.family, s.r, format_dims(&s.dims));
    for &v in &s.values {
        out.push_str(&f.format_elem(v));
        out.push('\n');
    }
    out
}

pub fn read_syndromes(s: &str) -> Result<SyndromeFile> {
    let mut lines = Lines::new(s);
    let f = lines.header()?;
    let kv = lines.fields("syndromes")?;
    let family: Family = lookup(&kv, "family", &lines)?.parse()?;
    let r = parse_num(lookup(&kv, "r", &lines)?, &lines)?;
    let dims = parse_dims(lookup(&kv, "dims", &lines)?)?;
    let mut values = Vec::new();
    while let Some(line) = lines.next_line() {
        values.push(f.parse_elem(line).map_err(|e| lines.err(e.to_string()))?);
    }
    Ok(SyndromeFile { ctx: f, family, r, dims, values })
}
