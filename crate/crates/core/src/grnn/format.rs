//! Plain-text model format.
//!
//! ```text
//! grnn v1 d_in=2 d_out=1 sigma=0.05 n=3 [delta=.. epsilon=.. max_patterns=..]
//! x1,x2,y1            (n pattern rows, inputs then outputs)
//! ...
//! norm                (optional block)
//! mean,m1,m2
//! std,s1,s2
//! constant,0,1
//! ```
//!
//! Floats are written with the shortest representation that parses back to
//! the same value, so a save/load cycle is exact.

use std::fmt::Write as _;
use std::path::Path;

use super::{GrnnModel, Pattern};
use crate::data::NormStats;
use crate::growth::GrowthPolicy;
use crate::{Error, Result};

const MAGIC: &str = "grnn";
const VERSION: &str = "v1";

pub fn write_model(model: &GrnnModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, model.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<GrnnModel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path)
}

impl GrnnModel {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{MAGIC} {VERSION} d_in={} d_out={} sigma={} n={}",
            self.d_in,
            self.d_out,
            self.sigma,
            self.len()
        );
        if let Some(p) = &self.policy {
            let _ = write!(
                s,
                " delta={} epsilon={} max_patterns={}",
                p.novelty_radius, p.error_gate, p.max_patterns
            );
        }
        s.push('\n');
        for p in &self.patterns {
            push_row(&mut s, None, p.x.iter().chain(&p.y));
        }
        if let Some(n) = &self.norm {
            s.push_str("norm\n");
            push_row(&mut s, Some("mean"), n.mean.iter());
            push_row(&mut s, Some("std"), n.std.iter());
            let flags: Vec<f64> = n.constant.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
            push_row(&mut s, Some("constant"), flags.iter());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse(text, Path::new("<text>"))
    }
}

fn push_row<'a>(s: &mut String, label: Option<&str>, values: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    if let Some(l) = label {
        s.push_str(l);
        first = false;
    }
    for v in values {
        if !first {
            s.push(',');
        }
        let _ = write!(s, "{v}");
        first = false;
    }
    s.push('\n');
}

pub(crate) struct Header {
    pub fields: Vec<(String, String)>,
}

impl Header {
    pub(crate) fn parse(line: &str, magic: &str, path: &Path) -> Result<Self> {
        let mut parts = line.split_whitespace();
        if parts.next() != Some(magic) || parts.next() != Some(VERSION) {
            return Err(Error::parse(path, 1, format!("expected `{magic} {VERSION}` header")));
        }
        let fields = parts
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| Error::parse(path, 1, format!("bad header field `{kv}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { fields })
    }

    pub(crate) fn get<T: std::str::FromStr>(&self, key: &str, path: &Path) -> Result<Option<T>> {
        match self.fields.iter().find(|(k, _)| k == key) {
            None => Ok(None),
            Some((_, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::parse(path, 1, format!("bad value for `{key}`: {v}"))),
        }
    }

    pub(crate) fn require<T: std::str::FromStr>(&self, key: &str, path: &Path) -> Result<T> {
        self.get(key, path)?
            .ok_or_else(|| Error::parse(path, 1, format!("missing header field `{key}`")))
    }
}

pub(crate) fn parse_floats(line: &str, lineno: usize, path: &Path) -> Result<Vec<f64>> {
    line.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(path, lineno, format!("non-numeric field `{f}`")))
        })
        .collect()
}

fn parse(text: &str, path: &Path) -> Result<GrnnModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, head) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty model file"))?;
    let header = Header::parse(head, MAGIC, path)?;
    let d_in: usize = header.require("d_in", path)?;
    let d_out: usize = header.require("d_out", path)?;
    let sigma: f64 = header.require("sigma", path)?;
    let n: usize = header.require("n", path)?;

    let mut model = GrnnModel::empty(d_in, d_out, sigma)?;
    let delta: Option<f64> = header.get("delta", path)?;
    let epsilon: Option<f64> = header.get("epsilon", path)?;
    let cap: Option<usize> = header.get("max_patterns", path)?;
    match (delta, epsilon, cap) {
        (Some(d), Some(e), Some(c)) => model = model.with_policy(GrowthPolicy::new(d, e, c)?),
        (None, None, None) => {}
        _ => {
            return Err(Error::parse(
                path,
                1,
                "growth policy needs delta, epsilon and max_patterns together",
            ))
        }
    }

    let mut patterns = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, n + 1, "fewer pattern rows than declared"))?;
        let v = parse_floats(line, no, path)?;
        if v.len() != d_in + d_out {
            return Err(Error::parse(
                path,
                no,
                format!("expected {} fields, found {}", d_in + d_out, v.len()),
            ));
        }
        let (x, y) = v.split_at(d_in);
        patterns.push(
            Pattern::new(x.to_vec(), y.to_vec()).map_err(|e| Error::parse(path, no, e.to_string()))?,
        );
    }
    model.patterns = patterns;

    let rest: Vec<(usize, &str)> = lines.filter(|(_, l)| !l.trim().is_empty()).collect();
    match rest.as_slice() {
        [] => {}
        [(_, "norm"), (l1, mean), (l2, std), (l3, constant)] => {
            let mean = labelled(mean, "mean", *l1, path)?;
            let std = labelled(std, "std", *l2, path)?;
            let constant = labelled(constant, "constant", *l3, path)?
                .into_iter()
                .map(|f| f != 0.0)
                .collect();
            let stats = NormStats::from_parts_flagged(mean, std, constant)
                .map_err(|e| Error::parse(path, *l1, e.to_string()))?;
            model = model.with_norm_stats(stats)?;
        }
        [(no, _), ..] => return Err(Error::parse(path, *no, "unexpected trailing content")),
    }
    Ok(model)
}

fn labelled(line: &str, label: &str, lineno: usize, path: &Path) -> Result<Vec<f64>> {
    let rest = line
        .strip_prefix(label)
        .and_then(|r| r.strip_prefix(','))
        .ok_or_else(|| Error::parse(path, lineno, format!("expected `{label},...`")))?;
    parse_floats(rest, lineno, path)
}
