//! Plain-text body and valuation files.
//!
//! A file is a sequence of `[id]` sections of `key = value` lines; `#` starts a comment.
//! Reals are written in shortest round-trip form, so `parse(write(x)) == x` bit for bit.
//!
//! ```text
//! [unit]
//! variant = ball
//! n = 3
//! radius = 1
//! center = 0 0 0
//!
//! [box]
//! variant = zonotope
//! n = 3
//! generator = 1 0 0
//! generator = 0 1 0
//! generator = 0 0 1
//! ```
//!
//! Ellipsoids carry `matrix` (row-major, n² entries) and `center`; bodies of revolution carry
//! `coeffs` (Legendre coefficients). Valuations carry `n`, `i`, `variant` in
//! {generating, crofton, steiner_j, combination} and `coeffs`, repeated `atom = σ w`, or
//! repeated `part = weight id`. Combination parts are written as sections `id/k` that are
//! not listed as top-level entries.

use crate::bodies::{ConvexBody, RevolutionBody};
use crate::error::{Error, Result};
use crate::harmonic::ZonalFunction;
use crate::minkval::{Representation, ValuationSpec};
use nalgebra::{DMatrix, DVector};
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone)]
struct Section {
    id: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl Section {
    fn all(&self, key: &str) -> std::vec::IntoIter<(&str, usize)> {
        let v: Vec<(&str, usize)> =
            self.entries.iter().filter(|(k, _, _)| k == key).map(|(_, v, l)| (v.as_str(), *l)).collect();
        v.into_iter()
    }

    fn one(&self, key: &str) -> Result<(&str, usize)> {
        let mut it = self.all(key);
        let first = it.next().ok_or_else(|| perr(self.line, format!("[{}] is missing `{key}`", self.id)))?;
        if let Some((_, l)) = it.next() {
            return Err(perr(l, format!("duplicate key `{key}`")));
        }
        Ok(first)
    }

    fn opt(&self, key: &str) -> Result<Option<(&str, usize)>> {
        if self.all(key).next().is_some() {
            self.one(key).map(Some)
        } else {
            Ok(None)
        }
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (v, l) = self.one(key)?;
        v.parse().map_err(|_| perr(l, format!("`{key}` must be a nonnegative integer, got `{v}`")))
    }

    fn reals(&self, key: &str) -> Result<Vec<f64>> {
        let (v, l) = self.one(key)?;
        reals(v, l)
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn reals(v: &str, line: usize) -> Result<Vec<f64>> {
    v.split_whitespace()
        .map(|t| match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(perr(line, format!("`{t}` is not a finite real"))),
        })
        .collect()
}

fn sized(v: Vec<f64>, len: usize, line: usize, what: &str) -> Result<Vec<f64>> {
    if v.len() != len {
        return Err(perr(line, format!("{what} needs {len} entries, got {}", v.len())));
    }
    Ok(v)
}

fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let id = rest.strip_suffix(']').ok_or_else(|| perr(line, "unterminated section header"))?.trim();
            if id.is_empty() || id.contains(char::is_whitespace) {
                return Err(perr(line, format!("invalid section id `{id}`")));
            }
            if !seen.insert(id.to_string()) {
                return Err(perr(line, format!("duplicate section `{id}`")));
            }
            out.push(Section { id: id.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = s.split_once('=').ok_or_else(|| perr(line, "expected `key = value`"))?;
        let sec = out.last_mut().ok_or_else(|| perr(line, "key outside of a section"))?;
        sec.entries.push((key.trim().to_string(), value.trim().to_string(), line));
    }
    Ok(out)
}

fn fmt_reals<'a>(v: impl IntoIterator<Item = &'a f64>) -> String {
    v.into_iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ")
}

fn body_from(sec: &Section) -> Result<ConvexBody> {
    let n = sec.usize("n")?;
    if !(2..=16).contains(&n) {
        return Err(perr(sec.line, format!("dimension {n} not supported")));
    }
    let center = |sec: &Section| -> Result<DVector<f64>> {
        match sec.opt("center")? {
            Some((v, l)) => Ok(DVector::from_vec(sized(reals(v, l)?, n, l, "center")?)),
            None => Ok(DVector::zeros(n)),
        }
    };
    let (variant, vl) = sec.one("variant")?;
    let body = match variant {
        "ball" => {
            let (r, l) = sec.one("radius")?;
            let radius = reals(r, l)?;
            let radius = sized(radius, 1, l, "radius")?[0];
            if radius <= 0.0 {
                return Err(perr(l, "radius must be positive"));
            }
            ConvexBody::Ball { center: center(sec)?, radius }
        }
        "ellipsoid" => {
            let (_, l) = sec.one("matrix")?;
            let m = sized(sec.reals("matrix")?, n * n, l, "matrix")?;
            let matrix = DMatrix::from_row_slice(n, n, &m);
            if matrix.determinant().abs() < 1e-300 {
                return Err(perr(l, "matrix is singular"));
            }
            ConvexBody::Ellipsoid { matrix, center: center(sec)? }
        }
        "zonotope" => {
            let generators = sec
                .all("generator")
                .map(|(v, l)| Ok(DVector::from_vec(sized(reals(v, l)?, n, l, "generator")?)))
                .collect::<Result<Vec<_>>>()?;
            if generators.len() < n {
                return Err(perr(sec.line, format!("zonotope needs at least {n} generators")));
            }
            ConvexBody::Zonotope { generators, center: center(sec)? }
        }
        "revolution" => {
            let (_, l) = sec.one("coeffs")?;
            let c = sec.reals("coeffs")?;
            if c.is_empty() {
                return Err(perr(l, "empty coefficient list"));
            }
            let r = RevolutionBody::new(ZonalFunction::new(n, c)).map_err(|e| perr(l, e.to_string()))?;
            ConvexBody::Revolution(r)
        }
        other => return Err(perr(vl, format!("unknown body variant `{other}`"))),
    };
    Ok(body)
}

fn body_tag(b: &ConvexBody) -> &'static str {
    match b {
        ConvexBody::Ball { .. } => "ball",
        ConvexBody::Ellipsoid { .. } => "ellipsoid",
        ConvexBody::Zonotope { .. } => "zonotope",
        ConvexBody::Revolution(_) => "revolution",
    }
}

/// Bodies in file order.
pub fn parse_bodies(text: &str) -> Result<Vec<(String, ConvexBody)>> {
    sections(text)?.iter().map(|s| Ok((s.id.clone(), body_from(s)?))).collect()
}

pub fn write_bodies(bodies: &[(String, ConvexBody)]) -> String {
    let mut out = String::new();
    for (id, b) in bodies {
        let _ = writeln!(out, "[{id}]");
        let _ = writeln!(out, "variant = {}", body_tag(b));
        let _ = writeln!(out, "n = {}", b.dim());
        match b {
            ConvexBody::Ball { center, radius } => {
                let _ = writeln!(out, "radius = {radius:?}");
                let _ = writeln!(out, "center = {}", fmt_reals(center.iter()));
            }
            ConvexBody::Ellipsoid { matrix, center } => {
                let rows: Vec<f64> = matrix.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()).collect();
                let _ = writeln!(out, "matrix = {}", fmt_reals(rows.iter()));
                let _ = writeln!(out, "center = {}", fmt_reals(center.iter()));
            }
            ConvexBody::Zonotope { generators, center } => {
                for g in generators {
                    let _ = writeln!(out, "generator = {}", fmt_reals(g.iter()));
                }
                let _ = writeln!(out, "center = {}", fmt_reals(center.iter()));
            }
            ConvexBody::Revolution(r) => {
                let _ = writeln!(out, "coeffs = {}", fmt_reals(r.profile.coeffs.iter()));
            }
        }
        out.push('\n');
    }
    out
}

fn spec_from(id: &str, all: &BTreeMap<String, &Section>, stack: &mut Vec<String>) -> Result<ValuationSpec> {
    let sec = all[id];
    if stack.iter().any(|s| s == id) {
        return Err(perr(sec.line, format!("combination cycle through `{id}`")));
    }
    stack.push(id.to_string());
    let n = sec.usize("n")?;
    let i = sec.usize("i")?;
    let (variant, vl) = sec.one("variant")?;
    let at = |e: Error| perr(sec.line, e.to_string());
    let spec = match variant {
        "generating" => ValuationSpec::generating(ZonalFunction::new(n, sec.reals("coeffs")?), i).map_err(at)?,
        "crofton" => {
            let atoms = sec
                .all("atom")
                .map(|(v, l)| {
                    let a = sized(reals(v, l)?, 2, l, "atom")?;
                    Ok((a[0], a[1]))
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = ValuationSpec::crofton(n, i, atoms).map_err(at)?;
            if let Some((v, l)) = sec.opt("nonneg")? {
                let flag: bool = v.parse().map_err(|_| perr(l, "`nonneg` must be true or false"))?;
                if flag != spec.is_nonneg_crofton() {
                    return Err(perr(l, "`nonneg` flag contradicts the atom weights"));
                }
            }
            spec
        }
        "steiner_j" => {
            if i != 1 {
                return Err(perr(vl, "steiner_j has degree 1"));
            }
            ValuationSpec::steiner_j(n)
        }
        "combination" => {
            let parts = sec
                .all("part")
                .map(|(v, l)| {
                    let (w, r) = v.split_once(char::is_whitespace).ok_or_else(|| perr(l, "expected `part = weight id`"))?;
                    let w = sized(reals(w, l)?, 1, l, "weight")?[0];
                    let r = r.trim();
                    if !all.contains_key(r) {
                        return Err(perr(l, format!("unknown part `{r}`")));
                    }
                    Ok((w, spec_from(r, all, stack)?))
                })
                .collect::<Result<Vec<_>>>()?;
            ValuationSpec::combination(parts).map_err(at)?
        }
        other => return Err(perr(vl, format!("unknown valuation variant `{other}`"))),
    };
    if spec.n != n || spec.i != i {
        return Err(perr(sec.line, format!("declared (n, i) = ({n}, {i}) but parts have ({}, {})", spec.n, spec.i)));
    }
    stack.pop();
    Ok(spec)
}

/// Top-level valuations in file order; ids containing `/` are parts only.
pub fn parse_specs(text: &str) -> Result<Vec<(String, ValuationSpec)>> {
    let secs = sections(text)?;
    let all: BTreeMap<String, &Section> = secs.iter().map(|s| (s.id.clone(), s)).collect();
    secs.iter()
        .filter(|s| !s.id.contains('/'))
        .map(|s| Ok((s.id.clone(), spec_from(&s.id, &all, &mut Vec::new())?)))
        .collect()
}

fn write_spec(out: &mut String, id: &str, s: &ValuationSpec) {
    let _ = writeln!(out, "[{id}]");
    let _ = writeln!(out, "variant = {}", s.tag());
    let _ = writeln!(out, "n = {}", s.n);
    let _ = writeln!(out, "i = {}", s.i);
    let mut nested = Vec::new();
    match &s.repr {
        Representation::Generating(f) => {
            let _ = writeln!(out, "coeffs = {}", fmt_reals(f.coeffs.iter()));
        }
        Representation::Crofton { atoms, nonneg } => {
            let _ = writeln!(out, "nonneg = {nonneg}");
            for (t, w) in atoms {
                let _ = writeln!(out, "atom = {t:?} {w:?}");
            }
        }
        Representation::SteinerJ => {}
        Representation::Combination(parts) => {
            for (k, (w, p)) in parts.iter().enumerate() {
                let sub = format!("{id}/{k}");
                let _ = writeln!(out, "part = {w:?} {sub}");
                nested.push((sub, p));
            }
        }
    }
    out.push('\n');
    for (sub, p) in nested {
        write_spec(out, &sub, p);
    }
}

pub fn write_specs(specs: &[(String, ValuationSpec)]) -> String {
    let mut out = String::new();
    for (id, s) in specs {
        write_spec(&mut out, id, s);
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| perr(0, format!("{}: {e}", path.display())))
}

pub fn read_bodies(path: &Path) -> Result<Vec<(String, ConvexBody)>> {
    parse_bodies(&read(path)?)
}

pub fn read_specs(path: &Path) -> Result<Vec<(String, ValuationSpec)>> {
    parse_specs(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_numbers_in_errors() {
        let e = parse_bodies("[a]\nvariant = ball\nn = 3\nradius = x\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 4, msg: "`x` is not a finite real".into() });
        assert!(matches!(parse_bodies("n = 3"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn cycles_are_rejected() {
        let t = "[a]\nvariant = combination\nn = 3\ni = 1\npart = 1 b\n[b]\nvariant = combination\nn = 3\ni = 1\npart = 1 a\n";
        assert!(matches!(parse_specs(t), Err(Error::Parse { .. })));
    }
}
