//! File formats of the command-line tool.
//!
//! Matrices are arrays of rows and every scalar is a `[re, im]` pair.
//!
//! * pencil: `{"n", "convention": "plus" | "minus", "lead", "const"}`
//! * posH pencil: `{"n", "j1", "r1", "j2", "r2"}`, read as `λ(J₁+R₁) + (J₂+R₂)`
//! * polynomial: `{"n", "degree", "coefficients": [A0, ..., Ad]}`
//!
//! Point clouds are CSV with header `re,im`. Region files list
//! `{"type": "pacman", "beta", "sign", "t"}` entries, with `beta: null` for an
//! unbounded region.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::matpoly::MatrixPolynomial;
use crate::matrix::{c, Mat, C64};
use crate::numrange::{PacmanRegion, Sign};
use crate::pencil::{Convention, DhPencil, Pencil, PoshPencil};

type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    /// Free-form label, ignored.
    #[serde(default, rename = "name")]
    _name: Option<String>,
    n: Option<usize>,
    convention: Option<Convention>,
    lead: Option<RawMatrix>,
    #[serde(rename = "const")]
    constant: Option<RawMatrix>,
    j1: Option<RawMatrix>,
    r1: Option<RawMatrix>,
    j2: Option<RawMatrix>,
    r2: Option<RawMatrix>,
    degree: Option<usize>,
    coefficients: Option<Vec<RawMatrix>>,
}

/// A parsed input file.
#[derive(Debug, Clone)]
pub enum Input {
    Pencil(Pencil),
    /// Given by its four parts, validated on conversion.
    Parts { j1: Mat, r1: Mat, j2: Mat, r2: Mat },
    Polynomial(MatrixPolynomial),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Pencil(_) => "pencil",
            Input::Parts { .. } => "posh",
            Input::Polynomial(_) => "polynomial",
        }
    }

    /// The pencil, for pencil and posH inputs.
    pub fn pencil(&self) -> Result<Pencil> {
        match self {
            Input::Pencil(p) => Ok(p.clone()),
            Input::Parts { j1, r1, j2, r2 } => Pencil::plus(j1 + r1, j2 + r2),
            Input::Polynomial(_) => Err(Error::Precondition(
                "expected a pencil file, got a polynomial (use `lin` to linearize it)".into(),
            )),
        }
    }

    /// The posH pencil. Pencil inputs are split and validated.
    pub fn posh(&self, tol: Option<f64>) -> Result<PoshPencil> {
        match self {
            Input::Parts { j1, r1, j2, r2 } => PoshPencil::from_parts(j1.clone(), r1.clone(), j2.clone(), r2.clone(), tol),
            other => crate::pencil::validate_posh(&other.pencil()?, tol),
        }
    }

    pub fn polynomial(&self) -> Result<&MatrixPolynomial> {
        match self {
            Input::Polynomial(p) => Ok(p),
            _ => Err(Error::Precondition("expected a polynomial file".into())),
        }
    }
}

fn parse_error(origin: &str, e: serde_json::Error) -> Error {
    let (line, col) = (e.line(), e.column());
    let msg = e.to_string();
    let msg = msg.strip_suffix(&format!(" at line {line} column {col}")).unwrap_or(&msg);
    Error::Parse(format!("{origin}:{line}:{col}: {msg}"))
}

fn matrix(origin: &str, field: &str, raw: &RawMatrix, n: usize) -> Result<Mat> {
    if raw.len() != n {
        return Err(Error::Parse(format!("{origin}: `{field}` has {} rows, expected {n}", raw.len())));
    }
    let mut m = Mat::zeros(n, n);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "{origin}: `{field}` row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("{origin}: `{field}` entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c(re, im);
        }
    }
    Ok(m)
}

fn require<'a, T>(origin: &str, field: &str, v: &'a Option<T>) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Parse(format!("{origin}: missing field `{field}`")))
}

/// Parses an input document. `origin` names the source in error messages.
pub fn parse_input(text: &str, origin: &str) -> Result<Input> {
    let raw: RawInput = serde_json::from_str(text).map_err(|e| parse_error(origin, e))?;
    let n = *require(origin, "n", &raw.n)?;
    let pencil_fields = raw.lead.is_some() || raw.constant.is_some() || raw.convention.is_some();
    let part_fields = raw.j1.is_some() || raw.r1.is_some() || raw.j2.is_some() || raw.r2.is_some();
    let poly_fields = raw.degree.is_some() || raw.coefficients.is_some();
    match (pencil_fields, part_fields, poly_fields) {
        (true, false, false) => {
            let convention = *require(origin, "convention", &raw.convention)?;
            let lead = matrix(origin, "lead", require(origin, "lead", &raw.lead)?, n)?;
            let cst = matrix(origin, "const", require(origin, "const", &raw.constant)?, n)?;
            let p = match convention {
                Convention::Plus => Pencil::plus(lead, cst)?,
                Convention::Minus => Pencil::minus(lead, cst)?,
            };
            Ok(Input::Pencil(p))
        }
        (false, true, false) => {
            let get = |f: &str, v: &Option<RawMatrix>| matrix(origin, f, require(origin, f, v)?, n);
            Ok(Input::Parts {
                j1: get("j1", &raw.j1)?,
                r1: get("r1", &raw.r1)?,
                j2: get("j2", &raw.j2)?,
                r2: get("r2", &raw.r2)?,
            })
        }
        (false, false, true) => {
            let degree = *require(origin, "degree", &raw.degree)?;
            let coeffs = require(origin, "coefficients", &raw.coefficients)?;
            if coeffs.len() != degree + 1 {
                return Err(Error::Parse(format!(
                    "{origin}: degree {degree} needs {} coefficients, got {}",
                    degree + 1,
                    coeffs.len()
                )));
            }
            let mats = coeffs
                .iter()
                .enumerate()
                .map(|(i, m)| matrix(origin, &format!("coefficients[{i}]"), m, n))
                .collect::<Result<Vec<_>>>()?;
            Ok(Input::Polynomial(MatrixPolynomial::new(mats)?))
        }
        (false, false, false) => Err(Error::Parse(format!(
            "{origin}: expected `lead`/`const`, `j1`/`r1`/`j2`/`r2` or `coefficients`"
        ))),
        _ => Err(Error::Parse(format!("{origin}: fields of more than one file kind are present"))),
    }
}

/// Reads and parses a file, returning the raw bytes as well.
pub fn read_input(path: &Path) -> Result<(Input, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let input = parse_input(text, &path.display().to_string())?;
    Ok((input, bytes))
}

pub fn matrix_json(m: &Mat) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn pencil_json(p: &Pencil) -> serde_json::Value {
    json!({
        "n": p.rows(),
        "convention": p.convention(),
        "lead": matrix_json(p.lead().as_mat()),
        "const": matrix_json(p.constant().as_mat()),
    })
}

pub fn posh_json(pp: &PoshPencil) -> serde_json::Value {
    json!({
        "n": pp.n(),
        "j1": matrix_json(pp.j1.as_mat()),
        "r1": matrix_json(pp.r1.as_mat()),
        "j2": matrix_json(pp.j2.as_mat()),
        "r2": matrix_json(pp.r2.as_mat()),
    })
}

pub fn polynomial_json(p: &MatrixPolynomial) -> serde_json::Value {
    json!({
        "n": p.n(),
        "degree": p.degree(),
        "coefficients": p.coefficients().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

/// `λE − (J − R)Q` as its four factors.
pub fn dh_json(d: &DhPencil) -> serde_json::Value {
    json!({
        "n": d.n(),
        "e": matrix_json(d.e.as_mat()),
        "j": matrix_json(d.j.as_mat()),
        "r": matrix_json(d.r.as_mat()),
        "q": matrix_json(d.q.as_mat()),
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `bytes` to a temporary file next to `path` and renames it over
/// `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| Error::Precondition(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn points_csv(points: &[C64]) -> String {
    let mut s = String::with_capacity(32 * points.len() + 8);
    s.push_str("re,im\n");
    for z in points {
        let _ = writeln!(s, "{},{}", z.re, z.im);
    }
    s
}

#[derive(Debug, Serialize)]
struct RegionEntry {
    #[serde(rename = "type")]
    kind: &'static str,
    beta: Option<f64>,
    sign: Sign,
    t: f64,
}

pub fn regions_json(regions: &[PacmanRegion]) -> serde_json::Value {
    let entries: Vec<RegionEntry> = regions
        .iter()
        .map(|r| RegionEntry {
            kind: "pacman",
            beta: r.beta.is_finite().then_some(r.beta),
            sign: r.sign,
            t: r.t,
        })
        .collect();
    json!({ "regions": entries })
}

/// Static scatter of `points` with the regions shaded. At most `max_points`
/// points are drawn, in order.
pub fn scatter_svg(points: &[C64], regions: &[PacmanRegion], max_points: usize) -> String {
    let shown = &points[..points.len().min(max_points)];
    let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for z in shown {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    for r in regions {
        x1 = x1.max(r.t * 1.2);
        if r.beta.is_finite() {
            match r.sign {
                Sign::Plus => y1 = y1.max(r.beta * 1.2),
                Sign::Minus => y0 = y0.min(-r.beta * 1.2),
            }
        }
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
    let (w, h) = (640.0, 640.0);
    let sx = |x: f64| (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| h - (y - y0) / (y1 - y0) * h;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for r in regions {
        let dir = if r.sign == Sign::Plus { 1.0 } else { -1.0 };
        let edge = if r.beta.is_finite() { dir * r.beta } else if dir > 0.0 { y1 } else { y0 };
        let corner = if r.beta.is_finite() { r.t } else { 0.0 };
        let pts = [(0.0, 0.0), (corner, edge), (x1, edge), (x1, 0.0)];
        let poly: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.3},{:.3}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polygon points="{}" fill="orange" fill-opacity="0.3"/>"#, poly.join(" "));
    }
    let _ = writeln!(
        s,
        r##"<line x1="{:.3}" y1="0" x2="{:.3}" y2="{h}" stroke="#888"/><line x1="0" y1="{:.3}" x2="{w}" y2="{:.3}" stroke="#888"/>"##,
        sx(0.0),
        sx(0.0),
        sy(0.0),
        sy(0.0)
    );
    for z in shown {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="0.8" fill="navy"/>"#, sx(z.re), sy(z.im));
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_pencil_and_roundtrip() {
        let text = r#"{"n": 1, "convention": "minus", "lead": [[[1, 0]]], "const": [[[2, 0.5]]]}"#;
        let Input::Pencil(p) = parse_input(text, "t").unwrap() else { panic!() };
        assert_eq!(p.convention(), Convention::Minus);
        let back = parse_input(&pencil_json(&p).to_string(), "t").unwrap();
        let Input::Pencil(q) = back else { panic!() };
        assert_eq!(p, q);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_input("{\n  \"n\": 1,\n  \"lead\": [[[1, 0]]]\n  \"const\": 3\n}", "f.json").unwrap_err();
        let Error::Parse(msg) = e else { panic!("{e:?}") };
        assert!(msg.starts_with("f.json:4:"), "{msg}");
    }

    #[test]
    fn shape_and_kind_errors() {
        let e = parse_input(r#"{"n": 2, "convention": "plus", "lead": [[[1, 0]]], "const": [[[1, 0]]]}"#, "x");
        assert!(matches!(e, Err(Error::Parse(_))));
        let e = parse_input(r#"{"n": 1, "j1": [[[0, 1]]], "degree": 0}"#, "x");
        assert!(matches!(e, Err(Error::Parse(_))));
        let e = parse_input(r#"{"n": 1, "bogus": 1}"#, "x");
        assert!(matches!(e, Err(Error::Parse(_))));
    }

    #[test]
    fn regions_mark_unbounded() {
        let v = regions_json(&[PacmanRegion::new(f64::INFINITY, Sign::Plus), PacmanRegion::new(0.5, Sign::Minus)]);
        assert_eq!(v["regions"][0]["beta"], serde_json::Value::Null);
        assert_eq!(v["regions"][1]["beta"], 0.5);
        assert_eq!(v["regions"][1]["sign"], "minus");
    }
}
