//! Plain-text point-set and matrix-set files.
//!
//! ```text
//! p=7 dim=2
//! 1,0
//! 3,5
//! ```
//!
//! Matrix files use `p=<prime> group=<sl2|h1-matrix|h1-symmetric>` and one
//! element per line (`a,b,c,d` or `x,y,t`). Blank lines and `#` comments are
//! ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FpVec2, FpVec3};
use crate::groups::{Convention, H1Elem, MatrixSet, Sl2Elem};
use crate::points::{PointSet2, PointSet3};

#[derive(Clone, Debug, PartialEq)]
pub enum PointFile {
    Plane(PointSet2),
    Space(PointSet3),
}

impl PointFile {
    pub fn p(&self) -> u64 {
        match self {
            PointFile::Plane(s) => s.p(),
            PointFile::Space(s) => s.p(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MatrixFile {
    Sl2(MatrixSet<Sl2Elem>),
    H1(MatrixSet<H1Elem>, Convention),
}

impl MatrixFile {
    pub fn p(&self) -> u64 {
        match self {
            MatrixFile::Sl2(s) => s.p(),
            MatrixFile::H1(s, _) => s.p(),
        }
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty, comment-stripped lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_header<'a>(line: usize, text: &'a str, key: &str) -> Result<(FieldCtx, &'a str)> {
    let mut p = None;
    let mut value = None;
    for tok in text.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, found `{tok}`")))?;
        match k {
            "p" => {
                p = Some(
                    v.parse::<u64>()
                        .map_err(|_| parse_err(line, format!("bad modulus `{v}`")))?,
                )
            }
            k if k == key => value = Some(v),
            _ => return Err(parse_err(line, format!("unknown header key `{k}`"))),
        }
    }
    let p = p.ok_or_else(|| parse_err(line, "header lacks p="))?;
    let value = value.ok_or_else(|| parse_err(line, format!("header lacks {key}=")))?;
    Ok((FieldCtx::new(p)?, value))
}

fn parse_row(line: usize, text: &str, width: usize, p: u64) -> Result<Vec<u64>> {
    let vals = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<u64>()
                .map_err(|_| parse_err(line, format!("bad residue `{t}`")))
        })
        .collect::<Result<Vec<u64>>>()?;
    if vals.len() != width {
        return Err(parse_err(
            line,
            format!("expected {width} entries, found {}", vals.len()),
        ));
    }
    if let Some(&value) = vals.iter().find(|&&v| v >= p) {
        return Err(Error::OutOfRange { value, p });
    }
    Ok(vals)
}

pub fn parse_points(text: &str) -> Result<PointFile> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (ctx, dim) = parse_header(hline, header, "dim")?;
    let p = ctx.p();
    match dim {
        "2" => {
            let pts = lines
                .map(|(n, l)| parse_row(n, l, 2, p).map(|v| FpVec2::new(v[0], v[1])))
                .collect::<Result<Vec<_>>>()?;
            Ok(PointFile::Plane(PointSet2::new(p, pts)?))
        }
        "3" => {
            let pts = lines
                .map(|(n, l)| parse_row(n, l, 3, p).map(|v| FpVec3::new(v[0], v[1], v[2])))
                .collect::<Result<Vec<_>>>()?;
            Ok(PointFile::Space(PointSet3::new(p, pts)?))
        }
        other => Err(parse_err(
            hline,
            format!("dim must be 2 or 3, found `{other}`"),
        )),
    }
}

pub fn parse_matrices(text: &str) -> Result<MatrixFile> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let (ctx, group) = parse_header(hline, header, "group")?;
    let p = ctx.p();
    let conv = match group {
        "sl2" => {
            let elems = lines
                .map(|(n, l)| {
                    let v = parse_row(n, l, 4, p)?;
                    Sl2Elem::new(&ctx, v[0], v[1], v[2], v[3])
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(MatrixFile::Sl2(MatrixSet::new(&ctx, elems)));
        }
        "h1-matrix" => Convention::Matrix,
        "h1-symmetric" => Convention::Symmetric,
        other => return Err(parse_err(hline, format!("unknown group `{other}`"))),
    };
    let elems = lines
        .map(|(n, l)| parse_row(n, l, 3, p).map(|v| H1Elem::new(&ctx, v[0], v[1], v[2], conv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixFile::H1(MatrixSet::new(&ctx, elems), conv))
}

pub fn format_points2(set: &PointSet2) -> String {
    let mut out = format!("p={} dim=2\n", set.p());
    for v in set.iter() {
        let _ = writeln!(out, "{},{}", v.x, v.y);
    }
    out
}

pub fn format_points3(set: &PointSet3) -> String {
    let mut out = format!("p={} dim=3\n", set.p());
    for v in set.iter() {
        let _ = writeln!(out, "{},{},{}", v.x, v.y, v.z);
    }
    out
}

pub fn format_sl2(set: &MatrixSet<Sl2Elem>) -> String {
    let mut out = format!("p={} group=sl2\n", set.p());
    for g in set.iter() {
        let [a, b, c, d] = g.entries();
        let _ = writeln!(out, "{a},{b},{c},{d}");
    }
    out
}

pub fn format_h1(set: &MatrixSet<H1Elem>, conv: Convention) -> String {
    let group = match conv {
        Convention::Matrix => "h1-matrix",
        Convention::Symmetric => "h1-symmetric",
    };
    let mut out = format!("p={} group={group}\n", set.p());
    for g in set.iter() {
        let [x, y, t] = g.coords();
        let _ = writeln!(out, "{x},{y},{t}");
    }
    out
}

pub fn read_points(path: &Path) -> Result<PointFile> {
    parse_points(&std::fs::read_to_string(path)?)
}

pub fn read_matrices(path: &Path) -> Result<MatrixFile> {
    parse_matrices(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_roundtrip() {
        let text = "p=7 dim=2\n1,0\n# comment\n\n3, 5\n1,0\n";
        let PointFile::Plane(set) = parse_points(text).unwrap() else {
            panic!("expected a plane set")
        };
        assert_eq!(set.len(), 2);
        assert!(set.contains(FpVec2::new(3, 5)));
        assert_eq!(
            parse_points(&format_points2(&set)).unwrap(),
            PointFile::Plane(set)
        );
        let text = "p=5 dim=3\n0,1,2\n4,4,4\n";
        let PointFile::Space(set) = parse_points(text).unwrap() else {
            panic!("expected a space set")
        };
        assert_eq!(
            parse_points(&format_points3(&set)).unwrap(),
            PointFile::Space(set)
        );
    }

    #[test]
    fn points_errors() {
        assert_eq!(
            parse_points("p=7 dim=2\n7,0\n"),
            Err(Error::OutOfRange { value: 7, p: 7 })
        );
        assert_eq!(parse_points("p=9 dim=2\n"), Err(Error::NotPrime(9)));
        assert!(matches!(
            parse_points("p=7 dim=2\n1,2,3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("p=7 dim=4\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("p=7 dim=2\n-1,0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_points(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn matrices_roundtrip() {
        let ctx = FieldCtx::new(5).unwrap();
        let MatrixFile::Sl2(set) = parse_matrices("p=5 group=sl2\n1,1,0,1\n2,0,0,3\n").unwrap()
        else {
            panic!("expected sl2")
        };
        assert_eq!(set.len(), 2);
        let MatrixFile::Sl2(again) = parse_matrices(&format_sl2(&set)).unwrap() else {
            panic!("expected sl2")
        };
        assert_eq!(again.elems(), set.elems());
        assert_eq!(
            parse_matrices("p=5 group=sl2\n1,1,1,1\n").unwrap_err(),
            Error::Determinant(0)
        );
        for conv in [Convention::Matrix, Convention::Symmetric] {
            let set = MatrixSet::new(&ctx, [H1Elem::new(&ctx, 1, 2, 3, conv)]);
            let MatrixFile::H1(back, c) = parse_matrices(&format_h1(&set, conv)).unwrap() else {
                panic!("expected h1")
            };
            assert_eq!(c, conv);
            assert_eq!(back.elems(), set.elems());
        }
        assert!(matches!(
            parse_matrices("p=5 group=gl2\n"),
            Err(Error::Parse { .. })
        ));
    }
}
