//! Plain-text matrix and vector files, and the constraint-set grammar used on
//! the command line.
//!
//! Matrix: first line `rows cols`, then `rows` lines of `cols` numbers.
//! Vector: first line `n`, second line `n` numbers. Blank trailing lines are
//! allowed; anything else after the data is rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Result, SfpError};
use crate::linops::DenseMatrix;
use crate::sets::ClosedConvexSet;

fn numbers(line: &str, line_no: usize) -> Result<Vec<f64>> {
    line.split_whitespace()
        .map(|tok| {
            let v: f64 = tok
                .parse()
                .map_err(|_| SfpError::parse(line_no, format!("'{tok}' is not a number")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(SfpError::parse(line_no, format!("'{tok}' is not finite")))
            }
        })
        .collect()
}

fn header(line: Option<&str>, fields: usize) -> Result<Vec<usize>> {
    let line = line.ok_or_else(|| SfpError::parse(1, "missing header"))?;
    let dims: Vec<usize> = line
        .split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| SfpError::parse(1, format!("'{t}' is not a dimension")))
        })
        .collect::<Result<_>>()?;
    if dims.len() != fields {
        return Err(SfpError::parse(
            1,
            format!("header must hold {fields} dimension(s), found {}", dims.len()),
        ));
    }
    if dims.contains(&0) {
        return Err(SfpError::parse(1, "dimensions must be positive"));
    }
    Ok(dims)
}

fn trailing_blank<'a>(mut rest: impl Iterator<Item = (usize, &'a str)>) -> Result<()> {
    match rest.find(|(_, l)| !l.trim().is_empty()) {
        Some((idx, _)) => Err(SfpError::parse(idx + 1, "unexpected data after the last row")),
        None => Ok(()),
    }
}

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate();
    let dims = header(lines.next().map(|(_, l)| l), 2)?;
    let (rows, cols) = (dims[0], dims[1]);
    let total = rows
        .checked_mul(cols)
        .filter(|t| *t <= 1 << 28)
        .ok_or_else(|| SfpError::parse(1, "matrix too large"))?;
    let mut values = Vec::with_capacity(total.min(1 << 20));
    for r in 0..rows {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| SfpError::parse(r + 2, format!("expected {rows} rows, found {r}")))?;
        let row = numbers(line, idx + 1)?;
        if row.len() != cols {
            return Err(SfpError::parse(
                idx + 1,
                format!("expected {cols} entries, found {}", row.len()),
            ));
        }
        values.extend(row);
    }
    trailing_blank(lines)?;
    DenseMatrix::new(rows, cols, values)
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines().enumerate();
    let n = header(lines.next().map(|(_, l)| l), 1)?[0];
    let (idx, line) = lines
        .next()
        .ok_or_else(|| SfpError::parse(2, "missing vector entries"))?;
    let v = numbers(line, idx + 1)?;
    if v.len() != n {
        return Err(SfpError::parse(idx + 1, format!("expected {n} entries, found {}", v.len())));
    }
    trailing_blank(lines)?;
    Ok(v)
}

/// Round-trip exact rendering (shortest representation of each entry).
pub fn write_matrix(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        push_row(&mut out, a.row(i));
    }
    out
}

pub fn write_vector(v: &[f64]) -> String {
    let mut out = format!("{}\n", v.len());
    push_row(&mut out, v);
    out
}

fn push_row(out: &mut String, row: &[f64]) {
    for (j, x) in row.iter().enumerate() {
        if j > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x}");
    }
    out.push('\n');
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

/// A parsed set description whose vector files have not been read yet.
///
/// Grammar: `fullspace:n`, `orthant:n`, `singleton:<file>`,
/// `ball:<file>:<eps>`, `box:<lower file>:<upper file>`, `l1ball:<t>:<n>`.
/// File names may contain `:` only for `singleton` and `ball`.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    FullSpace(usize),
    Orthant(usize),
    Singleton(PathBuf),
    Ball(PathBuf, f64),
    Box(PathBuf, PathBuf),
    L1Ball(f64, usize),
}

impl SetSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |msg: String| SfpError::Config(format!("set '{s}': {msg}"));
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected <kind>:<arguments>".into()))?;
        let dim = |t: &str| -> Result<usize> {
            match t.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad(format!("'{t}' is not a positive dimension"))),
            }
        };
        let real = |t: &str| -> Result<f64> {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("'{t}' is not a finite number")))
        };
        let file = |t: &str| -> Result<PathBuf> {
            if t.is_empty() {
                Err(bad("empty file name".into()))
            } else {
                Ok(PathBuf::from(t))
            }
        };
        match kind {
            "fullspace" => Ok(SetSpec::FullSpace(dim(rest)?)),
            "orthant" => Ok(SetSpec::Orthant(dim(rest)?)),
            "singleton" => Ok(SetSpec::Singleton(file(rest)?)),
            "ball" => {
                let (f, eps) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| bad("expected ball:<file>:<eps>".into()))?;
                let eps = real(eps)?;
                if eps < 0.0 {
                    return Err(bad("radius must be >= 0".into()));
                }
                Ok(SetSpec::Ball(file(f)?, eps))
            }
            "box" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if parts.len() != 2 {
                    return Err(bad("expected box:<lower file>:<upper file>".into()));
                }
                Ok(SetSpec::Box(file(parts[0])?, file(parts[1])?))
            }
            "l1ball" => {
                let (t, n) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("expected l1ball:<t>:<n>".into()))?;
                let t = real(t)?;
                if t <= 0.0 {
                    return Err(bad("level must be > 0".into()));
                }
                Ok(SetSpec::L1Ball(t, dim(n)?))
            }
            other => Err(bad(format!(
                "unknown kind '{other}' (expected fullspace, orthant, singleton, ball, box or l1ball)"
            ))),
        }
    }

    /// Builds the set, loading vectors through `load`.
    pub fn resolve_with(&self, load: impl Fn(&Path) -> Result<Vec<f64>>) -> Result<ClosedConvexSet> {
        match self {
            SetSpec::FullSpace(n) => Ok(ClosedConvexSet::full_space(*n)),
            SetSpec::Orthant(n) => Ok(ClosedConvexSet::nonnegative_orthant(*n)),
            SetSpec::Singleton(f) => ClosedConvexSet::singleton(load(f)?),
            SetSpec::Ball(f, eps) => ClosedConvexSet::ball(load(f)?, *eps),
            SetSpec::Box(lo, hi) => ClosedConvexSet::boxed(load(lo)?, load(hi)?),
            SetSpec::L1Ball(t, n) => ClosedConvexSet::l1_ball(*t, *n),
        }
    }

    pub fn resolve(&self) -> Result<ClosedConvexSet> {
        self.resolve_with(read_vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -2.5, 0.1], vec![3e-17, 4.0, 1.0 / 3.0]]).unwrap();
        let text = write_matrix(&a);
        assert!(text.starts_with("2 3\n"));
        assert_eq!(parse_matrix(&text).unwrap(), a);
        assert_eq!(parse_matrix("1 2\n 5   6 \n\n").unwrap().values(), &[5.0, 6.0]);
    }

    #[test]
    fn matrix_errors_carry_line_numbers() {
        let line_of = |text: &str| match parse_matrix(text) {
            Err(SfpError::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line_of(""), 1);
        assert_eq!(line_of("2"), 1);
        assert_eq!(line_of("0 3\n"), 1);
        assert_eq!(line_of("2 2\n1 2\n3\n"), 3);
        assert_eq!(line_of("2 2\n1 2\n3 x\n"), 3);
        assert_eq!(line_of("1 1\n1\n2\n"), 3);
        assert_eq!(line_of("1 1\nNaN\n"), 2);
        assert_eq!(line_of("2 2\n1 2\n"), 3);
        assert!(parse_matrix("100000 100000\n").is_err());
    }

    #[test]
    fn vector_round_trip_and_errors() {
        let v = vec![0.5, -1.0, 2.0e10];
        assert_eq!(parse_vector(&write_vector(&v)).unwrap(), v);
        assert!(parse_vector("3\n1 2\n").is_err());
        assert!(parse_vector("1\n").is_err());
        assert!(parse_vector("1\n1\n1\n").is_err());
        assert!(parse_vector("-1\n1\n").is_err());
        assert!(parse_vector("2\n1 inf\n").is_err());
    }

    #[test]
    fn set_grammar() {
        assert_eq!(SetSpec::parse("fullspace:3").unwrap(), SetSpec::FullSpace(3));
        assert_eq!(SetSpec::parse("orthant:2").unwrap(), SetSpec::Orthant(2));
        assert_eq!(SetSpec::parse("singleton:b.vec").unwrap(), SetSpec::Singleton("b.vec".into()));
        assert_eq!(SetSpec::parse("ball:dir:c.vec:0.5").unwrap(), SetSpec::Ball("dir:c.vec".into(), 0.5));
        assert_eq!(SetSpec::parse("box:l.vec:u.vec").unwrap(), SetSpec::Box("l.vec".into(), "u.vec".into()));
        assert_eq!(SetSpec::parse("l1ball:2.5:4").unwrap(), SetSpec::L1Ball(2.5, 4));
        for bad in [
            "", "fullspace", "fullspace:0", "orthant:x", "singleton:", "ball:c.vec", "ball:c.vec:-1",
            "box:l.vec", "box:a:b:c", "l1ball:0:3", "l1ball:1", "cone:3", "ball:c.vec:nan",
        ] {
            assert!(SetSpec::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn resolution_uses_loader() {
        let load = |p: &Path| -> Result<Vec<f64>> {
            match p.to_str() {
                Some("lo") => Ok(vec![0.0, -1.0]),
                Some("hi") => Ok(vec![1.0, 1.0]),
                _ => Err(SfpError::Config("missing".into())),
            }
        };
        let c = SetSpec::parse("box:lo:hi").unwrap().resolve_with(load).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(SetSpec::parse("box:hi:lo").unwrap().resolve_with(load).is_err());
        assert!(SetSpec::parse("singleton:zz").unwrap().resolve_with(load).is_err());
    }
}
