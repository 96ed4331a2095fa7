//! Plain-text matrix blocks for fixtures.
//!
//! ```text
//! # comment
//! real 2
//! 1.5 0
//! 0 0.6666666666666666
//!
//! padic3 2
//! 9 1/3
//! 0 -2/5
//! ```
//!
//! Each block is a header `<field> <d>` followed by `d` rows of `d`
//! entries. Real entries are written with the shortest representation
//! that round-trips; p-adic entries as `num/den` (or `num`).
//! `padic:3` is accepted as a header spelling of `padic3`.

use std::fmt::Write as _;

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{parse_rational, FieldSpec};

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    if s == "real" {
        return Ok(FieldSpec::Real);
    }
    let rest = s
        .strip_prefix("padic")
        .ok_or_else(|| Error::Parse(format!("unknown field `{s}`")))?;
    let rest = rest.strip_prefix(':').unwrap_or(rest);
    let p = rest
        .parse::<u64>()
        .map_err(|_| Error::Parse(format!("bad prime in `{s}`")))?;
    FieldSpec::padic(p)
}

pub fn write_matrix(out: &mut String, g: &Matrix) {
    let d = g.dim();
    let _ = writeln!(out, "{} {d}", g.field());
    for i in 0..d {
        let row: Vec<String> = (0..d)
            .map(|j| match (g.as_real_slice(), g.as_rational_slice()) {
                (Some(v), _) => format!("{:?}", v[i * d + j]),
                (_, Some(v)) => {
                    let q = &v[i * d + j];
                    if q.is_integer() {
                        q.numer().to_string()
                    } else {
                        format!("{}/{}", q.numer(), q.denom())
                    }
                }
                _ => unreachable!(),
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

pub fn to_text(matrices: &[Matrix]) -> String {
    let mut out = String::new();
    for (i, g) in matrices.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        write_matrix(&mut out, g);
    }
    out
}

pub fn parse_matrices(text: &str) -> Result<Vec<Matrix>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut out = Vec::new();
    while let Some((lineno, header)) = lines.next() {
        let mut parts = header.split_whitespace();
        let (Some(f), Some(d), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!(
                "line {lineno}: expected `<field> <d>`"
            )));
        };
        let field = parse_field(f)?;
        let d: usize = d
            .parse()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad dimension `{d}`")))?;
        if d == 0 {
            return Err(Error::Parse(format!(
                "line {lineno}: dimension must be positive"
            )));
        }
        let mut cells = Vec::with_capacity(d * d);
        for _ in 0..d {
            let (ln, row) = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("block at line {lineno}: missing rows")))?;
            let row: Vec<&str> = row.split_whitespace().collect();
            if row.len() != d {
                return Err(Error::Parse(format!(
                    "line {ln}: expected {d} entries, got {}",
                    row.len()
                )));
            }
            cells.extend(row.into_iter().map(|c| (ln, c)));
        }
        let g = match field {
            FieldSpec::Real => Matrix::real(
                d,
                cells
                    .iter()
                    .map(|(ln, c)| {
                        c.parse::<f64>()
                            .map_err(|_| Error::Parse(format!("line {ln}: bad real `{c}`")))
                    })
                    .collect::<Result<_>>()?,
            )?,
            FieldSpec::Padic { .. } => Matrix::rational(
                field,
                d,
                cells
                    .iter()
                    .map(|(_, c)| parse_rational(c))
                    .collect::<Result<_>>()?,
            )?,
        };
        out.push(g);
    }
    Ok(out)
}
