//! Plain-text formats shared by the library and the CLI.
//!
//! * Gram matrix files: first line the rank `n`, then `n` lines of `n`
//!   space-separated integers. Blank lines and `#` comments are ignored.
//! * Inline matrices: `[a b; c d]`, rows separated by `;`.

use crate::error::{Error, Result};
use crate::lattice::GramMatrix;

fn parse_row(line: &str) -> Result<Vec<i64>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad integer `{t}`")))
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
}

/// `[2 1; 1 8]` (the brackets are optional).
pub fn parse_inline_matrix(s: &str) -> Result<Vec<Vec<i64>>> {
    let body = s.trim();
    let body = body.strip_prefix('[').unwrap_or(body);
    let body = body.strip_suffix(']').unwrap_or(body);
    let rows = body
        .split(';')
        .map(|r| parse_row(r.trim()))
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() || rows.iter().any(|r| r.is_empty()) {
        return Err(Error::Parse(format!("empty matrix row in `{s}`")));
    }
    Ok(rows)
}

pub fn parse_gram_text(text: &str) -> Result<GramMatrix> {
    let mut lines = content_lines(text);
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("missing rank line".into()))?
        .parse()
        .map_err(|_| Error::Parse("rank line must be a positive integer".into()))?;
    if n == 0 {
        return Err(Error::Parse("rank must be positive".into()));
    }
    let rows = lines.map(parse_row).collect::<Result<Vec<_>>>()?;
    if rows.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rows.len(),
        });
    }
    GramMatrix::new(rows)
}

pub fn format_gram_text(g: &GramMatrix) -> String {
    let mut out = format!("{}\n", g.rank());
    for row in g.rows() {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// A Gram matrix given either inline (`[..]`) or as a path to a matrix file.
pub fn read_gram_arg(arg: &str) -> Result<GramMatrix> {
    let trimmed = arg.trim();
    if trimmed.starts_with('[') {
        return GramMatrix::new(parse_inline_matrix(trimmed)?);
    }
    let text = std::fs::read_to_string(trimmed)
        .map_err(|e| Error::Parse(format!("cannot read `{trimmed}`: {e}")))?;
    parse_gram_text(&text)
}
