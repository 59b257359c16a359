//! Plain-text edge-list format.
//!
//! ```text
//! # comment
//! n=3
//! 0 1 1/2
//! 0 2 1/2
//! ...
//! ```
//!
//! Node ids are 0-based. Weights are written as `num/den` in lowest terms;
//! a bare integer is accepted on input.

use super::InfluenceNetwork;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

impl<W: Scalar> InfluenceNetwork<W> {
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut header_line = 0;
        let mut rows: Vec<Vec<(usize, W)>> = Vec::new();
        // Last line that touched each row, for row-sum diagnostics.
        let mut last_line: Vec<usize> = Vec::new();
        let mut seen = std::collections::HashMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some(size) = n else {
                let value = line
                    .strip_prefix("n=")
                    .or_else(|| line.strip_prefix("n ="))
                    .ok_or_else(|| parse_err(line_no, "expected header `n=<int>`"))?;
                let size: usize = value
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node count `{}`", value.trim())))?;
                if size == 0 {
                    return Err(parse_err(line_no, "node count must be positive"));
                }
                n = Some(size);
                header_line = line_no;
                rows = vec![Vec::new(); size];
                last_line = vec![line_no; size];
                continue;
            };

            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(parse_err(line_no, "expected `<src> <dst> <num>/<den>`"));
            }
            let src = parse_id(fields[0], line_no, size)?;
            let dst = parse_id(fields[1], line_no, size)?;
            let (num, den) = parse_ratio(fields[2], line_no)?;
            if num <= 0 {
                return Err(Error::NonPositiveWeight {
                    weight: fields[2].to_string(),
                    line: Some(line_no),
                });
            }
            if seen.insert((src, dst), line_no).is_some() {
                return Err(Error::DuplicateEdge { src, dst, line: Some(line_no) });
            }
            rows[src].push((dst, W::from_ratio(num, den)));
            last_line[src] = line_no;
        }

        if n.is_none() {
            return Err(parse_err(header_line.max(1), "missing header `n=<int>`"));
        }
        InfluenceNetwork::from_rows(rows).map_err(|e| match &e {
            Error::RowSum { row, .. } => {
                let at = last_line[*row];
                e.at_line(at)
            }
            _ => e,
        })
    }

    /// Serializes to the edge-list format. Parsing the output yields an equal network.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for (i, j, w) in self.edges() {
            out.push_str(&format!("{i} {j} {}\n", w.to_ratio_string()));
        }
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_id(tok: &str, line: usize, n: usize) -> Result<usize> {
    let id: usize = tok
        .parse()
        .map_err(|_| parse_err(line, format!("bad node id `{tok}`")))?;
    if id >= n {
        return Err(Error::NodeOutOfRange { id, n, line: Some(line) });
    }
    Ok(id)
}

fn parse_ratio(tok: &str, line: usize) -> Result<(i64, i64)> {
    let bad = || parse_err(line, format!("bad weight `{tok}`"));
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (a.trim().parse::<i64>(), b.trim().parse::<i64>()),
        None => (tok.parse::<i64>(), Ok(1)),
    };
    let (num, den) = (num.map_err(|_| bad())?, den.map_err(|_| bad())?);
    if den == 0 {
        return Err(parse_err(line, format!("zero denominator in `{tok}`")));
    }
    // Normalize the sign onto the numerator.
    Ok(if den < 0 { (-num, -den) } else { (num, den) })
}
