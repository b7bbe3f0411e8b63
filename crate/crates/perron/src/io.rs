//! Plain-text sparse tensor files.
//!
//! Format: an optional run of `#` comment lines, a header
//! `tensor <order> <dim> <nnz>`, then `nnz` lines each holding `order`
//! 1-based indices and a decimal value. Unlisted entries are zero. Values
//! are written with 17 significant digits (round-half-even), so files
//! round-trip `f64` entries exactly.

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::error::{PerronError, Result};
use crate::tensor::DenseTensor;

/// Malformed tensor file, with the 1-based line the problem was found on.
#[derive(Debug, Error)]
#[error("parse error at line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> PerronError {
    PerronError::Parse(ParseError {
        line,
        message: message.into(),
    })
}

pub fn parse_tensor_file(path: &Path) -> Result<DenseTensor> {
    let text = fs::read_to_string(path)?;
    parse_tensor_str(&text)
}

pub fn parse_tensor_str(text: &str) -> Result<DenseTensor> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, "missing header `tensor <order> <dim> <nnz>`"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "tensor" {
        return Err(err(
            header_line,
            format!("expected header `tensor <order> <dim> <nnz>`, got `{header}`"),
        ));
    }
    let order: usize = fields[1]
        .parse()
        .map_err(|_| err(header_line, format!("bad order `{}`", fields[1])))?;
    let dim: usize = fields[2]
        .parse()
        .map_err(|_| err(header_line, format!("bad dimension `{}`", fields[2])))?;
    let nnz: usize = fields[3]
        .parse()
        .map_err(|_| err(header_line, format!("bad entry count `{}`", fields[3])))?;

    let mut tensor = DenseTensor::zeros(order, dim)
        .map_err(|e| err(header_line, format!("invalid shape: {e}")))?;
    let mut seen = vec![false; tensor.entries().len()];

    let mut count = 0usize;
    for (line_no, line) in lines {
        if count == nnz {
            return Err(err(
                line_no,
                format!("expected {nnz} entries but found more data"),
            ));
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != order + 1 {
            return Err(err(
                line_no,
                format!("expected {order} indices and a value, got {} fields", fields.len()),
            ));
        }
        let mut idx = Vec::with_capacity(order);
        for f in &fields[..order] {
            let i: usize = f
                .parse()
                .map_err(|_| err(line_no, format!("bad index `{f}`")))?;
            if i < 1 || i > dim {
                return Err(err(
                    line_no,
                    format!("index {i} out of range 1..={dim}"),
                ));
            }
            idx.push(i - 1);
        }
        let value: f64 = fields[order]
            .parse()
            .map_err(|_| err(line_no, format!("bad value `{}`", fields[order])))?;
        if !value.is_finite() {
            return Err(err(line_no, format!("non-finite value `{}`", fields[order])));
        }
        let lin = tensor.linear_index(&idx);
        if seen[lin] {
            return Err(err(line_no, "duplicate index tuple"));
        }
        seen[lin] = true;
        tensor.set(&idx, value);
        count += 1;
    }
    if count != nnz {
        return Err(err(0, format!("header promises {nnz} entries, file has {count}")));
    }
    Ok(tensor)
}

/// Serializes the nonzero entries in row-major order; `comments` become
/// leading `#` lines.
pub fn write_tensor_string(tensor: &DenseTensor, comments: &[String]) -> String {
    let n = tensor.dim();
    let m = tensor.order();
    let mut body = String::new();
    let mut nnz = 0usize;
    let mut idx = vec![0usize; m];
    for &v in tensor.entries() {
        if v != 0.0 {
            nnz += 1;
            for i in &idx {
                body.push_str(&format!("{} ", i + 1));
            }
            // 17 significant digits: exact f64 round-trip
            body.push_str(&format!("{v:.16e}\n"));
        }
        advance(&mut idx, n);
    }
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("tensor {m} {n} {nnz}\n"));
    out.push_str(&body);
    out
}

pub fn write_tensor_file(tensor: &DenseTensor, path: &Path, comments: &[String]) -> Result<()> {
    fs::write(path, write_tensor_string(tensor, comments))?;
    Ok(())
}

fn advance(idx: &mut [usize], n: usize) {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return;
        }
        *d = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::cpz_tensor;

    #[test]
    fn parses_cpz_file() {
        let text = "tensor 3 3 4\n1 2 2 1\n1 3 3 2\n2 1 1 3\n3 1 1 4\n";
        let t = parse_tensor_str(text).unwrap();
        assert_eq!(t, cpz_tensor());
    }

    #[test]
    fn parses_zero_tensor_header_only() {
        let t = parse_tensor_str("tensor 3 2 0\n").unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.dim(), 2);
        assert!(t.entries().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# a comment\n\ntensor 2 2 1\n# another\n2 2 5.0\n";
        let t = parse_tensor_str(text).unwrap();
        assert_eq!(t.get(&[1, 1]), 5.0);
    }

    #[test]
    fn rejects_out_of_range_index() {
        let text = "tensor 3 3 1\n1 4 1 2.0\n";
        let e = parse_tensor_str(text).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(e.to_string().contains("out of range"), "{e}");
    }

    #[test]
    fn rejects_duplicate_tuple() {
        let text = "tensor 2 2 2\n1 1 1.0\n1 1 2.0\n";
        let e = parse_tensor_str(text).unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{e}");
    }

    #[test]
    fn rejects_bad_header_and_counts() {
        assert!(parse_tensor_str("tensr 3 3 0\n").is_err());
        assert!(parse_tensor_str("tensor 3 3\n").is_err());
        // fewer entries than promised
        assert!(parse_tensor_str("tensor 2 2 2\n1 1 1.0\n").is_err());
        // more entries than promised
        assert!(parse_tensor_str("tensor 2 2 1\n1 1 1.0\n2 2 1.0\n").is_err());
    }

    #[test]
    fn rejects_non_finite_value() {
        assert!(parse_tensor_str("tensor 2 2 1\n1 1 inf\n").is_err());
        assert!(parse_tensor_str("tensor 2 2 1\n1 1 nan\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        let mut t = DenseTensor::zeros(3, 3).unwrap();
        t.set(&[0, 1, 2], 0.1 + 0.2); // not exactly representable as short decimal
        t.set(&[2, 2, 2], 1.0 / 3.0);
        t.set(&[1, 0, 1], -4.625);
        let text = write_tensor_string(&t, &["generated for a round-trip test".into()]);
        let back = parse_tensor_str(&text).unwrap();
        assert_eq!(t, back);
    }
}
